// Compiled search kernels and work-stealing pool.
//
// Mirrors the Python engines step for step: same frame layouts, same steal
// rules and the same edge-visit accounting, so counters agree exactly with
// the pure-Python backend on any single-threaded run.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <utility>
#include <vector>

namespace cn {

using i64 = int64_t;
constexpr i64 INF = std::numeric_limits<i64>::max();
constexpr i64 NONE = std::numeric_limits<i64>::min();

enum Algo : int { TIERNAN = 0, JOHNSON = 1, READ_TARJAN = 2, TEMPORAL = 3 };

struct Graph {
    i64 n = 0, m = 0;
    const i64 *src, *dst, *ts;           // by edge id
    const i64 *off;                      // out CSR offsets (n + 1)
    const i64 *aeid, *adst, *ats;        // out adjacency, edge-id order

    std::pair<i64, i64> slice(i64 v, i64 lo, i64 hi) const {
        const i64* b = aeid + off[v];
        const i64* e = aeid + off[v + 1];
        return {std::lower_bound(b, e, lo) - aeid, std::lower_bound(b, e, hi) - aeid};
    }
};

struct Options {
    int algo = JOHNSON;
    i64 delta = INF;
    bool allow_self_loops = false;
    i64 cutoff = 0;
    bool strict = true, closing_times = true, bundles = true, cycle_union = true, weighted = false;
    bool collect = false;
};

struct Stats {
    i64 edge_visits = 0, preproc_visits = 0, tasks_executed = 0, tasks_stolen = 0;
    i64 copy_ops = 0, copied_words = 0, max_copied_words = 0, busy_ns = 0;
    i64 unblock_propagations = 0, maximal_paths = 0, anchors_searched = 0, anchors_skipped = 0;
    void record_copy(i64 w) {
        ++copy_ops;
        copied_words += w;
        if (w > max_copied_words) max_copied_words = w;
    }
};

// Cycles are stored flat: k, k vertices, k edge ids.
struct Sink {
    bool collect = false;
    i64 count = 0;
    std::vector<i64> data;
    void emit(const std::vector<i64>& verts, const std::vector<i64>& eids, i64 last) {
        ++count;
        if (!collect) return;
        data.push_back((i64)verts.size());
        data.insert(data.end(), verts.begin(), verts.end());
        data.insert(data.end(), eids.begin(), eids.end());
        data.push_back(last);
    }
    void emit_raw(const std::vector<i64>& verts, const std::vector<i64>& eids) {
        ++count;
        if (!collect) return;
        data.push_back((i64)verts.size());
        data.insert(data.end(), verts.begin(), verts.end());
        data.insert(data.end(), eids.begin(), eids.end());
    }
};

struct Anchor {
    i64 eid = -1, v0 = -1, v1 = -1, lo = 0, hi = 0, t0 = 0;
};

using Ext = std::vector<std::pair<i64, i64>>;  // (edge id, vertex)

struct JFrame {  // Tiernan and Johnson; `found` doubles as Tiernan's "extended"
    i64 v, cur, end, start, depth;
    bool found, stolen;
};

struct RFrame {
    i64 cur, end, skip;
    std::shared_ptr<const Ext> ext;
    i64 pos, base_len, log_mark, x;
};

struct TGroups {
    std::vector<i64> w, start, len, pos;  // hop g = pos[start[g] .. start[g]+len[g])
};

struct TFrame {
    i64 x;
    std::shared_ptr<const TGroups> groups;
    i64 gi;
    bool found, stolen;
    i64 depth, arrival, lastp, i0, i1;
};

struct Task {
    i64 frame = -1, path_len = 0, log_mark = 0;
};

// One worker's reusable search state.  Per-vertex arrays are sized n once;
// `dirty` records which entries differ from their defaults so reset and
// copy cost is proportional to what the search touched.
struct State {
    Anchor a;
    std::vector<i64> pv, pe;
    std::vector<uint8_t> member, blk, isdirty;
    std::vector<std::vector<i64>> blist;
    std::vector<i64> dirty, blk_log;
    std::vector<JFrame> jf;
    std::vector<RFrame> rf;
    std::vector<TFrame> tf;
    std::vector<i64> ct;
    std::vector<std::vector<std::pair<i64, i64>>> waiters;
    std::vector<std::vector<i64>> hops;
    std::vector<uint8_t> inunion;
    std::vector<i64> union_list;
    bool has_union = false;
    i64 generation = 0;
    // scratch (not part of the logical state)
    std::vector<i64> s_a, s_b, s_touched, s_queue;
    std::vector<uint8_t> s_flag;

    explicit State(i64 n)
        : member(n), blk(n), isdirty(n), blist(n), ct(n, INF), waiters(n), inunion(n),
          s_a(n, NONE), s_b(n, NONE), s_flag(n) {}

    void mark(i64 v) {
        if (!isdirty[v]) {
            isdirty[v] = 1;
            dirty.push_back(v);
        }
    }
    void reset() {
        for (i64 v : dirty) {
            blk[v] = 0;
            blist[v].clear();
            ct[v] = INF;
            waiters[v].clear();
            isdirty[v] = 0;
        }
        dirty.clear();
        for (i64 v : pv) member[v] = 0;
        pv.clear();
        pe.clear();
        for (i64 v : union_list) inunion[v] = 0;
        union_list.clear();
        has_union = false;
        blk_log.clear();
        jf.clear();
        rf.clear();
        tf.clear();
        hops.clear();
    }
    bool has_frames(int algo) const {
        if (algo == READ_TARJAN) return !rf.empty();
        if (algo == TEMPORAL) return !tf.empty();
        return !jf.empty();
    }
    void push_path(i64 v, i64 via) {
        if (via >= 0) pe.push_back(via);
        pv.push_back(v);
        member[v] = 1;
    }
    void pop_path() {
        member[pv.back()] = 0;
        pv.pop_back();
        if (!pe.empty()) pe.pop_back();
    }
    void truncate(i64 len) {
        while ((i64)pv.size() > len) {
            member[pv.back()] = 0;
            pv.pop_back();
        }
        i64 el = std::max<i64>(len - 1, 0);
        if ((i64)pe.size() > el) pe.resize(el);
    }
    void copy_path(const State& o, i64 len) {
        for (i64 k = 0; k < len; ++k) push_path(o.pv[k], k ? o.pe[k - 1] : -1);
    }
    void copy_union(const State& o) {
        has_union = o.has_union;
        for (i64 v : o.union_list) {
            inunion[v] = 1;
            union_list.push_back(v);
        }
    }
    void set_blk(i64 v) {
        blk[v] = 1;
        mark(v);
    }
};

class Engine {
   public:
    const Graph& G;
    Options O;
    explicit Engine(const Graph& g, const Options& o) : G(g), O(o) {}

    i64 key(i64 d) const { return O.strict ? d : d + 1; }

    Anchor anchor_for(i64 eid) const {
        Anchor a;
        a.eid = eid;
        a.v0 = G.src[eid];
        a.v1 = G.dst[eid];
        a.lo = eid + 1;
        a.t0 = G.ts[eid];
        a.hi = G.m;
        if (O.delta != INF) {
            i64 bound = G.ts[eid] > INF - O.delta ? INF : G.ts[eid] + O.delta;
            a.hi = std::upper_bound(G.ts, G.ts + G.m, bound) - G.ts;
        }
        return a;
    }

    // ---- anchor preparation --------------------------------------------
    bool reaches(State& s, Stats& S) {
        const Anchor& a = s.a;
        auto& seen = s.s_flag;
        auto& q = s.s_queue;
        q.clear();
        q.push_back(a.v1);
        seen[a.v1] = 1;
        i64 visits = 0;
        bool found = false;
        for (size_t qi = 0; qi < q.size() && !found; ++qi) {
            i64 u = q[qi];
            auto [i, j] = G.slice(u, a.lo, a.hi);
            for (i64 k = i; k < j; ++k) {
                ++visits;
                i64 w = G.adst[k];
                if (w == a.v0) {
                    found = true;
                    break;
                }
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
            }
        }
        for (i64 v : q) seen[v] = 0;
        S.preproc_visits += visits;
        return found;
    }

    // Earliest-arrival sweep; s_a holds arrival times, s_touched the keys.
    bool forward(State& s, i64 source, i64 t0, i64 lo, i64 hi, i64 stop, i64& visits) {
        auto& E = s.s_a;
        auto& touched = s.s_touched;
        E[source] = t0;
        touched.push_back(source);
        bool reached = false;
        i64 i = lo;
        while (i < hi) {
            i64 t = G.ts[i];
            i64 j = i;
            while (j < hi && G.ts[j] == t) ++j;
            bool again = true;
            while (again) {
                again = false;
                for (i64 e = i; e < j; ++e) {
                    ++visits;
                    i64 u = G.src[e];
                    i64 au = E[u];
                    if (au == NONE || u == stop || (O.strict ? au >= t : au > t)) continue;
                    i64 w = G.dst[e];
                    if (w == stop) {
                        reached = true;
                        continue;
                    }
                    if (E[w] == NONE) {
                        E[w] = t;
                        touched.push_back(w);
                        again = !O.strict;
                    }
                }
            }
            i = j;
        }
        return reached;
    }

    void backward(State& s, i64 target, i64 lo, i64 hi, i64 stop, i64& visits,
                  std::vector<i64>& touched) {
        auto& L = s.s_b;
        L[target] = INF;
        touched.push_back(target);
        i64 j = hi;
        while (j > lo) {
            i64 t = G.ts[j - 1];
            i64 i = j;
            while (i > lo && G.ts[i - 1] == t) --i;
            bool again = true;
            while (again) {
                again = false;
                for (i64 e = j - 1; e >= i; --e) {
                    ++visits;
                    i64 w = G.dst[e];
                    i64 b = L[w];
                    i64 u = G.src[e];
                    if (b == NONE || u == target || w == stop || (O.strict ? t >= b : t > b)) continue;
                    if (L[u] == NONE) {
                        L[u] = t;
                        touched.push_back(u);
                        again = !O.strict;
                    }
                }
            }
            j = i;
        }
    }

    bool compute_union(State& s, Stats& S) {
        const Anchor& a = s.a;
        i64 visits = 0;
        s.s_touched.clear();
        bool reached = forward(s, a.v1, a.t0, a.lo, a.hi, a.v0, visits);
        s.has_union = true;
        for (i64 v : {a.v0, a.v1}) {
            if (!s.inunion[v]) {
                s.inunion[v] = 1;
                s.union_list.push_back(v);
            }
        }
        std::vector<i64> btouched;
        if (reached) {
            backward(s, a.v0, a.lo, a.hi, a.v1, visits, btouched);
            for (i64 v : s.s_touched) {
                i64 ea = s.s_a[v], lb = s.s_b[v];
                if (lb != NONE && (O.strict ? ea < lb : ea <= lb) && !s.inunion[v]) {
                    s.inunion[v] = 1;
                    s.union_list.push_back(v);
                }
            }
        }
        for (i64 v : s.s_touched) s.s_a[v] = NONE;
        for (i64 v : btouched) s.s_b[v] = NONE;
        s.s_touched.clear();
        S.preproc_visits += visits;
        return reached;
    }

    // Fills s.a; false when no cycle can start at `eid`.
    bool prepare(State& s, i64 eid, Stats& S, Sink& K) {
        s.a = anchor_for(eid);
        const Anchor& a = s.a;
        if (a.v0 == a.v1) {
            if (O.allow_self_loops) {
                std::vector<i64> v{a.v0}, e{eid};
                K.emit_raw(v, e);
            }
            return false;
        }
        if (O.algo == TEMPORAL && O.cycle_union) return compute_union(s, S);
        return reaches(s, S);
    }

    void emit(State& s, Sink& K, i64 last) { K.emit(s.pv, s.pe, last); }

    // ---- Tiernan / Johnson ---------------------------------------------
    void j_push(State& s, i64 w, i64 via, Stats& S) {
        s.push_path(w, via);
        if (O.algo == JOHNSON) s.set_blk(w);
        ++S.tasks_executed;
        auto [i, j] = G.slice(w, s.a.lo, s.a.hi);
        s.jf.push_back({w, i, j, i, (i64)s.pv.size(), false, false});
    }

    i64 unblock(State& s, i64 v) {
        if (!s.blk[v]) return 0;
        s.blk[v] = 0;
        std::vector<i64> stack{v};
        i64 n = 1;
        while (!stack.empty()) {
            i64 u = stack.back();
            stack.pop_back();
            auto parked = std::move(s.blist[u]);
            s.blist[u].clear();
            for (i64 w : parked) {
                if (s.blk[w]) {
                    s.blk[w] = 0;
                    stack.push_back(w);
                    ++n;
                }
            }
        }
        return n;
    }

    bool j_step(State& s, Stats& S, Sink& K) {
        JFrame& f = s.jf.back();
        if (f.cur < f.end) {
            i64 i = f.cur++;
            ++S.edge_visits;
            i64 w = G.adst[i];
            if (w == s.a.v0) {
                if (O.algo == JOHNSON) f.found = true;
                emit(s, K, G.aeid[i]);
            } else if (O.algo == JOHNSON ? !s.blk[w] : !s.member[w]) {
                if (O.algo == TIERNAN) f.found = true;
                j_push(s, w, G.aeid[i], S);
            }
            return true;
        }
        if (O.algo == TIERNAN) {
            if (!f.found) ++S.maximal_paths;
            s.jf.pop_back();
            s.pop_path();
            return !s.jf.empty();
        }
        JFrame fr = f;
        s.jf.pop_back();
        bool found = fr.found;
        i64 v0 = s.a.v0;
        if (!found && fr.stolen) {
            for (i64 p = fr.start; p < fr.end; ++p) {
                i64 w = G.adst[p];
                if (w == v0 || !s.blk[w]) {
                    found = true;
                    break;
                }
            }
        }
        if (found) {
            S.unblock_propagations += unblock(s, fr.v);
        } else {
            for (i64 p = fr.start; p < fr.end; ++p) {
                i64 w = G.adst[p];
                if (w != v0) {
                    auto& lst = s.blist[w];
                    if (lst.empty() || lst.back() != fr.v) lst.push_back(fr.v);
                    s.mark(w);
                }
            }
        }
        s.pop_path();
        if (found && !s.jf.empty()) s.jf.back().found = true;
        return !s.jf.empty();
    }

    bool j_find(const State& s, Task& t) const {
        for (size_t k = 0; k < s.jf.size(); ++k) {
            const JFrame& f = s.jf[k];
            if (O.cutoff && f.depth > O.cutoff + 1) break;
            if (f.cur < f.end) {
                t.frame = (i64)k;
                t.path_len = f.depth;
                return true;
            }
        }
        return false;
    }

    void j_steal(State& V, const Task& t, State& T, Stats& S, Sink& K) {
        T.a = V.a;
        T.copy_path(V, t.path_len);
        i64 words = t.path_len;
        if (O.algo == JOHNSON) {
            for (i64 v : V.dirty) {
                T.blk[v] = V.blk[v];
                T.blist[v] = V.blist[v];
                T.mark(v);
            }
            for (i64 k = (i64)V.pv.size() - 1; k >= t.path_len; --k) unblock(T, V.pv[k]);
            words += G.n;
            for (i64 v : T.dirty) words += (i64)T.blist[v].size();
        }
        JFrame& f = V.jf[t.frame];
        i64 i = f.cur++;
        if (O.algo == JOHNSON) f.stolen = true;
        ++V.generation;
        ++S.tasks_stolen;
        S.record_copy(words);
        ++S.edge_visits;
        i64 w = G.adst[i];
        if (w == T.a.v0) {
            emit(T, K, G.aeid[i]);
        } else if (O.algo == JOHNSON ? !T.blk[w] : !T.member[w]) {
            if (O.algo == TIERNAN) f.found = true;
            j_push(T, w, G.aeid[i], S);
        }
    }

    // ---- Read-Tarjan ----------------------------------------------------
    std::shared_ptr<const Ext> extend(State& s, i64 y, i64 via, Stats& S) {
        const Anchor& a = s.a;
        auto& pre = s.s_a;
        auto& low = s.s_b;
        auto& on_tent = s.s_flag;
        std::vector<i64> touched{y}, tent{y};
        struct DF {
            i64 u, k, end, via;
        };
        std::vector<DF> stack;
        i64 counter = 0;
        pre[y] = low[y] = counter++;
        on_tent[y] = 1;
        {
            auto [i, j] = G.slice(y, a.lo, a.hi);
            stack.push_back({y, i, j, via});
        }
        i64 visits = 0;
        std::shared_ptr<Ext> result;
        while (!stack.empty()) {
            DF& fr = stack.back();
            i64 u = fr.u;
            if (fr.k < fr.end) {
                i64 k = fr.k++;
                ++visits;
                i64 w = G.adst[k];
                if (w == a.v0) {
                    result = std::make_shared<Ext>();
                    for (auto& d : stack) result->push_back({d.via, d.u});
                    result->push_back({G.aeid[k], a.v0});
                    break;
                }
                if (s.member[w] || s.blk[w]) continue;
                if (pre[w] != NONE) {
                    if (on_tent[w] && pre[w] < low[u]) low[u] = pre[w];
                    continue;
                }
                pre[w] = low[w] = counter++;
                touched.push_back(w);
                tent.push_back(w);
                on_tent[w] = 1;
                auto [i, j] = G.slice(w, a.lo, a.hi);
                i64 e = G.aeid[k];
                stack.push_back({w, i, j, e});  // invalidates fr
            } else {
                stack.pop_back();
                i64 lu = low[u];
                if (lu == pre[u]) {
                    while (true) {
                        i64 z = tent.back();
                        tent.pop_back();
                        on_tent[z] = 0;
                        s.set_blk(z);
                        s.blk_log.push_back(z);
                        if (z == u) break;
                    }
                } else if (!stack.empty()) {
                    i64 par = stack.back().u;
                    if (lu < low[par]) low[par] = lu;
                }
            }
        }
        for (i64 v : touched) {
            pre[v] = low[v] = NONE;
            on_tent[v] = 0;
        }
        S.edge_visits += visits;
        return result;
    }

    void r_start(State& s, Stats& S) {
        s.push_path(s.a.v0, -1);
        ++S.tasks_executed;
        auto ext = extend(s, s.a.v1, s.a.eid, S);
        if (ext) s.rf.push_back({0, 0, -1, ext, 0, 1, 0, s.a.v0});
    }

    bool r_step(State& s, Stats& S, Sink& K) {
        RFrame& f = s.rf.back();
        if (f.cur < f.end) {
            i64 c = f.cur++;
            i64 x = f.x;
            i64 eid = G.aeid[c];
            if (eid == f.skip) return true;
            ++S.edge_visits;
            i64 y = G.adst[c];
            std::shared_ptr<const Ext> ext;
            if (y == s.a.v0) {
                auto e = std::make_shared<Ext>();
                e->push_back({eid, y});
                ext = e;
            } else if (s.member[y] || s.blk[y]) {
                return true;
            } else {
                ext = extend(s, y, eid, S);
                if (!ext) return true;
            }
            ++S.tasks_executed;
            s.rf.push_back({0, 0, -1, ext, 0, (i64)s.pv.size(), (i64)s.blk_log.size(), x});
            return true;
        }
        if (f.pos < (i64)f.ext->size()) {
            i64 pos = f.pos++;
            auto [eid, y] = (*f.ext)[pos];
            if (y == s.a.v0) {
                emit(s, K, eid);
            } else {
                s.push_path(y, eid);
                f.x = y;
                auto [i, j] = G.slice(y, s.a.lo, s.a.hi);
                f.cur = i;
                f.end = j;
                f.skip = (*f.ext)[pos + 1].first;
            }
            return true;
        }
        i64 base = f.base_len, mark = f.log_mark;
        s.rf.pop_back();
        s.truncate(base);
        for (size_t k = mark; k < s.blk_log.size(); ++k) s.blk[s.blk_log[k]] = 0;
        s.blk_log.resize(mark);
        return !s.rf.empty();
    }

    bool r_find(const State& s, Task& t) const {
        for (size_t k = 0; k < s.rf.size(); ++k) {
            if (O.cutoff && (i64)k > O.cutoff) break;
            const RFrame& f = s.rf[k];
            if (f.cur < f.end || f.pos < (i64)f.ext->size()) {
                t.frame = (i64)k;
                if (k + 1 < s.rf.size()) {
                    t.path_len = s.rf[k + 1].base_len;
                    t.log_mark = s.rf[k + 1].log_mark;
                } else {
                    t.path_len = (i64)s.pv.size();
                    t.log_mark = (i64)s.blk_log.size();
                }
                return true;
            }
        }
        return false;
    }

    void r_steal(State& V, const Task& t, State& T, Stats& S) {
        T.a = V.a;
        T.copy_path(V, t.path_len);
        for (i64 v : V.dirty) {
            if (V.blk[v]) T.set_blk(v);
        }
        for (size_t k = t.log_mark; k < V.blk_log.size(); ++k) T.blk[V.blk_log[k]] = 0;
        RFrame& f = V.rf[t.frame];
        T.rf.push_back({f.cur, f.end, f.skip, f.ext, f.pos, f.base_len, 0, f.x});
        f.cur = f.end;
        f.pos = (i64)f.ext->size();
        ++V.generation;
        ++S.tasks_stolen;
        S.record_copy(t.path_len + G.n);
    }

    // ---- temporal -------------------------------------------------------
    i64 raise_to(State& s, i64 v, i64 value) {
        s.ct[v] = value;
        s.mark(v);
        std::vector<i64> stack{v};
        i64 raised = 0;
        while (!stack.empty()) {
            i64 w = stack.back();
            stack.pop_back();
            auto& lst = s.waiters[w];
            if (lst.empty()) continue;
            i64 limit = s.ct[w];
            size_t keep = 0;
            for (size_t q = 0; q < lst.size(); ++q) {
                auto [u, d] = lst[q];
                if (d < limit) {
                    if (s.member[u]) continue;
                    i64 k = key(d);
                    if (k > s.ct[u]) {
                        s.ct[u] = k;
                        s.mark(u);
                        ++raised;
                        stack.push_back(u);
                    }
                } else {
                    lst[keep++] = lst[q];
                }
            }
            lst.resize(keep);
        }
        return raised;
    }

    void t_push(State& s, i64 w, std::vector<i64> hop, Stats& S) {
        const Anchor& a = s.a;
        i64 arrival = G.ats[hop[0]];
        s.push_path(w, G.aeid[hop[0]]);
        s.hops.push_back(std::move(hop));
        ++S.tasks_executed;
        auto [i0, i1] = G.slice(w, a.lo, a.hi);
        const i64* b = G.ats + i0;
        const i64* e = G.ats + i1;
        i64 k = (O.strict ? std::upper_bound(b, e, arrival) : std::lower_bound(b, e, arrival)) - G.ats;
        if (k > i0) i0 = k;
        S.edge_visits += i1 - i0;
        auto gr = std::make_shared<TGroups>();
        if (O.bundles) {
            // s_a doubles as a destination -> group index map while building
            std::vector<i64> seen;
            std::vector<std::vector<i64>> members;
            for (i64 p = i0; p < i1; ++p) {
                i64 d = G.adst[p];
                if (s.s_a[d] == NONE) {
                    s.s_a[d] = (i64)members.size();
                    seen.push_back(d);
                    members.emplace_back();
                    gr->w.push_back(d);
                }
                members[s.s_a[d]].push_back(p);
            }
            for (i64 d : seen) s.s_a[d] = NONE;
            for (auto& mlist : members) {
                gr->start.push_back((i64)gr->pos.size());
                gr->len.push_back((i64)mlist.size());
                gr->pos.insert(gr->pos.end(), mlist.begin(), mlist.end());
            }
        } else {
            for (i64 p = i0; p < i1; ++p) {
                gr->w.push_back(G.adst[p]);
                gr->start.push_back(p - i0);
                gr->len.push_back(1);
                gr->pos.push_back(p);
            }
        }
        s.tf.push_back({w, gr, 0, false, false, (i64)s.pv.size(), arrival, NONE, i0, i1});
    }

    i64 bundle_count(const std::vector<std::vector<i64>>& hops) const {
        std::vector<i64> pt, pc, ct_, cc;
        for (i64 p : hops[0]) {
            pt.push_back(G.ats[p]);
            pc.push_back(1);
        }
        for (size_t h = 1; h < hops.size(); ++h) {
            std::vector<i64> prefix(pc.size() + 1, 0);
            for (size_t q = 0; q < pc.size(); ++q) prefix[q + 1] = prefix[q] + pc[q];
            ct_.clear();
            cc.clear();
            for (i64 p : hops[h]) {
                i64 t = G.ats[p];
                size_t k = (O.strict ? std::lower_bound(pt.begin(), pt.end(), t)
                                     : std::upper_bound(pt.begin(), pt.end(), t)) -
                           pt.begin();
                ct_.push_back(t);
                cc.push_back(prefix[k]);
            }
            pt.swap(ct_);
            pc.swap(cc);
        }
        i64 total = 0;
        for (i64 c : pc) total += c;
        return total;
    }

    void expand(const std::vector<std::vector<i64>>& hops, size_t h, i64 last,
                std::vector<i64>& acc, const std::vector<i64>& verts, Sink& K) {
        if (h == hops.size()) {
            K.emit_raw(verts, acc);
            return;
        }
        for (i64 p : hops[h]) {
            i64 t = G.ats[p];
            if (h == 0 || (O.strict ? t > last : t >= last)) {
                acc.push_back(G.aeid[p]);
                expand(hops, h + 1, t, acc, verts, K);
                acc.pop_back();
            }
        }
    }

    void emit_bundle(State& s, const std::vector<i64>& closing, Sink& K) {
        bool single = closing.size() == 1;
        for (auto& h : s.hops)
            if (h.size() != 1) single = false;
        if (single) {
            emit(s, K, G.aeid[closing[0]]);
            return;
        }
        s.hops.push_back(closing);
        if (!K.collect || O.weighted) {
            K.count += bundle_count(s.hops);
        } else {
            std::vector<i64> acc;
            expand(s.hops, 0, NONE, acc, s.pv, K);
        }
        s.hops.pop_back();
    }

    // Handles group gi of frame f (which may be a detached copy).
    void t_take(State& s, TFrame& f, i64 gi, Stats& S, Sink& K) {
        const TGroups& g = *f.groups;
        i64 w = g.w[gi];
        const i64* hb = g.pos.data() + g.start[gi];
        i64 hl = g.len[gi];
        if (w == s.a.v0) {
            f.found = true;
            i64 last = G.ats[hb[hl - 1]];
            if (last > f.lastp) f.lastp = last;
            emit_bundle(s, std::vector<i64>(hb, hb + hl), K);
            return;
        }
        if (s.member[w] || (s.has_union && !s.inunion[w])) return;
        if (O.closing_times) {
            i64 limit = s.ct[w];
            if (G.ats[hb[0]] >= limit) return;
            while (G.ats[hb[hl - 1]] >= limit) --hl;
        }
        t_push(s, w, std::vector<i64>(hb, hb + hl), S);
    }

    void t_start(State& s, Stats& S) {
        s.push_path(s.a.v0, -1);
        auto [i, j] = G.slice(s.a.v0, s.a.eid, s.a.eid + 1);
        (void)j;
        t_push(s, s.a.v1, std::vector<i64>{i}, S);
    }

    bool t_step(State& s, Stats& S, Sink& K) {
        TFrame& f = s.tf.back();
        if (f.gi < (i64)f.groups->w.size()) {
            i64 gi = f.gi++;
            TFrame& ref = f;
            t_take(s, ref, gi, S, K);  // may push; `f` is not used afterwards
            return true;
        }
        TFrame fr = f;
        s.tf.pop_back();
        std::vector<i64> hop = std::move(s.hops.back());
        s.hops.pop_back();
        s.pop_path();
        if (O.closing_times) {
            i64 x = fr.x;
            i64 base = fr.found ? key(fr.lastp) : fr.arrival;
            std::vector<std::pair<i64, i64>> pending;
            for (i64 p = fr.i0; p < fr.i1; ++p) {
                i64 d = G.ats[p];
                i64 k = key(d);
                if (k <= base) continue;
                i64 w = G.adst[p];
                if (w == s.a.v0) {
                    base = k;
                } else if (s.has_union && !s.inunion[w]) {
                    continue;
                } else if (s.member[w] || d >= s.ct[w]) {
                    pending.push_back({w, d});
                } else {
                    base = k;
                }
            }
            for (auto [w, d] : pending) {
                if (key(d) > base) {
                    s.waiters[w].push_back({x, d});
                    s.mark(w);
                }
            }
            S.unblock_propagations += raise_to(s, x, base);
        }
        if (fr.found && !s.tf.empty()) {
            TFrame& p = s.tf.back();
            p.found = true;
            i64 dep = G.ats[hop.back()];
            if (dep > p.lastp) p.lastp = dep;
        }
        return !s.tf.empty();
    }

    bool t_find(const State& s, Task& t) const {
        for (size_t k = 0; k < s.tf.size(); ++k) {
            const TFrame& f = s.tf[k];
            if (O.cutoff && f.depth > O.cutoff + 1) break;
            if (f.gi < (i64)f.groups->w.size()) {
                t.frame = (i64)k;
                t.path_len = f.depth;
                return true;
            }
        }
        return false;
    }

    void t_steal(State& V, const Task& t, State& T, Stats& S, Sink& K) {
        T.a = V.a;
        T.copy_union(V);
        T.copy_path(V, t.path_len);
        for (i64 k = 0; k < t.path_len - 1; ++k) T.hops.push_back(V.hops[k]);
        i64 words = t.path_len;
        if (O.closing_times) {
            for (i64 v : V.dirty) {
                T.ct[v] = V.ct[v];
                T.waiters[v] = V.waiters[v];
                T.mark(v);
                words += 1 + 2 * (i64)V.waiters[v].size();
            }
            for (i64 k = (i64)V.pv.size() - 1; k >= t.path_len; --k) raise_to(T, V.pv[k], INF);
        }
        TFrame& f = V.tf[t.frame];
        i64 gi = f.gi++;
        f.stolen = true;
        ++V.generation;
        ++S.tasks_stolen;
        S.record_copy(words);
        TFrame holder = f;
        holder.gi = gi;
        holder.found = false;
        holder.lastp = NONE;
        t_take(T, holder, gi, S, K);
    }

    // ---- dispatch ---------------------------------------------------------
    void start(State& s, Stats& S) {
        switch (O.algo) {
            case READ_TARJAN:
                r_start(s, S);
                break;
            case TEMPORAL:
                t_start(s, S);
                break;
            default:
                s.push_path(s.a.v0, -1);
                if (O.algo == JOHNSON) s.set_blk(s.a.v0);
                j_push(s, s.a.v1, s.a.eid, S);
        }
    }
    bool step(State& s, Stats& S, Sink& K) {
        switch (O.algo) {
            case READ_TARJAN:
                return r_step(s, S, K);
            case TEMPORAL:
                return t_step(s, S, K);
            default:
                return j_step(s, S, K);
        }
    }
    bool find(const State& s, Task& t) const {
        switch (O.algo) {
            case READ_TARJAN:
                return r_find(s, t);
            case TEMPORAL:
                return t_find(s, t);
            default:
                return j_find(s, t);
        }
    }
    void steal(State& V, const Task& t, State& T, Stats& S, Sink& K) {
        switch (O.algo) {
            case READ_TARJAN:
                r_steal(V, t, T, S);
                break;
            case TEMPORAL:
                t_steal(V, t, T, S, K);
                break;
            default:
                j_steal(V, t, T, S, K);
        }
    }
};

inline i64 now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Worker {
    std::mutex guard;
    std::atomic<int> requests{0};
    std::atomic<State*> running{nullptr};
    State own;
    Stats stats;
    Sink sink;
    explicit Worker(i64 n) : own(n) {}
};

struct Result {
    i64 count = 0;
    std::vector<i64> cycles;
    std::vector<Stats> stats;
    i64 wall_ns = 0;
};

// Coarse: workers only take whole anchors.  Fine: idle workers also steal
// the shallowest pending call of a busy worker.  Victims yield their guard
// between steps whenever a thief has announced itself.
class Pool {
   public:
    Pool(const Graph& g, const Options& o, const i64* anchors, i64 na, int threads, bool fine,
         uint64_t seed)
        : eng(g, o), anchors_(anchors), na_(na), p_(threads), fine_(fine), seed_(seed) {
        for (int i = 0; i < threads; ++i) {
            workers_.emplace_back(new Worker(g.n));
            workers_.back()->sink.collect = o.collect;
        }
    }

    Result run() {
        i64 t0 = now_ns();
        if (p_ == 1) {
            loop(0);
        } else {
            std::vector<std::thread> ts;
            for (int i = 0; i < p_; ++i) ts.emplace_back(&Pool::loop, this, i);
            for (auto& t : ts) t.join();
        }
        Result r;
        r.wall_ns = now_ns() - t0;
        for (auto& w : workers_) {
            r.count += w->sink.count;
            r.cycles.insert(r.cycles.end(), w->sink.data.begin(), w->sink.data.end());
            r.stats.push_back(w->stats);
        }
        return r;
    }

   private:
    Engine eng;
    const i64* anchors_;
    i64 na_;
    int p_;
    bool fine_;
    uint64_t seed_;
    std::vector<std::unique_ptr<Worker>> workers_;
    std::atomic<i64> next_{0};
    std::atomic<i64> active_{0};
    std::atomic<bool> exhausted_{false};
    std::atomic<int> started_{0};

    i64 take() {
        if (exhausted_.load()) return -1;
        active_.fetch_add(1);
        i64 k = next_.fetch_add(1);
        if (k >= na_) {
            exhausted_.store(true);
            active_.fetch_sub(1);
            return -1;
        }
        return anchors_[k];
    }

    bool finished() const { return exhausted_.load() && active_.load() == 0; }

    void loop(int wid) {
        Worker& w = *workers_[wid];
        // start together so thread creation order does not skew the balance
        started_.fetch_add(1);
        while (started_.load() < p_) std::this_thread::yield();
        std::mt19937_64 rng(seed_ * 1000003ULL + (uint64_t)wid);
        int idle = 0;
        while (true) {
            bool have = false;
            i64 eid = take();
            if (eid >= 0) {
                i64 t0 = now_ns();
                w.own.reset();
                ++w.stats.tasks_executed;
                if (eng.prepare(w.own, eid, w.stats, w.sink)) {
                    ++w.stats.anchors_searched;
                    eng.start(w.own, w.stats);
                    have = w.own.has_frames(eng.O.algo);
                } else {
                    ++w.stats.anchors_skipped;
                }
                w.stats.busy_ns += now_ns() - t0;
                if (!have) {
                    active_.fetch_sub(1);
                    continue;
                }
            } else if (fine_) {
                have = steal(w, wid, rng);
            }
            if (!have) {
                if (finished()) return;
                if (++idle < 64)
                    std::this_thread::yield();
                else
                    std::this_thread::sleep_for(std::chrono::microseconds(50));
                continue;
            }
            idle = 0;
            execute(w);
            active_.fetch_sub(1);
        }
    }

    void execute(Worker& w) {
        i64 t0 = now_ns();
        State& st = w.own;
        std::unique_lock<std::mutex> lock(w.guard);
        w.running.store(&st);
        while (true) {
            if (w.requests.load(std::memory_order_acquire) > 0) {
                lock.unlock();
                while (w.requests.load(std::memory_order_acquire) > 0) std::this_thread::yield();
                lock.lock();
            }
            if (!eng.step(st, w.stats, w.sink)) break;
        }
        w.running.store(nullptr);
        lock.unlock();
        w.stats.busy_ns += now_ns() - t0;
    }

    bool steal(Worker& thief, int wid, std::mt19937_64& rng) {
        std::vector<int> order;
        for (int i = 0; i < p_; ++i)
            if (i != wid && workers_[i]->running.load() != nullptr) order.push_back(i);
        std::shuffle(order.begin(), order.end(), rng);
        for (int vi : order) {
            Worker& v = *workers_[vi];
            bool got = false;
            v.requests.fetch_add(1, std::memory_order_acq_rel);
            {
                std::lock_guard<std::mutex> lk(v.guard);
                State* st = v.running.load();
                Task t;
                if (st != nullptr && eng.find(*st, t)) {
                    i64 t0 = now_ns();
                    thief.own.reset();
                    eng.steal(*st, t, thief.own, thief.stats, thief.sink);
                    thief.stats.busy_ns += now_ns() - t0;
                    active_.fetch_add(1);
                    got = true;
                }
            }
            v.requests.fetch_sub(1, std::memory_order_acq_rel);
            if (got) {
                if (thief.own.has_frames(eng.O.algo)) return true;
                active_.fetch_sub(1);
            }
        }
        return false;
    }
};

inline Result run(const Graph& g, const Options& o, const i64* anchors, i64 na, int threads,
                  bool fine, uint64_t seed) {
    Pool pool(g, o, anchors, na, threads < 1 ? 1 : threads, fine, seed);
    return pool.run();
}

}  // namespace cn
