import json
import math

import pytest

from cyclenum import TemporalGraph, dump_edge_list, enumerate_all
from cyclenum.cli import RunReport, main, parse_duration, shard_anchors
from cyclenum.synthetic import generate_synthetic, random_graph, window_example


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def report(capsys, *argv):
    code, out = run_cli(capsys, *argv)
    assert code == 0, out.err
    return RunReport.from_json(out.out)


@pytest.fixture
def edge_file(tmp_path):
    path = tmp_path / "g.txt"
    g = window_example()
    path.write_text(dump_edge_list(TemporalGraph.from_edges([(e.src, e.dst, e.ts) for e in g.edges])))
    return str(path)


def test_shard_examples():
    assert list(shard_anchors(10, 0, 1)) == list(range(10))
    assert [len(shard_anchors(10, k, 4)) for k in range(4)] == [3, 3, 2, 2]
    assert sorted(e for k in range(4) for e in shard_anchors(10, k, 4)) == list(range(10))
    with pytest.raises(ValueError):
        shard_anchors(10, 4, 4)


@pytest.mark.parametrize("seed", range(5))
def test_shards_compose(capsys, seed):
    args = ["--synthetic", "random", "--n", "9", "--p-edge", "0.35", "--seed", str(seed)]
    whole = report(capsys, *args).cycles
    parts = [report(capsys, *args, "--shard", f"{k}/4").cycles for k in range(4)]
    assert sum(parts) == whole


@pytest.mark.parametrize("text,want", [("3600", 3600), ("90s", 90), ("2h", 7200), ("1d", 86400),
                                       ("5m", 300), ("inf", math.inf)])
def test_parse_duration(text, want):
    assert parse_duration(text) == want


def test_input_file_fine_count(capsys, edge_file):
    r = report(capsys, "--input", edge_file, "--cycle-type", "simple", "--algo", "johnson",
               "--parallel", "fine", "--window", "3600", "--threads", "8", "--output", "count")
    assert r.cycles == 5 and r.threads == 8 and len(r.busy_ns) == 8
    assert r.schema == "cyclenum.run/1" and r.edge_visits > 0 and r.delta == 3600


def test_worst_case_coarse(capsys):
    r = report(capsys, "--synthetic", "worst-case", "--n", "14", "--algo", "johnson",
               "--parallel", "coarse", "--threads", "8")
    assert r.cycles == 4096 and r.granularity == "coarse"


def test_fig5a_tiernan_paths(capsys):
    r = report(capsys, "--synthetic", "fig5a", "--m", "6", "--algo", "tiernan")
    assert (r.maximal_paths, r.cycles) == (128, 4)


def test_maximal_paths_only_for_tiernan(capsys):
    assert report(capsys, "--synthetic", "fig5a", "--m", "3").maximal_paths is None


def test_generate_synthetic_deterministic():
    a = generate_synthetic("random", n=10, p_edge=0.3, seed=7, max_ts=9)
    b = generate_synthetic("random", n=10, p_edge=0.3, seed=7, max_ts=9)
    assert a == b and a.edge_count > 0


@pytest.mark.parametrize("kind,params", [("worst-case", {"n": 2}), ("fig3a", {"m": 0}),
                                         ("nope", {})])
def test_generate_synthetic_rejects(kind, params):
    with pytest.raises(ValueError):
        generate_synthetic(kind, **params)


def test_worst_case_six():
    g = generate_synthetic("worst-case", n=6)
    for algo in ("tiernan", "johnson", "read_tarjan"):
        assert enumerate_all(g, math.inf, algo).count == 16


@pytest.mark.parametrize("argv", [
    ["--synthetic", "worst-case", "--algo", "bogus"],
    ["--synthetic", "worst-case", "--threads", "0"],
    ["--synthetic", "worst-case", "--window", "3x"],
    ["--synthetic", "worst-case", "--shard", "5/4"],
    ["--synthetic", "worst-case", "--n", "2"],
    ["--synthetic", "worst-case", "--cycle-type", "temporal", "--algo", "tiernan"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_window_required_with_input(capsys, edge_file):
    with pytest.raises(SystemExit) as exc:
        main(["--input", edge_file])
    assert exc.value.code == 2


def test_unreadable_input_exit_1(capsys, tmp_path):
    code, out = run_cli(capsys, "--input", str(tmp_path / "missing.txt"), "--window", "10")
    assert code == 1 and "missing" in out.err
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n")
    code, out = run_cli(capsys, "--input", str(bad), "--window", "10")
    assert code == 1 and "line 1" in out.err


@pytest.mark.parametrize("output", ["count", "stats"])
def test_csv_json_round_trip(capsys, output):
    args = ["--synthetic", "fig5a", "--m", "4", "--algo", "tiernan", "--parallel", "fine",
            "--threads", "3", "--output", output]
    r = report(capsys, *args)
    assert RunReport.from_json(r.to_json()) == r
    assert RunReport.from_csv(r.to_csv()) == r
    code, out = run_cli(capsys, *args, "--format", "csv")
    assert code == 0
    c = RunReport.from_csv(out.out)
    assert c.cycles == r.cycles and c.maximal_paths == r.maximal_paths
    if output == "stats":
        assert len(r.per_thread) == 3


def test_round_trip_with_window(capsys, edge_file):
    r = report(capsys, "--input", edge_file, "--window", "1h")
    assert RunReport.from_csv(r.to_csv()) == r


def test_report_totals_schedule_independent(capsys):
    args = ["--synthetic", "worst-case", "--n", "12", "--algo", "read-tarjan", "--parallel",
            "fine", "--threads", "4"]
    a, b = report(capsys, *args), report(capsys, *args)
    assert (a.cycles, a.edge_visits) == (b.cycles, b.edge_visits) == (1024, a.edge_visits)


def test_output_cycles_and_emit_file(capsys, tmp_path):
    code, out = run_cli(capsys, "--synthetic", "worst-case", "--n", "5", "--output", "cycles")
    assert code == 0 and len(out.out.splitlines()) == 8
    path = tmp_path / "c.txt"
    r = report(capsys, "--synthetic", "worst-case", "--n", "5", "--emit-cycles", str(path))
    assert len(path.read_text().splitlines()) == r.cycles == 8


def test_temporal_flags(capsys, edge_file):
    base = ["--input", edge_file, "--window", "5", "--cycle-type", "temporal"]
    counts = {
        report(capsys, *base, *extra).cycles
        for extra in ([], ["--no-closing-times"], ["--no-bundles"], ["--no-cycle-union"],
                      ["--parallel", "fine", "--threads", "3"], ["--count-bundles"])
    }
    assert counts == {3}
    assert report(capsys, *base, "--non-strict-temporal").cycle_type == "temporal"


def test_self_loop_flag(capsys, tmp_path):
    path = tmp_path / "loops.txt"
    path.write_text("0 0 1\n0 1 2\n1 0 3\n")
    assert report(capsys, "--input", str(path), "--window", "inf").cycles == 1
    assert report(capsys, "--input", str(path), "--window", "inf", "--allow-self-loops").cycles == 2


def test_python_backend_flag(capsys):
    r = report(capsys, "--synthetic", "worst-case", "--n", "8", "--backend", "python")
    assert r.backend == "python" and r.cycles == 64
    assert json.loads(r.to_json())["schema"] == "cyclenum.run/1"
