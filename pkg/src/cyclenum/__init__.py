"""Sequential and parallel enumeration of simple and temporal cycles in
directed temporal graphs."""

import types as _types

from ._backend import NATIVE_AVAILABLE
from ._backend import active as active_backend
from .graph import (
    EdgeListParseError,
    EdgeRecord,
    GraphView,
    TemporalGraph,
    TimeWindow,
    dump_edge_list,
    load_edge_list,
    window_view,
)
from .parallel import (
    ParallelConfig,
    coarse_enumerate,
    fine_enumerate,
    fine_johnson_enumerate,
    fine_read_tarjan_enumerate,
    parallel_enumerate,
    scripted_run,
)
from .runtime import (
    ScriptedScheduler,
    SearchState,
    Task,
    WorkStealingPool,
    copy_on_steal_johnson,
    copy_on_steal_rt,
)
from .sequential import (
    JohnsonEngine,
    ReadTarjanEngine,
    TiernanEngine,
    enumerate_all,
    johnson_from_edge,
    make_engine,
    read_tarjan_from_edge,
    tiernan_from_edge,
)
from .stats import CycleSink, SearchStats, ThreadStats
from .structures import BlockedSet, Path, UnblockList, recursive_unblock
from .synthetic import fig3a, fig5a, fig6, generate_synthetic, random_graph, worst_case
from .temporal import (
    ClosingTimes,
    CycleUnion,
    PathBundle,
    TemporalEngine,
    TemporalOptions,
    bundle_count,
    copy_on_steal_temporal,
    cycle_union,
    expand_bundle,
    temporal_enumerate,
    temporal_reachability,
)

__version__ = "0.1.0"

__all__ = sorted(
    name for name, obj in globals().items()
    if not name.startswith("_") and not isinstance(obj, _types.ModuleType)
)
