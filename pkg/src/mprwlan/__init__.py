"""Multi-round contention throughput analysis for MPR WLANs.

Stations contend over repeated RTS rounds until enough of them have won to
share a multipacket-reception channel; the optimal moment to stop is a
fixed threshold on the cumulative winner count. This package provides the
exact distributions and throughput of that stopped process, threshold
optimization, and two Monte Carlo engines for cross-validation.
"""

from .contention import (
    ContentionAnalysis,
    RoundModel,
    analyze_stopped_process,
    build_round_model,
    expected_winners,
)
from .sim import DcfConfig, SimReport, run_dcf, sample_stopping_episodes
from .stopping import (
    LookAheadDiagnostics,
    StoppingPolicy,
    one_stage_lookahead_threshold,
    optimal_threshold_by_search,
    verify_monotone_case,
)
from .throughput import (
    OptimizationResult,
    ThroughputPoint,
    carryover_upper_bound,
    evaluate_throughput,
    lower_bound,
    optimize,
    throughput_profile,
)
from .timing import (
    DerivedTimings,
    PhyMacParams,
    default_params,
    derive_timings,
    load_params,
)

__version__ = "0.1.0"
