"""Trace-driven cache-hierarchy simulator that detects program phases
online and swaps the detailed L1D model for cheap statistical
approximations per phase."""

from .cache import (
    CacheConfig,
    Hierarchy,
    HierarchyConfig,
    Level,
    SetAssociativeCache,
)
from .controller import ControllerConfig, Directive, PhaseState, SwapController
from .metrics import (
    IntervalRecord,
    ReuseDistanceTracker,
    ReuseHistogram,
    per_phase_accuracy,
    percent_change,
)
from .models import (
    AccessContext,
    FixedHitRateModel,
    MarkovModel,
    ModelKind,
    make_model,
    model_hit_check_comparisons,
    model_size_bytes,
)
from .phase import (
    PhaseDetector,
    PhaseDetectorConfig,
    PhaseEvent,
    hash_address,
    signature_diff,
)
from .scoring import ScoreVector, ShadowStats, score, select_best
from .sim import RunResult, run_simulation
from .trace import (
    PhaseKind,
    SyntheticPhaseSpec,
    Trace,
    TraceRecord,
    generate_trace,
    load_trace,
    read_trace,
    write_trace,
)

__version__ = "0.1.0"
