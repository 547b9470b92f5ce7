"""Full simulation pipeline: trace in, phase detection, model swapping,
metrics out. Validation mode runs a second fully detailed hierarchy in
lockstep as ground truth; it observes only and never feeds back into the
swapped run's decisions.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cache import Hierarchy, HierarchyConfig, Level
from .controller import ControllerConfig, PhaseState, SwapController
from .metrics import IntervalRecord, ReuseDistanceTracker, ReuseHistogram
from .phase import PhaseDetector, PhaseDetectorConfig
from .trace import Trace


@dataclass
class RunResult:
    seed: int
    interval_len: int
    intervals: list[IntervalRecord]
    totals: dict
    base_totals: dict | None
    phase_count: int
    chosen: dict[int, str]  # phase id -> chosen model kind value
    scores: dict[int, dict[str, float]]
    score_vectors: dict[int, dict[str, tuple[float, float, float, float]]]
    reuse: dict[int, ReuseHistogram] = field(default_factory=dict)
    base_reuse: dict[int, ReuseHistogram] | None = None

    @property
    def swapped_fraction(self) -> float:
        if not self.intervals:
            return 0.0
        swapped = sum(1 for r in self.intervals if r.directive != "base")
        return swapped / len(self.intervals)

    def per_phase_intervals(self) -> dict[int, list[IntervalRecord]]:
        out: dict[int, list[IntervalRecord]] = {}
        for r in self.intervals:
            out.setdefault(r.phase_id, []).append(r)
        return out


def run_simulation(
    trace: Trace,
    hierarchy_config: HierarchyConfig | None = None,
    detector_config: PhaseDetectorConfig | None = None,
    controller_config: ControllerConfig | None = None,
    seed: int = 0,
    validate: bool = False,
    collect_reuse: bool = True,
) -> RunResult:
    """Run the model-swapping simulation over a trace. Pure function of
    (trace, configs, seed)."""
    hcfg = hierarchy_config or HierarchyConfig()
    dcfg = detector_config or PhaseDetectorConfig()
    ccfg = controller_config or ControllerConfig()

    hierarchy = Hierarchy(hcfg)
    detector = PhaseDetector(dcfg)
    controller = SwapController(hierarchy, ccfg, rng=random.Random(seed))
    val_hier = Hierarchy(hcfg) if validate else None

    intervals: list[IntervalRecord] = []
    reuse: dict[int, ReuseHistogram] = {}
    base_reuse: dict[int, ReuseHistogram] = {}
    tracker = ReuseDistanceTracker() if collect_reuse else None
    base_tracker = ReuseDistanceTracker() if (collect_reuse and validate) else None
    pending_distances: list[int | None] = []
    pending_base_distances: list[int | None] = []

    snapshot = hierarchy.totals()
    correct = 0
    interval_len = dcfg.interval_len
    cur_directive = controller.directive

    ops = trace.ops
    addrs = trace.addresses
    observe = detector.observe
    on_access = controller.on_access

    for i in range(len(ops)):
        addr = addrs[i]
        level, _lat, l1_hit = on_access(ops[i], addr)

        if level != Level.L1 and tracker is not None:
            pending_distances.append(tracker.observe(addr >> 6))

        if val_hier is not None:
            v_level, _ = val_hier.access(addr)
            if (v_level == Level.L1) == l1_hit:
                correct += 1
            if base_tracker is not None and v_level != Level.L1:
                pending_base_distances.append(base_tracker.observe(addr >> 6))

        event = observe(addr)
        if event is None:
            continue

        # Interval boundary: finalize the record for the interval that the
        # event labels, then let the controller pick the next directive.
        now = hierarchy.totals()
        accuracy = correct / interval_len if val_hier is not None else None
        intervals.append(
            IntervalRecord(
                interval_index=event.interval_index,
                phase_id=event.phase_id,
                directive="base" if cur_directive.uses_base else cur_directive.swapped_kind.value,
                accuracy=accuracy,
                l1_hits=now["l1_hits"] - snapshot["l1_hits"],
                l2_hits=now["l2_hits"] - snapshot["l2_hits"],
                l3_hits=now["l3_hits"] - snapshot["l3_hits"],
                mem_accesses=now["mem_accesses"] - snapshot["mem_accesses"],
                cycles=now["cycles"] - snapshot["cycles"],
            )
        )
        snapshot = now
        correct = 0
        if tracker is not None:
            hist = reuse.setdefault(event.phase_id, ReuseHistogram())
            for d in pending_distances:
                hist.add(d)
            pending_distances.clear()
        if base_tracker is not None:
            hist = base_reuse.setdefault(event.phase_id, ReuseHistogram())
            for d in pending_base_distances:
                hist.add(d)
            pending_base_distances.clear()
        cur_directive = controller.on_interval_end(event)

    chosen = {}
    scores = {}
    score_vectors = {}
    for pid, st in sorted(controller.phases.items()):
        if st.state is PhaseState.SWAPPED:
            chosen[pid] = st.chosen.value
        scores[pid] = {k.value: v for k, v in st.scores.items()}
        score_vectors[pid] = {k.value: vec.as_tuple() for k, vec in st.score_vectors.items()}

    return RunResult(
        seed=seed,
        interval_len=interval_len,
        intervals=intervals,
        totals=hierarchy.totals(),
        base_totals=val_hier.totals() if val_hier is not None else None,
        phase_count=len(detector.table),
        chosen=chosen,
        scores=scores,
        score_vectors=score_vectors,
        reuse=reuse,
        base_reuse=base_reuse if validate and collect_reuse else None,
    )
