"""Per-phase swap state machine: shadow-train candidate models when a
phase is discovered, score them after the training budget, and swap the
best one into the L1D slot for all future intervals of that phase.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .cache import Hierarchy, Level
from .models import (
    SWAP_KINDS,
    AccessContext,
    ModelKind,
    NearFarTracker,
    make_model,
)
from .phase import PhaseEvent
from .scoring import ShadowStats, score, select_best


class PhaseState(enum.Enum):
    UNSEEN = "unseen"
    TRAINING = "training"
    SWAPPED = "swapped"
    GIVEN_UP = "given-up"


@dataclass
class ControllerConfig:
    train_intervals: int = 2
    candidate_kinds: tuple[ModelKind, ...] = SWAP_KINDS
    give_up_after: int | None = None  # training-interval budget; disabled by default
    single_model_override: ModelKind | None = None

    def __post_init__(self):
        if self.train_intervals < 1:
            raise ValueError("train_intervals must be >= 1")
        if self.single_model_override is not None:
            self.candidate_kinds = (self.single_model_override,)
        if not self.candidate_kinds:
            raise ValueError("need at least one candidate model kind")


class PhaseModelState:
    """Everything the controller knows about one cataloged phase."""

    __slots__ = ("state", "intervals_trained", "intervals_observed", "models", "shadow",
                 "chosen", "scores", "score_vectors")

    def __init__(self, kinds):
        self.state = PhaseState.UNSEEN
        self.intervals_trained = 0
        self.intervals_observed = 0
        self.models = {k: make_model(k) for k in kinds}
        self.shadow = {k: ShadowStats() for k in kinds}
        self.chosen: ModelKind | None = None
        self.scores: dict[ModelKind, float] = {}
        self.score_vectors = {}


@dataclass(frozen=True)
class Directive:
    """What the L1D slot should do for the upcoming interval."""

    phase_id: int  # phase the interval is assumed to continue; -1 unknown
    swapped_kind: ModelKind | None  # None means run the detailed base model
    training: bool  # shadow-train candidates for phase_id

    @property
    def uses_base(self) -> bool:
        return self.swapped_kind is None


_BASE_DIRECTIVE = Directive(phase_id=-1, swapped_kind=None, training=False)


class SwapController:
    """Owns the L1D slot of a hierarchy. Feed it every reference through
    on_access and every detector event through on_interval_end."""

    def __init__(self, hierarchy: Hierarchy, config: ControllerConfig | None = None, rng=None):
        self.hierarchy = hierarchy
        self.config = config or ControllerConfig()
        self.rng = rng
        self.phases: dict[int, PhaseModelState] = {}
        self.directive: Directive = _BASE_DIRECTIVE
        self._tracker = NearFarTracker()

    def on_interval_end(self, event: PhaseEvent) -> Directive:
        pid = event.phase_id
        prev = self.directive
        if pid < 0:
            self.directive = _BASE_DIRECTIVE
            return self.directive

        st = self.phases.get(pid)
        if st is None:
            st = self.phases[pid] = PhaseModelState(self.config.candidate_kinds)

        if st.state is PhaseState.UNSEEN:
            st.state = PhaseState.TRAINING
        elif st.state is PhaseState.TRAINING:
            # The completed interval only counts if it actually trained
            # this phase (the label can disagree right after a transition).
            if prev.training and prev.phase_id == pid:
                st.intervals_trained += 1
            st.intervals_observed += 1
            if st.intervals_trained >= self.config.train_intervals:
                st.scores = {}
                for kind in self.config.candidate_kinds:
                    vec, scalar = score(st.shadow[kind], kind, self.hierarchy.config.l1)
                    st.score_vectors[kind] = vec
                    st.scores[kind] = scalar
                st.chosen = select_best(st.scores)
                st.state = PhaseState.SWAPPED
            elif (
                self.config.give_up_after is not None
                and st.intervals_observed >= self.config.give_up_after
            ):
                st.state = PhaseState.GIVEN_UP

        if st.state is PhaseState.SWAPPED:
            self.directive = Directive(pid, st.chosen, False)
        elif st.state is PhaseState.TRAINING:
            self.directive = Directive(pid, None, True)
        else:  # GIVEN_UP
            self.directive = Directive(pid, None, False)
        return self.directive

    def on_access(self, is_write: bool, address: int) -> tuple[Level, int, bool]:
        """Run one reference under the current directive. Returns the
        serviced level, its latency, and the L1 outcome the simulation saw
        (predicted or actual)."""
        ctx = AccessContext(is_write, address, self._tracker.classify(address))
        d = self.directive
        hier = self.hierarchy
        if d.swapped_kind is not None:
            st = self.phases[d.phase_id]
            hit = st.models[d.swapped_kind].predict(ctx, self.rng)
            if hit:
                level, lat = hier.count_l1_hit()
            else:
                level, lat = hier.miss_to_l2(address)
            return level, lat, hit

        hit = hier.l1.hit_check(address, is_write)
        if hit:
            hier.l1_hits += 1
            lat = hier.config.l1.hit_latency
            hier.cycles += lat
            level = Level.L1
        else:
            level, lat = hier.miss_to_l2(address)

        if d.training:
            st = self.phases[d.phase_id]
            rng = self.rng
            near = ctx.near
            # Predict before training so accuracy measures generalization,
            # not recall of the access being trained on.
            for kind, model in st.models.items():
                predicted = model.predict(ctx, rng)
                model.train(ctx, hit)
                st.shadow[kind].record(predicted, hit, near)
        return level, lat, hit
