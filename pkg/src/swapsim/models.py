"""Statistical L1D approximations: fixed hit rate, 4-state and 8-state
Markov chains with restricted prediction.

All three share the train-on-observation / predict-hit interface. The
Markov chains keep transition counts as the source of truth; the
row-stochastic probabilities and the restricted prediction tables are
derived, memoized caches.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .cache import CacheConfig

NEAR_LINE_BYTES = 64  # near/far granularity is fixed, independent of cache geometry


class ModelKind(enum.Enum):
    BASE = "base"
    FIXED_RATE = "fixed-rate"
    MARKOV4 = "markov4"
    MARKOV8 = "markov8"


SWAP_KINDS = (ModelKind.FIXED_RATE, ModelKind.MARKOV4, ModelKind.MARKOV8)


@dataclass(slots=True)
class AccessContext:
    """One L1D request as seen by a statistical model: read or write, and
    whether it touches the same 64 B line as the previous access."""

    is_write: bool
    address: int
    near: bool


class NearFarTracker:
    """Tracks the previous address of an L1D stream to classify each access
    as near (same 64 B line) or far. The first access is far."""

    __slots__ = ("_last_line",)

    def __init__(self):
        self._last_line = -1

    def classify(self, address: int) -> bool:
        line = address >> 6
        near = line == self._last_line
        self._last_line = line
        return near


class FixedHitRateModel:
    """Counts hits and misses during training; predicts hit with the
    observed rate. Untrained, it predicts miss."""

    kind = ModelKind.FIXED_RATE

    __slots__ = ("hit_count", "total_count", "hit_rate")

    def __init__(self):
        self.hit_count = 0
        self.total_count = 0
        self.hit_rate = 0.0

    def train(self, ctx: AccessContext, hit: bool) -> None:
        self.total_count += 1
        if hit:
            self.hit_count += 1
        self.hit_rate = self.hit_count / self.total_count

    def predict(self, ctx: AccessContext, rng) -> bool:
        return rng.random() < self.hit_rate

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "hit_count": self.hit_count,
            "total_count": self.total_count,
            "hit_rate": self.hit_rate,
        }


# State encoding: bit 1 = write, bit 0 = miss, giving RH=0, RM=1, WH=2,
# WM=3. The 8-state model adds +4 for far accesses.


class MarkovModel:
    """Transition-count Markov chain over cache access outcomes.

    Prediction is restricted to the pair of states legal for the incoming
    request (read/write, and near/far for 8 states), renormalized over
    that pair, and resolved with one uniform draw.
    """

    __slots__ = ("n_states", "counts", "last_state", "_train_last", "_restricted")

    def __init__(self, n_states: int):
        if n_states not in (4, 8):
            raise ValueError("n_states must be 4 or 8")
        self.n_states = n_states
        self.counts = [[0] * n_states for _ in range(n_states)]
        self.last_state = None
        self._train_last = None
        self._restricted: dict[tuple[int, int], float] = {}

    @property
    def kind(self) -> ModelKind:
        return ModelKind.MARKOV4 if self.n_states == 4 else ModelKind.MARKOV8

    def _encode(self, is_write: bool, near: bool, hit: bool) -> int:
        s = (2 if is_write else 0) + (0 if hit else 1)
        if self.n_states == 8 and not near:
            s += 4
        return s

    def _restrict_pair(self, ctx: AccessContext) -> tuple[int, int]:
        """(hit_state, miss_state) reachable for this request."""
        base = 2 if ctx.is_write else 0
        if self.n_states == 8 and not ctx.near:
            base += 4
        return base, base + 1

    def train(self, ctx: AccessContext, hit: bool) -> None:
        s = self._encode(ctx.is_write, ctx.near, hit)
        if self._train_last is not None:
            self.counts[self._train_last][s] += 1
            self._restricted.clear()
        self._train_last = s
        self.last_state = s

    def predict(self, ctx: AccessContext, rng) -> bool:
        h, m = self._restrict_pair(ctx)
        row_state = self.last_state if self.last_state is not None else h
        key = (row_state, h)
        p_hit = self._restricted.get(key)
        if p_hit is None:
            row = self.counts[row_state]
            total = row[h] + row[m]
            if total:
                p_hit = row[h] / total
            else:
                # Degenerate pair: neither legal state was ever reached
                # from here, so the row carries no information about this
                # context. Fall back to the column marginals, the model's
                # aggregate behavior for the context; conditioning on the
                # row alone would strand the chain in untrained states.
                ch = sum(r[h] for r in self.counts)
                cm = sum(r[m] for r in self.counts)
                p_hit = ch / (ch + cm) if ch + cm else -1.0
            self._restricted[key] = p_hit
        if p_hit < 0.0:
            # Context never observed at all: predict miss, let the
            # detailed L2 resolve it, and keep the chain where it is.
            return False
        if rng.random() < p_hit:
            self.last_state = h
            return True
        self.last_state = m
        return False

    def probs(self) -> list[list[float]]:
        """Row-stochastic transition matrix derived from the counts; rows
        with no support stay all-zero."""
        out = []
        for row in self.counts:
            t = sum(row)
            out.append([c / t for c in row] if t else [0.0] * self.n_states)
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n_states": self.n_states,
            "counts": [list(r) for r in self.counts],
        }


def make_model(kind: ModelKind):
    if kind is ModelKind.FIXED_RATE:
        return FixedHitRateModel()
    if kind is ModelKind.MARKOV4:
        return MarkovModel(4)
    if kind is ModelKind.MARKOV8:
        return MarkovModel(8)
    raise ValueError(f"no swappable model for {kind}")


def model_size_bytes(kind: ModelKind, base_config: CacheConfig | None = None) -> int:
    """Storage cost of a model. The base cache's cost is its tag array;
    the Markov chains store three NxN matrices of 8-byte values (counts,
    probabilities, and the memoized restricted tables)."""
    if kind is ModelKind.BASE:
        if base_config is None:
            raise ValueError("base model size requires a CacheConfig")
        return base_config.tag_array_bytes
    if kind is ModelKind.FIXED_RATE:
        return 16  # 8 B hit count + 8 B hit rate
    n = 4 if kind is ModelKind.MARKOV4 else 8
    return 3 * n * n * 8


def model_hit_check_comparisons(kind: ModelKind, base_config: CacheConfig | None = None) -> int:
    """Comparisons per hit check: the base cache scans its ways twice
    (search + eviction), the restricted Markov prediction needs one draw
    comparison, plus a near/far check for the 8-state model."""
    if kind is ModelKind.BASE:
        if base_config is None:
            raise ValueError("base model complexity requires a CacheConfig")
        return base_config.hit_check_comparisons
    if kind is ModelKind.MARKOV8:
        return 2
    return 1


class ModelSlot:
    """Adapter that lets a statistical model sit in the hierarchy's L1D
    slot: tracks near/far from the stream it sees and draws from its own
    RNG."""

    __slots__ = ("model", "rng", "_tracker")

    def __init__(self, model, rng):
        self.model = model
        self.rng = rng
        self._tracker = NearFarTracker()

    def hit_check(self, address: int, is_write: bool = False) -> bool:
        ctx = AccessContext(is_write, address, self._tracker.classify(address))
        return self.model.predict(ctx, self.rng)
