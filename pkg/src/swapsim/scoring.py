"""Model-quality scoring: the 4-element score vector and its L2 distance
from the ideal [1, 1, 0, 0]. Lower scalar scores are better.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .cache import CacheConfig
from .models import ModelKind, model_hit_check_comparisons, model_size_bytes

IDEAL_VECTOR = (1.0, 1.0, 0.0, 0.0)

# Tie-break order for equal scalar scores: the smaller model wins.
_TIE_ORDER = {ModelKind.FIXED_RATE: 0, ModelKind.MARKOV4: 1, ModelKind.MARKOV8: 2}


@dataclass
class ShadowStats:
    """Counters accumulated while a candidate model runs alongside the
    detailed model during training intervals."""

    correct_predictions: int = 0
    total_predictions: int = 0
    model_near_misses: int = 0
    base_near_misses: int = 0

    def record(self, predicted_hit: bool, actual_hit: bool, near: bool) -> None:
        self.total_predictions += 1
        if predicted_hit == actual_hit:
            self.correct_predictions += 1
        if near:
            if not predicted_hit:
                self.model_near_misses += 1
            if not actual_hit:
                self.base_near_misses += 1


@dataclass(frozen=True)
class ScoreVector:
    accuracy: float
    near_miss_ratio: float
    size_fraction: float
    complexity_fraction: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.accuracy, self.near_miss_ratio, self.size_fraction, self.complexity_fraction)

    def distance_from_ideal(self) -> float:
        return math.sqrt(sum((v - i) ** 2 for v, i in zip(self.as_tuple(), IDEAL_VECTOR)))


def near_miss_ratio(stats: ShadowStats) -> float:
    """Model near misses over base near misses. A zero base count is
    treated as ratio 1 when the model also produced none, otherwise
    1 + model_near_misses/total so spurious near misses are penalized
    boundedly instead of dividing by zero."""
    if stats.base_near_misses == 0:
        if stats.model_near_misses == 0:
            return 1.0
        return 1.0 + stats.model_near_misses / stats.total_predictions
    return stats.model_near_misses / stats.base_near_misses


def score(stats: ShadowStats, kind: ModelKind, base_config: CacheConfig) -> tuple[ScoreVector, float]:
    if stats.total_predictions == 0:
        raise ValueError("cannot score a model with no shadow predictions")
    vec = ScoreVector(
        accuracy=stats.correct_predictions / stats.total_predictions,
        near_miss_ratio=near_miss_ratio(stats),
        size_fraction=model_size_bytes(kind, base_config)
        / model_size_bytes(ModelKind.BASE, base_config),
        complexity_fraction=model_hit_check_comparisons(kind, base_config)
        / model_hit_check_comparisons(ModelKind.BASE, base_config),
    )
    return vec, vec.distance_from_ideal()


def select_best(scores: dict[ModelKind, float]) -> ModelKind:
    """Argmin over scalar scores; exact ties go to the smaller model."""
    if not scores:
        raise ValueError("no scored models to select from")
    return min(scores, key=lambda k: (scores[k], _TIE_ORDER[k]))
