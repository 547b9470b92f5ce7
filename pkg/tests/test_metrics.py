"""Reuse-distance tracking, histograms and run comparison helpers."""
import random

import pytest

from swapsim.metrics import (
    IntervalRecord,
    ReuseDistanceTracker,
    ReuseHistogram,
    per_phase_accuracy,
    percent_change,
)


def quadratic_reuse_distances(stream):
    """O(n^2) oracle: distinct lines between consecutive uses of a line."""
    out = []
    last = {}
    for t, line in enumerate(stream):
        if line in last:
            out.append(len(set(stream[last[line] + 1 : t])))
        else:
            out.append(None)
        last[line] = t
    return out


def test_simple_sequences():
    t = ReuseDistanceTracker()
    assert t.observe(10) is None
    assert t.observe(11) is None
    assert t.observe(10) == 1  # A B A
    t2 = ReuseDistanceTracker()
    assert t2.observe(5) is None
    assert t2.observe(5) == 0  # A A
    t3 = ReuseDistanceTracker()
    for line in (1, 2, 3, 1):
        d = t3.observe(line)
    assert d == 2


def test_matches_quadratic_oracle():
    rng = random.Random(21)
    for _ in range(20):
        n = rng.randrange(100, 2000)
        universe = rng.randrange(4, 200)
        stream = [rng.randrange(universe) for _ in range(n)]
        t = ReuseDistanceTracker()
        assert [t.observe(x) for x in stream] == quadratic_reuse_distances(stream)


def test_tracker_survives_internal_resize():
    # More observations than the initial tree capacity.
    t = ReuseDistanceTracker()
    stream = [i % 7 for i in range(5000)]
    expect = quadratic_reuse_distances(stream)
    assert [t.observe(x) for x in stream] == expect


def test_histogram_buckets_and_cap():
    h = ReuseHistogram(cap=10)
    for d in [0, 0, 3, 9, 10, 11, 500, None, None]:
        h.add(d)
    assert h.cold_count == 2
    assert h.buckets[0] == 2
    assert h.buckets[3] == 1
    assert h.buckets[9] == 1
    assert h.buckets[10] == 3  # overflow bucket collects everything >= cap
    assert h.total == 9
    assert h.to_rows() == [(0, 2), (3, 1), (9, 1), (10, 3)]


def rec(idx, pid, directive, acc):
    return IntervalRecord(idx, pid, directive, acc, 0, 0, 0, 0, 0)


def test_per_phase_accuracy_grouping():
    records = [
        rec(0, -1, "base", 1.0),  # unstable: excluded
        rec(1, 0, "base", 0.2),  # base interval: excluded by default
        rec(2, 0, "markov8", 0.8),
        rec(3, 0, "markov8", 0.6),
        rec(4, 1, "fixed-rate", 0.9),
        rec(5, 1, "fixed-rate", None),  # no validation data: excluded
    ]
    out = per_phase_accuracy(records)
    assert set(out) == {0, 1}
    mean, sd = out[0]
    assert mean == 0.7
    assert sd == pytest.approx(0.1)
    assert out[1] == (0.9, 0.0)
    everything = per_phase_accuracy(records, swapped_only=False)
    assert everything[0][0] == (0.2 + 0.8 + 0.6) / 3


def test_percent_change():
    base = {"l1_hits": 200, "l2_hits": 50, "l3_hits": 0, "mem_accesses": 10, "cycles": 1000}
    model = {"l1_hits": 210, "l2_hits": 45, "l3_hits": 5, "mem_accesses": 10, "cycles": 900}
    out = percent_change(model, base)
    assert out["l1_hits"] == 0.05
    assert out["l2_hits"] == -0.1
    assert out["l3_hits"] is None  # zero base reported as not-applicable
    assert out["mem_accesses"] == 0.0
    assert out["cycles"] == -0.1


def test_percent_change_identical_runs():
    t = {"l1_hits": 5, "l2_hits": 4, "l3_hits": 3, "mem_accesses": 2, "cycles": 1}
    assert all(v == 0.0 for v in percent_change(t, dict(t)).values())
