"""Memory trace records, trace file I/O, and synthetic phased workload generation.

Trace files are plain text, one reference per line: `R 0x7fff0040` or
`W 0x10`. Lines starting with `#` are comments, blank lines are skipped.
"""
from __future__ import annotations

import enum
import random
from array import array
from dataclasses import dataclass
from typing import Iterable, Iterator


class Op(enum.Enum):
    READ = "R"
    WRITE = "W"


@dataclass(frozen=True)
class TraceRecord:
    op: Op
    address: int


class TraceFormatError(ValueError):
    """Raised for a malformed trace file line (carries the line number)."""


class PhaseKind(enum.Enum):
    HIGH_LOCALITY = "high-locality"
    VECTOR_ADD = "vector-add"
    RANDOM_ACCESS = "random-access"
    MARKER = "marker"


# Default footprint per phase kind, in bytes actually touched. These are
# sized so that interval signatures stay well below saturation for every
# kind except VECTOR_ADD, whose streaming sweep intentionally saturates:
# with the default 1024-bit signature, two saturated phases would be
# indistinguishable, so at most one kind may saturate.
DEFAULT_WORKING_SET = {
    PhaseKind.HIGH_LOCALITY: 2048,
    PhaseKind.VECTOR_ADD: 3 * 1024 * 1024,
    PhaseKind.RANDOM_ACCESS: 16 * 1024,
    PhaseKind.MARKER: 512,
}


@dataclass(frozen=True)
class SyntheticPhaseSpec:
    kind: PhaseKind
    length: int
    seed: int
    working_set_bytes: int = 0  # 0 means the kind's default

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("phase length must be positive")
        if self.working_set_bytes < 0:
            raise ValueError("working_set_bytes must be nonnegative")
        if self.kind is PhaseKind.RANDOM_ACCESS and self.resolved_working_set <= 0:
            raise ValueError("RandomAccess requires working_set_bytes > 0")

    @property
    def resolved_working_set(self) -> int:
        return self.working_set_bytes or DEFAULT_WORKING_SET[self.kind]


class Trace:
    """A materialized reference stream, stored compactly as parallel arrays.

    `ops[i]` is 1 for a write, 0 for a read; `addresses[i]` is the 64-bit
    byte address. Iteration yields TraceRecord values.
    """

    __slots__ = ("ops", "addresses")

    def __init__(self, ops: array | None = None, addresses: array | None = None):
        self.ops = ops if ops is not None else array("B")
        self.addresses = addresses if addresses is not None else array("Q")

    def append(self, is_write: int, address: int) -> None:
        self.ops.append(1 if is_write else 0)
        self.addresses.append(address)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self) -> Iterator[TraceRecord]:
        for w, a in zip(self.ops, self.addresses):
            yield TraceRecord(Op.WRITE if w else Op.READ, a)

    @classmethod
    def from_records(cls, records: Iterable[TraceRecord]) -> "Trace":
        t = cls()
        for r in records:
            t.append(r.op is Op.WRITE, r.address)
        return t


def read_trace(path) -> Iterator[TraceRecord]:
    """Stream TraceRecords from a trace file.

    Malformed lines raise TraceFormatError naming the line number. An empty
    file yields nothing.
    """
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise TraceFormatError(f"line {lineno}: expected '<op> <address>', got {line!r}")
            op_s, addr_s = parts
            if op_s == "R":
                op = Op.READ
            elif op_s == "W":
                op = Op.WRITE
            else:
                raise TraceFormatError(f"line {lineno}: invalid op code {op_s!r}")
            try:
                addr = int(addr_s, 16)
            except ValueError:
                raise TraceFormatError(f"line {lineno}: invalid address {addr_s!r}") from None
            if addr < 0 or addr >= 1 << 64:
                raise TraceFormatError(f"line {lineno}: address out of 64-bit range")
            yield TraceRecord(op, addr)


def load_trace(path) -> Trace:
    return Trace.from_records(read_trace(path))


def write_trace(records: Iterable[TraceRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(f"{r.op.value} 0x{r.address:x}\n")


# --- synthetic workload generation -------------------------------------

# Each phase position in the spec list gets a disjoint 256 MiB address
# region, so distinct phases never share working-set signature bits.
_REGION_STRIDE = 1 << 28

# L1 way size with the default geometry; aliased layouts place lines this
# far apart so a small footprint still produces conflict misses.
_ALIAS_STRIDE = 4096

_DEFAULT_MARKER_SEED = 0x6D61726B


def default_marker_spec(length: int = 120_000, seed: int = _DEFAULT_MARKER_SEED) -> SyntheticPhaseSpec:
    return SyntheticPhaseSpec(PhaseKind.MARKER, length, seed)


def _occurrence_rng(spec: SyntheticPhaseSpec, occurrence: int) -> random.Random:
    return random.Random((spec.seed * 1_000_003) ^ occurrence)


def _emit_marker(trace: Trace, spec: SyntheticPhaseSpec, base: int, rng: random.Random) -> None:
    # Tiny sequential read loop; essentially all L1 hits after warmup.
    words = max(1, spec.resolved_working_set // 8)
    for i in range(spec.length):
        trace.append(0, base + (i % words) * 8)


def _emit_high_locality(trace: Trace, spec: SyntheticPhaseSpec, base: int, rng: random.Random) -> None:
    # Bursts of 4 sequential words within a random 32-byte chunk of a small
    # working set. Chunks alias into a handful of L1 sets so the far
    # accesses see conflict misses while near accesses always hit.
    n_lines = max(1, spec.resolved_working_set // 32)
    spread = min(4, n_lines)
    offsets = [(j // spread) * _ALIAS_STRIDE + (j % spread) * 32 for j in range(n_lines)]
    i = 0
    length = spec.length
    while i < length:
        off = base + offsets[rng.randrange(n_lines)]
        is_write = 1 if rng.random() < 0.25 else 0
        for k in range(min(4, length - i)):
            trace.append(is_write, off + 8 * k)
            i += 1


def _emit_vector_add(trace: Trace, spec: SyntheticPhaseSpec, base: int, rng: random.Random) -> None:
    # c[i] = a[i] + b[i] over three disjoint arrays, unrolled by 8 so each
    # 64-byte group is one read/write run: two read streams, one write
    # stream. Restarts from element 0 on every occurrence.
    arr_bytes = max(64, (spec.resolved_working_set // 3) & ~63)
    elems = arr_bytes // 8
    stride = (arr_bytes + _ALIAS_STRIDE) & ~(_ALIAS_STRIDE - 1)
    streams = ((base, 0), (base + stride, 0), (base + 2 * stride, 1))
    i = 0
    idx = 0
    length = spec.length
    while i < length:
        for start, is_write in streams:
            for k in range(8):
                if i >= length:
                    return
                trace.append(is_write, start + ((idx + k) % elems) * 8)
                i += 1
        idx = (idx + 8) % elems


def _emit_random_access(trace: Trace, spec: SyntheticPhaseSpec, base: int, rng: random.Random) -> None:
    # Uniform line-granularity draws over a fixed set of lines. The lines
    # alias into a fraction of the L1 sets so roughly half the accesses
    # miss despite the small footprint.
    n_lines = max(1, spec.resolved_working_set // 32)
    per_group = min(32, n_lines)
    for _ in range(spec.length):
        j = rng.randrange(n_lines)
        is_write = 1 if rng.random() < 0.1 else 0
        trace.append(is_write, base + (j // per_group) * _ALIAS_STRIDE + (j % per_group) * 32)


_EMITTERS = {
    PhaseKind.MARKER: _emit_marker,
    PhaseKind.HIGH_LOCALITY: _emit_high_locality,
    PhaseKind.VECTOR_ADD: _emit_vector_add,
    PhaseKind.RANDOM_ACCESS: _emit_random_access,
}


def generate_trace(
    phases: list[SyntheticPhaseSpec],
    iterations: int = 1,
    marker_between: bool = False,
    marker_spec: SyntheticPhaseSpec | None = None,
) -> Trace:
    """Emit `iterations` repetitions of the phase list.

    With marker_between, a marker phase stream runs after every
    computational phase. Output is a pure function of the specs, flags and
    seeds.
    """
    if not phases:
        raise ValueError("at least one phase spec is required")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if marker_between and marker_spec is None:
        marker_spec = default_marker_spec()

    trace = Trace()
    occurrences: dict[int, int] = {}

    def emit(spec: SyntheticPhaseSpec, region_index: int) -> None:
        occ = occurrences.get(region_index, 0)
        occurrences[region_index] = occ + 1
        rng = _occurrence_rng(spec, occ)
        base = (region_index + 1) * _REGION_STRIDE
        _EMITTERS[spec.kind](trace, spec, base, rng)

    marker_region = len(phases)
    for _ in range(iterations):
        for i, spec in enumerate(phases):
            emit(spec, i)
            if marker_between:
                emit(marker_spec, marker_region)
    return trace


# --- presets ------------------------------------------------------------


def preset_specs(name: str, seed: int = 1) -> tuple[list[SyntheticPhaseSpec], int, SyntheticPhaseSpec]:
    """Return (phases, iterations, marker_spec) for a named preset.

    `meabo3` mirrors the three-computational-phase benchmark layout: high
    locality, vector add and random access, each run three times with a
    marker phase after every computational phase. `meabo3-small` is a
    shorter two-iteration variant for quick experiments, and `locality`
    is a single pass over the two locality-heavy phases only.
    """
    if name == "meabo3":
        comp_len, marker_len, iters = 280_000, 120_000, 3
    elif name == "meabo3-small":
        comp_len, marker_len, iters = 240_000, 100_000, 2
    elif name == "locality":
        # Two locality-heavy phases, one pass each: phase transitions are
        # rare, so downstream deltas reflect steady-state model behavior.
        phases = [
            SyntheticPhaseSpec(PhaseKind.HIGH_LOCALITY, 300_000, seed * 1000 + 1),
            SyntheticPhaseSpec(PhaseKind.VECTOR_ADD, 600_000, seed * 1000 + 2),
        ]
        marker = SyntheticPhaseSpec(PhaseKind.MARKER, 100_000, seed * 1000 + 4)
        return phases, 1, marker
    else:
        raise ValueError(f"unknown preset {name!r}")
    phases = [
        SyntheticPhaseSpec(PhaseKind.HIGH_LOCALITY, comp_len, seed * 1000 + 1),
        SyntheticPhaseSpec(PhaseKind.VECTOR_ADD, comp_len, seed * 1000 + 2),
        SyntheticPhaseSpec(PhaseKind.RANDOM_ACCESS, comp_len, seed * 1000 + 3),
    ]
    marker = SyntheticPhaseSpec(PhaseKind.MARKER, marker_len, seed * 1000 + 4)
    return phases, iters, marker


PRESET_NAMES = ("meabo3", "meabo3-small", "locality")


def build_preset(name: str, seed: int = 1) -> Trace:
    phases, iterations, marker = preset_specs(name, seed)
    return generate_trace(phases, iterations=iterations, marker_between=True, marker_spec=marker)
