"""Set-associative LRU caches and the three-level hierarchy with cycle accounting.

The L1D slot of the hierarchy accepts anything exposing
`hit_check(address, is_write) -> bool`, which is how statistical
approximations get swapped in for the detailed model.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CacheConfig:
    total_bytes: int
    associativity: int
    line_bytes: int
    hit_latency: int

    def __post_init__(self):
        if self.total_bytes % (self.associativity * self.line_bytes) != 0:
            raise ValueError("total_bytes must be divisible by associativity * line_bytes")
        if not _is_pow2(self.set_count):
            raise ValueError("set count must be a power of two")
        if not _is_pow2(self.line_bytes):
            raise ValueError("line_bytes must be a power of two")
        if self.hit_latency <= 0:
            raise ValueError("hit_latency must be positive")

    @property
    def set_count(self) -> int:
        return self.total_bytes // (self.associativity * self.line_bytes)

    @property
    def tag_array_bytes(self) -> int:
        # Tags stored as 8-byte values.
        return self.set_count * self.associativity * 8

    @property
    def hit_check_comparisons(self) -> int:
        # Linear scan over the ways to search, plus another to pick an
        # eviction victim.
        return 2 * self.associativity


# Default geometry. L1D keeps the 128-set layout (32 KiB, 8-way, 32 B
# lines) so its tag footprint is 8 KiB; L2/L3 use 64 B lines. Latencies
# are plausible defaults and fully configurable.
DEFAULT_L1 = CacheConfig(32 * 1024, 8, 32, 4)
DEFAULT_L2 = CacheConfig(256 * 1024, 8, 64, 12)
DEFAULT_L3 = CacheConfig(2 * 1024 * 1024, 16, 64, 40)
DEFAULT_MEMORY_LATENCY = 200


@dataclass(frozen=True)
class HierarchyConfig:
    l1: CacheConfig = DEFAULT_L1
    l2: CacheConfig = DEFAULT_L2
    l3: CacheConfig = DEFAULT_L3
    memory_latency: int = DEFAULT_MEMORY_LATENCY

    def __post_init__(self):
        lat = [self.l1.hit_latency, self.l2.hit_latency, self.l3.hit_latency, self.memory_latency]
        if any(a >= b for a, b in zip(lat, lat[1:])):
            raise ValueError("latencies must strictly increase from L1 to memory")

    @classmethod
    def from_dict(cls, d: dict) -> "HierarchyConfig":
        def cache(key, dflt):
            sub = d.get(key)
            if sub is None:
                return dflt
            return CacheConfig(
                total_bytes=sub.get("total_bytes", dflt.total_bytes),
                associativity=sub.get("associativity", dflt.associativity),
                line_bytes=sub.get("line_bytes", dflt.line_bytes),
                hit_latency=sub.get("hit_latency", dflt.hit_latency),
            )

        return cls(
            l1=cache("l1", DEFAULT_L1),
            l2=cache("l2", DEFAULT_L2),
            l3=cache("l3", DEFAULT_L3),
            memory_latency=d.get("memory_latency", DEFAULT_MEMORY_LATENCY),
        )

    @classmethod
    def from_file(cls, path) -> "HierarchyConfig":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


class Level(enum.IntEnum):
    L1 = 0
    L2 = 1
    L3 = 2
    MEM = 3


class SetAssociativeCache:
    """Detailed LRU cache. Misses allocate (write-allocate), hits promote
    to MRU. Each set is an insertion-ordered dict keyed by line id, oldest
    first."""

    __slots__ = ("config", "_sets", "_line_shift", "_set_mask")

    def __init__(self, config: CacheConfig):
        self.config = config
        self._sets = [dict() for _ in range(config.set_count)]
        self._line_shift = config.line_bytes.bit_length() - 1
        self._set_mask = config.set_count - 1

    def hit_check(self, address: int, is_write: bool = False) -> bool:
        """True iff the line containing `address` is resident. Always leaves
        the line resident and MRU afterwards."""
        line = address >> self._line_shift
        s = self._sets[line & self._set_mask]
        if line in s:
            del s[line]
            s[line] = None
            return True
        if len(s) >= self.config.associativity:
            del s[next(iter(s))]
        s[line] = None
        return False

    def resident(self, address: int) -> bool:
        """Non-mutating residency peek."""
        line = address >> self._line_shift
        return line in self._sets[line & self._set_mask]

    def fingerprint(self) -> int:
        """Order-sensitive hash of all set contents; used to assert the
        detailed model stays frozen during swapped intervals."""
        return hash(tuple(tuple(s) for s in self._sets))


class Hierarchy:
    """Three-level inclusive-allocation hierarchy with per-level hit
    counters and a cycle accumulator. Single-threaded per instance."""

    def __init__(self, config: HierarchyConfig | None = None):
        self.config = config or HierarchyConfig()
        self.l1 = SetAssociativeCache(self.config.l1)
        self.l2 = SetAssociativeCache(self.config.l2)
        self.l3 = SetAssociativeCache(self.config.l3)
        self.l1_hits = 0
        self.l2_hits = 0
        self.l3_hits = 0
        self.mem_accesses = 0
        self.cycles = 0

    def access(self, address: int, is_write: bool = False) -> tuple[Level, int]:
        """Full detailed access: L1 then the downstream levels."""
        if self.l1.hit_check(address, is_write):
            self.l1_hits += 1
            lat = self.config.l1.hit_latency
            self.cycles += lat
            return Level.L1, lat
        return self.miss_to_l2(address)

    def count_l1_hit(self) -> tuple[Level, int]:
        """Account an L1 hit predicted by a swapped-in model (the detailed
        L1 state is left untouched)."""
        self.l1_hits += 1
        lat = self.config.l1.hit_latency
        self.cycles += lat
        return Level.L1, lat

    def miss_to_l2(self, address: int) -> tuple[Level, int]:
        """Forward an L1 miss down the hierarchy; allocates at every level
        that missed."""
        if self.l2.hit_check(address):
            self.l2_hits += 1
            level, lat = Level.L2, self.config.l2.hit_latency
        elif self.l3.hit_check(address):
            self.l3_hits += 1
            level, lat = Level.L3, self.config.l3.hit_latency
        else:
            self.mem_accesses += 1
            level, lat = Level.MEM, self.config.memory_latency
        self.cycles += lat
        return level, lat

    def simulate_access(self, l1_model, is_write: bool, address: int) -> tuple[Level, int]:
        """Drive one reference through the hierarchy with `l1_model` in the
        L1D slot (the detailed cache or a swapped statistical model)."""
        if l1_model.hit_check(address, is_write):
            if l1_model is self.l1:
                self.l1_hits += 1
                lat = self.config.l1.hit_latency
                self.cycles += lat
                return Level.L1, lat
            return self.count_l1_hit()
        return self.miss_to_l2(address)

    def totals(self) -> dict:
        return {
            "l1_hits": self.l1_hits,
            "l2_hits": self.l2_hits,
            "l3_hits": self.l3_hits,
            "mem_accesses": self.mem_accesses,
            "cycles": self.cycles,
        }
