"""Online phase detection from hashed working-set bit-vector signatures.

Every reference address sets one bit in the current interval's signature.
At each interval boundary the signature is compared with the previous one;
enough consecutive similar intervals get cataloged as a new phase, and
unstable intervals are matched against the catalog or labeled -1.
"""
from __future__ import annotations

from dataclasses import dataclass

_M64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """The SplitMix64 finalizer: a fixed 64-bit mixing hash, deterministic
    across runs and platforms."""
    x &= _M64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _M64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _M64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class PhaseDetectorConfig:
    threshold: float = 0.5
    interval_len: int = 10_000
    sig_len: int = 1024
    drop_bits: int = 3
    stable_min: int = 5

    def __post_init__(self):
        if not (0 < self.threshold <= 1):
            raise ValueError("threshold must be in (0, 1]")
        if self.interval_len <= 0:
            raise ValueError("interval_len must be positive")
        if self.sig_len <= 0 or (self.sig_len & (self.sig_len - 1)) != 0:
            raise ValueError("sig_len must be a power of two")
        if self.drop_bits < 0:
            raise ValueError("drop_bits must be nonnegative")
        if self.stable_min < 1:
            raise ValueError("stable_min must be >= 1")


@dataclass(frozen=True)
class PhaseEvent:
    interval_index: int
    phase_id: int  # -1 means unstable / unclassified


def hash_address(address: int, config: PhaseDetectorConfig) -> int:
    """Map an address to a signature bit index: drop the low bits, mix, and
    keep the top log2(sig_len) bits."""
    shift = 64 - (config.sig_len.bit_length() - 1)
    return splitmix64(address >> config.drop_bits) >> shift


def signature_diff(a: int, b: int) -> float:
    """Jaccard distance of two bit-set signatures: popcount(XOR)/popcount(OR).

    Two empty signatures are defined as identical (0.0)."""
    union = a | b
    if union == 0:
        return 0.0
    return (a ^ b).bit_count() / union.bit_count()


class PhaseDetector:
    """Single-threaded interval classifier; feed it one address per
    reference and it emits a PhaseEvent at each interval boundary."""

    def __init__(self, config: PhaseDetectorConfig | None = None):
        self.config = config or PhaseDetectorConfig()
        self.table: list[int] = []  # cataloged signatures, index = phase id
        self._sig = 0
        self._last_sig = 0
        self._count = 0
        self._stable = 0
        self._phase = -1
        self._interval_index = 0
        self._drop = self.config.drop_bits
        self._shift = 64 - (self.config.sig_len.bit_length() - 1)
        self._interval_len = self.config.interval_len
        self._threshold = self.config.threshold

    @property
    def phase(self) -> int:
        return self._phase

    @property
    def intervals_seen(self) -> int:
        return self._interval_index

    def observe(self, address: int) -> PhaseEvent | None:
        x = (address >> self._drop) & _M64
        x ^= x >> 30
        x = (x * 0xBF58476D1CE4E5B9) & _M64
        x ^= x >> 27
        x = (x * 0x94D049BB133111EB) & _M64
        self._sig |= 1 << ((x ^ (x >> 31)) >> self._shift)
        self._count += 1
        if self._count < self._interval_len:
            return None
        return self._close_interval()

    def _close_interval(self) -> PhaseEvent:
        self._count = 0
        sig = self._sig
        if signature_diff(sig, self._last_sig) < self._threshold:
            self._stable += 1
            if self._stable >= self.config.stable_min and self._phase == -1:
                self.table.append(sig)
                self._phase = len(self.table) - 1
        else:
            self._stable = 0
            self._phase = -1
            if self.table:
                # Argmin scan; the lowest phase id wins ties.
                best = 0
                best_diff = signature_diff(sig, self.table[0])
                for i in range(1, len(self.table)):
                    d = signature_diff(sig, self.table[i])
                    if d < best_diff:
                        best, best_diff = i, d
                if best_diff < self._threshold:
                    self._phase = best
        self._last_sig = sig
        self._sig = 0
        event = PhaseEvent(self._interval_index, self._phase)
        self._interval_index += 1
        return event
