"""Deterministic random number stream shared by all samplers.

The engine is SplitMix64 used counter-style: draw number ``c`` of the stream
with seed ``s`` is ``mix64(s + (c + 1) * GAMMA)``, so a stream is fully
described by the pair (seed, counter) and any draw can be recomputed without
replaying the ones before it.  The compiled kernel reimplements the same
protocol; the two must stay bit-identical (see tests/test_backends.py).

Draw primitives:

* ``u64``     -- one raw 64-bit word, one counter tick.
* ``uniform`` -- (raw >> 11) * 2**-53, a 53-bit-mantissa uniform in [0, 1).
* ``bit``     -- top bit of a raw word.
* ``below``   -- uniform integer in [0, k) by top-bits rejection; consumes a
                 variable number of ticks (one per attempt).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

_TWO53_INV = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def raw_draw(seed: int, counter: int) -> int:
    """The counter-th raw 64-bit draw of the stream with the given seed."""
    return mix64((seed + (counter + 1) * GAMMA) & _MASK64)


class RngStream:
    """A (seed, counter) pair with the draw primitives above.

    Identical (seed, counter) means identical draws on every platform.  A
    stream is single-owner: run one chain per stream.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & _MASK64
        self.counter = counter

    def u64(self) -> int:
        v = raw_draw(self.seed, self.counter)
        self.counter += 1
        return v

    def bit(self) -> int:
        return self.u64() >> 63

    def uniform(self) -> float:
        return (self.u64() >> 11) * _TWO53_INV

    def below(self, k: int) -> int:
        """Uniform integer in [0, k), k >= 1."""
        if k < 1:
            raise ValueError("below() needs k >= 1")
        bits = (k - 1).bit_length()
        if bits == 0:
            self.u64()  # consume one tick even when the answer is forced
            return 0
        shift = 64 - bits
        while True:
            v = self.u64() >> shift
            if v < k:
                return v

    def clone(self) -> "RngStream":
        return RngStream(self.seed, self.counter)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed:#x}, counter={self.counter})"
