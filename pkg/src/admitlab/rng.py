"""Deterministic random number generation for replayable experiments.

Every stochastic component of the lab draws from :class:`Rng`, a pure-Python
xoshiro256** generator seeded through splitmix64.  The algorithm is spelled
out below so that a port in any other language can replay a run bit for bit
from the (seed, config) pair alone.

Seeding (splitmix64, Steele/Lea/Flood):
    state <- seed (mod 2^64)
    repeat 4 times to fill s[0..3]:
        state <- state + 0x9E3779B97F4A7C15
        z <- state
        z <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9
        z <- (z xor (z >> 27)) * 0x94D049BB133111EB
        output z xor (z >> 31)

Output step (xoshiro256**, Blackman/Vigna):
    result <- rotl(s1 * 5, 7) * 9
    t <- s1 << 17
    s2 ^= s0;  s3 ^= s1;  s1 ^= s2;  s0 ^= s3;  s2 ^= t
    s3 <- rotl(s3, 45)

All arithmetic is mod 2^64.  A uniform variate on [0, 1) is the top 53 bits
of the output times 2^-53, which is exactly representable in an IEEE double.

Child streams for parallel trials are derived with :meth:`Rng.split`; the
child seed is ``splitmix64_mix(seed + (index + 1) * 0x9E3779B97F4A7C15)``,
so (master seed, trial index) pins the whole trial.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_INV53 = 2.0 ** -53


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Rng:
    """xoshiro256** stream; identical seed gives an identical draw sequence."""

    __slots__ = ("seed", "s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        x = self.seed
        state = []
        for _ in range(4):
            x = (x + _GAMMA) & _MASK
            state.append(_mix64(x))
        if not any(state):  # all-zero state would lock the generator
            state[0] = 1
        self.s0, self.s1, self.s2, self.s3 = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s1 * 5) & _MASK
        r = ((((x << 7) | (x >> 57)) & _MASK) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self.s0, self.s1, self.s2 = s0, s1, s2
        self.s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        return r

    def uniform(self) -> float:
        """One uniform variate on [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def pair(self) -> tuple[float, float]:
        """Two independent uniforms, returned sorted (advances by 2 draws)."""
        a = self.uniform()
        b = self.uniform()
        return (a, b) if a <= b else (b, a)

    def uniform_block(self, n: int) -> np.ndarray:
        """`n` uniforms as a float64 array, same stream as repeated uniform().

        The tight local-variable loop keeps bulk Monte Carlo affordable in
        pure Python; vectorized consumers do the rest in numpy.
        """
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        out = [0] * n
        for i in range(n):
            x = (s1 * 5) & _MASK
            out[i] = ((((x << 7) | (x >> 57)) & _MASK) * 9) & _MASK
            t = (s1 << 17) & _MASK
            s2 ^= s0
            s3 ^= s1
            s1 ^= s2
            s0 ^= s3
            s2 ^= t
            s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        arr = np.array(out, dtype=np.uint64)
        return (arr >> np.uint64(11)).astype(np.float64) * _INV53

    def split(self, index: int) -> "Rng":
        """Independent child stream for trial `index` (deterministic)."""
        child_seed = _mix64((self.seed + (index + 1) * _GAMMA) & _MASK)
        return Rng(child_seed)

    def state(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)
