"""Portable pseudo-random streams.

Streams are defined bit-for-bit so that any implementation can reproduce
them:

* ``splitmix64``: state += 0x9E3779B97F4A7C15; output is the state passed
  through the mixing function ``mix64`` (xor-shift 30, multiply
  0xBF58476D1CE4E5B9, xor-shift 27, multiply 0x94D049BB133111EB,
  xor-shift 31), all modulo 2**64.
* ``Xoshiro256StarStar``: the four state words are the first four
  splitmix64 outputs of the seed. Each draw returns
  ``rotl(s1 * 5, 7) * 9`` and then updates the state in the reference
  order.
* Uniform doubles are ``(x >> 11) * 2**-53``, i.e. in [0, 1).
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z):
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    def __init__(self, seed):
        sm = SplitMix64(seed)
        self.s = [sm.next_u64() for _ in range(4)]

    def next_u64(self):
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self):
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, size, low=0.0, high=1.0):
        out = np.empty(size)
        for i in range(size):
            out[i] = self.random()
        return low + (high - low) * out


def derive_seed(base, index):
    """Child seed number ``index`` of ``base``.

    ``base + (index + 1) * GOLDEN_GAMMA`` is injective in ``index`` (the
    gamma is odd) and ``mix64`` is a bijection, so distinct indices never
    collide for a fixed base.
    """
    if index < 0:
        raise ValueError("seed index must be non-negative")
    return mix64((int(base) + (int(index) + 1) * GOLDEN_GAMMA) & MASK64)
