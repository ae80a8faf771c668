"""Portable seeded PRNG: xoshiro256** seeded through splitmix64.

The generator is specified bit-for-bit so that random suites reproduce on any
platform and in any implementation:

* seeding: ``x = seed + stream * 0xD1B54A32D192ED03 (mod 2**64)``, then four
  successive splitmix64 outputs form the xoshiro state;
* ``uniform()`` is ``(next_u64() >> 11) * 2**-53``;
* ``normal()`` is Box-Muller on ``(1 - u1, u2)``, returning the cosine branch
  first and caching the sine branch for the next call.
"""

import math

_MASK = (1 << 64) - 1


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK


def splitmix64(x):
    """Return ``(next_state, output)`` of one splitmix64 step."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** generator. State is owned by one caller at a time."""

    def __init__(self, seed=0, stream=0):
        x = (int(seed) + int(stream) * 0xD1B54A32D192ED03) & _MASK
        state = []
        for _ in range(4):
            x, out = splitmix64(x)
            state.append(out)
        if not any(state):
            state[0] = 1
        self._s = state
        self._spare = None

    def next_u64(self):
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self):
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)
