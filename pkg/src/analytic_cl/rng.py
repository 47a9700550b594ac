"""Portable deterministic random number generation.

The random projection weights must be reproducible bit-for-bit across
implementations, so they are derived from a fixed, documented generator
rather than whatever the platform's default happens to be:

* uniform stream: SplitMix64 used as a counter-based generator.  Output
  ``i`` (0-based) is the SplitMix64 finalizer applied to
  ``seed + (i + 1) * 0x9E3779B97F4A7C15`` (all arithmetic mod 2^64).
* uint64 -> (0, 1]: take the top 53 bits, add 1, scale by 2^-53.
* normals: plain trigonometric Box-Muller on consecutive uniform pairs
  (u1, u2) -> (sqrt(-2 ln u1) cos(2 pi u2), sqrt(-2 ln u1) sin(2 pi u2)).

See docs/rng.md for the normative description.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(z):
    """SplitMix64 finalizer, vectorized over a uint64 array."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_stream(seed, count, offset=0):
    """`count` uniforms in (0, 1], entries `offset`..`offset+count-1` of the stream."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    bits = _splitmix64(np.uint64(seed) + idx * _GOLDEN)
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def normal_stream(seed, count):
    """`count` standard normal draws via trigonometric Box-Muller."""
    pairs = (count + 1) // 2
    u = uniform_stream(seed, 2 * pairs)
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]
