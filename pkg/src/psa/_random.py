"""Seeded normal variates.

Uniforms come from numpy's PCG64 bit generator; normals are produced from them
with the Box-Muller transform so that the mapping from seed to sample only
depends on PCG64 and a few libm calls.
"""

import numpy as np


def make_rng(seed):
    """Return a PCG64-backed ``Generator`` for an int seed or a sequence of ints."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def standard_normal(rng, shape):
    """Draw standard normal variates of ``shape`` by Box-Muller."""
    shape = (int(shape),) if np.isscalar(shape) else tuple(int(s) for s in shape)
    size = int(np.prod(shape))
    half = (size + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    # 1 - u1 lies in (0, 1], keeping the log finite
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:size].reshape(shape)
