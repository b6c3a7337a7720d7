"""Random streams.

Every random draw in the package comes from a Philox-4x64 counter-based
generator (numpy's ``Philox``), keyed through ``numpy.random.SeedSequence``.
A stream is a pure function of ``(seed, purpose, index)``::

    Generator(Philox(SeedSequence(entropy=seed, spawn_key=(purpose, index))))

so the point coordinates, the edge coin flips and any resampling draw from
separate streams and can never influence one another.  Per-trial seeds in
experiments come from :func:`trial_seed`, a SplitMix64 mix of
``(master_seed, n, trial_index)``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# purpose tags; the integer values are part of the reproducibility contract
POINTS = 1
EDGES = 2
RESAMPLE = 3
PHASE1 = 4
PHASE2 = 5


def stream(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=(int(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed: int, n: int, trial_index: int) -> int:
    """64-bit seed for trial ``trial_index`` at size ``n``.

    ``splitmix64(splitmix64(splitmix64(master) ^ n) ^ trial_index)``.
    """
    h = splitmix64(int(master_seed) & MASK64)
    h = splitmix64(h ^ (int(n) & MASK64))
    return splitmix64(h ^ (int(trial_index) & MASK64))
