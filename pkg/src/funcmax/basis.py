"""Fourier-type orthonormal basis on [0, 1] used by the simulator and the
default projection directions.

The family is indexed v = 1..50: a constant function, then alternating
cosine and sine waves of increasing frequency.  The functions are orthonormal
in L2([0, 1]).
"""

from __future__ import annotations

import numpy as np

from .errors import BasisError

BASIS_SIZE = 50


def basis_matrix(points: np.ndarray, count: int = BASIS_SIZE) -> np.ndarray:
    """Evaluate basis functions 1..count at the given points.

    Returns an array of shape (count, len(points)); row v-1 holds the v-th
    basis function.
    """
    if not 1 <= count <= BASIS_SIZE:
        raise BasisError(f"basis count must be in [1, {BASIS_SIZE}], got {count}")
    t = np.asarray(points, dtype=np.float64)
    u = 2.0 * t - 1.0
    out = np.empty((count, t.size), dtype=np.float64)
    root2 = np.sqrt(2.0)
    for v in range(1, count + 1):
        if v == 1:
            out[0] = 1.0
        elif v % 2 == 0:
            # v = 2w: sqrt(2) cos(w pi (2t - 1)), 1 <= w <= 25
            w = v // 2
            out[v - 1] = root2 * np.cos(w * np.pi * u)
        else:
            # v = 2w - 1, w >= 2: sqrt(2) sin((w - 1) pi (2t - 1))
            w = (v + 1) // 2
            out[v - 1] = root2 * np.sin((w - 1) * np.pi * u)
    return out
