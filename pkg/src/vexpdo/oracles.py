"""Brute-force reference implementations.

These deliberately avoid the summed-area tables and sliding maxima used
by :mod:`vexpdo.maximal`; they exist to cross-check them.
"""

import numpy as np

from .maximal import CubeFamily

__all__ = ["naive_cube_mean", "exhaustive_maximal", "exhaustive_sharp_maximal", "discrete_lp_norm"]


def naive_cube_mean(values, cube):
    return np.asarray(values)[cube.slices()].mean()


def exhaustive_maximal(f, k_max=None):
    """Maximal function by direct summation over every cube containing each node."""
    fam = CubeFamily(f.grid, k_max)
    a = f.abs
    out = np.zeros(a.shape)
    for idx in np.ndindex(*a.shape):
        out[idx] = max(a[c.slices()].sum() / c.side**a.ndim for c in fam.cubes_containing(idx))
    return out


def exhaustive_sharp_maximal(f, k_max=None):
    fam = CubeFamily(f.grid, k_max)
    v = f.values
    out = np.zeros(v.shape)
    for idx in np.ndindex(*v.shape):
        best = 0.0
        for c in fam.cubes_containing(idx):
            block = v[c.slices()]
            best = max(best, np.abs(block - block.mean()).mean())
        out[idx] = best
    return out


def discrete_lp_norm(values, q, cell_volume):
    """Closed-form discrete ``L^q`` norm ``(h^n * sum |f|^q)^(1/q)``."""
    return float((cell_volume * np.sum(np.abs(values) ** q)) ** (1.0 / q))
