"""Discrete Hardy-Littlewood, q-maximal and sharp maximal operators.

The supremum over cubes is taken over grid-aligned cubes: unions of
``s**dim`` whole cells with odd side ``s = 2k + 1`` cells, clipped to the
domain, at every position that contains the query node.  Cube sums come
from a summed-area table, and the per-node maximum over positions is a
sliding-window maximum of the per-position averages.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.ndimage import maximum_filter

from .errors import PreconditionError
from .exponent import Exponent
from .grid import Grid, SampledFunction
from .modular import luxemburg_norm

__all__ = [
    "Cube",
    "CubeFamily",
    "summed_area_table",
    "box_means",
    "cube_average",
    "hl_maximal",
    "q_maximal",
    "sharp_maximal",
    "ProbeStats",
    "probe_maximal_boundedness",
    "probe_sharp_inequality",
]


@dataclass(frozen=True)
class Cube:
    """Axis-parallel cube of ``side`` cells whose first cell has index ``start``."""

    start: tuple
    side: int

    def slices(self):
        return tuple(slice(s, s + self.side) for s in self.start)

    def contains(self, index) -> bool:
        return all(s <= i < s + self.side for s, i in zip(self.start, index))


@dataclass(frozen=True)
class CubeFamily:
    """Odd cube sides ``(2k+1)`` cells for ``k = 0..k_max``, capped at ``N``."""

    grid: Grid
    k_max: Optional[int] = None

    @property
    def sides(self) -> list:
        k_max = self.grid.N // 2 if self.k_max is None else self.k_max
        return [2 * k + 1 for k in range(k_max + 1) if 2 * k + 1 <= self.grid.N]

    def cubes_containing(self, index):
        """Every cube of the family that contains the node ``index``."""
        N = self.grid.N
        for s in self.sides:
            ranges = [range(max(0, i - s + 1), min(i, N - s) + 1) for i in index]
            for start in itertools.product(*ranges):
                yield Cube(tuple(start), s)

    def validate(self, cube: Cube):
        if len(cube.start) != self.grid.dim or cube.side < 1:
            raise PreconditionError(f"malformed cube {cube}")
        if any(s < 0 or s + cube.side > self.grid.N for s in cube.start):
            raise PreconditionError(f"cube {cube} leaves the grid of {self.grid.N} cells per axis")


def summed_area_table(values: np.ndarray) -> np.ndarray:
    """Inclusive prefix sums with a leading zero row along every axis."""
    table = np.asarray(values)
    for ax in range(table.ndim):
        table = np.cumsum(table, axis=ax)
    return np.pad(table, [(1, 0)] * table.ndim)


def box_means(values: np.ndarray, side: int, table: Optional[np.ndarray] = None) -> np.ndarray:
    """Means over every cube of ``side`` cells; shape ``(N - side + 1,)*dim``."""
    if table is None:
        table = summed_area_table(values)
    dim = table.ndim
    n = table.shape[0] - 1
    m = n - side + 1
    total = 0
    for corner in itertools.product((0, 1), repeat=dim):
        sl = tuple(slice(side, side + m) if c else slice(0, m) for c in corner)
        sign = (-1) ** (dim - sum(corner))
        total = total + sign * table[sl]
    return total / side**dim


def cube_average(f: SampledFunction, cube: Cube, table: Optional[np.ndarray] = None):
    """Mean of the samples of ``f`` over ``cube``, from a summed-area table."""
    CubeFamily(f.grid).validate(cube)
    if table is None:
        table = summed_area_table(f.values)
    total = 0
    for corner in itertools.product((0, 1), repeat=f.grid.dim):
        idx = tuple(s + cube.side if c else s for s, c in zip(cube.start, corner))
        total = total + (-1) ** (f.grid.dim - sum(corner)) * table[idx]
    return total / cube.side**f.grid.dim


def _max_over_positions(window_values: np.ndarray, side: int, n: int) -> np.ndarray:
    """For each node, the max of ``window_values`` over windows containing it."""
    pad = side - 1
    padded = np.pad(window_values, [(pad, pad)] * window_values.ndim, constant_values=-np.inf)
    r = side // 2
    out = maximum_filter(padded, size=side, mode="constant", cval=-np.inf)
    return out[(slice(r, r + n),) * window_values.ndim]


def _maximal_abs(a: np.ndarray, sides) -> np.ndarray:
    table = summed_area_table(a)
    n = a.shape[0]
    best = np.array(a, dtype=float)
    for s in sides:
        best = np.maximum(best, _max_over_positions(box_means(a, s, table), s, n))
    return best


def hl_maximal(f: SampledFunction, k_max: Optional[int] = None) -> SampledFunction:
    """Hardy-Littlewood maximal function over grid-aligned cubes."""
    sides = CubeFamily(f.grid, k_max).sides
    return SampledFunction(f.grid, _maximal_abs(f.abs, sides))


def q_maximal(f: SampledFunction, q: float, k_max: Optional[int] = None) -> SampledFunction:
    """``M_q f = M(|f|^q)^(1/q)``."""
    if not q >= 1:
        raise PreconditionError(f"q must be at least 1, got {q}")
    sides = CubeFamily(f.grid, k_max).sides
    return SampledFunction(f.grid, _maximal_abs(f.abs**q, sides) ** (1.0 / q))


def sharp_maximal(f: SampledFunction, k_max: Optional[int] = None) -> SampledFunction:
    """Fefferman-Stein sharp maximal function: sup of mean ``|f - f_Q|``."""
    v = f.values
    dim, n = v.ndim, v.shape[0]
    axes = tuple(range(dim, 2 * dim))
    best = np.zeros(v.shape)
    for s in CubeFamily(f.grid, k_max).sides:
        win = sliding_window_view(v, (s,) * dim)
        # oscillation is shift invariant; centring on a sample keeps constants exactly zero
        win = win - win[(Ellipsis,) + (slice(0, 1),) * dim]
        mean = win.mean(axis=axes, keepdims=True)
        osc = np.abs(win - mean).mean(axis=axes)
        best = np.maximum(best, _max_over_positions(osc, s, n))
    return SampledFunction(f.grid, best)


@dataclass
class ProbeStats:
    """Norm ratios collected over a probe family."""

    ratios: list
    max: float
    median: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"ratios": list(map(float, self.ratios)), "max": self.max,
                "median": self.median, "notes": list(self.notes)}


def _stats(ratios, notes):
    if not ratios:
        return ProbeStats([], float("nan"), float("nan"), notes)
    return ProbeStats(ratios, float(np.max(ratios)), float(np.median(ratios)), notes)


def probe_maximal_boundedness(p: Exponent, family, q: float = 1.0) -> ProbeStats:
    """Ratios ``||M_q f|| / ||f||`` in the variable-exponent norm."""
    ratios, notes = [], []
    for k, f in enumerate(family):
        nf = luxemburg_norm(f, p).value
        if nf == 0:
            notes.append(f"member {k} is the zero function; skipped")
            continue
        ratios.append(luxemburg_norm(q_maximal(f, q), p).value / nf)
    return _stats(ratios, notes)


def probe_sharp_inequality(p: Exponent, family) -> ProbeStats:
    """Empirical constant ``max ||f|| / ||M^# f||`` over the family.

    Raises
    ------
    PreconditionError
        For a member with vanishing sharp maximal function (a constant).
    """
    ratios = []
    for k, f in enumerate(family):
        sharp = sharp_maximal(f)
        if not np.any(sharp.values):
            raise PreconditionError(f"member {k} is constant on the grid; its sharp maximal function vanishes")
        ratios.append(luxemburg_norm(f, p).value / luxemburg_norm(sharp, p).value)
    return _stats(ratios, [])
