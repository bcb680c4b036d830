"""Uniform grids on the truncated cube [-L, L]^n and smooth test functions.

The cube is identified periodically for DFT purposes, so every test
function is expected to be supported well inside it (see
:data:`SUPPORT_GUARD`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import GridMismatchError, SupportError

__all__ = [
    "Grid",
    "SampledFunction",
    "MultiIndex",
    "make_grid",
    "bump",
    "transform_function",
    "multi_indices",
    "SUPPORT_GUARD",
]

#: Fraction of the half-width that test-function supports may occupy.
SUPPORT_GUARD = 0.8


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on [-L, L]^dim with N nodes per axis.

    Nodes sit at ``-L + k*h`` for ``k = 0, ..., N-1`` with ``h = 2L/N``;
    the right endpoint is identified with the left one.  The matching
    DFT frequencies are ``pi*k/L`` for ``k`` in ``[-N/2, N/2)``.
    """

    dim: int
    L: float
    N: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.L > 0:
            raise ValueError(f"half-width L must be positive, got {self.L}")
        if int(self.N) != self.N or self.N % 2 != 0:
            raise ValueError(f"points per axis N must be even, got {self.N}")
        if self.N < 8:
            raise ValueError(f"points per axis N must be at least 8, got {self.N}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def size(self) -> int:
        return self.N**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def dxi(self) -> float:
        """Spacing of the frequency lattice."""
        return np.pi / self.L

    @property
    def xi_max(self) -> float:
        """Nyquist frequency ``pi/h``."""
        return np.pi / self.h

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def freq_axis(self) -> np.ndarray:
        return self.dxi * np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def coords(self) -> tuple:
        """Node coordinates as a tuple of ``dim`` arrays of shape ``self.shape``."""
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    @cached_property
    def freq_coords(self) -> tuple:
        return tuple(np.meshgrid(*([self.freq_axis] * self.dim), indexing="ij"))

    @cached_property
    def radius(self) -> np.ndarray:
        """Euclidean norm |x| at every node."""
        return np.sqrt(sum(c**2 for c in self.coords))

    def node(self, index) -> tuple:
        """Coordinates of the node with the given multi-index."""
        index = np.atleast_1d(index)
        return tuple(float(self.axis[i]) for i in index)

    def nearest_index(self, point) -> tuple:
        point = np.broadcast_to(np.asarray(point, dtype=float), (self.dim,))
        idx = np.rint((point + self.L) / self.h).astype(int)
        return tuple(int(i) for i in np.clip(idx, 0, self.N - 1))

    def with_half_width(self, L: float, keep_spacing: bool = True) -> "Grid":
        """Grid on a different cube, by default with the same spacing."""
        if keep_spacing:
            N = int(round(2 * L / self.h))
            N += N % 2
            return Grid(self.dim, L, N)
        return Grid(self.dim, L, self.N)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.dim, self.L, self.N * factor)


def make_grid(dim: int, L: float, N: int) -> Grid:
    """Build a :class:`Grid`, validating ``dim in {1, 2}``, ``L > 0`` and even ``N >= 8``."""
    return Grid(dim, L, N)


def _as_vector(value, dim, name):
    vec = np.broadcast_to(np.asarray(value, dtype=float), (dim,))
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{name} must be finite")
    return vec


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of a function on a grid.

    ``closure``, when present, evaluates the same function at arbitrary
    points (called with ``dim`` coordinate arrays); it lets translations
    and dilations by non-lattice amounts stay exact.
    """

    grid: Grid
    values: np.ndarray
    closure: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.size != self.grid.size:
            raise ValueError(
                f"expected {self.grid.size} values for grid {self.grid.shape}, got {values.size}"
            )
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_closure(cls, grid: Grid, func: Callable) -> "SampledFunction":
        return cls(grid, func(*grid.coords), func)

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def with_values(self, values) -> "SampledFunction":
        """Same grid, new samples, closure dropped."""
        return SampledFunction(self.grid, values)

    def __add__(self, other):
        if isinstance(other, SampledFunction):
            check_same_grid(self, other)
            return self.with_values(self.values + other.values)
        return self.with_values(self.values + other)

    def __sub__(self, other):
        if isinstance(other, SampledFunction):
            check_same_grid(self, other)
            return self.with_values(self.values - other.values)
        return self.with_values(self.values - other)

    def __mul__(self, scalar):
        if isinstance(scalar, SampledFunction):
            check_same_grid(self, scalar)
            return self.with_values(self.values * scalar.values)
        func = None if self.closure is None else (lambda *x, f=self.closure: scalar * f(*x))
        return SampledFunction(self.grid, scalar * self.values, func)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def support_box(self, rel_tol: float = 0.0):
        """Bounding box ``(lo, hi)`` of the nodes where ``|f|`` exceeds
        ``rel_tol * max|f|``; ``None`` for the zero function."""
        a = self.abs
        peak = a.max()
        if peak == 0:
            return None
        mask = a > rel_tol * peak
        lo, hi = [], []
        for ax in range(self.grid.dim):
            other = tuple(i for i in range(self.grid.dim) if i != ax)
            hit = np.nonzero(mask.any(axis=other) if other else mask)[0]
            lo.append(self.grid.axis[hit[0]])
            hi.append(self.grid.axis[hit[-1]])
        return np.array(lo), np.array(hi)

    def support_radius(self, rel_tol: float = 0.0) -> float:
        """Largest sup-norm coordinate of a node in the support."""
        box = self.support_box(rel_tol)
        if box is None:
            return 0.0
        return float(max(np.abs(box[0]).max(), np.abs(box[1]).max()))


def check_same_grid(*functions) -> Grid:
    grids = {f.grid for f in functions}
    if len(grids) != 1:
        raise GridMismatchError(f"objects live on different grids: {sorted(map(repr, grids))}")
    return functions[0].grid


@dataclass(frozen=True)
class MultiIndex:
    """Multi-index ``(alpha_1, ..., alpha_n)`` of non-negative integers."""

    components: tuple

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if any(c < 0 for c in comps):
            raise ValueError(f"multi-index components must be non-negative: {comps}")
        object.__setattr__(self, "components", comps)

    @property
    def order(self) -> int:
        return sum(self.components)

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __str__(self):
        return "(" + ",".join(map(str, self.components)) + ")"


def multi_indices(dim: int, max_order: int):
    """All multi-indices of length ``dim`` with order at most ``max_order``,
    sorted by order then lexicographically."""
    out = []
    for comps in np.ndindex(*([max_order + 1] * dim)):
        if sum(comps) <= max_order:
            out.append(MultiIndex(comps))
    return sorted(out, key=lambda a: (a.order, a.components))


def _mollifier(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = t < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def bump(grid: Grid, center=0.0, width: float = 1.0) -> SampledFunction:
    """Peak-normalized standard mollifier supported in the ball
    ``|x - center| < width``."""
    if not width > 0:
        raise ValueError(f"width must be positive, got {width}")
    c = _as_vector(center, grid.dim, "center")

    def func(*x):
        r2 = sum((xi - ci) ** 2 for xi, ci in zip(x, c))
        return _mollifier(np.sqrt(r2) / width)

    return SampledFunction.from_closure(grid, func)


def _check_inside(grid, lo, hi, what):
    tol = 0.5 * grid.h
    if np.any(lo < -grid.L - tol) or np.any(hi > grid.L - grid.h + tol):
        raise SupportError(
            f"{what} moves the support to [{lo.min():.4g}, {hi.max():.4g}], "
            f"outside the truncation cube [-{grid.L:g}, {grid.L:g}]"
        )


def transform_function(f: SampledFunction, kind: str, param) -> SampledFunction:
    """Translate, modulate or dilate a sampled function.

    Parameters
    ----------
    f : SampledFunction
    kind : {'translate', 'modulate', 'dilate'}
        ``f(x - tau)``, ``exp(i<omega, x>) f(x)`` or ``f(x / lam)``.
    param : float or array_like
        ``tau`` or ``omega`` (scalar or length-``dim`` vector), or the
        positive dilation factor ``lam``.

    Raises
    ------
    SupportError
        If a translation or dilation pushes the support out of the cube.
    """
    grid = f.grid
    x = grid.coords
    if kind == "modulate":
        omega = _as_vector(param, grid.dim, "omega")
        phase = np.exp(1j * sum(w * xi for w, xi in zip(omega, x)))
        func = None
        if f.closure is not None:
            g = f.closure
            func = lambda *y: np.exp(1j * sum(w * yi for w, yi in zip(omega, y))) * g(*y)  # noqa: E731
        return SampledFunction(grid, phase * f.values, func)

    box = f.support_box()
    if kind == "translate":
        tau = _as_vector(param, grid.dim, "tau")
        if box is not None:
            _check_inside(grid, box[0] + tau, box[1] + tau, f"translation by {tau}")
        if f.closure is not None:
            g = f.closure
            func = lambda *y: g(*(yi - ti for yi, ti in zip(y, tau)))  # noqa: E731
            return SampledFunction.from_closure(grid, func)
        shift = tau / grid.h
        if not np.allclose(shift, np.rint(shift), atol=1e-9):
            raise ValueError("translation of a closure-less function must be a lattice vector")
        shifted = np.roll(f.values, tuple(int(s) for s in np.rint(shift)), axis=tuple(range(grid.dim)))
        return SampledFunction(grid, shifted)

    if kind == "dilate":
        lam = float(param)
        if not lam > 0:
            raise ValueError(f"dilation factor must be positive, got {lam}")
        if box is not None:
            corners = np.stack([box[0] * lam, box[1] * lam])
            _check_inside(grid, corners.min(axis=0), corners.max(axis=0), f"dilation by {lam}")
        if f.closure is None:
            raise ValueError("dilation requires a function with an analytic closure")
        g = f.closure
        return SampledFunction.from_closure(grid, lambda *y: g(*(yi / lam for yi in y)))

    raise ValueError(f"unknown transform kind {kind!r}")
