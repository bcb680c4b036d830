"""Pseudodifferential operators on a periodic grid by DFT quadrature.

``Op(a)u(x) = (2 pi)^-n * dxi^n * sum_k a(x, xi_k) u_hat(xi_k) e^{i<x, xi_k>}``
with ``u_hat(xi) = h^n sum_y u(y) e^{-i<y, xi>}`` computed by one FFT.
The frequency sum is truncated at the Nyquist window of the grid and
the x-sum is done densely, so a call costs ``O(N^(2 dim))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericError, SupportError
from .grid import SUPPORT_GUARD, Grid, SampledFunction
from .symbols import Symbol, symbol_product

__all__ = ["PdoPlan", "apply", "apply_multiplier", "composition_residual", "check_support"]


@dataclass
class PdoPlan:
    """Reusable quadrature data for one grid."""

    grid: Grid
    normalization: float = field(init=False)
    phase: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = self.grid
        self.normalization = (g.dxi / (2 * np.pi)) ** g.dim
        k = np.arange(-g.N // 2, g.N // 2)
        sign = (-1.0) ** k
        self.phase = np.ones(g.shape)
        for ax in range(g.dim):
            shape = [1] * g.dim
            shape[ax] = g.N
            self.phase = self.phase * sign.reshape(shape)

    @property
    def xi_window(self) -> float:
        return self.grid.xi_max

    def fourier(self, u: SampledFunction) -> np.ndarray:
        """``u_hat`` on the centered frequency lattice."""
        g = self.grid
        return g.cell_volume * self.phase * np.fft.fftshift(np.fft.fftn(u.values))

    def x_points(self):
        return tuple(c.reshape(-1, 1) for c in self.grid.coords)

    def xi_points(self):
        return tuple(c.reshape(1, -1) for c in self.grid.freq_coords)


def check_support(u: SampledFunction, guard: float = SUPPORT_GUARD):
    radius = u.support_radius()
    if radius > guard * u.grid.L + 1e-12:
        raise SupportError(
            f"input support reaches |x| = {radius:.4g}, beyond the guard {guard:g}*L = {guard * u.grid.L:.4g}"
        )


def apply(a: Symbol, u: SampledFunction, plan: Optional[PdoPlan] = None,
          guard: bool = True, chunk: int = 256) -> SampledFunction:
    """Apply ``Op(a)`` to ``u``.

    Raises
    ------
    SupportError
        If ``guard`` is set and ``u`` is not supported inside ``0.8 L``.
    NumericError
        If the symbol is not finite on the quadrature lattice.
    """
    grid = u.grid
    if plan is None or plan.grid != grid:
        plan = PdoPlan(grid)
    if guard:
        check_support(u)
    uhat = plan.fourier(u).reshape(1, -1)
    x, xi = plan.x_points(), plan.xi_points()
    weighted = uhat * plan.normalization
    out = np.empty(grid.size, dtype=complex)
    for start in range(0, grid.size, chunk):
        rows = slice(start, start + chunk)
        xr = tuple(c[rows] for c in x)
        sym = a(xr, xi)
        if not np.all(np.isfinite(sym)):
            raise NumericError(f"symbol {a.name} is not finite on the quadrature lattice")
        expo = np.exp(1j * sum(xc * kc for xc, kc in zip(xr, xi)))
        out[rows] = (sym * weighted * expo).sum(axis=1)
    return SampledFunction(grid, out.reshape(grid.shape))


def apply_multiplier(m, u: SampledFunction) -> SampledFunction:
    """Fourier multiplier ``m(D)u`` by FFT, pointwise product and inverse FFT.

    ``m`` is an x-independent :class:`Symbol` or a callable taking the
    ``dim`` frequency coordinate arrays.
    """
    grid = u.grid
    xi = grid.freq_coords
    if isinstance(m, Symbol):
        zeros = tuple(np.zeros(1) for _ in range(grid.dim))
        mv = m(zeros, xi)
    else:
        mv = np.broadcast_to(m(*xi), grid.shape)
    spectrum = np.fft.fftshift(np.fft.fftn(u.values))
    out = np.fft.ifftn(np.fft.ifftshift(mv * spectrum))
    return SampledFunction(grid, out)


def composition_residual(a1: Symbol, a2: Symbol, u: SampledFunction,
                         plan: Optional[PdoPlan] = None) -> SampledFunction:
    """``Op(a1) Op(a2) u - Op(a1 a2) u``, the action of the lower-order
    remainder symbol of the composition."""
    plan = plan or PdoPlan(u.grid)
    inner = apply(a2, u, plan)
    first = apply(a1, inner, plan, guard=False)
    return first - apply(symbol_product(a1, a2), u, plan)
