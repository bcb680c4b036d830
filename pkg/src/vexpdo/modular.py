"""The modular ``I_p(f) = int |f|^p dx`` and the Luxemburg norm.

Quadrature is the plain Riemann sum on the grid.  The modular is
evaluated in log space, so tiny scale factors never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import GridMismatchError, NumericError, PreconditionError
from .exponent import Exponent
from .grid import SampledFunction

__all__ = ["NormResult", "modular", "log_modular", "luxemburg_norm", "check_lattice"]

DEFAULT_TOL = 1e-10
_MAX_ITER = 400


@dataclass(frozen=True)
class NormResult:
    value: float
    iterations: int
    bracket: tuple
    modular_at_value: float

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "modular_at_value": self.modular_at_value,
        }


def _values(f):
    return f.values if isinstance(f, SampledFunction) else np.asarray(f)


def _check(f, p: Exponent):
    if isinstance(f, SampledFunction) and f.grid != p.grid:
        raise GridMismatchError(f"function grid {f.grid} differs from exponent grid {p.grid}")
    if np.shape(_values(f)) != p.grid.shape:
        raise GridMismatchError(f"array shape {np.shape(_values(f))} does not match grid {p.grid.shape}")


def log_modular(f, p: Exponent, lam: float = 1.0) -> float:
    """``log I_p(f / lam)``; ``-inf`` for the zero function."""
    _check(f, p)
    a = np.abs(_values(f)).ravel()
    nz = a > 0
    if not nz.any():
        return -np.inf
    expo = p.values.ravel()[nz] * (np.log(a[nz]) - np.log(lam))
    return float(logsumexp(expo) + np.log(p.grid.cell_volume))


def modular(f, p: Exponent, lam: float = 1.0) -> float:
    """Riemann sum ``h^n * sum |f(x)/lam|^p(x)``."""
    out = np.exp(log_modular(f, p, lam))
    if not np.isfinite(out):
        raise NumericError(f"modular overflowed at lambda={lam}")
    return float(out)


def luxemburg_norm(f, p: Exponent, tol: float = DEFAULT_TOL) -> NormResult:
    """``inf {lam > 0 : I_p(f/lam) <= 1}`` by bisection.

    The bracket is grown from ``lam = 1`` by doubling/halving until
    ``I(f/hi) <= 1 <= I(f/lo)``; bisection stops once the bracket is
    narrower than ``tol * max(1, hi)`` (or spans adjacent floats) and
    returns its midpoint.  Below norm 1 the accuracy is therefore
    absolute; pass a smaller ``tol`` for tiny norms.
    """
    p.require_admissible()
    _check(f, p)
    if not np.any(_values(f)):
        return NormResult(0.0, 0, (0.0, 0.0), 0.0)

    def g(lam):
        v = log_modular(f, p, lam)
        if not np.isfinite(v):
            raise NumericError(f"non-finite modular at lambda={lam}")
        return v

    lo = hi = 1.0
    if g(1.0) > 0:
        while g(hi) > 0:
            lo, hi = hi, 2.0 * hi
    else:
        while g(lo) <= 0:
            hi, lo = lo, 0.5 * lo
    it = 0
    while hi - lo >= tol * max(1.0, hi):
        if it >= _MAX_ITER:
            raise NumericError("bisection did not converge")
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:  # bracket is down to adjacent floats
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        it += 1
    value = 0.5 * (lo + hi)
    return NormResult(value, it, (lo, hi), float(np.exp(g(value))))


def check_lattice(f, g, p: Exponent, tol: float = DEFAULT_TOL) -> bool:
    """Check ``||f|| <= ||g||`` for a pair with ``|f| <= |g|`` at every node."""
    fa, ga = np.abs(_values(f)), np.abs(_values(g))
    bad = np.argwhere(fa > ga)
    if bad.size:
        raise PreconditionError(
            f"|f| <= |g| fails at {len(bad)} node(s), first {tuple(bad[0])}",
            nodes=[tuple(int(i) for i in b) for b in bad],
        )
    nf = luxemburg_norm(f, p, tol).value
    ng = luxemburg_norm(g, p, tol).value
    return bool(nf <= ng + 2 * tol)
