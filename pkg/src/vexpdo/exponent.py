"""Variable exponents p(.) on a grid and checkers for the standard
sufficient conditions for boundedness of the maximal operator.

Essential infima/suprema are grid minima/maxima.  Every built-in
exponent carries its analytic closure so that the checkers can be
rerun on refined or enlarged grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InfeasibleDecompositionError, PreconditionError
from .grid import Grid

__all__ = [
    "Exponent",
    "ExponentCheckReport",
    "constant_exponent",
    "loglog_sine_exponent",
    "log_holder_decay_exponent",
    "conjugate",
    "check_bounds",
    "check_log_holder_local",
    "check_log_holder_infinity",
    "best_p_infinity",
    "log_holder_infinity_sweep",
    "check_nekvinda",
    "mstar_decompose",
    "mstar_recombine",
    "LOG_HOLDER_THRESHOLD",
    "NEKVINDA_THRESHOLD",
    "STABILITY_RATIO",
]

LOG_HOLDER_THRESHOLD = 10.0
NEKVINDA_THRESHOLD = 1e3
#: Successive refinements (or L-doublings) must change a constant by at most 10%.
STABILITY_RATIO = 1.10


@dataclass(frozen=True, eq=False)
class Exponent:
    """Real exponent values ``p(x)`` at the nodes of a grid.

    Construction does not enforce ``1 < p_- <= p_+ < inf`` so that
    :func:`check_bounds` can report violations; operations that need an
    admissible exponent call :meth:`require_admissible`.
    """

    grid: Grid
    values: np.ndarray
    closure: Optional[Callable] = field(default=None, repr=False)
    name: str = "custom"

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(self.grid.shape)
        if np.any(np.isnan(values)):
            raise ValueError("exponent values must not be NaN")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_closure(cls, grid: Grid, func: Callable, name: str = "custom") -> "Exponent":
        return cls(grid, np.broadcast_to(func(*grid.coords), grid.shape), func, name)

    @property
    def p_minus(self) -> float:
        return float(self.values.min())

    @property
    def p_plus(self) -> float:
        return float(self.values.max())

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    def on(self, grid: Grid) -> "Exponent":
        """Resample the closure on another grid."""
        if self.closure is None:
            raise ValueError("resampling requires an exponent with an analytic closure")
        return Exponent.from_closure(grid, self.closure, self.name)

    def require_admissible(self):
        if not (self.p_minus > 1 and np.isfinite(self.p_plus)):
            bad = np.argwhere((self.values <= 1) | ~np.isfinite(self.values))
            raise PreconditionError(
                f"exponent must satisfy 1 < p_- <= p_+ < inf, got [{self.p_minus}, {self.p_plus}]",
                nodes=[tuple(b) for b in bad[:10]],
            )
        return self


@dataclass
class ExponentCheckReport:
    """Outcome of one exponent-class checker.

    ``best_constant`` is the smallest constant (or the integral value
    for the Nekvinda condition) that witnesses the condition on the grid.
    """

    condition: str
    holds: bool
    best_constant: float
    witness: tuple
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "holds": bool(self.holds),
            "best_constant": float(self.best_constant),
            "witness": [list(w) if isinstance(w, tuple) else w for w in self.witness],
            "details": self.details,
        }


# -- built-in exponents -------------------------------------------------------


def constant_exponent(grid: Grid, value: float) -> Exponent:
    value = float(value)
    return Exponent.from_closure(grid, lambda *x: np.full(np.shape(x[0]), value), f"constant({value:g})")


def _norm(x):
    return np.sqrt(sum(np.asarray(xi, dtype=float) ** 2 for xi in x))


def loglog_sine_exponent(grid: Grid, alpha: float, beta: float) -> Exponent:
    """``p(x) = 2 + alpha + beta*sin(log(log|x|))`` for ``|x| >= e`` and
    ``2 + alpha`` inside that ball.

    The oscillation never settles, so the exponent is not log-Hoelder at
    infinity, yet for small ``0 < beta < alpha`` it admits the convex
    split checked by :func:`mstar_decompose`.
    """
    if not 0 < beta < alpha:
        raise ValueError(f"need 0 < beta < alpha, got alpha={alpha}, beta={beta}")

    def func(*x):
        r = _norm(x)
        out = np.full(r.shape, 2.0 + alpha)
        far = r >= np.e
        out[far] += beta * np.sin(np.log(np.log(r[far])))
        return out

    return Exponent.from_closure(grid, func, f"loglog_sine({alpha:g},{beta:g})")


def log_holder_decay_exponent(grid: Grid, p_inf: float = 2.0, amplitude: float = 1.0) -> Exponent:
    """``p(x) = p_inf + amplitude / log(e + |x|)``; globally log-Hoelder."""

    def func(*x):
        return p_inf + amplitude / np.log(np.e + _norm(x))

    return Exponent.from_closure(grid, func, f"log_holder_decay({p_inf:g},{amplitude:g})")


# -- pointwise operations -------------------------------------------------------


def conjugate(p: Exponent) -> Exponent:
    """Pointwise conjugate exponent ``p' = p / (p - 1)``."""
    p.require_admissible()
    func = None
    if p.closure is not None:
        g = p.closure

        def func(*x):
            v = g(*x)
            return v / (v - 1.0)

    return Exponent(p.grid, p.values / (p.values - 1.0), func, f"conjugate({p.name})")


def check_bounds(p: Exponent) -> ExponentCheckReport:
    """Grid version of ``1 < p_- <= p_+ < inf``."""
    vals = p.values
    imin = np.unravel_index(np.argmin(vals), vals.shape)
    imax = np.unravel_index(np.argmax(vals), vals.shape)
    holds = bool(vals[imin] > 1 and np.isfinite(vals[imax]))
    return ExponentCheckReport(
        "bounds",
        holds,
        0.0,
        (tuple(int(i) for i in imin), tuple(int(i) for i in imax)),
        {"p_minus": float(vals[imin]), "p_plus": float(vals[imax])},
    )


def check_log_holder_local(p: Exponent, threshold: float = LOG_HOLDER_THRESHOLD,
                           chunk: int = 512) -> ExponentCheckReport:
    """Exhaustive scan of ``|p(x) - p(y)| * log(e + 1/|x - y|)`` over node pairs.

    Ties are broken by the lexicographically smallest pair of flat indices.
    """
    pts = np.stack([c.ravel() for c in p.grid.coords], axis=1)
    vals = p.values.ravel()
    n = vals.size
    if n < 2:
        raise PreconditionError("need at least two nodes")
    best, pair = -1.0, (0, 1)
    for start in range(0, n - 1, chunk):
        stop = min(start + chunk, n - 1)
        i = np.arange(start, stop)
        dist = np.sqrt(((pts[i, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = np.log(np.e + 1.0 / dist)
            prod = np.abs(vals[i, None] - vals[None, :]) * weight
        # keep only j > i
        prod[np.arange(n)[None, :] <= i[:, None]] = -1.0
        k = int(np.argmax(prod))
        r, c = divmod(k, n)
        if prod[r, c] > best:
            best, pair = float(prod[r, c]), (int(i[r]), int(c))
    shape = p.grid.shape
    witness = tuple(tuple(int(v) for v in np.unravel_index(k, shape)) for k in pair)
    return ExponentCheckReport("log_holder_local", best <= threshold, best, witness,
                               {"threshold": threshold})


def _infinity_profile(p: Exponent, p_inf: float):
    weight = np.log(np.e + p.grid.radius)
    return np.abs(p.values - p_inf) * weight


def best_p_infinity(p: Exponent) -> float:
    """The ``p_inf`` in ``[p_-, p_+]`` minimizing the decay constant."""
    if p.is_constant:
        return p.p_minus
    res = minimize_scalar(lambda q: _infinity_profile(p, q).max(),
                          bounds=(p.p_minus, p.p_plus), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def check_log_holder_infinity(p: Exponent, p_inf: Optional[float] = None,
                              threshold: float = LOG_HOLDER_THRESHOLD) -> ExponentCheckReport:
    """Max over nodes of ``|p(x) - p_inf| * log(e + |x|)``.

    With ``p_inf=None`` the most favourable limit value is used.
    """
    if p_inf is None:
        p_inf = best_p_infinity(p)
    if not p_inf > 1:
        raise PreconditionError(f"p_inf must exceed 1, got {p_inf}")
    prof = _infinity_profile(p, p_inf)
    k = np.unravel_index(np.argmax(prof), prof.shape)
    best = float(prof[k])
    return ExponentCheckReport("log_holder_infinity", best <= threshold, best,
                               (tuple(int(i) for i in k),),
                               {"p_inf": float(p_inf), "threshold": threshold, "L": p.grid.L})


def log_holder_infinity_sweep(p: Exponent, half_widths, p_inf: Optional[float] = None,
                              threshold: float = LOG_HOLDER_THRESHOLD,
                              stability: float = STABILITY_RATIO) -> ExponentCheckReport:
    """Rerun the decay check on growing cubes with the same spacing.

    A finite constant must settle as the cube grows; the report holds only
    if every constant is below ``threshold`` and each enlargement changes
    it by a factor of at most ``stability``.  ``p_inf=None`` re-optimizes
    the limit value on every cube, so growth means no single ``p_inf``
    works.
    """
    reports = [check_log_holder_infinity(p.on(p.grid.with_half_width(L)), p_inf, threshold)
               for L in half_widths]
    consts = [r.best_constant for r in reports]
    ratios = [b / a if a > 0 else (1.0 if b == 0 else np.inf) for a, b in zip(consts, consts[1:])]
    stable = all(r <= stability for r in ratios)
    holds = stable and all(r.holds for r in reports)
    return ExponentCheckReport(
        "log_holder_infinity_sweep", holds, consts[-1], reports[-1].witness,
        {
            "half_widths": [float(L) for L in half_widths],
            "constants": consts,
            "p_inf": [r.details["p_inf"] for r in reports],
            "growth_ratios": ratios,
            "stable": stable,
            "threshold": threshold,
        },
    )


def _nekvinda_sum(p: Exponent, p_inf: float, c: float) -> float:
    d = np.abs(p.values - p_inf)
    out = np.zeros_like(d)
    nz = d > 0
    with np.errstate(under="ignore", over="ignore"):
        out[nz] = d[nz] * np.power(c, 1.0 / d[nz])
    return float(out.sum() * p.grid.cell_volume)


def check_nekvinda(p: Exponent, p_inf: float, c: float,
                   threshold: float = NEKVINDA_THRESHOLD,
                   stability: float = STABILITY_RATIO) -> ExponentCheckReport:
    """Riemann sum of ``|p - p_inf| * c**(1/|p - p_inf|)``.

    Nodes with ``p == p_inf`` contribute zero (the continuous extension of
    the integrand).  When a closure is available the sum is recomputed on
    the twice-refined grid and must agree within ``stability``.
    """
    if not c > 0:
        raise PreconditionError(f"c must be positive, got {c}")
    if not p_inf > 1:
        raise PreconditionError(f"p_inf must exceed 1, got {p_inf}")
    total = _nekvinda_sum(p, p_inf, c)
    details = {"p_inf": float(p_inf), "c": float(c), "threshold": threshold}
    stable = None
    if p.closure is not None:
        fine = _nekvinda_sum(p.on(p.grid.refined()), p_inf, c)
        ratio = fine / total if total > 0 else (1.0 if fine == 0 else np.inf)
        stable = bool(max(ratio, 1.0 / ratio if ratio > 0 else np.inf) <= stability)
        details.update({"refined_value": fine, "refinement_ratio": ratio})
    details["stable"] = stable
    holds = total <= threshold and stable is not False
    d = np.abs(p.values - p_inf)
    k = np.unravel_index(np.argmax(d), d.shape)
    return ExponentCheckReport("nekvinda", bool(holds), total, (tuple(int(i) for i in k),), details)


def mstar_recombine(p0: float, theta: float, p1: Exponent) -> Exponent:
    """Exponent ``p`` with ``1/p = theta/p0 + (1 - theta)/p1``."""
    inv = theta / p0 + (1.0 - theta) / p1.values
    return Exponent(p1.grid, 1.0 / inv, None, f"mstar_recombine({p0:g},{theta:g})")


def mstar_decompose(p: Exponent, p0: float, theta: float) -> Exponent:
    """Solve ``1/p = theta/p0 + (1 - theta)/p1`` for ``p1``.

    Raises
    ------
    InfeasibleDecompositionError
        If some node would need ``p1 <= 1`` or a non-positive/non-finite
        ``p1``; the first such node is reported.
    """
    if not (1 < p0 < np.inf):
        raise PreconditionError(f"p0 must lie in (1, inf), got {p0}")
    if not 0 < theta < 1:
        raise PreconditionError(f"theta must lie in (0, 1), got {theta}")
    inv = (1.0 / p.values - theta / p0) / (1.0 - theta)
    bad = ~(np.isfinite(inv) & (inv > 0) & (inv < 1))
    if bad.any():
        k = tuple(int(i) for i in np.argwhere(bad)[0])
        p1k = 1.0 / inv[k] if inv[k] != 0 else np.inf
        raise InfeasibleDecompositionError(
            f"no admissible p1 at node {k} (x = {p.grid.node(k)}): 1/p1 = {inv[k]:.6g}, p1 = {p1k:.6g}",
            node=k, value=float(inv[k]),
        )
    func = None
    if p.closure is not None:
        g = p.closure

        def func(*x):
            return (1.0 - theta) / (1.0 / g(*x) - theta / p0)

    return Exponent(p.grid, 1.0 / inv, func, f"mstar_p1({p.name};{p0:g},{theta:g})")
