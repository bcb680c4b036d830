"""Symbols a(x, xi), symbol-class diagnostics and the regularizer construction.

A symbol is evaluated as ``a(x, xi)`` where ``x`` and ``xi`` are tuples of
``dim`` broadcastable coordinate arrays.  Derivatives
``d_xi^alpha d_x^beta a`` come from exact closures when the symbol has
them (built-ins are derived symbolically once) and from centered finite
differences otherwise.

Class membership is a statement about all of R^n x R^n, so the estimators
below sample a finite lattice and use stability under doubling of the
frequency window as the computable proxy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Optional

import numpy as np
import sympy as sp

from .errors import DerivativeUnavailableError, EllipticityError, PreconditionError
from .grid import Grid, MultiIndex, multi_indices

__all__ = [
    "Symbol",
    "SymbolLattice",
    "SeminormEntry",
    "SeminormReport",
    "SODecayProfile",
    "japanese_bracket",
    "estimate_hormander_seminorms",
    "so_decay_profile",
    "smooth_step",
    "cutoff_phi_R",
    "regularizer_b_R",
    "identity_deviation",
    "BUILTIN_SYMBOLS",
    "builtin_symbol",
    "multiplication_symbol",
    "multiplier_symbol",
    "symbol_sum",
    "symbol_product",
    "symbol_scale",
]

DEFAULT_ORDER_CAP = 3
DEFAULT_H_FD = 1e-3
#: A seminorm constant is "stable" if doubling the frequency window grows it by at most 25%.
SEMINORM_STABILITY = 1.25
#: Outer-to-inner shell ratio below which a decay profile counts as vanishing at infinity.
TAIL_THRESHOLD = 0.5


def japanese_bracket(xi) -> np.ndarray:
    """``(1 + |xi|^2)^(1/2)``; ``xi`` is a vector or a tuple of coordinate arrays."""
    if isinstance(xi, tuple):
        return np.sqrt(1.0 + sum(np.asarray(c, dtype=float) ** 2 for c in xi))
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(1.0 + np.sum(xi**2, axis=-1) if xi.ndim else 1.0 + xi**2)


def _as_coords(v, dim):
    if isinstance(v, tuple):
        if len(v) != dim:
            raise ValueError(f"expected {dim} coordinate arrays, got {len(v)}")
        return v
    if dim == 1:
        return (v,)
    v = np.asarray(v, dtype=float)
    return tuple(v[..., j] for j in range(dim))


def _idx(a, dim):
    a = tuple(a.components) if isinstance(a, MultiIndex) else tuple(np.broadcast_to(a, (dim,)).tolist())
    if len(a) != dim or any(c < 0 for c in a):
        raise ValueError(f"bad multi-index {a} for dimension {dim}")
    return tuple(int(c) for c in a)


class Symbol:
    """Smooth symbol with derivative evaluators up to ``order_cap`` per variable group.

    Parameters
    ----------
    dim : int
    func : callable
        ``func(x, xi)`` with coordinate tuples, returning an array of the
        broadcast shape.
    derivative : callable, optional
        ``derivative(alpha, beta)`` returning an exact evaluator or
        ``None`` to fall back to finite differences.
    order_cap : int
        Largest ``|alpha|`` and ``|beta|`` for which derivatives exist.
    h_fd : float
        Finite-difference step.
    declared : tuple, optional
        ``(m, rho, delta)`` the symbol is claimed to belong to.
    """

    def __init__(self, dim, func, derivative=None, order_cap=DEFAULT_ORDER_CAP,
                 h_fd=DEFAULT_H_FD, name="symbol", declared=None, x_independent=False):
        self.dim = dim
        self._func = func
        self._derivative = derivative
        self.order_cap = order_cap
        self.h_fd = h_fd
        self.name = name
        self.declared = declared
        self.x_independent = x_independent

    def __repr__(self):
        return f"Symbol({self.name!r}, dim={self.dim})"

    def __call__(self, x, xi):
        x, xi = _as_coords(x, self.dim), _as_coords(xi, self.dim)
        shape = np.broadcast_shapes(*(np.shape(c) for c in x + xi))
        out = np.broadcast_to(np.asarray(self._func(x, xi), dtype=complex), shape)
        return out

    def has_closure(self, alpha, beta) -> bool:
        if self._derivative is None:
            return False
        return self._derivative(_idx(alpha, self.dim), _idx(beta, self.dim)) is not None

    def derivative(self, alpha, beta, method: str = "auto") -> Callable:
        """Evaluator of ``d_xi^alpha d_x^beta a``.

        ``method`` is ``'auto'`` (closure if available), ``'closure'`` or
        ``'fd'``.
        """
        alpha, beta = _idx(alpha, self.dim), _idx(beta, self.dim)
        if sum(alpha) > self.order_cap or sum(beta) > self.order_cap:
            raise DerivativeUnavailableError(
                f"{self.name}: derivative (alpha={alpha}, beta={beta}) exceeds order cap {self.order_cap}"
            )
        if not any(alpha) and not any(beta):
            return self.__call__
        if method != "fd" and self._derivative is not None:
            ev = self._derivative(alpha, beta)
            if ev is not None:
                def closure(x, xi, ev=ev):
                    x, xi = _as_coords(x, self.dim), _as_coords(xi, self.dim)
                    shape = np.broadcast_shapes(*(np.shape(c) for c in x + xi))
                    return np.broadcast_to(np.asarray(ev(x, xi), dtype=complex), shape)
                return closure
        if method == "closure":
            raise DerivativeUnavailableError(f"{self.name}: no closed-form derivative for {alpha}, {beta}")
        return self._fd(alpha, beta)

    def _fd(self, alpha, beta, h=None):
        h = self.h_fd if h is None else h
        orders = alpha + beta

        def ev(x, xi):
            x, xi = _as_coords(x, self.dim), _as_coords(xi, self.dim)
            pts = [np.asarray(c, dtype=float) for c in xi + x]
            total = 0
            stencils = [[(k - 2 * j, (-1) ** j * comb(k, j)) for j in range(k + 1)] for k in orders]
            for combo in itertools.product(*stencils):
                coef = np.prod([c for _, c in combo])
                shifted = [p + off * h for p, (off, _) in zip(pts, combo)]
                total = total + coef * self(tuple(shifted[self.dim:]), tuple(shifted[: self.dim]))
            return total / (2 * h) ** sum(orders)

        return ev


# -- symbolic built-ins --------------------------------------------------------


def _sympy_vars(dim):
    xs = sp.symbols(f"x1:{dim + 1}", real=True)
    xis = sp.symbols(f"xi1:{dim + 1}", real=True)
    return xs, xis


def from_sympy(expr, dim, name, order_cap=DEFAULT_ORDER_CAP, declared=None) -> Symbol:
    """Symbol with exact derivative closures obtained by symbolic differentiation."""
    xs, xis = _sympy_vars(dim)
    expr = sp.sympify(expr)
    args = list(xs) + list(xis)

    @lru_cache(maxsize=None)
    def lam(alpha, beta):
        e = expr
        for v, k in zip(xis, alpha):
            e = sp.diff(e, v, k) if k else e
        for v, k in zip(xs, beta):
            e = sp.diff(e, v, k) if k else e
        f = sp.lambdify(args, e, modules="numpy")
        return lambda x, xi: f(*x, *xi)

    x_indep = not (expr.free_symbols & set(xs))
    zero = (0,) * dim
    return Symbol(dim, lam(zero, zero), lambda a, b: lam(a, b), order_cap=order_cap,
                  name=name, declared=declared, x_independent=x_indep)


def _bracket_expr(vars_):
    return sp.sqrt(1 + sum(v**2 for v in vars_))


def _builtin_expr(name, dim, **params):
    xs, xis = _sympy_vars(dim)
    bx, bxi = _bracket_expr(xs), _bracket_expr(xis)
    r2 = sum(v**2 for v in xis)
    if name == "one":
        return sp.Integer(1), (0, 1, 0)
    if name == "bracket_power":
        m = params.get("m", 0)
        return bxi ** sp.nsimplify(m), (m, 1, 0)
    if name == "bracket_normalized":
        return (1 + sp.I * r2) / (1 + r2), (0, 1, 0)
    if name == "riesz_smooth":
        return xis[0] / bxi, (0, 1, 0)
    if name == "so_log_sine":
        return sp.sin(sp.log(bx)), (0, 1, 0)
    if name == "so_elliptic":
        return 2 + sp.sin(sp.log(bx)) * (1 + sp.I * r2) / (1 + r2), (0, 1, 0)
    if name == "nonelliptic_demo":
        return sp.sin(xs[0]), (0, 1, 0)
    if name == "heat":
        return sp.exp(-r2), (-np.inf, 1, 0)
    raise KeyError(name)


#: Registry names accepted by :func:`builtin_symbol`.
BUILTIN_SYMBOLS = (
    "one",
    "bracket_power",
    "bracket_normalized",
    "riesz_smooth",
    "so_log_sine",
    "so_elliptic",
    "nonelliptic_demo",
    "heat",
)
_MULTIPLIERS = ("one", "bracket_power", "bracket_normalized", "riesz_smooth", "heat")
#: Built-ins bounded away from zero outside a compact set.
ELLIPTIC_BUILTINS = ("one", "bracket_normalized", "so_elliptic")


def builtin_symbol(name: str, dim: int = 1, order_cap: int = DEFAULT_ORDER_CAP, **params) -> Symbol:
    """Look up a registry symbol.

    ``multiplier`` takes a ``multiplier=<name>`` parameter naming an
    x-independent built-in; ``bracket_power`` takes ``m``.
    """
    if name == "multiplier":
        inner = params.pop("multiplier", "bracket_normalized")
        if inner not in _MULTIPLIERS:
            raise KeyError(f"unknown multiplier {inner!r}")
        name = inner
    try:
        expr, declared = _builtin_expr(name, dim, **params)
    except KeyError:
        raise KeyError(f"unknown symbol {name!r}; known: {', '.join(BUILTIN_SYMBOLS + ('multiplier',))}") from None
    label = name if not params else f"{name}({','.join(f'{k}={v}' for k, v in sorted(params.items()))})"
    return from_sympy(expr, dim, label, order_cap, declared)


def multiplication_symbol(func: Callable, dim: int = 1, name: str = "multiplication") -> Symbol:
    """``a(x, xi) = v(x)``; ``func`` takes the ``dim`` coordinate arrays of x."""
    return Symbol(dim, lambda x, xi: func(*x), name=name)


def multiplier_symbol(func: Callable, dim: int = 1, name: str = "multiplier") -> Symbol:
    """``a(x, xi) = m(xi)``; ``func`` takes the ``dim`` coordinate arrays of xi."""
    return Symbol(dim, lambda x, xi: func(*xi), name=name, x_independent=True)


def symbol_sum(a: Symbol, b: Symbol) -> Symbol:
    def deriv(al, be):
        da, db = a.derivative(al, be), b.derivative(al, be)
        return lambda x, xi: da(x, xi) + db(x, xi)

    return Symbol(a.dim, lambda x, xi: a(x, xi) + b(x, xi), deriv, min(a.order_cap, b.order_cap),
                  name=f"({a.name}+{b.name})", x_independent=a.x_independent and b.x_independent)


def symbol_scale(c: complex, a: Symbol) -> Symbol:
    def deriv(al, be):
        da = a.derivative(al, be)
        return lambda x, xi: c * da(x, xi)

    return Symbol(a.dim, lambda x, xi: c * a(x, xi), deriv, a.order_cap, name=f"{c}*{a.name}",
                  x_independent=a.x_independent)


def _sub_indices(a):
    return itertools.product(*(range(k + 1) for k in a))


def symbol_product(a: Symbol, b: Symbol) -> Symbol:
    """Pointwise product with Leibniz-rule derivatives."""

    def deriv(al, be):
        terms = []
        for g in _sub_indices(al):
            for e in _sub_indices(be):
                coef = np.prod([comb(p, q) for p, q in zip(al + be, g + e)])
                rest_a = tuple(p - q for p, q in zip(al, g))
                rest_b = tuple(p - q for p, q in zip(be, e))
                terms.append((coef, a.derivative(g, e), b.derivative(rest_a, rest_b)))
        return lambda x, xi: sum(c * da(x, xi) * db(x, xi) for c, da, db in terms)

    return Symbol(a.dim, lambda x, xi: a(x, xi) * b(x, xi), deriv, min(a.order_cap, b.order_cap),
                  name=f"({a.name}*{b.name})", x_independent=a.x_independent and b.x_independent)


# -- lattices and class diagnostics ---------------------------------------------------


@dataclass(frozen=True)
class SymbolLattice:
    """Product sample set ``{|x_j| <= x_max} x {|xi_j| <= xi_max}``.

    Both axes are odd-length ``linspace`` grids, so they contain the
    origin, and the xi-doubled lattice contains the original one.
    """

    dim: int
    x_max: float
    xi_max: float
    nx: int = 65
    nxi: int = 65

    @classmethod
    def from_grid(cls, grid: Grid, nx: int = None, nxi: int = None) -> "SymbolLattice":
        nx = nx or (grid.N + 1 if grid.dim == 1 else grid.N // 2 + 1)
        nxi = nxi or nx
        return cls(grid.dim, grid.L, grid.xi_max, nx, nxi)

    @property
    def x_axis(self):
        return np.linspace(-self.x_max, self.x_max, self.nx)

    @property
    def xi_axis(self):
        return np.linspace(-self.xi_max, self.xi_max, self.nxi)

    def x_points(self) -> tuple:
        """x coordinates as column arrays, shape ``(nx**dim, 1)``."""
        mesh = np.meshgrid(*([self.x_axis] * self.dim), indexing="ij")
        return tuple(m.reshape(-1, 1) for m in mesh)

    def xi_points(self) -> tuple:
        """xi coordinates as row arrays, shape ``(1, nxi**dim)``."""
        mesh = np.meshgrid(*([self.xi_axis] * self.dim), indexing="ij")
        return tuple(m.reshape(1, -1) for m in mesh)

    def with_xi_doubled(self) -> "SymbolLattice":
        return SymbolLattice(self.dim, self.x_max, 2 * self.xi_max, self.nx, 2 * self.nxi - 1)

    @property
    def total_radius(self) -> float:
        """Half the largest ``|x| + |xi|`` along coordinate axes on the lattice."""
        return 0.5 * (self.x_max + self.xi_max)

    def describe(self) -> dict:
        return {"dim": self.dim, "x_max": self.x_max, "xi_max": self.xi_max, "nx": self.nx, "nxi": self.nxi}


def _norm(coords):
    return np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))


def _lattice_sup(a: Symbol, alpha, beta, lattice: SymbolLattice, m, rho, delta) -> float:
    ev = a.derivative(alpha, beta)
    xi = lattice.xi_points()
    weight = japanese_bracket(xi) ** (m - rho * sum(alpha) + delta * sum(beta))
    best = 0.0
    x = lattice.x_points()
    for rows in np.array_split(np.arange(x[0].shape[0]), max(1, x[0].shape[0] // 256)):
        vals = np.abs(ev(tuple(c[rows] for c in x), xi)) / weight
        best = max(best, float(vals.max()))
    return best


@dataclass
class SeminormEntry:
    alpha: tuple
    beta: tuple
    constant: float
    constant_doubled: float
    verdict: str

    @property
    def growth(self) -> float:
        if self.constant == 0:
            return 1.0 if self.constant_doubled == 0 else np.inf
        return self.constant_doubled / self.constant


@dataclass
class SeminormReport:
    """Estimated Hoermander constants ``C_{alpha,beta}`` for one ``(m, rho, delta)``."""

    symbol: str
    m: float
    rho: float
    delta: float
    lattice: dict
    entries: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(e.verdict == "finite" for e in self.entries)

    def constant(self, alpha, beta) -> float:
        for e in self.entries:
            if e.alpha == tuple(alpha) and e.beta == tuple(beta):
                return e.constant
        raise KeyError((alpha, beta))

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol, "m": self.m, "rho": self.rho, "delta": self.delta,
            "lattice": self.lattice, "consistent": self.consistent,
            "entries": [{"alpha": list(e.alpha), "beta": list(e.beta), "constant": e.constant,
                         "constant_doubled": e.constant_doubled, "verdict": e.verdict} for e in self.entries],
        }


def estimate_hormander_seminorms(a: Symbol, m: float, rho: float = 1.0, delta: float = 0.0,
                                 order_cap: int = DEFAULT_ORDER_CAP,
                                 lattice: Optional[SymbolLattice] = None) -> SeminormReport:
    """Sup over the lattice of ``|d_xi^alpha d_x^beta a| / <xi>^(m - rho|alpha| + delta|beta|)``.

    Each constant is recomputed with the frequency window doubled; a pair
    is ``"finite"`` if that grows it by at most 25%, otherwise
    ``"blow-up trend"``.
    """
    if not (0 <= rho <= 1 and 0 <= delta <= 1):
        raise PreconditionError(f"need 0 <= rho, delta <= 1, got rho={rho}, delta={delta}")
    if order_cap < 0:
        raise PreconditionError("order_cap must be non-negative")
    if lattice is None:
        lattice = SymbolLattice(a.dim, 10.0, 20.0, 33, 65)
    doubled = lattice.with_xi_doubled()
    report = SeminormReport(a.name, m, rho, delta, lattice.describe())
    for al in multi_indices(a.dim, order_cap):
        for be in multi_indices(a.dim, order_cap):
            c1 = _lattice_sup(a, al, be, lattice, m, rho, delta)
            c2 = _lattice_sup(a, al, be, doubled, m, rho, delta)
            stable = c2 <= SEMINORM_STABILITY * c1 or c2 <= 1e-13
            report.entries.append(SeminormEntry(al.components, be.components, c1, c2,
                                                "finite" if stable else "blow-up trend"))
    return report


@dataclass
class SODecayProfile:
    """Profiles ``x -> C_{alpha,beta}(x) = sup_xi |d a| <xi>^(|alpha| - m)``."""

    symbol: str
    m: float
    radii: np.ndarray
    profiles: dict
    tail_ratios: dict
    threshold: float = TAIL_THRESHOLD

    @property
    def so_consistent(self) -> bool:
        """Every profile with ``beta != 0`` dies out at infinity."""
        return all(r <= self.threshold for (al, be), r in self.tail_ratios.items() if any(be))

    @property
    def so0_consistent(self) -> bool:
        """Every profile, including ``beta = 0``, dies out at infinity."""
        return all(r <= self.threshold for r in self.tail_ratios.values())

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol, "m": self.m, "threshold": self.threshold,
            "so_consistent": self.so_consistent, "so0_consistent": self.so0_consistent,
            "tail_ratios": [{"alpha": list(al), "beta": list(be), "ratio": float(r)}
                            for (al, be), r in self.tail_ratios.items()],
        }


def so_decay_profile(a: Symbol, m: float = 0.0, order_cap: int = DEFAULT_ORDER_CAP,
                     lattice: Optional[SymbolLattice] = None,
                     threshold: float = TAIL_THRESHOLD) -> SODecayProfile:
    """Spatial decay profiles of the symbol's derivatives.

    The tail statistic of a profile is its sup over the outer shell
    ``|x| >= x_max/2`` divided by its sup over the inner ball
    ``|x| <= x_max/4`` (zero when both vanish).
    """
    if lattice is None:
        lattice = SymbolLattice(a.dim, 100.0, 20.0, 401, 65)
    x = lattice.x_points()
    xi = lattice.xi_points()
    radii = _norm(x).ravel()
    inner = radii <= lattice.x_max / 4
    outer = radii >= lattice.x_max / 2
    profiles, ratios = {}, {}
    for al in multi_indices(a.dim, order_cap):
        weight = japanese_bracket(xi) ** (al.order - m)
        for be in multi_indices(a.dim, order_cap):
            ev = a.derivative(al, be)
            prof = (np.abs(ev(x, xi)) * weight).max(axis=1)
            prof[prof < 1e-13] = 0.0
            key = (al.components, be.components)
            profiles[key] = prof
            hi_in, hi_out = prof[inner].max(), prof[outer].max()
            ratios[key] = 0.0 if hi_out == 0 else (np.inf if hi_in == 0 else float(hi_out / hi_in))
    return SODecayProfile(a.name, m, radii, profiles, ratios, threshold)


# -- cutoff and regularizer ----------------------------------------------------------------


def _bump_exp(u):
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(t, start: float = 1.0, stop: float = np.sqrt(2.0)):
    """C-infinity step: 1 for ``t <= start``, 0 for ``t >= stop``, monotone between."""
    t = np.asarray(t, dtype=float)
    u = (t - start) / (stop - start)
    left, right = _bump_exp(1.0 - u), _bump_exp(u)
    return left / (left + right)


def cutoff_phi_R(R: float, dim: int = 1, order_cap: int = DEFAULT_ORDER_CAP) -> Symbol:
    """Smooth cutoff equal to 1 where ``|x| + |xi| <= R`` and 0 where ``|x| + |xi| >= 2R``.

    The transition is a smooth step in ``rho = (|x|^2 + |xi|^2)^(1/2) / R``
    from 1 at ``rho = 1`` to 0 at ``rho = sqrt(2)``.  Since
    ``rho <= (|x| + |xi|)/R <= sqrt(2) rho`` both plateau conditions hold,
    and unlike a step in ``|x| + |xi|`` itself the cutoff is smooth across
    the coordinate hyperplanes ``x = 0`` and ``xi = 0``.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")

    def func(x, xi):
        rho = np.sqrt(_norm(x) ** 2 + _norm(xi) ** 2) / R
        return smooth_step(rho)

    sym = Symbol(dim, func, order_cap=order_cap, h_fd=1e-3 * max(R, 1.0), name=f"phi_R({R:g})")
    sym.R = R
    return sym


def _sum_norm(x, xi):
    return _norm(x) + _norm(xi)


def regularizer_b_R(a: Symbol, R: float, lattice: Optional[SymbolLattice] = None,
                    phi: Optional[Symbol] = None) -> Symbol:
    """``b_R = (1 - phi_R)/a`` where ``|x| + |xi| >= R`` and 0 elsewhere.

    Wherever ``1 - phi_R`` vanishes the value is 0 without dividing, so
    ``a * b_R == 1 - phi_R`` holds at every point up to rounding.

    Raises
    ------
    EllipticityError
        If ``a`` vanishes somewhere on the lattice with ``|x| + |xi| >= R``;
        the point of smallest ``|a|`` is reported.
    """
    if phi is None:
        phi = cutoff_phi_R(R, a.dim)
    if lattice is not None:
        x, xi = lattice.x_points(), lattice.xi_points()
        vals = np.abs(a(x, xi))
        region = _sum_norm(x, xi) >= R
        masked = np.where(region, vals, np.inf)
        k = np.unravel_index(np.argmin(masked), masked.shape)
        if not masked[k] > 0:
            point = (tuple(float(c[k[0], 0]) for c in x), tuple(float(c[0, k[1]]) for c in xi))
            raise EllipticityError(
                f"{a.name} vanishes at (x, xi) = {point} inside |x|+|xi| >= {R:g}",
                point=point, value=float(masked[k]),
            )

    def func(x, xi):
        one_minus = np.asarray(1.0 - phi(x, xi))
        av = a(x, xi)
        one_minus = np.broadcast_to(one_minus, av.shape)
        out = np.zeros(av.shape, dtype=complex)
        nz = one_minus != 0
        out[nz] = one_minus[nz] / av[nz]
        return out

    sym = Symbol(a.dim, func, order_cap=min(a.order_cap, phi.order_cap), h_fd=phi.h_fd,
                 name=f"b_R({a.name},{R:g})", x_independent=False)
    sym.R = R
    return sym


def identity_deviation(a: Symbol, b: Symbol, phi: Symbol, lattice: SymbolLattice) -> float:
    """``max |a*b - (1 - phi)|`` over the lattice, relative to ``max |1 - phi|``."""
    x, xi = lattice.x_points(), lattice.xi_points()
    target = 1.0 - phi(x, xi)
    dev = np.abs(a(x, xi) * b(x, xi) - target).max()
    scale = np.abs(target).max()
    return float(dev / scale) if scale > 0 else float(dev)
