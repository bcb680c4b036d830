"""Acceptance suite: numbered criteria at fixed discretization.

Every criterion runs on the 1D grid ``L = 10, N = 128`` unless it says
otherwise, is seeded, and carries its own wall-clock limit.  The suite
is shared by ``tests/test_acceptance.py`` and ``vexpdo verify``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exponent import (check_log_holder_infinity, check_log_holder_local, check_nekvinda,
                       constant_exponent, log_holder_infinity_sweep, loglog_sine_exponent,
                       mstar_decompose, mstar_recombine)
from .fredholm import ProbeFamilySpec, ellipticity_radius, run_fredholm_pipeline
from .grid import SampledFunction, bump, make_grid, transform_function
from .maximal import hl_maximal, q_maximal, sharp_maximal
from .modular import luxemburg_norm, modular
from .oracles import discrete_lp_norm, exhaustive_maximal
from .pdo import PdoPlan, apply, composition_residual
from .symbols import (ELLIPTIC_BUILTINS, SymbolLattice, builtin_symbol, cutoff_phi_R,
                      identity_deviation, multiplication_symbol, regularizer_b_R)

__all__ = ["Criterion", "CriterionResult", "CRITERIA", "run_criteria", "format_result"]

SEED = 42


def _grid(N=128):
    return make_grid(1, 10.0, N)


def _loglog(grid):
    return loglog_sine_exponent(grid, 0.1, 0.05)


def _random_functions(grid, count, seed=SEED):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        out.append(SampledFunction(grid, v * rng.uniform(0.1, 10.0)))
    return out


def _bump_family(grid):
    return [bump(grid, c, w) for w in (1.0, 2.0, 3.0) for c in (-4.0, -1.5, 1.5, 4.0)]


def _pointwise_symbols():
    return [builtin_symbol("one"), builtin_symbol("bracket_normalized"), builtin_symbol("so_log_sine")]


def c1_norm_consistency(tol):
    grid = _grid()
    tol = 1e-8 if tol is None else tol
    worst = 0.0
    for q in (1.5, 2.0, 3.0):
        p = constant_exponent(grid, q)
        for f in _random_functions(grid, 50, SEED + int(10 * q)):
            ref = discrete_lp_norm(f.values, q, grid.cell_volume)
            worst = max(worst, abs(luxemburg_norm(f, p).value - ref) / ref)
    return worst <= tol, f"max relative deviation {worst:.3e} (tol {tol:g})"


def c2_unit_ball(tol):
    grid = _grid()
    p = _loglog(grid)
    tol = 1e-9 if tol is None else tol
    hi, lo = -np.inf, np.inf
    for f in _random_functions(grid, 50, SEED + 1):
        n = luxemburg_norm(f, p).value
        hi = max(hi, modular(f, p, n))
        lo = min(lo, modular(f, p, 0.99 * n))
    ok = hi <= 1 + tol and lo > 1
    return ok, f"max I(f/|f|) - 1 = {hi - 1:.3e} (tol {tol:g}); min I(f/(0.99|f|)) = {lo:.6f}"


def c3_lattice(tol):
    grid = _grid()
    p = _loglog(grid)
    tol = 1e-10 if tol is None else tol
    rng = np.random.default_rng(SEED + 3)
    violations, worst = 0, -np.inf
    for g in _random_functions(grid, 200, SEED + 2):
        shrink = rng.uniform(0.0, 1.0, grid.shape) * np.exp(2j * np.pi * rng.uniform(size=grid.shape))
        f = SampledFunction(grid, g.values * shrink)
        nf = luxemburg_norm(f, p, tol).value
        ng = luxemburg_norm(g, p, tol).value
        worst = max(worst, nf - ng)
        violations += nf > ng + 2 * tol
    return violations == 0, f"{violations} violations in 200 pairs; max(|f| - |g|) = {worst:.3e}"


def c4_maximal_oracle(tol):
    tol = 1e-12 if tol is None else tol
    grid = _grid(64)
    worst = 0.0
    for f in _random_functions(grid, 20, SEED + 4):
        worst = max(worst, np.abs(hl_maximal(f).values.real - exhaustive_maximal(f)).max())
    fine = _grid()
    chi = SampledFunction(fine, ((fine.axis >= 0) & (fine.axis < 1)).astype(float))
    M = hl_maximal(chi).values.real
    h = fine.h
    tail_ok, parts = True, []
    for x in (2.0, 4.0, 8.0):
        i = fine.nearest_index(x)[0]
        xn = fine.axis[i]
        lo, hi = (1 - h) / (xn + h), (1 + h) / (xn - h)
        tail_ok &= lo <= M[i] <= hi
        parts.append(f"M({xn:g})={M[i]:.4f} in [{lo:.4f},{hi:.4f}]")
    return worst <= tol and tail_ok, f"oracle max diff {worst:.2e} (tol {tol:g}); " + "; ".join(parts)


def c5_sharp_laws(tol):
    tol = 1e-12 if tol is None else tol
    grid = _grid()
    const_zero = not np.any(sharp_maximal(SampledFunction(grid, np.full(grid.shape, 3.7))).values)
    dom_excess, shift_dev = -np.inf, 0.0
    for f in _random_functions(grid, 50, SEED + 5):
        s = sharp_maximal(f).values.real
        dom_excess = max(dom_excess, (s - 2 * hl_maximal(f).values.real).max())
        shift_dev = max(shift_dev, np.abs(sharp_maximal(f + (2.5 - 1.0j)).values.real - s).max())
    ok = const_zero and dom_excess <= tol and shift_dev <= tol
    return ok, (f"M#(const)==0: {const_zero}; max(M#f - 2Mf) = {dom_excess:.2e}; "
                f"max|M#(f+c) - M#f| = {shift_dev:.2e} (tol {tol:g})")


def c6_pointwise_sharp(tol):
    grid = _grid()
    plan = PdoPlan(grid)
    family = _bump_family(grid)
    mq = [q_maximal(u, 2.0).values.real for u in family]
    ok, parts = True, []
    for a in _pointwise_symbols():
        maxima = [float((sharp_maximal(apply(a, u, plan)).values.real / m).max())
                  for u, m in zip(family, mq)]
        spread = max(maxima) / min(maxima)
        ok &= bool(np.all(np.isfinite(maxima)) and spread < 5)
        parts.append(f"{a.name}: max ratio {max(maxima):.3f}, spread {spread:.3f}")
    return ok, "; ".join(parts)


def c7_boundedness(tol):
    grid = _grid()
    p = _loglog(grid)
    plan = PdoPlan(grid)
    family = _bump_family(grid)
    norms = [luxemburg_norm(u, p).value for u in family]
    ok, parts = True, []
    for a in _pointwise_symbols():
        ratios = [luxemburg_norm(apply(a, u, plan), p).value / n for u, n in zip(family, norms)]
        spread = max(ratios) / min(ratios)
        ok &= spread < 10
        parts.append(f"{a.name}: ratios [{min(ratios):.3f}, {max(ratios):.3f}], max/min {spread:.3f}")
    return ok, "; ".join(parts)


def c8_regularizer_identity(tol):
    tol = 1e-14 if tol is None else tol
    grid = _grid()
    lattice = SymbolLattice.from_grid(grid)
    ok, parts = True, []
    for name in ELLIPTIC_BUILTINS:
        a = builtin_symbol(name)
        R, _ = ellipticity_radius(a, lattice)
        if R is None:
            ok = False
            parts.append(f"{name}: no ellipticity radius")
            continue
        phi = cutoff_phi_R(R)
        dev = identity_deviation(a, regularizer_b_R(a, R, lattice, phi), phi, lattice)
        ok &= dev <= tol
        parts.append(f"{name}: R={R:.3f}, deviation {dev:.2e}")
    return ok, "; ".join(parts) + f" (tol {tol:g})"


def c9_fredholm(tol):
    grid = _grid()
    p = _loglog(grid)
    spec = ProbeFamilySpec(n_translates=5, n_modulations=4)
    ok, parts = True, []
    for name in ("one", "bracket_normalized"):
        rep = run_fredholm_pipeline(builtin_symbol(name), p, spec, mstar=(2.0, 0.5))
        ok &= rep.verdict == "Fredholm-consistent"
        worst = max(c["final_over_first"] for c in rep.family_checks.values())
        parts.append(f"{name}: {rep.verdict}, worst final/first {worst:.3f}")
    rep = run_fredholm_pipeline(builtin_symbol("nonelliptic_demo"), p, spec)
    ok &= rep.verdict == "elliptic-fail"
    parts.append(f"nonelliptic_demo: {rep.verdict}")
    return ok, "; ".join(parts)


def _composition_ratios(a1, a2, grid, plan):
    base = bump(grid, 0.0, 2.0)
    out = []
    for k in (2, 4, 8, 16):
        u = transform_function(base, "modulate", k * np.pi / grid.L)
        r = composition_residual(a1, a2, u, plan)
        out.append(float(np.linalg.norm(r.values) / np.linalg.norm(u.values)))
    return out


def c10_composition(tol):
    grid = _grid()
    plan = PdoPlan(grid)
    v = multiplication_symbol(bump(grid, 0.0, 3.0).closure, name="bump_profile")
    m = builtin_symbol("bracket_normalized")
    stated = _composition_ratios(v, m, grid, plan)
    ok = all(b <= a for a, b in zip(stated, stated[1:])) and stated[-1] / stated[0] <= 0.5
    swapped = _composition_ratios(m, v, grid, plan)
    return ok, ("a1=v(x), a2=m(xi): ratios " + ", ".join(f"{r:.2e}" for r in stated)
                + f", final/first {stated[-1] / stated[0]:.3f}"
                + " | supplementary a1=m(xi), a2=v(x): " + ", ".join(f"{r:.3e}" for r in swapped)
                + f", final/first {swapped[-1] / swapped[0]:.3f}")


def c11_exponent_checkers(tol):
    tol = 1e-12 if tol is None else tol
    grid = _grid()
    const = constant_exponent(grid, 2.0)
    reports = [check_log_holder_local(const), check_log_holder_infinity(const, 2.0),
               check_nekvinda(const, 2.0, 0.5)]
    const_ok = all(r.holds and r.best_constant == 0 for r in reports)
    p = _loglog(grid)
    sweep = log_holder_infinity_sweep(p, (10.0, 20.0, 40.0))
    p1 = mstar_decompose(p, 2.0, 0.5)
    rec = float(np.abs(mstar_recombine(2.0, 0.5, p1).values - p.values).max())
    ok = const_ok and not sweep.holds and rec <= tol
    consts = ", ".join(f"{c:.4f}" for c in sweep.details["constants"])
    return ok, (f"constant p: all zero and holding = {const_ok}; loglog_sine decay constants "
                f"over L=10,20,40: {consts} (holds={sweep.holds}); mstar(2, 1/2) p1 in "
                f"[{p1.p_minus:.4f}, {p1.p_plus:.4f}], reconstruction error {rec:.1e}")


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    modules: tuple
    check: Callable
    time_limit: float


@dataclass
class CriterionResult:
    criterion: Criterion
    passed: bool
    detail: str
    elapsed: float

    @property
    def within_time(self) -> bool:
        return self.elapsed < self.criterion.time_limit


CRITERIA = (
    Criterion(1, "Luxemburg norm matches discrete L^p for constant p", ("modular",), c1_norm_consistency, 5),
    Criterion(2, "unit-ball law of the Luxemburg norm", ("modular",), c2_unit_ball, 10),
    Criterion(3, "lattice property on dominated pairs", ("modular",), c3_lattice, 20),
    Criterion(4, "prefix-sum maximal function vs exhaustive oracle", ("maximal",), c4_maximal_oracle, 10),
    Criterion(5, "sharp maximal function laws", ("maximal",), c5_sharp_laws, 10),
    Criterion(6, "pointwise sharp-maximal estimate for Op(a)", ("maximal", "pdo"), c6_pointwise_sharp, 60),
    Criterion(7, "Op(a) norm ratios on L^p(.) without blow-up", ("pdo", "modular"), c7_boundedness, 60),
    Criterion(8, "regularizer identity a*b_R = 1 - phi_R", ("symbols",), c8_regularizer_identity, 5),
    Criterion(9, "Fredholm residual decay and ellipticity failure", ("fredholm",), c9_fredholm, 120),
    Criterion(10, "composition residual order reduction", ("pdo",), c10_composition, 60),
    Criterion(11, "exponent-class checkers", ("exponent",), c11_exponent_checkers, 10),
)


def run_criteria(only: Optional[str] = None, tolerance: Optional[float] = None,
                 numbers=None) -> list:
    """Run the criteria (optionally those tagged with module ``only``)."""
    results = []
    for crit in CRITERIA:
        if only is not None and only not in crit.modules:
            continue
        if numbers is not None and crit.number not in numbers:
            continue
        results.append(run_one(crit, tolerance))
    return results


def run_one(crit: Criterion, tolerance: Optional[float] = None) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, detail = crit.check(tolerance)
    except Exception as exc:  # reported as a failing criterion
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    res = CriterionResult(crit, bool(passed), detail, elapsed)
    if not res.within_time:
        res.passed = False
        res.detail += f" [exceeded time limit {crit.time_limit:g}s]"
    return res


def format_result(res: CriterionResult) -> str:
    tag = "PASS" if res.passed else "FAIL"
    c = res.criterion
    return f"[{tag}] criterion {c.number:2d} ({'/'.join(c.modules)}) {c.title}: {res.detail} [{res.elapsed:.2f}s < {c.time_limit:g}s]"
