"""Regularizer construction for symbols elliptic at infinity, and
numerical compactness probes of the residuals.

Given ``a`` bounded away from zero on ``{|x| + |xi| >= R}``, the symbol
``b_R = (1 - phi_R)/a`` satisfies ``a b_R = 1 - phi_R`` exactly, and the
residuals ``I - Op(a)Op(b_R)`` and ``I - Op(b_R)Op(a)`` should be
compact.  Compactness is probed on two weakly-null families (bumps
marching toward the edge of the cube and increasingly modulated bumps):
their residual norms must decay.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EllipticityError
from .exponent import Exponent, conjugate, mstar_decompose, mstar_recombine
from .grid import SUPPORT_GUARD, bump, transform_function
from .modular import luxemburg_norm
from .pdo import PdoPlan, apply
from .symbols import (Symbol, SymbolLattice, cutoff_phi_R, identity_deviation,
                      regularizer_b_R)

__all__ = [
    "ProbeFamilySpec",
    "FredholmReport",
    "ellipticity_radius",
    "probe_family",
    "run_fredholm_pipeline",
    "MONOTONE_SLACK",
    "DECAY_FACTOR",
]

MONOTONE_SLACK = 1.05
DECAY_FACTOR = 0.25
DEFAULT_EPS = 1e-3


def ellipticity_radius(a: Symbol, lattice: SymbolLattice, eps: float = DEFAULT_EPS):
    """Smallest ``R`` in ``{T/8, T/4, T/2}`` (``T = lattice.total_radius``)
    with ``min |a| >= eps`` on the lattice part of ``{|x| + |xi| >= R}``.

    Returns
    -------
    (R, inf_a) or (None, inf_a_at_largest_R)
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    x, xi = lattice.x_points(), lattice.xi_points()
    vals = np.abs(a(x, xi))
    radius = np.sqrt(sum(c**2 for c in x)) + np.sqrt(sum(c**2 for c in xi))
    T = lattice.total_radius
    inf_a = np.nan
    for R in (T / 8, T / 4, T / 2):
        inf_a = float(vals[np.broadcast_to(radius >= R, vals.shape)].min())
        if inf_a >= eps:
            return R, inf_a
    return None, inf_a


@dataclass
class ProbeFamilySpec:
    """Parameters of the two weakly-null probe families.

    Translates are ``bump(tau_k, width)`` with ``tau_k = tau_max * 2**(k-n+1)``
    and ``tau_max = 0.8 L - width``; modulates are
    ``exp(i omega_j x_1) bump(0, width)`` with
    ``omega_j = omega_max * 2**(j-n+1)``.
    """

    width: float = 1.5
    n_translates: int = 5
    n_modulations: int = 4
    omega_max: Optional[float] = None
    direction: tuple = (1.0,)

    def to_dict(self) -> dict:
        return {"width": self.width, "n_translates": self.n_translates,
                "n_modulations": self.n_modulations, "omega_max": self.omega_max,
                "direction": list(self.direction)}


def probe_family(grid, spec: ProbeFamilySpec):
    """Build ``[(family, description, u), ...]`` and a list of notes."""
    notes = []
    direction = np.zeros(grid.dim)
    direction[: len(spec.direction)] = spec.direction[: grid.dim]
    direction /= np.linalg.norm(direction)
    tau_max = SUPPORT_GUARD * grid.L - spec.width
    members = []
    base = bump(grid, 0.0, spec.width)
    for k in range(spec.n_translates):
        tau = tau_max * 2.0 ** (k - spec.n_translates + 1)
        members.append(("translate", f"tau={tau:.6g}", transform_function(base, "translate", tau * direction)))
    omega_max = spec.omega_max if spec.omega_max is not None else 0.5 * grid.xi_max
    if omega_max > grid.xi_max:
        notes.append(f"omega_max {omega_max:g} beyond Nyquist {grid.xi_max:g}; clipped")
        omega_max = grid.xi_max
    for j in range(spec.n_modulations):
        omega = omega_max * 2.0 ** (j - spec.n_modulations + 1)
        members.append(("modulate", f"omega={omega:.6g}", transform_function(base, "modulate", omega * direction)))
    return members, notes


@dataclass
class FredholmReport:
    """Outcome of the regularizer pipeline for one symbol and exponent."""

    symbol: str
    exponent: str
    verdict: str
    R: Optional[float] = None
    inf_abs_a: Optional[float] = None
    identity_residual: Optional[float] = None
    right_table: list = field(default_factory=list)
    left_table: list = field(default_factory=list)
    family_checks: dict = field(default_factory=dict)
    lattice: dict = field(default_factory=dict)
    probe_spec: dict = field(default_factory=dict)
    mstar: Optional[dict] = None
    conjugate_run: Optional[dict] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol, "exponent": self.exponent, "verdict": self.verdict,
            "R": self.R, "inf_abs_a": self.inf_abs_a, "identity_residual": self.identity_residual,
            "right_table": self.right_table, "left_table": self.left_table,
            "family_checks": self.family_checks, "lattice": self.lattice, "probe_spec": self.probe_spec,
            "mstar": self.mstar, "conjugate_run": self.conjugate_run, "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["side", "family", "index", "description", "ratio"])
        for side, table in (("right", self.right_table), ("left", self.left_table)):
            for row in table:
                w.writerow([side, row["family"], row["index"], row["description"], repr(row["ratio"])])
        return buf.getvalue()


def _decays(ratios, slack=MONOTONE_SLACK, factor=DECAY_FACTOR):
    monotone = all(b <= slack * a for a, b in zip(ratios, ratios[1:]))
    decay = ratios[-1] / ratios[0] if ratios[0] > 0 else 0.0
    return {"monotone": monotone, "final_over_first": decay,
            "ok": bool(monotone and decay <= factor)}


def _residual_tables(a, b, p, members, plan):
    right, left = [], []
    idx = {"translate": 0, "modulate": 0}
    for family, desc, u in members:
        nu = luxemburg_norm(u, p).value
        au = apply(a, u, plan)
        bu = apply(b, u, plan)
        r_right = u - apply(a, bu, plan, guard=False)
        r_left = u - apply(b, au, plan, guard=False)
        for table, r in ((right, r_right), (left, r_left)):
            table.append({"family": family, "index": idx[family], "description": desc,
                          "ratio": luxemburg_norm(r, p).value / nu})
        idx[family] += 1
    return right, left


def _check_tables(right, left, slack, factor):
    checks = {}
    for side, table in (("right", right), ("left", left)):
        for family in ("translate", "modulate"):
            ratios = [row["ratio"] for row in table if row["family"] == family]
            if ratios:
                checks[f"{side}/{family}"] = _decays(ratios, slack, factor)
    return checks


def run_fredholm_pipeline(a: Symbol, p: Exponent, spec: Optional[ProbeFamilySpec] = None,
                          lattice: Optional[SymbolLattice] = None, eps: float = DEFAULT_EPS,
                          mstar: Optional[tuple] = None, with_conjugate: bool = False,
                          slack: float = MONOTONE_SLACK, factor: float = DECAY_FACTOR,
                          strict: bool = False) -> FredholmReport:
    """Build ``b_R``, verify ``a b_R = 1 - phi_R`` and probe both residuals.

    Parameters
    ----------
    a : Symbol
    p : Exponent
        Exponent of the norm in which residuals are measured.
    spec : ProbeFamilySpec, optional
        Defaults are applied (and noted) when omitted.
    lattice : SymbolLattice, optional
        Defaults to the grid nodes times the Nyquist frequency window.
    mstar : (p0, theta), optional
        Record the convex split of ``p`` in the report.
    with_conjugate : bool
        Also measure the right residuals in the conjugate exponent.
    strict : bool
        Raise :class:`EllipticityError` instead of returning an
        ``elliptic-fail`` report.
    """
    p.require_admissible()
    grid = p.grid
    notes = []
    if spec is None:
        spec = ProbeFamilySpec()
        notes.append("probe family spec missing; defaults applied")
    if lattice is None:
        lattice = SymbolLattice.from_grid(grid)
    report = FredholmReport(a.name, p.name, "inconclusive", lattice=lattice.describe(),
                            probe_spec=spec.to_dict(), notes=notes)
    if mstar is not None:
        p0, theta = mstar
        p1 = mstar_decompose(p, p0, theta)
        back = mstar_recombine(p0, theta, p1)
        report.mstar = {"p0": p0, "theta": theta, "p1_min": p1.p_minus, "p1_max": p1.p_plus,
                        "reconstruction_error": float(np.abs(back.values - p.values).max())}

    R, inf_a = ellipticity_radius(a, lattice, eps)
    report.inf_abs_a = inf_a
    if R is None:
        report.verdict = "elliptic-fail"
        report.notes.append(f"inf |a| stays below eps={eps:g} on every ladder radius")
        if strict:
            raise EllipticityError(f"{a.name} is not elliptic at infinity on the lattice", value=inf_a)
        return report
    report.R = R

    phi = cutoff_phi_R(R, a.dim)
    b = regularizer_b_R(a, R, lattice, phi)
    report.identity_residual = identity_deviation(a, b, phi, lattice)

    members, fam_notes = probe_family(grid, spec)
    report.notes.extend(fam_notes)
    plan = PdoPlan(grid)
    report.right_table, report.left_table = _residual_tables(a, b, p, members, plan)
    report.family_checks = _check_tables(report.right_table, report.left_table, slack, factor)
    ok = report.family_checks and all(c["ok"] for c in report.family_checks.values())
    report.verdict = "Fredholm-consistent" if ok else "inconclusive"

    if with_conjugate:
        pc = conjugate(p)
        right, left = _residual_tables(a, b, pc, members, plan)
        report.conjugate_run = {"exponent": pc.name, "right_table": right,
                                "checks": _check_tables(right, left, slack, factor)}
    return report
