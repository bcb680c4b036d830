import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexpdo.errors import PreconditionError
from vexpdo.exponent import Exponent, constant_exponent, loglog_sine_exponent
from vexpdo.grid import SampledFunction, bump, make_grid
from vexpdo.modular import check_lattice, log_modular, luxemburg_norm, modular
from vexpdo.oracles import discrete_lp_norm

GRID = make_grid(1, 10.0, 128)
P_VAR = loglog_sine_exponent(GRID, 0.1, 0.05)


def brute_modular(values, p, lam, h):
    return float(np.sum(np.abs(values / lam) ** p) * h)


def test_bump_norm_constant_two():
    f = bump(GRID, 0.0, 2.0)
    res = luxemburg_norm(f, constant_exponent(GRID, 2.0))
    ref = np.sqrt(GRID.h * np.sum(np.abs(f.values) ** 2))
    assert res.value == pytest.approx(ref, rel=1e-9)
    assert res.iterations > 0


def test_modular_matches_direct_sum():
    f = bump(GRID, 1.0, 3.0) * 2.5
    for lam in (0.3, 1.0, 7.0):
        assert modular(f, P_VAR, lam) == pytest.approx(brute_modular(f.values, P_VAR.values, lam, GRID.h), rel=1e-12)


def test_log_modular_does_not_overflow():
    f = SampledFunction(GRID, np.full(GRID.shape, 1e200))
    p = constant_exponent(GRID, 3.0)
    assert np.isfinite(log_modular(f, p, 1.0))
    assert luxemburg_norm(f, p).value == pytest.approx(1e200 * 20.0 ** (1 / 3), rel=1e-9)


def test_zero_function():
    res = luxemburg_norm(SampledFunction(GRID, np.zeros(GRID.shape)), P_VAR)
    assert res.value == 0.0 and res.iterations == 0


def test_unit_ball_law():
    f = bump(GRID, -2.0, 3.0) * 4.0
    n = luxemburg_norm(f, P_VAR).value
    assert modular(f, P_VAR, n) <= 1 + 1e-9
    assert modular(f, P_VAR, 0.99 * n) > 1


def test_inadmissible_exponent_rejected():
    p = Exponent(GRID, np.full(GRID.shape, 1.0))
    with pytest.raises(PreconditionError):
        luxemburg_norm(bump(GRID), p)


def test_lattice_precondition_names_nodes():
    f = bump(GRID, 0.0, 2.0)
    with pytest.raises(PreconditionError) as info:
        check_lattice(f * 2.0, f, P_VAR)
    assert info.value.nodes


def test_tolerance_below_roundoff_terminates():
    f = bump(GRID, 0.0, 2.0)
    res = luxemburg_norm(f, P_VAR, tol=1e-18)
    lo, hi = res.bracket
    assert np.nextafter(lo, np.inf) >= hi


values = st.lists(st.floats(-50, 50, allow_nan=False), min_size=16, max_size=16)
SMALL = make_grid(1, 4.0, 16)
P_SMALL = loglog_sine_exponent(SMALL, 0.1, 0.05)


def _f(v):
    return SampledFunction(SMALL, np.array(v))


@settings(max_examples=60, deadline=None)
@given(values, st.floats(1.1, 4.0))
def test_constant_p_matches_closed_form(v, q):
    v = np.array(v)
    if not np.any(v):
        return
    res = luxemburg_norm(_f(v), constant_exponent(SMALL, q))
    # the bracket width is tol * max(1, hi): absolute accuracy for norms below 1
    assert res.value == pytest.approx(discrete_lp_norm(v, q, SMALL.h), rel=1e-8, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(values, st.floats(-20, 20).filter(lambda c: abs(c) > 1e-3))
def test_homogeneity(v, c):
    f = _f(v)
    assert luxemburg_norm(f * c, P_SMALL).value == pytest.approx(abs(c) * luxemburg_norm(f, P_SMALL).value,
                                                                  rel=1e-8, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(values, values)
def test_triangle_inequality(v, w):
    f, g = _f(v), _f(w)
    lhs = luxemburg_norm(f + g, P_SMALL).value
    assert lhs <= luxemburg_norm(f, P_SMALL).value + luxemburg_norm(g, P_SMALL).value + 1e-8 * (1 + lhs)


@settings(max_examples=60, deadline=None)
@given(values, st.lists(st.floats(0, 1), min_size=16, max_size=16))
def test_lattice_property(v, shrink):
    g = _f(v)
    f = _f(np.array(v) * np.array(shrink))
    assert check_lattice(f, g, P_SMALL)
