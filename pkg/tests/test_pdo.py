import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexpdo.errors import NumericError, SupportError
from vexpdo.grid import SampledFunction, bump, make_grid, transform_function
from vexpdo.oracles import discrete_lp_norm
from vexpdo.pdo import PdoPlan, apply, apply_multiplier, composition_residual
from vexpdo.symbols import Symbol, builtin_symbol, multiplication_symbol, multiplier_symbol

GRID = make_grid(1, 10.0, 128)
PLAN = PdoPlan(GRID)
U = bump(GRID, 1.0, 2.0)


def test_identity_symbol():
    out = apply(builtin_symbol("one"), U, PLAN)
    assert np.abs(out.values - U.values).max() <= 1e-10


def test_fourier_of_bump_matches_quadrature():
    xi = GRID.freq_axis
    ref = np.array([np.sum(U.values * np.exp(-1j * GRID.axis * k)) * GRID.h for k in xi])
    np.testing.assert_allclose(PLAN.fourier(U), ref, atol=1e-12)


def test_plane_wave_eigenfunction():
    # exp(i w x) with w on the frequency lattice is an eigenfunction of m(D)
    w = 8 * GRID.dxi
    u = SampledFunction(GRID, np.exp(1j * w * GRID.axis))
    out = apply(builtin_symbol("heat"), u, PLAN, guard=False)
    np.testing.assert_allclose(out.values, np.exp(-w**2) * u.values, atol=1e-12)


def test_multiplication_symbol_is_pointwise():
    v = lambda x: np.cos(x) + 2  # noqa: E731
    out = apply(multiplication_symbol(v), U, PLAN)
    np.testing.assert_allclose(out.values, v(GRID.axis) * U.values, atol=1e-12)


@pytest.mark.parametrize("name", ["bracket_normalized", "riesz_smooth", "heat"])
def test_dense_matches_fft_multiplier(name):
    a = builtin_symbol(name)
    np.testing.assert_allclose(apply(a, U, PLAN).values, apply_multiplier(a, U).values, atol=1e-12)


def test_multiplier_accepts_callable():
    out = apply_multiplier(lambda xi: np.exp(-xi**2), U)
    np.testing.assert_allclose(out.values, apply_multiplier(builtin_symbol("heat"), U).values, atol=1e-14)


def test_2d_separable_factorization():
    g = make_grid(2, 6.0, 16)
    u = bump(g, (0.5, -0.5), 2.5)
    sym = Symbol(2, lambda x, xi: np.exp(-xi[0] ** 2) * np.cos(x[1]))
    step1 = apply(Symbol(2, lambda x, xi: np.exp(-xi[0] ** 2) + 0 * x[0]), u)
    np.testing.assert_allclose(apply(sym, u).values, np.cos(g.coords[1]) * step1.values, atol=1e-12)


def test_support_guard():
    with pytest.raises(SupportError):
        apply(builtin_symbol("one"), bump(GRID, 8.0, 1.5), PLAN)


@pytest.mark.filterwarnings("ignore:divide by zero")
def test_non_finite_symbol():
    bad = Symbol(1, lambda x, xi: 1 / (xi[0] + 0 * x[0]))
    with pytest.raises(NumericError):
        apply(bad, U, PLAN)


def test_composition_residual_vanishes_for_x_then_xi():
    # Op(v) Op(m) = v m(D) = Op(v m) exactly for the left quantization
    v = multiplication_symbol(lambda x: np.exp(-x**2 / 8))
    m = builtin_symbol("bracket_normalized")
    for k in (2, 4, 8, 16):
        u = transform_function(bump(GRID, 0.0, 3.0), "modulate", k * GRID.dxi)
        r = composition_residual(v, m, u, PLAN)
        assert discrete_lp_norm(r.values, 2, GRID.h) <= 1e-13 * discrete_lp_norm(u.values, 2, GRID.h)


def test_composition_residual_decays_for_xi_then_x():
    v = multiplication_symbol(lambda x: np.exp(-x**2 / 8))
    m = builtin_symbol("bracket_normalized")
    ratios = []
    for k in (2, 4, 8, 16):
        u = transform_function(bump(GRID, 0.0, 3.0), "modulate", k * GRID.dxi)
        r = composition_residual(m, v, u, PLAN)
        ratios.append(discrete_lp_norm(r.values, 2, GRID.h) / discrete_lp_norm(u.values, 2, GRID.h))
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] / ratios[0] <= 0.5


coef = st.floats(-5, 5)


@settings(max_examples=30, deadline=None)
@given(coef, coef, st.floats(-3, 3))
def test_linearity(a, b, c):
    sym = builtin_symbol("so_elliptic")
    u, w = bump(GRID, c, 2.0), bump(GRID, -c, 1.0)
    lhs = apply(sym, u * a + w * b, PLAN).values
    rhs = a * apply(sym, u, PLAN).values + b * apply(sym, w, PLAN).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * (1 + abs(a) + abs(b)))


def test_multiplier_symbol_helper():
    m = multiplier_symbol(lambda xi: 1 / (1 + xi**2))
    ref = apply_multiplier(lambda xi: 1 / (1 + xi**2), U)
    np.testing.assert_allclose(apply(m, U, PLAN).values, ref.values, atol=1e-12)
