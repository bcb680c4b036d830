import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from vexpdo.errors import DerivativeUnavailableError, EllipticityError
from vexpdo.symbols import (ELLIPTIC_BUILTINS, SymbolLattice, builtin_symbol, cutoff_phi_R,
                            estimate_hormander_seminorms, from_sympy, identity_deviation,
                            japanese_bracket, regularizer_b_R, smooth_step, so_decay_profile,
                            symbol_product)

LAT = SymbolLattice(1, 10.0, 20.0, 33, 65)


def test_japanese_bracket():
    assert japanese_bracket((np.array(3.0),)) == pytest.approx(np.sqrt(10.0))


def test_bracket_power_derivative_closed_form():
    a = builtin_symbol("bracket_power", m=1.5)
    xi = np.linspace(-5, 5, 11)
    d = a.derivative((2,), (0,), method="closure")((0.0,), (xi,))
    # second derivative of (1 + xi^2)^(3/4)
    ref = 1.5 * (1 + xi**2) ** (-0.25) - 0.75 * xi**2 * (1 + xi**2) ** (-1.25)
    np.testing.assert_allclose(d.real, ref, rtol=1e-12)


def test_fd_agrees_with_closure():
    a = builtin_symbol("so_elliptic")
    x, xi = (np.linspace(-4, 4, 9).reshape(-1, 1),), (np.linspace(-3, 3, 7).reshape(1, -1),)
    for al, be in [((1,), (0,)), ((0,), (1,)), ((1,), (1,)), ((2,), (1,))]:
        exact = a.derivative(al, be, "closure")(x, xi)
        approx = a.derivative(al, be, "fd")(x, xi)
        np.testing.assert_allclose(approx, exact, atol=1e-4)


def test_fd_is_second_order():
    expr = sp.sin(sp.Symbol("x1", real=True)) * sp.exp(sp.Symbol("xi1", real=True) / 3)
    a = from_sympy(expr, 1, "test")
    exact = a.derivative((1,), (1,), "closure")((0.7,), (0.4,))
    errs = [abs(a._fd((1,), (1,), h)((0.7,), (0.4,)) - exact) for h in (1e-2, 5e-3)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_order_cap_enforced():
    with pytest.raises(DerivativeUnavailableError):
        builtin_symbol("one", order_cap=2).derivative((3,), (0,))


def test_leibniz_product_matches_sympy():
    xs, xis = sp.Symbol("x1", real=True), sp.Symbol("xi1", real=True)
    a = builtin_symbol("so_log_sine")
    b = builtin_symbol("bracket_normalized")
    ab = symbol_product(a, b)
    expr = sp.sin(sp.log(sp.sqrt(1 + xs**2))) * (1 + sp.I * xis**2) / (1 + xis**2)
    ref = sp.lambdify((xs, xis), sp.diff(expr, xs, 1, xis, 2))
    np.testing.assert_allclose(ab.derivative((2,), (1,))((1.3,), (0.8,)), ref(1.3, 0.8), rtol=1e-10)


def test_bracket_power_seminorms():
    a = builtin_symbol("bracket_power", m=1.0)
    assert estimate_hormander_seminorms(a, 1.0, order_cap=2, lattice=LAT).consistent
    # measured as order 0 the symbol grows like <xi>
    assert not estimate_hormander_seminorms(a, 0.0, order_cap=2, lattice=LAT).consistent


def test_seminorm_of_one_is_one():
    rep = estimate_hormander_seminorms(builtin_symbol("one"), 0.0, order_cap=1, lattice=LAT)
    assert rep.constant((0,), (0,)) == pytest.approx(1.0)
    assert rep.constant((1,), (0,)) == 0.0


def test_so_log_sine_is_so_but_not_so0():
    prof = so_decay_profile(builtin_symbol("so_log_sine"), 0.0, order_cap=2)
    assert prof.so_consistent and not prof.so0_consistent


def test_heat_symbol_profile_has_no_x_dependence():
    prof = so_decay_profile(builtin_symbol("heat"), 0.0, order_cap=1)
    assert prof.tail_ratios[((0,), (1,))] == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5))
def test_seminorms_ignore_x_window_for_multipliers(shift):
    # an x-independent symbol has the same constants whatever x-window is sampled
    a = builtin_symbol("bracket_normalized")
    shifted = from_sympy((1 + sp.I * sp.Symbol("xi1", real=True) ** 2) / (1 + sp.Symbol("xi1", real=True) ** 2),
                         1, "copy")
    r1 = estimate_hormander_seminorms(a, 0.0, order_cap=1, lattice=LAT)
    r2 = estimate_hormander_seminorms(shifted, 0.0, order_cap=1, lattice=SymbolLattice(1, 10.0 + abs(shift), 20.0, 33, 65))
    for e1, e2 in zip(r1.entries, r2.entries):
        assert e1.constant == pytest.approx(e2.constant, rel=1e-12, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 3))
def test_smooth_step_range(t):
    v = float(smooth_step(t))
    assert 0.0 <= v <= 1.0
    if t <= 1:
        assert v == 1.0
    if t >= np.sqrt(2):
        assert v == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, 30), st.floats(-30, 30), st.floats(0.5, 10))
def test_phi_plateaus(x, xi, R):
    phi = cutoff_phi_R(R)
    v = phi((np.array(x),), (np.array(xi),)).real
    assert 0 <= v <= 1
    if abs(x) + abs(xi) <= R:
        assert v == 1
    if abs(x) + abs(xi) >= 2 * R:
        assert v == 0


@pytest.mark.parametrize("name", ELLIPTIC_BUILTINS)
def test_regularizer_identity(name):
    a = builtin_symbol(name)
    lat = SymbolLattice(1, 10.0, 20.1, 129, 129)
    phi = cutoff_phi_R(5.0)
    b = regularizer_b_R(a, 5.0, lat, phi)
    assert identity_deviation(a, b, phi, lat) <= 1e-14


def test_regularizer_rejects_vanishing_symbol():
    with pytest.raises(EllipticityError) as info:
        regularizer_b_R(builtin_symbol("nonelliptic_demo"), 2.0, SymbolLattice(1, 10.0, 10.0, 65, 65))
    assert info.value.point is not None


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin_symbol("no_such_symbol")
