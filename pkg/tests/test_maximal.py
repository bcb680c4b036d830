import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexpdo.errors import PreconditionError
from vexpdo.exponent import constant_exponent, loglog_sine_exponent
from vexpdo.grid import SampledFunction, bump, make_grid
from vexpdo.maximal import (Cube, CubeFamily, box_means, cube_average, hl_maximal,
                            probe_maximal_boundedness, probe_sharp_inequality, q_maximal,
                            sharp_maximal, summed_area_table)
from vexpdo.oracles import exhaustive_maximal, exhaustive_sharp_maximal, naive_cube_mean

G1 = make_grid(1, 10.0, 64)
G2 = make_grid(2, 4.0, 8)
RNG = np.random.default_rng(7)


def test_cube_family_sides_are_odd_and_capped():
    assert CubeFamily(make_grid(1, 1.0, 8)).sides == [1, 3, 5, 7]
    assert CubeFamily(G1, 2).sides == [1, 3, 5]


def test_cubes_containing_count():
    # a side-s window contains node i at min(i, N-s) - max(0, i-s+1) + 1 positions
    fam = CubeFamily(make_grid(1, 1.0, 8), 1)
    assert len(list(fam.cubes_containing((0,)))) == 1 + 1
    assert len(list(fam.cubes_containing((4,)))) == 1 + 3


def test_cube_average_against_naive():
    f = SampledFunction(G2, RNG.standard_normal(G2.shape))
    table = summed_area_table(f.values)
    for cube in (Cube((0, 0), 3), Cube((2, 5), 3), Cube((1, 1), 7)):
        assert cube_average(f, cube, table) == pytest.approx(naive_cube_mean(f.values, cube), abs=1e-13)


def test_cube_outside_grid_rejected():
    f = SampledFunction(G2, np.ones(G2.shape))
    with pytest.raises(PreconditionError):
        cube_average(f, Cube((6, 0), 3))


def test_box_means_shape():
    assert box_means(np.ones((8, 8)), 3).shape == (6, 6)


@pytest.mark.parametrize("grid", [G1, G2], ids=["1d", "2d"])
def test_maximal_matches_exhaustive(grid):
    for _ in range(5):
        f = SampledFunction(grid, RNG.standard_normal(grid.shape))
        np.testing.assert_allclose(hl_maximal(f).values.real, exhaustive_maximal(f), atol=1e-12)


@pytest.mark.parametrize("grid", [G1, G2], ids=["1d", "2d"])
def test_sharp_maximal_matches_exhaustive(grid):
    f = SampledFunction(grid, RNG.standard_normal(grid.shape))
    np.testing.assert_allclose(sharp_maximal(f).values.real, exhaustive_sharp_maximal(f), atol=1e-12)


def test_indicator_tail_is_one_over_x():
    g = make_grid(1, 10.0, 128)
    f = SampledFunction(g, ((g.axis >= 0) & (g.axis < 1)).astype(float))
    m = hl_maximal(f).values.real
    for x in (2.0, 4.0, 8.0):
        k = g.nearest_index(x)[0]
        assert (1 - g.h) / (x + g.h) <= m[k] <= (1 + g.h) / (x - g.h)


def test_sharp_of_constant_is_exactly_zero():
    f = SampledFunction(G2, np.full(G2.shape, 3.7))
    assert np.all(sharp_maximal(f).values == 0)


def test_probe_boundedness_skips_zero():
    p = loglog_sine_exponent(G1, 0.1, 0.05)
    stats = probe_maximal_boundedness(p, [SampledFunction(G1, np.zeros(64)), bump(G1, 0.0, 2.0)])
    assert len(stats.ratios) == 1 and stats.notes
    assert stats.ratios[0] >= 1.0


def test_probe_sharp_rejects_constant():
    with pytest.raises(PreconditionError):
        probe_sharp_inequality(constant_exponent(G1, 2.0), [SampledFunction(G1, np.ones(64))])


def test_q_maximal_rejects_small_q():
    with pytest.raises(PreconditionError):
        q_maximal(bump(G1), 0.5)


samples = st.lists(st.floats(-100, 100, allow_nan=False), min_size=16, max_size=16).map(np.array)
SMALL = make_grid(1, 2.0, 16)


@settings(max_examples=50, deadline=None)
@given(samples)
def test_maximal_dominates_modulus(v):
    f = SampledFunction(SMALL, v)
    assert np.all(hl_maximal(f).values.real >= np.abs(v) - 1e-12)


@settings(max_examples=50, deadline=None)
@given(samples, samples)
def test_sublinearity(v, w):
    m = lambda a: hl_maximal(SampledFunction(SMALL, a)).values.real  # noqa: E731
    assert np.all(m(v + w) <= m(v) + m(w) + 1e-9)


@settings(max_examples=50, deadline=None)
@given(samples, st.floats(1.0, 3.0), st.floats(0.0, 3.0))
def test_q_maximal_monotone_in_q(v, q, dq):
    f = SampledFunction(SMALL, v)
    lo, hi = q_maximal(f, q).values.real, q_maximal(f, q + dq).values.real
    assert np.all(lo <= hi * (1 + 1e-10) + 1e-12)


@settings(max_examples=50, deadline=None)
@given(samples, st.floats(-1e3, 1e3))
def test_sharp_bounds_and_shift_invariance(v, c):
    f = SampledFunction(SMALL, v)
    s = sharp_maximal(f).values.real
    assert np.all(s <= 2 * hl_maximal(f).values.real + 1e-9)
    np.testing.assert_allclose(sharp_maximal(SampledFunction(SMALL, v + c)).values.real, s, atol=1e-9)
