import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hsext.deltas import comb_spectrum, delta
from hsext.errors import (
    IncompatibleGridError,
    InvalidParameterError,
    ResolutionError,
    UnsupportedOrderError,
)
from hsext.spectral import (
    GridFunction,
    SpectralFunction,
    SobolevOrder,
    bump,
    fourier_transform,
    hs_inner,
    hs_inner_report,
    hs_norm,
    make_grid,
    mollifier,
    physical_inner_hm,
    spectral_derivative,
)

GRID = make_grid(64.0, 4096)


def common(f, g):
    lo = min(f.origin, g.origin)
    hi = max(f.x[-1], g.x[-1])
    n = int(round((hi - lo) / f.spacing)) + 1
    return f.to_grid(lo, n), g.to_grid(lo, n)


# --- grids and orders ------------------------------------------------------

def test_make_grid_spacing():
    g = make_grid(64.0, 4096)
    assert g.spacing == 0.03125
    assert g.points[0] == -64.0
    assert g.points[-1] == 64.0 - 0.03125
    assert g.points[2048] == 0.0


def test_smallest_grid():
    np.testing.assert_array_equal(make_grid(1.0, 2).points, [-1.0, 0.0])


@pytest.mark.parametrize("xi,n", [(0.0, 4), (-1.0, 4), (1.0, 3), (1.0, 1), (math.inf, 4)])
def test_make_grid_rejects(xi, n):
    with pytest.raises(InvalidParameterError):
        make_grid(xi, n)


@pytest.mark.parametrize("s", [math.nan, math.inf, -math.inf])
def test_order_must_be_finite(s):
    with pytest.raises(InvalidParameterError):
        SobolevOrder(s)


# --- grid functions ----------------------------------------------------------

def test_samples_outside_support_rejected():
    vals = np.ones(10)
    with pytest.raises(InvalidParameterError):
        GridFunction(vals, 0.0, 0.1, (0.2, 0.5))


def test_mollifier_is_compact_and_peaks_at_zero():
    t = np.linspace(-1.5, 1.5, 301)
    m = mollifier(t)
    assert np.all(m[np.abs(t) >= 1] == 0)
    assert m.max() == pytest.approx(math.exp(-1))


def test_bump_support_and_linearity_of_scaling():
    f = bump(2.0, 0.5)
    assert f.support == (1.5, 2.5)
    assert np.all(f.samples[(f.x < 1.5) | (f.x > 2.5)] == 0)
    np.testing.assert_allclose(f.scaled(3.0).samples, 3.0 * f.samples)


# --- transform -------------------------------------------------------------

def test_transform_of_zero():
    f = bump().scaled(0.0)
    assert np.all(fourier_transform(f, GRID).values == 0)


def test_centered_bump_real_and_even():
    u = fourier_transform(bump(0.0, 1.0), GRID).values
    n = len(u)
    assert np.max(np.abs(u.imag)) < 1e-15
    np.testing.assert_allclose(u[1:], u[1:][::-1], atol=1e-15)
    assert u[n // 2].real > 0


def test_transform_matches_analytic_gaussian():
    # e^{-x^2/2} transforms to e^{-xi^2/2} in the unitary convention
    f = GridFunction.from_callable(lambda x: np.exp(-0.5 * x * x), (-12.0, 12.0), 0.02)
    u = fourier_transform(f, make_grid(16.0, 1024))
    xi = u.grid.points
    # truncating at |x| = 12 costs ~e^-72
    np.testing.assert_allclose(u.values, np.exp(-0.5 * xi * xi), atol=1e-13)


@pytest.mark.parametrize("d", [0.3, 1.7, -2.25])
def test_translate_multiplies_by_phase(d):
    f = bump(0.0, 1.0)
    u = fourier_transform(f, GRID)
    v = fourier_transform(f.shifted(d), GRID)
    expect = np.exp(-1j * GRID.points * d) * u.values
    peak = np.max(np.abs(u.values))
    assert np.max(np.abs(v.values - expect)) <= 1e-8 * peak


def test_transform_is_linear():
    f, g = common(bump(0.0, 1.0), bump(0.7, 0.5))
    a, b = 1.5 - 0.5j, -0.25
    lhs = fourier_transform(GridFunction(a * f.samples + b * g.samples, f.origin, f.spacing,
                                         (f.origin, f.x[-1])), GRID).values
    rhs = a * fourier_transform(f, GRID).values + b * fourier_transform(g, GRID).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_transform_resolution_error():
    f = bump(0.0, 1.0, spacing=0.2)
    with pytest.raises(ResolutionError):
        fourier_transform(f, GRID)


def test_real_input_gives_hermitian_spectrum():
    assert fourier_transform(bump(0.4, 1.3), GRID).is_hermitian()
    g = bump(0.4, 1.3).scaled(1j)
    assert not fourier_transform(g, GRID).is_hermitian()


# --- inner products ----------------------------------------------------------

def test_delta_inner_product():
    val = hs_inner(comb_spectrum(delta(0.0)), comb_spectrum(delta(1.0)), -1)
    assert abs(val - 0.5 * math.exp(-1)) <= 1e-6
    assert abs(val - 0.18393972) < 1e-6


def test_delta_norm():
    assert abs(hs_norm(comb_spectrum(delta(0.0)), -1) - math.sqrt(0.5)) <= 1e-6


def test_zero_inner_product():
    v = fourier_transform(bump(), GRID)
    zero = SpectralFunction(np.zeros(GRID.num_points), GRID)
    for s in (-1.0, 0.0, 1.5):
        assert hs_inner(zero, v, s) == 0
        assert hs_norm(zero, s) == 0


def test_l2_matches_physical_side():
    f = bump(0.0, 3.0)
    u = fourier_transform(f, GRID)
    phys = np.sum(np.abs(f.samples) ** 2) * f.spacing
    assert hs_inner(u, u, 0).real == pytest.approx(phys, rel=1e-8)


def test_grid_mismatch():
    u = fourier_transform(bump(), GRID)
    v = fourier_transform(bump(), make_grid(64.0, 2048))
    with pytest.raises(IncompatibleGridError):
        hs_inner(u, v, 0)


def test_tail_flag_for_slow_decay():
    u = SpectralFunction(np.ones(GRID.num_points), GRID)
    rep = hs_inner_report(u, u, -1)
    assert rep.flagged
    assert rep.tail_estimate > 0
    smooth = fourier_transform(bump(0.0, 4.0), GRID)
    assert not hs_inner_report(smooth, smooth, 0).flagged


def test_extrapolated_delta_norm_is_accurate():
    rep = hs_inner_report(comb_spectrum(delta(0.0)), comb_spectrum(delta(0.0)), -1)
    assert rep.extrapolated
    assert abs(rep.value - 0.5) < 1e-9


def test_divergent_delta_norm_rejected():
    u = comb_spectrum(delta(0.0))
    with pytest.raises(InvalidParameterError):
        hs_inner(u, u, -0.5)


# --- physical side ------------------------------------------------------------

def test_spectral_derivative_of_gaussian():
    f = GridFunction.from_callable(lambda x: np.exp(-x * x), (-10.0, 10.0), 0.01)
    x = f.x
    np.testing.assert_allclose(spectral_derivative(f, 1), -2 * x * np.exp(-x * x), atol=1e-9)
    np.testing.assert_allclose(spectral_derivative(f, 2), (4 * x * x - 2) * np.exp(-x * x),
                               atol=1e-8)


def test_physical_m0_is_l2_of_samples():
    f, g = common(bump(0.0, 1.0), bump(0.5, 1.0))
    expect = np.sum(f.samples * np.conj(g.samples)) * f.spacing
    assert physical_inner_hm(f, g, 0) == pytest.approx(expect, rel=1e-14)


def test_physical_m2_binomial_weights():
    f, g = common(bump(0.0, 2.0), bump(0.5, 2.0))
    d1f, d1g = spectral_derivative(f, 1), spectral_derivative(g, 1)
    d2f, d2g = spectral_derivative(f, 2), spectral_derivative(g, 2)
    h = f.spacing
    expect = h * np.sum(f.samples * np.conj(g.samples) + 2 * d1f * np.conj(d1g)
                        + d2f * np.conj(d2g))
    assert physical_inner_hm(f, g, 2) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("m", [-1, 4, 1.5])
def test_physical_unsupported_order(m):
    with pytest.raises(UnsupportedOrderError):
        physical_inner_hm(bump(), bump(), m)


def test_physical_requires_shared_grid():
    with pytest.raises(IncompatibleGridError):
        physical_inner_hm(bump(0.0, 1.0), bump(3.0, 1.0), 1)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_plancherel_identity(m):
    f, g = common(bump(0.0, 5.0), bump(1.0, 4.0))
    u, v = fourier_transform(f, GRID), fourier_transform(g, GRID)
    phys = physical_inner_hm(f, g, m)
    four = hs_inner(u, v, m)
    scale = math.sqrt(physical_inner_hm(f, f, m).real * physical_inner_hm(g, g, m).real)
    assert abs(phys - four) <= 1e-8 * scale
    assert abs(phys - four) <= 1e-8 * abs(four)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_disjoint_supports_orthogonal(m):
    f, g = common(bump(-2.0, 1.0), bump(2.0, 1.5))
    scale = math.sqrt(physical_inner_hm(f, f, m).real * physical_inner_hm(g, g, m).real)
    assert abs(physical_inner_hm(f, g, m)) <= 1e-10 * scale


# --- properties -------------------------------------------------------------

bump_params = st.tuples(st.floats(-2.0, 2.0), st.floats(2.5, 4.0))
orders = st.floats(-2.0, 3.0)


@settings(max_examples=25, deadline=None)
@given(bump_params, bump_params, orders)
def test_conjugate_symmetry(p, q, s):
    f, g = common(bump(*p), bump(*q).scaled(0.5 + 1j))
    u, v = fourier_transform(f, GRID), fourier_transform(g, GRID)
    uv, vu = hs_inner(u, v, s), hs_inner(v, u, s)
    assert abs(uv - np.conj(vu)) <= 1e-14 * max(1.0, abs(uv))


@settings(max_examples=25, deadline=None)
@given(bump_params, orders, st.complex_numbers(max_magnitude=10.0, allow_nan=False,
                                               allow_infinity=False))
def test_linearity_in_first_argument(p, s, c):
    u = fourier_transform(bump(*p), GRID)
    v = fourier_transform(bump(0.0, 3.0), GRID)
    w = fourier_transform(bump(1.0, 2.5), GRID)
    lhs = hs_inner(u.scaled(c) + w, v, s)
    rhs = c * hs_inner(u, v, s) + hs_inner(w, v, s)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(c)) * max(1.0, abs(rhs))


@settings(max_examples=30, deadline=None)
@given(bump_params, st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=6, unique=True))
def test_norm_monotone_in_order(p, ss):
    u = fourier_transform(bump(*p), GRID)
    ss = sorted(ss)
    norms = [hs_norm(u, s) for s in ss]
    for (s, a), (t, b) in zip(zip(ss, norms), zip(ss[1:], norms[1:])):
        if t - s > 1e-6:
            assert a < b
