import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hsext.errors import InvalidParameterError, ResolutionError, TailPrecisionError
from hsext.interval import (
    IntervalFunction,
    TraceData,
    fd4_derivative,
    h1_interval_norm_sq,
    h1_minimal_extension,
    h2_extension_family_min,
    h2_interval_norm_sq,
    piecewise_h1_inner,
    stationarity_probe,
)
from hsext.spectral import GridFunction, bump, physical_inner_hm


def on_unit(fn, dfn=None, n=1025, a=0.0, b=1.0):
    return IntervalFunction.from_callable(fn, a, b, n, dfn=dfn)


ONE = on_unit(lambda x: np.ones_like(x))
LINEAR = on_unit(lambda x: x)


def ext_norm_sq(phi, halo=20.0):
    ext = h1_minimal_extension(phi, halo)
    return piecewise_h1_inner(ext, ext, (phi.a, phi.b)).real


# a suite of polynomial, trigonometric, exponential and bump profiles
SUITE = {
    "one": (lambda x: np.ones_like(x), 0.0, 1.0),
    "x": (lambda x: x, 0.0, 1.0),
    "quadratic": (lambda x: 1 - 2 * x + 3 * x ** 2, 0.0, 1.0),
    "cubic": (lambda x: x ** 3 - x, -1.0, 2.0),
    "sin": (lambda x: np.sin(3 * x), 0.0, 2.0),
    "cos": (lambda x: np.cos(x), -1.0, 1.0),
    "exp": (lambda x: np.exp(-x), 0.0, 3.0),
    "complex": (lambda x: np.exp(1j * x) * (1 + x), 0.0, 1.0),
    "bump-inside": (lambda x: bump(0.5, 0.3, spacing=1e-3).to_grid(0.0, 1001).samples, 0.0, 1.0),
    "gauss": (lambda x: np.exp(-4 * (x - 0.3) ** 2), -0.5, 1.5),
}


def suite_function(name):
    fn, a, b = SUITE[name]
    if name == "bump-inside":
        return IntervalFunction(a, b, fn(None))
    return IntervalFunction.from_callable(fn, a, b, 2001)


# --- finite differences -------------------------------------------------------

@pytest.mark.parametrize("deg", range(5))
def test_fd4_first_derivative_exact_for_quartics(deg):
    x = np.linspace(-1.0, 2.0, 31)
    h = x[1] - x[0]
    p = np.polynomial.Polynomial(np.arange(1.0, deg + 2))
    np.testing.assert_allclose(fd4_derivative(p(x), h, 1), p.deriv()(x), atol=1e-10)


@pytest.mark.parametrize("deg", range(6))
def test_fd4_second_derivative_exact_for_quintics(deg):
    x = np.linspace(-1.0, 2.0, 31)
    h = x[1] - x[0]
    p = np.polynomial.Polynomial(np.arange(1.0, deg + 2))
    np.testing.assert_allclose(fd4_derivative(p(x), h, 2), p.deriv(2)(x), atol=1e-8)


def test_fd4_convergence_order():
    errs = []
    for n in (41, 81, 161):
        x = np.linspace(0.0, 1.0, n)
        errs.append(np.max(np.abs(fd4_derivative(np.sin(5 * x), x[1] - x[0]) - 5 * np.cos(5 * x))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 3.5)


# --- construction ---------------------------------------------------------------

def test_too_few_samples():
    with pytest.raises(ResolutionError):
        IntervalFunction(0.0, 1.0, np.ones(15))


def test_trace_consistency_checked():
    with pytest.raises(InvalidParameterError):
        IntervalFunction(0.0, 1.0, np.ones(32), TraceData(1.1, 1.0, 0.0, 0.0))


def test_traces_from_differences():
    phi = IntervalFunction(0.0, 1.0, np.linspace(0.0, 1.0, 65) ** 2)
    assert phi.traces.dphi_a == pytest.approx(0.0, abs=1e-12)
    assert phi.traces.dphi_b == pytest.approx(2.0, abs=1e-12)


def test_reversed_interval_rejected():
    with pytest.raises(InvalidParameterError):
        IntervalFunction(1.0, 0.0, np.ones(32))


# --- formulas ---------------------------------------------------------------

def test_h1_examples():
    assert h1_interval_norm_sq(ONE) == pytest.approx(3.0, rel=1e-14)
    assert h1_interval_norm_sq(LINEAR) == pytest.approx(7.0 / 3.0, rel=1e-14)
    assert h1_interval_norm_sq(on_unit(lambda x: 0 * x)) == 0.0


def test_h2_examples():
    assert h2_interval_norm_sq(ONE) == pytest.approx(5.0, rel=1e-14)
    assert h2_interval_norm_sq(on_unit(lambda x: x, dfn=lambda x: np.ones_like(x))) == \
        pytest.approx(31.0 / 3.0, rel=1e-14)
    assert h2_interval_norm_sq(LINEAR) == pytest.approx(31.0 / 3.0, rel=1e-12)
    assert h2_interval_norm_sq(on_unit(lambda x: 0 * x)) == 0.0


def test_h1_against_analytic_sine():
    phi = on_unit(np.sin, n=513, b=2.0)
    # |sin a|^2 + |sin b|^2 + int_0^2 sin^2 + cos^2 = sin(2)^2 + 2
    assert h1_interval_norm_sq(phi) == pytest.approx(math.sin(2.0) ** 2 + 2.0, rel=1e-10)


@pytest.mark.parametrize("name", sorted(SUITE))
def test_lower_bound(name):
    phi = suite_function(name)
    assert h1_interval_norm_sq(phi) >= phi.interior_integral((1.0, 1.0))
    assert h2_interval_norm_sq(phi) >= phi.interior_integral((1.0, 2.0, 1.0))


def test_lower_bound_equality_when_traces_vanish():
    phi = suite_function("bump-inside")
    assert h1_interval_norm_sq(phi) == phi.interior_integral((1.0, 1.0))


# --- H1 extension oracle ------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(SUITE))
def test_extension_matches_formula(name):
    phi = suite_function(name)
    want = h1_interval_norm_sq(phi)
    assert ext_norm_sq(phi) == pytest.approx(want, rel=1e-6)


def test_extension_examples():
    assert ext_norm_sq(ONE) == pytest.approx(3.0, rel=1e-6)
    assert ext_norm_sq(LINEAR) == pytest.approx(7.0 / 3.0, rel=1e-6)
    zero = h1_minimal_extension(on_unit(lambda x: 0 * x))
    assert not np.any(zero.samples)


def test_extension_support_and_values():
    ext = h1_minimal_extension(ONE, 20.0)
    assert ext.support == (-21.0, 22.0)
    x = ext.x
    i = np.argmin(np.abs(x + 3.0))
    assert ext.samples[i] == pytest.approx(math.exp(-3.0), rel=1e-12)
    assert np.all(ext.samples[(x < -21.0) | (x > 22.0)] == 0)


def test_halo_too_small():
    with pytest.raises(TailPrecisionError):
        h1_minimal_extension(ONE, halo=5.0)


def test_piecewise_rejects_off_grid_breakpoints():
    ext = h1_minimal_extension(ONE)
    with pytest.raises(InvalidParameterError):
        piecewise_h1_inner(ext, ext, (0.0, 0.5 + 1e-4))


@pytest.mark.parametrize("name", ["one", "x", "sin", "complex"])
def test_stationarity(name):
    phi = suite_function(name)
    probe = stationarity_probe(phi, trials=100, seed=1)
    assert probe["trials"] == 100
    assert probe["max_directional_derivative"] <= 1e-6
    assert probe["max_decrease"] <= 1e-6


def test_kinked_extension_is_not_stationary():
    # a smooth but non-minimal tail shape must be detectably improvable
    ext = h1_minimal_extension(ONE)
    x = ext.x
    vals = ext.samples.copy()
    left = x < 0
    vals[left] = np.exp(-2 * (0 - x[left])) * (x[left] > -20)
    bad = GridFunction(vals * (x > -20.5), ext.origin, ext.spacing, ext.support)
    assert piecewise_h1_inner(bad, bad, (0.0, 1.0)).real > 3.0 + 1e-3


@settings(max_examples=10, deadline=None)
@given(st.floats(-0.8, 0.8), st.floats(1.2, 2.5))
def test_restriction_contraction(center, radius):
    f = bump(0.5 + center, radius, spacing=1.0 / 512)
    i0 = int(round((0.0 - f.origin) / f.spacing))
    n = int(round(1.0 / f.spacing)) + 1
    phi = IntervalFunction(0.0, 1.0, f.samples[i0:i0 + n])
    assert phi.x[0] == pytest.approx(f.x[i0], abs=1e-12)
    whole = physical_inner_hm(f, f, 1).real
    assert h1_interval_norm_sq(phi) <= whole * (1 + 1e-9)


# --- H2 family ---------------------------------------------------------------------

@pytest.mark.parametrize("fn,dfn,want", [
    (lambda x: np.ones_like(x), lambda x: np.zeros_like(x), 5.0),
    (lambda x: x, lambda x: np.ones_like(x), 31.0 / 3.0),
])
def test_h2_family_minimum(fn, dfn, want):
    phi = on_unit(fn, dfn)
    formula = h2_interval_norm_sq(phi)
    assert formula == pytest.approx(want, rel=1e-12)
    best = h2_extension_family_min(phi, seed=0)["norm_sq"]
    assert best == pytest.approx(formula, rel=1e-4)
    assert best >= formula * (1 - 1e-8)


@pytest.mark.parametrize("name", ["sin", "cos", "exp", "complex"])
def test_h2_family_never_beats_formula(name):
    phi = suite_function(name)
    formula = h2_interval_norm_sq(phi)
    fam = h2_extension_family_min(phi, seed=2)
    assert fam["norm_sq"] >= formula * (1 - 1e-8)
    assert fam["interior"] <= formula
