r"""Norms of :math:`H^1(a,b)` and :math:`H^2(a,b)` through minimal extensions.

The restriction norms on an interval have explicit boundary terms:

.. math::
    \|\phi\|^2_{H^1(a,b)} = |\phi(a)|^2 + |\phi(b)|^2
        + \int_a^b |\phi|^2 + |\phi'|^2,

.. math::
    \|\phi\|^2_{H^2(a,b)} = |\phi(a)|^2 + |\phi'(a)|^2 + |\phi(a) - \phi'(a)|^2
        + |\phi(b)|^2 + |\phi'(b)|^2 + |\phi(b) + \phi'(b)|^2
        + \int_a^b |\phi|^2 + 2|\phi'|^2 + |\phi''|^2.

Besides the formulas this module builds the oracles that check them: the
exponential-tail extension achieving the :math:`H^1` value, a stationarity
probe against exterior perturbations, and a numerical minimisation over a
four-parameter family of :math:`H^2` extensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.optimize

from .errors import InvalidParameterError, ResolutionError, TailPrecisionError
from .spectral import GridFunction, mollifier

__all__ = [
    "TraceData",
    "IntervalFunction",
    "fd4_derivative",
    "h1_interval_norm_sq",
    "h2_interval_norm_sq",
    "h1_minimal_extension",
    "piecewise_h1_inner",
    "stationarity_probe",
    "h2_extension_family_min",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 16
MIN_HALO = 10.0

# 4th-order stencils, coefficients over 12 h (first) and 12 h^2 (second)
_D1_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
_D1_EDGE = (np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
            np.array([-3.0, -10.0, 18.0, -6.0, 1.0]))
_D2_CENTRAL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0])
_D2_EDGE = (np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]),
            np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]))


def fd4_derivative(y: np.ndarray, h: float, order: int = 1) -> np.ndarray:
    """First or second derivative of uniform samples, 4th order up to the ends.

    Interior rows use centred five-point stencils, the first two and last two
    rows one-sided stencils of the same order.
    """
    y = np.asarray(y)
    n = len(y)
    if n < 6:
        raise ResolutionError("need at least 6 samples for 4th-order differences")
    out = np.empty_like(y, dtype=np.result_type(y, float))
    if order == 1:
        central, edge, sign, scale = _D1_CENTRAL, _D1_EDGE, -1.0, 12.0 * h
    elif order == 2:
        central, edge, sign, scale = _D2_CENTRAL, _D2_EDGE, 1.0, 12.0 * h * h
    else:
        raise InvalidParameterError("order must be 1 or 2")
    out[2:-2] = sum(c * y[i:n - 4 + i] for i, c in enumerate(central))
    rev = y[::-1]
    for row, st in enumerate(edge):
        # both edge stencils use the first len(st) samples
        out[row] = np.dot(st, y[:len(st)])
        out[n - 1 - row] = sign * np.dot(st, rev[:len(st)])
    return out / scale


@dataclass(frozen=True)
class TraceData:
    phi_a: complex
    phi_b: complex
    dphi_a: complex = 0j
    dphi_b: complex = 0j

    def __post_init__(self):
        for name in ("phi_a", "phi_b", "dphi_a", "dphi_b"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidParameterError(f"trace {name} is not finite")
            object.__setattr__(self, name, v)


@dataclass(frozen=True, eq=False)
class IntervalFunction:
    """Samples of ``phi`` at ``a + k h``, ``k = 0..n-1``, with ``a + (n-1) h = b``."""

    a: float
    b: float
    samples: np.ndarray
    traces: Optional[TraceData] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if not self.a < self.b:
            raise InvalidParameterError("need a < b")
        if len(samples) < MIN_SAMPLES:
            raise ResolutionError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
        if self.traces is None:
            d1 = self.derivative(1)
            object.__setattr__(self, "traces", TraceData(samples[0], samples[-1], d1[0], d1[-1]))
        else:
            t = self.traces
            if abs(t.phi_a - samples[0]) > 1e-6 or abs(t.phi_b - samples[-1]) > 1e-6:
                raise InvalidParameterError("supplied traces disagree with the endpoint samples")

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (len(self.samples) - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, len(self.samples))

    def derivative(self, order: int = 1) -> np.ndarray:
        return fd4_derivative(self.samples, self.spacing, order)

    @classmethod
    def from_callable(cls, fn: Callable, a: float, b: float, n: int = 1025,
                      dfn: Optional[Callable] = None) -> "IntervalFunction":
        """Sample ``fn`` on ``n`` points; ``dfn`` supplies analytic derivative traces."""
        x = np.linspace(a, b, n)
        y = np.asarray(fn(x), dtype=complex) * np.ones(n)
        traces = None
        if dfn is not None:
            d = np.asarray(dfn(np.array([a, b])), dtype=complex) * np.ones(2)
            traces = TraceData(y[0], y[-1], d[0], d[1])
        return cls(a, b, y, traces)

    def interior_integral(self, weights: Sequence[float]) -> float:
        """``int_a^b sum_k weights[k] |phi^(k)|^2`` by composite Simpson."""
        dens = np.zeros(len(self.samples))
        for k, w in enumerate(weights):
            if w:
                vals = self.samples if k == 0 else self.derivative(k)
                dens += w * np.abs(vals) ** 2
        return float(scipy.integrate.simpson(dens, x=self.x))


def h1_interval_norm_sq(phi: IntervalFunction) -> float:
    t = phi.traces
    return abs(t.phi_a) ** 2 + abs(t.phi_b) ** 2 + phi.interior_integral((1.0, 1.0))


def h2_interval_norm_sq(phi: IntervalFunction) -> float:
    t = phi.traces
    left = abs(t.phi_a) ** 2 + abs(t.dphi_a) ** 2 + abs(t.phi_a - t.dphi_a) ** 2
    right = abs(t.phi_b) ** 2 + abs(t.dphi_b) ** 2 + abs(t.phi_b + t.dphi_b) ** 2
    return left + right + phi.interior_integral((1.0, 2.0, 1.0))


def _taper(t: np.ndarray, start: float) -> np.ndarray:
    """Smooth step from 1 (``t <= start``) to 0 (``t >= start + 1``)."""
    u = np.clip(t - start, 0.0, 1.0)
    keep = mollifier(u)  # vanishes at u = 1
    drop = mollifier(u - 1.0)  # vanishes at u = 0
    out = np.where(u <= 0, 1.0, 0.0)
    mid = (u > 0) & (u < 1)
    out[mid] = keep[mid] / (keep[mid] + drop[mid])
    return out


def h1_minimal_extension(phi: IntervalFunction, halo: float = 20.0) -> GridFunction:
    """Extend ``phi`` by ``phi(a) e^{x-a}`` and ``phi(b) e^{b-x}``, cut off smoothly at ``halo``.

    The result lives on ``phi``'s own spacing, so ``a`` and ``b`` are grid
    nodes and the kinks there can be handled piecewise.
    """
    if not halo >= MIN_HALO:
        raise TailPrecisionError(f"halo must be >= {MIN_HALO} for a negligible cutoff, got {halo}")
    h = phi.spacing
    a, b = phi.a, phi.b
    k = math.ceil((halo + 1.5) / h)
    n_in = len(phi.samples)
    x = a + h * np.arange(-k, n_in + k)
    vals = np.zeros(len(x), dtype=complex)
    vals[k:k + n_in] = phi.samples
    t_left = a - x[:k]
    t_right = x[k + n_in:] - b
    vals[:k] = phi.traces.phi_a * np.exp(-t_left) * _taper(t_left, halo)
    vals[k + n_in:] = phi.traces.phi_b * np.exp(-t_right) * _taper(t_right, halo)
    return GridFunction(vals, x[0], h, (a - halo - 1.0, b + halo + 1.0))


def _pieces(f: GridFunction, breakpoints: Sequence[float]):
    x = f.x
    cuts = [0]
    for bp in sorted(breakpoints):
        i = int(round((bp - f.origin) / f.spacing))
        if abs(x[i] - bp) > 1e-9 * max(1.0, abs(bp)):
            raise InvalidParameterError(f"breakpoint {bp} is not a grid node")
        cuts.append(i)
    cuts.append(len(x) - 1)
    return [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]


def piecewise_h1_inner(f: GridFunction, g: GridFunction, breakpoints: Sequence[float]) -> complex:
    """``int f conj(g) + f' conj(g')`` for functions smooth between the breakpoints.

    Each smooth piece gets its own 4th-order differences and Simpson rule, so
    derivative jumps at the breakpoints cost no accuracy.
    """
    if not f.same_grid(g):
        raise InvalidParameterError("f and g must share a grid")
    total = 0j
    h = f.spacing
    for lo, hi in _pieces(f, breakpoints):
        fs, gs = f.samples[lo:hi + 1], g.samples[lo:hi + 1]
        dens = fs * np.conj(gs) + fd4_derivative(fs, h) * np.conj(fd4_derivative(gs, h))
        total += scipy.integrate.simpson(dens, dx=h)
    return complex(total)


def stationarity_probe(phi: IntervalFunction, halo: float = 20.0, trials: int = 100,
                       eps: float = 1e-3, seed: int = 0) -> dict:
    """Perturb the H^1 extension by random exterior bumps of unit H^1 norm.

    Returns the largest directional derivative ``|2 Re (E, psi)|`` and the
    most negative change ``||E + t psi||^2 - ||E||^2`` over ``t = +-eps``.
    """
    ext = h1_minimal_extension(phi, halo)
    a, b = phi.a, phi.b
    bps = (a, b)
    base = piecewise_h1_inner(ext, ext, bps).real
    rng = np.random.default_rng(seed)
    x = ext.x
    worst_dir = 0.0
    worst_drop = 0.0
    for _ in range(trials):
        radius = rng.uniform(0.2, 3.0)
        side = rng.choice((-1.0, 1.0))
        gap = rng.uniform(0.05, halo - 2 * radius)
        center = (a - gap - radius) if side < 0 else (b + gap + radius)
        amp = rng.normal() + 1j * rng.normal()
        vals = amp * mollifier((x - center) / radius)
        psi = GridFunction(vals, ext.origin, ext.spacing, ext.support)
        psi = psi.scaled(1.0 / math.sqrt(piecewise_h1_inner(psi, psi, bps).real))
        cross = piecewise_h1_inner(ext, psi, bps)
        worst_dir = max(worst_dir, abs(2.0 * cross.real))
        for t in (eps, -eps):
            moved = GridFunction(ext.samples + t * psi.samples, ext.origin, ext.spacing, ext.support)
            worst_drop = min(worst_drop, piecewise_h1_inner(moved, moved, bps).real - base)
    return {"norm_sq": base, "max_directional_derivative": worst_dir,
            "max_decrease": max(0.0, -worst_drop), "trials": trials}


_LAG_T, _LAG_W = np.polynomial.laguerre.laggauss(12)


def _tail_energy(value: complex, slope: complex, rate: float, curve: float) -> float:
    """``int_0^inf |u|^2 + 2|u'|^2 + |u''|^2`` for ``u = (v + (s + r v) t + c t^2) e^{-r t}``.

    ``u(0) = v`` and ``u'(0) = s``; the integrand is a polynomial times
    ``e^{-2 r t}``, integrated exactly by Gauss-Laguerre after rescaling.
    """
    t = _LAG_T / (2.0 * rate)
    p0 = value
    p1 = slope + rate * value
    p2 = curve
    poly = p0 + p1 * t + p2 * t * t
    dpoly = p1 + 2.0 * p2 * t
    d2poly = 2.0 * p2
    u = poly
    du = dpoly - rate * poly
    d2u = d2poly - 2.0 * rate * dpoly + rate * rate * poly
    dens = np.abs(u) ** 2 + 2.0 * np.abs(du) ** 2 + np.abs(d2u) ** 2
    return float(np.dot(_LAG_W, dens) / (2.0 * rate))


def h2_extension_family_min(phi: IntervalFunction, seed: int = 0, restarts: int = 4) -> dict:
    """Minimise the H^2 norm over a four-parameter family of C^1 extensions.

    On each side the extension is ``(phi + slope_term t + c t^2) e^{-r t}``
    with ``t`` the distance from the interval, matching the value and
    derivative trace.  The free parameters are ``(log r, c)`` per side.
    """
    tr = phi.traces
    interior = phi.interior_integral((1.0, 2.0, 1.0))
    # outward derivative: d/dt = -d/dx on the left side
    left = (tr.phi_a, -tr.dphi_a)
    right = (tr.phi_b, tr.dphi_b)

    def total(p):
        ra, ca, rb, cb = math.exp(p[0]), p[1], math.exp(p[2]), p[3]
        return interior + _tail_energy(*left, ra, ca) + _tail_energy(*right, rb, cb)

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        x0 = np.array([rng.uniform(-1.0, 1.0), rng.normal(), rng.uniform(-1.0, 1.0), rng.normal()])
        res = scipy.optimize.minimize(total, x0, method="Nelder-Mead",
                                      options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
        if best is None or res.fun < best.fun:
            best = res
    return {"norm_sq": float(best.fun), "params": [math.exp(best.x[0]), best.x[1],
                                                    math.exp(best.x[2]), best.x[3]],
            "interior": interior}
