r"""Minimal-norm extensions from an interval in :math:`H^{-m}(\mathbb{R})`.

For :math:`U` supported in :math:`[a, b]` the minimal extension of
:math:`U|_{(a,b)}` is :math:`U + w` with :math:`w` in the finite-dimensional
span of :math:`\delta^{(j)}_a, \delta^{(j)}_b`, :math:`j < m`; it is the unique
element of that affine family orthogonal to every distribution supported
outside :math:`(a, b)`.  For :math:`m = 1` the coefficients are closed-form;
for general :math:`m` they solve a Gram system whose entries are frequency
quadratures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg

from .deltas import (
    DELTA_GRID,
    Atom,
    DeltaComb,
    comb_gram_form,
    comb_inner_hminus1,
    comb_spectrum,
    delta,
    delta_gram_h1,
)
from .errors import DomainError, InvalidParameterError, UnsupportedAtomError, UnsupportedInputError
from .spectral import SpectralGrid, hs_inner

__all__ = [
    "IntervalDomain",
    "ExtensionResult",
    "minimal_coeffs_h1",
    "oracle_minimize_h1",
    "project_Qminus1",
    "project_Qminus_m",
    "delta_interval_norm_sq",
    "default_probes",
    "random_boundary_trials",
]


@dataclass(frozen=True)
class IntervalDomain:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise InvalidParameterError(f"need finite a < b, got ({self.a}, {self.b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def reflect(self, x):
        return self.a + self.b - x


@dataclass(frozen=True)
class ExtensionResult:
    boundary_comb: DeltaComb
    extended: DeltaComb
    norm: float
    residuals: list = field(default_factory=list)
    order: int = 1

    @property
    def norm_sq(self) -> float:
        return self.norm * self.norm

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)


def default_probes(dom: IntervalDomain) -> list:
    a, b = dom.a, dom.b
    return [a - 2.0, a - 0.5, a, b, b + 0.5, b + 2.0]


def _check_input(U: DeltaComb, dom: IntervalDomain, max_order: int = 0):
    for at in U.atoms:
        if at.order > max_order:
            raise UnsupportedAtomError(
                f"atom of order {at.order} at {at.location} is not in H^-{max_order + 1}")
        if not dom.a <= at.location <= dom.b:
            raise UnsupportedInputError(
                f"atom at {at.location} lies outside [{dom.a}, {dom.b}]")


def _inv_sinh_factors(length: float):
    """``(e^L / sinh L, 1 / sinh L)`` without forming ``e^L``."""
    denom = -math.expm1(-2.0 * length)
    return 2.0 / denom, 2.0 * math.exp(-length) / denom


def minimal_coeffs_h1(U: DeltaComb, dom: IntervalDomain):
    """Closed-form ``(c_a, c_b)`` minimising ``||U + c_a delta_a + c_b delta_b||_{H^-1}``."""
    _check_input(U, dom)
    ra = comb_inner_hminus1(U, delta(dom.a))
    rb = comb_inner_hminus1(U, delta(dom.b))
    big, small = _inv_sinh_factors(dom.length)
    ca = small * rb - big * ra
    cb = small * ra - big * rb
    return complex(ca), complex(cb)


def oracle_minimize_h1(U: DeltaComb, dom: IntervalDomain):
    """Same minimiser from the 2x2 normal equations, solved by Cholesky."""
    _check_input(U, dom)
    g = delta_gram_h1([dom.a, dom.b]).matrix
    r = np.array([comb_inner_hminus1(U, delta(dom.a)), comb_inner_hminus1(U, delta(dom.b))])
    # (U + sum_j c_j d_j, d_i) = 0  <=>  sum_j G[j, i] c_j = -r_i
    c = scipy.linalg.cho_solve(scipy.linalg.cho_factor(g.T), -r)
    return complex(c[0]), complex(c[1])


def _residuals_h1(ext: DeltaComb, probes: Iterable[float]) -> list:
    return [(float(y), abs(comb_inner_hminus1(ext, delta(y)))) for y in probes]


def project_Qminus1(U: DeltaComb, dom: IntervalDomain,
                    probes: Optional[Sequence[float]] = None) -> ExtensionResult:
    ca, cb = minimal_coeffs_h1(U, dom)
    boundary = DeltaComb((Atom(dom.a, 0, ca), Atom(dom.b, 0, cb)))
    ext = U + boundary
    norm_sq = comb_gram_form(ext)
    probes = default_probes(dom) if probes is None else list(probes)
    return ExtensionResult(boundary, ext, math.sqrt(max(norm_sq, 0.0)),
                           _residuals_h1(ext, probes), 1)


def delta_interval_norm_sq(x: float, dom: IntervalDomain) -> float:
    """``||delta_x||^2_{H^-1(a,b)} = sinh(b-x) sinh(x-a) / sinh(b-a)``."""
    if not dom.a < x < dom.b:
        raise DomainError(f"x = {x} must lie in the open interval ({dom.a}, {dom.b})")
    p, q = dom.b - x, x - dom.a
    # sinh p sinh q / sinh(p+q) = (1 - e^-2p)(1 - e^-2q) / (2 (1 - e^-2(p+q)))
    return 0.5 * math.expm1(-2 * p) * math.expm1(-2 * q) / -math.expm1(-2 * (p + q))


def _boundary_basis(dom: IntervalDomain, m: int) -> list:
    return [delta(x, 1.0, j) for j in range(m) for x in (dom.a, dom.b)]


def project_Qminus_m(U: DeltaComb, dom: IntervalDomain, m: int,
                     probes: Optional[Sequence[float]] = None,
                     grid: SpectralGrid = DELTA_GRID) -> ExtensionResult:
    """Minimise ``||U + w||_{H^-m}`` over ``w`` in the boundary span by quadrature.

    Gram entries are
    ``int (i xi)^j (-i xi)^k (1 + xi^2)^-m e^{i (x - y) xi} d xi / (2 pi)``.
    """
    if isinstance(m, bool) or int(m) != m or not 1 <= m <= 3:
        raise InvalidParameterError(f"m must be 1, 2 or 3, got {m!r}")
    m = int(m)
    _check_input(U, dom, max_order=m - 1)
    s = -m
    basis = _boundary_basis(dom, m)
    specs = [comb_spectrum(b, grid) for b in basis]
    n = len(basis)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            g[i, j] = hs_inner(specs[i], specs[j], s)
            g[j, i] = np.conj(g[i, j])
    u_spec = comb_spectrum(U, grid)
    r = np.array([hs_inner(u_spec, sp, s) for sp in specs])
    c = scipy.linalg.cho_solve(scipy.linalg.cho_factor(g.T), -r)
    boundary = DeltaComb(tuple(Atom(b.atoms[0].location, b.atoms[0].order, ci)
                               for b, ci in zip(basis, c)))
    ext = U + boundary
    ext_spec = comb_spectrum(ext, grid)
    norm_sq = hs_inner(ext_spec, ext_spec, s).real
    probes = default_probes(dom) if probes is None else list(probes)
    residuals = [(float(y), abs(hs_inner(ext_spec, comb_spectrum(delta(y), grid), s)))
                 for y in probes]
    return ExtensionResult(boundary, ext, math.sqrt(max(norm_sq, 0.0)), residuals, m)


def random_boundary_trials(U: DeltaComb, dom: IntervalDomain, trials: int = 100,
                           scale: float = 0.1, seed: int = 0) -> np.ndarray:
    """Squared ``H^-1`` norms of ``U + c_a delta_a + c_b delta_b`` for
    coefficients perturbed randomly around the minimiser."""
    rng = np.random.default_rng(seed)
    ca, cb = minimal_coeffs_h1(U, dom)
    out = np.empty(trials)
    for t in range(trials):
        da, db = rng.normal(scale=scale, size=2) + 1j * rng.normal(scale=scale, size=2)
        comb = U + DeltaComb((Atom(dom.a, 0, ca + da), Atom(dom.b, 0, cb + db)))
        out[t] = comb_gram_form(comb)
    return out
