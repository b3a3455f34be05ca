r"""Translate correlations and restriction norm gaps.

For a test function :math:`\phi` and a shift :math:`d`,

.. math::
    \chi(d) = (\phi, \phi(\cdot - d))_{H^s} = \int e^{i d \xi} \mu(\xi)\, d\xi,
    \qquad \mu(\xi) = (1 + \xi^2)^s |\hat\phi(\xi)|^2 .

At integer :math:`s \ge 0` the inner product is local, so :math:`\chi` vanishes
once the supports separate; at every other order it does not.  The scans
below measure that dichotomy, and :func:`restriction_norm_gap` shows the
corresponding norm loss at :math:`s = -1` on delta combs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .deltas import DeltaComb, comb_gram_form
from .errors import DegenerateInputError, DomainError, InvalidParameterError, OverlapError
from .extension import IntervalDomain, project_Qminus1
from .spectral import (
    GridFunction,
    SpectralFunction,
    SpectralGrid,
    as_order,
    fourier_transform,
    make_grid,
)

__all__ = [
    "ChiScan",
    "chi_scan",
    "dichotomy_report",
    "default_d_values",
    "restriction_norm_gap",
    "CHI_GRID",
    "ORTHOGONAL_RTOL",
    "NON_ORTHOGONAL_RTOL",
]

# The radius-1 mollifier needs |xi| up to ~256 before mu drops below 1e-8 of
# chi(0) at s = 2.
CHI_GRID = make_grid(256.0, 1 << 14)
ORTHOGONAL_RTOL = 1e-8
NON_ORTHOGONAL_RTOL = 1e-4


@dataclass(frozen=True, eq=False)
class ChiScan:
    s: float
    phi: GridFunction
    d_values: np.ndarray
    chi: np.ndarray
    mu: SpectralFunction
    chi0: float
    tail_estimate: float

    def rows(self):
        for d, c in zip(self.d_values, self.chi):
            yield float(d), complex(c)


def chi_scan(phi: GridFunction, s, d_values: Sequence[float],
             grid: Optional[SpectralGrid] = None, _spectrum: Optional[SpectralFunction] = None
             ) -> ChiScan:
    s = as_order(s)
    grid = grid or CHI_GRID
    d = np.asarray(d_values, dtype=float).ravel()
    if not np.all(np.isfinite(d)):
        raise InvalidParameterError("d values must be finite")
    if not np.any(phi.samples):
        raise DegenerateInputError("chi is identically zero for phi = 0")
    spec = _spectrum if _spectrum is not None else fourier_transform(phi, grid)
    mu = grid.weight(s) * np.abs(spec.values) ** 2
    xi = grid.points
    chi = np.empty(len(d), dtype=complex)
    rows = max(1, (1 << 22) // grid.num_points)
    for i in range(0, len(d), rows):
        chi[i:i + rows] = np.exp(1j * np.outer(d[i:i + rows], xi)) @ mu
    chi *= grid.spacing
    chi0 = float(np.sum(mu) * grid.spacing)
    tail = grid.half_width * float(mu[0] + mu[-1])
    return ChiScan(s, phi, d, chi, SpectralFunction(mu, grid), chi0, tail)


def default_d_values(d_min: float, num: int = 64) -> np.ndarray:
    return np.geomspace(d_min, 20.0 * d_min, num)


def dichotomy_report(phi: GridFunction, orders: Sequence, d_min: float,
                     d_values: Optional[Sequence[float]] = None,
                     grid: Optional[SpectralGrid] = None) -> list:
    """Classify each order by the largest ``|chi(d)| / chi(0)`` over ``d >= d_min``.

    Returns dicts with keys ``s``, ``max_abs_chi``, ``chi0``, ``ratio`` and
    ``classification`` (``"orthogonal"``, ``"non-orthogonal"`` or
    ``"indeterminate"`` between the two thresholds).
    """
    p, q = phi.support
    radius = 0.5 * (q - p)
    if not d_min > 2.0 * radius:
        raise OverlapError(f"d_min = {d_min} must exceed the support width {2 * radius}")
    d = default_d_values(d_min) if d_values is None else np.asarray(d_values, dtype=float)
    if np.any(d < d_min):
        raise OverlapError("all shifts must be at least d_min")
    grid = grid or CHI_GRID
    if not np.any(phi.samples):
        raise DegenerateInputError("chi is identically zero for phi = 0")
    spec = fourier_transform(phi, grid)
    out = []
    for s in orders:
        scan = chi_scan(phi, s, d, grid, _spectrum=spec)
        peak = float(np.max(np.abs(scan.chi)))
        ratio = peak / scan.chi0
        if ratio <= ORTHOGONAL_RTOL:
            label = "orthogonal"
        elif ratio > NON_ORTHOGONAL_RTOL:
            label = "non-orthogonal"
        else:
            label = "indeterminate"
        out.append({"s": scan.s, "max_abs_chi": peak, "chi0": scan.chi0,
                    "ratio": ratio, "classification": label,
                    "tail_estimate": scan.tail_estimate})
    return out


def restriction_norm_gap(U: DeltaComb, dom: IntervalDomain):
    """``(||U|_(a,b)||, ||U||, ||U||^2 - ||U|_(a,b)||^2)`` in ``H^-1``."""
    for at in U.atoms:
        if not dom.a < at.location < dom.b:
            raise DomainError(f"atom at {at.location} is not strictly inside ({dom.a}, {dom.b})")
    U.require_order_zero()
    interior_sq = project_Qminus1(U, dom).norm_sq
    global_sq = comb_gram_form(U)
    return math.sqrt(interior_sq), math.sqrt(global_sq), global_sq - interior_sq
