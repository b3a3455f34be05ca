r"""Finite combinations of Dirac deltas and their :math:`H^{-1}(\mathbb{R})` calculus.

With the transform :math:`\hat\delta_x(\xi) = (2\pi)^{-1/2} e^{i x \xi}` and
:math:`\int (1+\xi^2)^{-1} e^{i a \xi} d\xi = \pi e^{-|a|}`, two deltas have

.. math::
    (\delta_x, \delta_y)_{H^{-1}(\mathbb{R})} = \tfrac12 e^{-|x-y|},

so every quantity in this module is a finite sum of exponentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateAtomError, InvalidParameterError, UnsupportedAtomError
from .spectral import SpectralFunction, SpectralGrid, make_grid

__all__ = [
    "Atom",
    "DeltaComb",
    "GramMatrix",
    "delta",
    "delta_gram_h1",
    "comb_inner_hminus1",
    "comb_gram_form",
    "comb_spectrum",
    "phi_sequence",
    "phi_norm_sq",
    "phi_norm_sq_gram",
    "phi_norm_diff",
    "phi_norm_diff_gram",
    "DELTA_GRID",
    "WEIGHT_FLOOR",
    "EXP_CUTOFF",
]

WEIGHT_FLOOR = 1e-300
EXP_CUTOFF = 700.0
ALPHA_MAX = 1.0 / math.e

# Wide grid for spectra that do not decay: the cutoff error is removed by
# extrapolation, and spacing 1/8 keeps periodic images 50 units apart.
DELTA_GRID = make_grid(65536.0, 1 << 20)


@dataclass(frozen=True)
class Atom:
    location: float
    order: int
    weight: complex


@dataclass(frozen=True)
class DeltaComb:
    """``sum_k weight_k * delta^{(order_k)}_{location_k}`` in canonical form.

    Atoms sharing a (location, order) pair are merged, weights below
    :data:`WEIGHT_FLOOR` in magnitude are dropped, and the remaining atoms
    are sorted by (location, order), so ``==`` compares distributions.
    """

    atoms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for a in self.atoms:
            if not isinstance(a, Atom):
                a = Atom(*a)
            x, m, w = float(a.location), a.order, complex(a.weight)
            if not math.isfinite(x) or not (math.isfinite(w.real) and math.isfinite(w.imag)):
                raise InvalidParameterError(f"non-finite atom {a!r}")
            if isinstance(m, bool) or int(m) != m or m < 0:
                raise InvalidParameterError(f"derivative order must be a nonnegative integer, got {m!r}")
            key = (x, int(m))
            merged[key] = merged.get(key, 0j) + w
        atoms = tuple(Atom(x, m, w) for (x, m), w in sorted(merged.items())
                      if abs(w) >= WEIGHT_FLOOR)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_points(cls, points: Iterable[float], weights: Iterable[complex] = None,
                    order: int = 0) -> "DeltaComb":
        points = list(points)
        weights = [1.0] * len(points) if weights is None else list(weights)
        if len(weights) != len(points):
            raise InvalidParameterError("points and weights differ in length")
        return cls(tuple(Atom(x, order, w) for x, w in zip(points, weights)))

    def __add__(self, other: "DeltaComb") -> "DeltaComb":
        return DeltaComb(self.atoms + other.atoms)

    def __sub__(self, other: "DeltaComb") -> "DeltaComb":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "DeltaComb":
        return DeltaComb(tuple(Atom(a.location, a.order, c * a.weight) for a in self.atoms))

    def __len__(self):
        return len(self.atoms)

    def __bool__(self):
        return bool(self.atoms)

    @property
    def locations(self) -> np.ndarray:
        return np.array([a.location for a in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms], dtype=complex)

    @property
    def max_order(self) -> int:
        return max((a.order for a in self.atoms), default=0)

    def restricted_below(self, t: float) -> "DeltaComb":
        """Atoms located strictly left of ``t`` (the restriction to ``(-inf, t)``)."""
        return DeltaComb(tuple(a for a in self.atoms if a.location < t))

    def require_order_zero(self):
        if any(a.order for a in self.atoms):
            raise UnsupportedAtomError(
                "closed-form H^-1 calculus covers plain deltas only; "
                "use the quadrature Gram system for derivative atoms")

    def to_list(self) -> list:
        return [{"location": a.location, "order": a.order, "weight": a.weight}
                for a in self.atoms]


def delta(x: float, weight: complex = 1.0, order: int = 0) -> DeltaComb:
    return DeltaComb((Atom(x, order, weight),))


def _kernel(dist: np.ndarray) -> np.ndarray:
    dist = np.abs(dist)
    out = np.zeros_like(dist, dtype=float)
    near = dist <= EXP_CUTOFF
    out[near] = 0.5 * np.exp(-dist[near])
    return out


@dataclass(frozen=True, eq=False)
class GramMatrix:
    matrix: np.ndarray
    order: int

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.matrix)


def delta_gram_h1(points: Sequence[float]) -> GramMatrix:
    """``G[j, k] = (delta_{x_j}, delta_{x_k})_{H^-1} = exp(-|x_j - x_k|) / 2``."""
    x = np.asarray(points, dtype=float).ravel()
    if len(np.unique(x)) != len(x):
        raise DuplicateAtomError("Gram points must be pairwise distinct")
    return GramMatrix(_kernel(x[:, None] - x[None, :]), 1)


def comb_inner_hminus1(u: DeltaComb, v: DeltaComb) -> complex:
    """Closed-form ``(u, v)_{H^-1}`` for combs of order-zero atoms."""
    u.require_order_zero()
    v.require_order_zero()
    if not u or not v:
        return 0j
    k = _kernel(u.locations[:, None] - v.locations[None, :])
    return complex(u.weights @ k @ np.conj(v.weights))


def comb_gram_form(u: DeltaComb) -> float:
    """``||u||^2_{H^-1}`` as the quadratic form ``w^H G w`` over the atoms of ``u``."""
    u.require_order_zero()
    if not u:
        return 0.0
    g = delta_gram_h1(u.locations).matrix
    w = u.weights
    return float(np.real(np.conj(w) @ g @ w))


def comb_spectrum(u: DeltaComb, grid: SpectralGrid = DELTA_GRID) -> SpectralFunction:
    r"""Spectrum :math:`(2\pi)^{-1/2} \sum_k c_k (i\xi)^{m_k} e^{i x_k \xi}` on ``grid``.

    The phase sign is opposite to the kernel of :func:`fourier_transform`.
    Products between combs are unaffected because the Bessel weight is even,
    but do not pair these spectra with transforms of sampled functions.
    """
    xi = grid.points
    n = grid.num_points
    mid = n // 2
    vals = np.zeros(n, dtype=complex)
    term = np.empty(n, dtype=complex)
    for a in u.atoms:
        # each term is Hermitian in xi: evaluate xi >= 0 and mirror
        pos = np.exp(1j * a.location * xi[mid:])
        if a.order:
            pos *= (1j * xi[mid:]) ** a.order
        term[mid:] = pos
        term[1:mid] = np.conj(pos[:0:-1])
        term[0] = np.exp(1j * a.location * xi[0]) * (1j * xi[0]) ** a.order
        vals += a.weight * term
    vals /= math.sqrt(2.0 * math.pi)
    return SpectralFunction(vals, grid, decay=u.max_order)


def _check_alpha(alpha: float, n: int):
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < ALPHA_MAX):
        raise InvalidParameterError(f"alpha must lie in (0, 1/e), got {alpha!r}")
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise InvalidParameterError(f"N must be a nonnegative integer, got {n!r}")


def phi_sequence(alpha: float, n: int) -> DeltaComb:
    """``Phi_N = sum_{k=0}^{2N} (-alpha)^k delta_k``."""
    _check_alpha(alpha, n)
    k = np.arange(2 * int(n) + 1)
    return DeltaComb.from_points(k.astype(float), (-alpha) ** k)


def phi_norm_sq(alpha: float, n: int) -> float:
    """Double-sum expression for ``||Phi_N||^2_{H^-1}``."""
    _check_alpha(alpha, n)
    k = np.arange(2 * int(n) + 1)
    diag = 0.5 * np.sum(alpha ** (2.0 * k))
    j, kk = np.triu_indices(len(k), 1)
    off = np.sum((-alpha) ** (j + kk) * np.exp(-(kk - j).astype(float)))
    return float(diag + off)


def phi_norm_sq_gram(alpha: float, n: int) -> float:
    return comb_gram_form(phi_sequence(alpha, n))


def phi_norm_diff(alpha: float, n: int) -> float:
    """Closed form of ``||Phi_N||^2 - ||Phi_{N-1}||^2`` for ``N >= 1``.

    ``alpha^(4N-2) (alpha e)^(1-2N)`` is folded into ``alpha^(2N-1) e^(1-2N)``
    so large ``N`` neither overflows nor underflows prematurely.
    """
    _check_alpha(alpha, n)
    if n < 1:
        raise InvalidParameterError("the norm difference needs N >= 1")
    n = int(n)
    ae = alpha * math.e
    first = alpha ** (4 * n - 2) * (1.0 + alpha * alpha) * (1.0 - ae)
    second = 2.0 * (1.0 - alpha / math.e) * alpha ** (2 * n - 1) * math.exp(1 - 2 * n)
    return -(first + second) / (2.0 * (1.0 + ae))


def phi_norm_diff_gram(alpha: float, n: int) -> float:
    """Gram evaluation of the same difference, free of cancellation.

    With ``D = Phi_N - Phi_{N-1}`` the difference is ``2 Re(Phi_{N-1}, D) + ||D||^2``.
    """
    _check_alpha(alpha, n)
    if n < 1:
        raise InvalidParameterError("the norm difference needs N >= 1")
    prev = phi_sequence(alpha, n - 1)
    step = phi_sequence(alpha, n) - prev
    return 2.0 * comb_inner_hminus1(prev, step).real + comb_gram_form(step)
