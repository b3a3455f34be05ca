"""Sobolev-space norms, delta combs and minimal-norm extensions on the real line."""

__version__ = "0.1.0"

from .deltas import (  # noqa: E402
    DeltaComb,
    comb_gram_form,
    comb_inner_hminus1,
    delta,
    delta_gram_h1,
    phi_norm_diff,
    phi_norm_sq,
    phi_sequence,
)
from .errors import HsExtError  # noqa: E402
from .extension import (  # noqa: E402
    IntervalDomain,
    delta_interval_norm_sq,
    minimal_coeffs_h1,
    oracle_minimize_h1,
    project_Qminus1,
    project_Qminus_m,
)
from .interval import (  # noqa: E402
    IntervalFunction,
    h1_interval_norm_sq,
    h1_minimal_extension,
    h2_extension_family_min,
    h2_interval_norm_sq,
)
from .spectral import (  # noqa: E402
    GridFunction,
    SpectralGrid,
    bump,
    fourier_transform,
    hs_inner,
    hs_norm,
    make_grid,
    physical_inner_hm,
)
from .unitarity import chi_scan, dichotomy_report, restriction_norm_gap  # noqa: E402

__all__ = [
    "__version__",
    "DeltaComb", "comb_gram_form", "comb_inner_hminus1", "delta", "delta_gram_h1",
    "phi_norm_diff", "phi_norm_sq", "phi_sequence",
    "HsExtError",
    "IntervalDomain", "delta_interval_norm_sq", "minimal_coeffs_h1", "oracle_minimize_h1",
    "project_Qminus1", "project_Qminus_m",
    "IntervalFunction", "h1_interval_norm_sq", "h1_minimal_extension",
    "h2_extension_family_min", "h2_interval_norm_sq",
    "GridFunction", "SpectralGrid", "bump", "fourier_transform", "hs_inner", "hs_norm",
    "make_grid", "physical_inner_hm",
    "chi_scan", "dichotomy_report", "restriction_norm_gap",
]
