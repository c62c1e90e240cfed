"""Exact desk-scale arithmetic for truncated Breuil-Kisin rings.

The package computes, with certified exactness at finite precision:
cofinite-ideal invariants and membership (Howell forms over Z/p^N),
Gauss-valuation envelopes, torsion-exponent bounds, and Teichmuller
expansions with their Newton polygons.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundInputs,
    crystalline_gap_constant,
    frobenius_depth,
    p_power_threshold_estimate,
    p_power_threshold_exact,
    rho_bound_chain,
    rho_bound_combined,
    rho_bound_envelope,
    rho_bound_j1,
    verify_boundedness,
)
from .gauss import (
    PLFunction,
    comparison_envelope,
    eisenstein_power_profile,
    gauss_valuation,
    ideal_profile,
    pl_add,
    stabilized_rho,
)
from .ideals import (
    CofiniteIdeal,
    FrobeniusConditionReport,
    IdealInvariants,
    check_frobenius_conditions,
    format_ideal_file,
    parse_ideal_file,
)
from .newton import (
    NewtonPolygon,
    newt_of_witt,
    np_convolve,
    polygon_of_points,
    scale_polygon,
    verify_mu_valuations,
)
from .ring import (
    PrecSeries,
    RingParams,
    eisenstein_params,
    format_series,
    parse_series,
)
from .witt import (
    CarryTable,
    HahnElement,
    WittVector,
    expected_mu_valuation,
    hahn,
    hahn_one,
    hahn_zero,
    mu_expansion,
    q_table,
    teichmuller,
    witt_add,
    witt_mul,
    witt_neg,
    witt_pow,
    witt_zero,
)

__all__ = [name for name in dir() if not name.startswith("_")]
