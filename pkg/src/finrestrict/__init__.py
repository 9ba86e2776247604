"""Fourier restriction estimates on finite abelian groups, computed and verified."""

from .balls import LPSystem, build_lp_system, compute_system_constants, verify_axioms, verify_conditions
from .charsums import QuadSumInput, magnitude_law, paraboloid_transform_closed, quad_sum_bruteforce, quad_sum_closed
from .exponents import (
    ExponentProfile,
    SystemConstants,
    cbar_constant,
    envelope_conv,
    envelope_weak,
    exponent_profile,
)
from .functions import GFunction, fourier_forward, fourier_inverse, lorentz_norm, lp_norm
from .groups import GroupSpec, character_pairing, norm_of
from .measures import (
    DualMeasure,
    MeasureProfile,
    decay_constant,
    graph_measure,
    inverse_transform_measure,
    measure_profile,
    paraboloid_measure,
    regularity_constant,
)
from .report import Record, VerificationReport
from .verifier import (
    ScanStrategy,
    check_decomposition_bounds,
    convolution_rwt_scan,
    decompose_measure,
    l2_operator_norm,
    lorentz_convolution_ratio,
    measure_report,
    restricted_weak_type_scan,
    restriction_ratio,
    verify_all,
)

__version__ = "0.1.0"

__all__ = [
    "DualMeasure",
    "ExponentProfile",
    "GFunction",
    "GroupSpec",
    "LPSystem",
    "MeasureProfile",
    "QuadSumInput",
    "Record",
    "ScanStrategy",
    "SystemConstants",
    "VerificationReport",
    "build_lp_system",
    "cbar_constant",
    "character_pairing",
    "check_decomposition_bounds",
    "compute_system_constants",
    "convolution_rwt_scan",
    "decay_constant",
    "decompose_measure",
    "envelope_conv",
    "envelope_weak",
    "exponent_profile",
    "fourier_forward",
    "fourier_inverse",
    "graph_measure",
    "inverse_transform_measure",
    "l2_operator_norm",
    "lorentz_convolution_ratio",
    "lorentz_norm",
    "lp_norm",
    "magnitude_law",
    "measure_profile",
    "measure_report",
    "norm_of",
    "paraboloid_measure",
    "paraboloid_transform_closed",
    "quad_sum_bruteforce",
    "quad_sum_closed",
    "regularity_constant",
    "restricted_weak_type_scan",
    "restriction_ratio",
    "verify_all",
    "verify_axioms",
    "verify_conditions",
]
