"""Superdirective excitation synthesis for compact uniform linear arrays.

The package models a z-axis uniform linear array of identical elements,
computes its normalized radiation impedance matrix by sphere quadrature,
solves the generalized Rayleigh quotient for the maximum-directivity
excitation, and compensates mutual coupling through a coupling matrix
estimated from far-field samples via spherical wave expansion.
"""

from .arraymodel import (
    WAVE_NUMBER,
    ArrayGeometry,
    ElementPattern,
    SteeringVector,
    evaluate_array_pattern,
    steering_vector,
)
from .beamform import (
    BeamformingSolution,
    coupled_beamforming,
    coupled_directivity,
    gain,
    gain_optimal_beamforming,
    loss_resistance,
    optimal_beamforming,
)
from .coupling import (
    CouplingMatrix,
    ElementFieldLibrary,
    active_element_pattern,
    build_coefficient_set,
    coupling_fixture,
    default_truncation,
    estimate_coupling,
    estimate_fixture_coupling,
    isolated_fields_synthetic,
    synthesize_coupled_fields,
)
from .errors import (
    AccuracyError,
    ConditioningError,
    DataError,
    DegenerateGeometryError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    InsufficientSamplingError,
    SingularMatrixError,
    SuperdirError,
)
from .fileio import (
    read_config,
    read_coupling,
    read_coefficients,
    read_field_samples,
    sweep_rows_to_csv,
    write_coefficients,
    write_coupling,
    write_field_samples,
    write_sweep_rows,
)
from .radiation import (
    ImpedanceMatrix,
    SphereQuadrature,
    default_quadrature,
    directivity,
    impedance_matrix,
)
from .swe import (
    FieldSampleSet,
    SweIndex,
    WaveCoefficientSet,
    basis_matrix,
    default_fit_grid,
    eval_spherical_wave_function,
    fit_wave_coefficients,
    index_list,
    mode_count,
    reconstruct_field,
    total_power,
    truncation_degree,
)
from .sweep import SweepRow, SweepSpec, parse_coupling_source, run_sweep

__version__ = "0.1.0"

__all__ = [
    "WAVE_NUMBER",
    "ArrayGeometry",
    "ElementPattern",
    "SteeringVector",
    "steering_vector",
    "evaluate_array_pattern",
    "SphereQuadrature",
    "default_quadrature",
    "ImpedanceMatrix",
    "impedance_matrix",
    "directivity",
    "BeamformingSolution",
    "optimal_beamforming",
    "coupled_beamforming",
    "coupled_directivity",
    "gain",
    "gain_optimal_beamforming",
    "loss_resistance",
    "SweIndex",
    "index_list",
    "mode_count",
    "truncation_degree",
    "FieldSampleSet",
    "WaveCoefficientSet",
    "basis_matrix",
    "eval_spherical_wave_function",
    "default_fit_grid",
    "fit_wave_coefficients",
    "reconstruct_field",
    "total_power",
    "CouplingMatrix",
    "ElementFieldLibrary",
    "coupling_fixture",
    "isolated_fields_synthetic",
    "synthesize_coupled_fields",
    "build_coefficient_set",
    "estimate_coupling",
    "estimate_fixture_coupling",
    "default_truncation",
    "active_element_pattern",
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "parse_coupling_source",
    "read_field_samples",
    "write_field_samples",
    "read_coupling",
    "write_coupling",
    "read_coefficients",
    "write_coefficients",
    "read_config",
    "write_sweep_rows",
    "sweep_rows_to_csv",
    "SuperdirError",
    "DimensionError",
    "DomainError",
    "DegenerateInputError",
    "SingularMatrixError",
    "ConditioningError",
    "AccuracyError",
    "InsufficientSamplingError",
    "DegenerateGeometryError",
    "DataError",
]
