"""Polaron dynamics toolkit for vibronic models on superconducting hardware.

Energies are ordinary frequencies in GHz, time runs in nanoseconds, and the
propagator is exp(-2*pi*i*H*t).  See the README for the file formats used by
the CLI.
"""

from .units import CM1_TO_GHZ, KB_GHZ_PER_K, cm1_to_ghz, ghz_to_cm1, kelvin_to_ghz
from .model import (
    BasisDescriptor,
    DimensionCapExceeded,
    GeneralizedHolsteinModel,
    HolsteinModel,
    Mode,
    SparseOperator,
    TruncationSpec,
    assemble_hamiltonian,
    build_basis,
    dimension_cap,
    jordan_wigner_check,
    load_model,
    model_from_dict,
    model_to_dict,
    promote,
    save_model,
)
from .spectral import (
    ModeSet,
    SpectralDensity,
    ThermalSpectralDensity,
    load_csv,
    rescale,
    thermal_factors,
    thermal_transform,
    to_mode_set,
)
from .bath import (
    Chain,
    ChainBath,
    assemble_with_baths,
    chain_dynamics_equivalence,
    load_chain_bath,
    partition,
    star_to_chain,
    star_to_chain_bath,
)
from .dynamics import (
    ThermalEnsemble,
    Trajectory,
    absorption_spectrum,
    bose_occupation,
    dense_oracle,
    expectation,
    propagate,
    rwa_error,
    thermal_initial_state,
)
from .circuit import (
    CircuitDesign,
    CouplerSpec,
    FeasibilityLimits,
    FeasibilityReport,
    OscillatorHardware,
    OscillatorSpec,
    QubitSpec,
    assemble_from_design,
    check_feasibility,
    compile_circuit,
    coupling_ratio,
    design_to_model,
    load_design,
    load_hardware,
    required_beta,
)
from .resources import (
    FrontierPoint,
    ado_count,
    frontier,
    hierarchy_memory_bytes,
)

__version__ = "0.1.0"

__all__ = [
    "CM1_TO_GHZ",
    "KB_GHZ_PER_K",
    "cm1_to_ghz",
    "ghz_to_cm1",
    "kelvin_to_ghz",
    "BasisDescriptor",
    "DimensionCapExceeded",
    "GeneralizedHolsteinModel",
    "HolsteinModel",
    "Mode",
    "SparseOperator",
    "TruncationSpec",
    "assemble_hamiltonian",
    "build_basis",
    "dimension_cap",
    "jordan_wigner_check",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "promote",
    "save_model",
    "ModeSet",
    "SpectralDensity",
    "ThermalSpectralDensity",
    "load_csv",
    "rescale",
    "thermal_factors",
    "thermal_transform",
    "to_mode_set",
    "Chain",
    "ChainBath",
    "assemble_with_baths",
    "chain_dynamics_equivalence",
    "load_chain_bath",
    "partition",
    "star_to_chain",
    "star_to_chain_bath",
    "ThermalEnsemble",
    "Trajectory",
    "absorption_spectrum",
    "bose_occupation",
    "dense_oracle",
    "expectation",
    "propagate",
    "rwa_error",
    "thermal_initial_state",
    "CircuitDesign",
    "CouplerSpec",
    "FeasibilityLimits",
    "FeasibilityReport",
    "OscillatorHardware",
    "OscillatorSpec",
    "QubitSpec",
    "assemble_from_design",
    "check_feasibility",
    "compile_circuit",
    "coupling_ratio",
    "design_to_model",
    "load_design",
    "load_hardware",
    "required_beta",
    "FrontierPoint",
    "ado_count",
    "frontier",
    "hierarchy_memory_bytes",
]
