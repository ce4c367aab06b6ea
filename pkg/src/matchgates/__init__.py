"""Matchgate circuit analysis, simulation, and encoded-universality compilation."""

__version__ = "0.1.0"

from .analysis import (
    Classification,
    KAKResult,
    NonlocalTriple,
    PPParams,
    classify,
    entangling_power_closed,
    entangling_power_mc,
    kak,
    locally_equivalent,
    makhlin_invariants,
    nonlocal_from_pp,
    pp_params,
    reconstruct_pp,
)
from .circuits import Circuit, CircuitOp, RepeatedSegment
from .compiler import (
    CompiledCircuit,
    Encoding,
    EntanglerPlan,
    StripResult,
    VerificationReport,
    build_entangler_block,
    compile_circuit,
    effective_diagonal,
    logical_single_qubit,
    plan_entangler,
    strip_z_rotations,
    verify,
)
from .fermion import (
    CovarianceState,
    MajoranaRotation,
    evolve,
    init_covariance,
    matchgate_to_rotation,
    measure_z,
    run_covariance,
    sample_covariance,
)
from .gates import (
    DEFAULT_TOL,
    ToleranceConfig,
    build_pp,
    equal_up_to_global_phase,
    extract_blocks,
    gate_library,
    kron,
    nl,
    pp_product,
)
from .statevector import StateVector, apply, circuit_unitary, run, sample

__all__ = [
    "Circuit",
    "CircuitOp",
    "Classification",
    "CompiledCircuit",
    "CovarianceState",
    "DEFAULT_TOL",
    "Encoding",
    "EntanglerPlan",
    "KAKResult",
    "MajoranaRotation",
    "NonlocalTriple",
    "PPParams",
    "RepeatedSegment",
    "StateVector",
    "StripResult",
    "ToleranceConfig",
    "VerificationReport",
    "apply",
    "build_entangler_block",
    "build_pp",
    "circuit_unitary",
    "classify",
    "compile_circuit",
    "effective_diagonal",
    "entangling_power_closed",
    "entangling_power_mc",
    "equal_up_to_global_phase",
    "evolve",
    "extract_blocks",
    "gate_library",
    "init_covariance",
    "kak",
    "kron",
    "locally_equivalent",
    "logical_single_qubit",
    "makhlin_invariants",
    "matchgate_to_rotation",
    "measure_z",
    "nl",
    "nonlocal_from_pp",
    "plan_entangler",
    "pp_params",
    "pp_product",
    "reconstruct_pp",
    "run",
    "run_covariance",
    "sample",
    "sample_covariance",
    "strip_z_rotations",
    "verify",
]
