"""Maximum-confidence discrimination of quantum state ensembles.

Compute the measurement that identifies each state of an ensemble with the
highest possible confidence, minimize the probability of the inconclusive
outcome among such measurements, and certify optimality with a verifiable
dual witness. Closed forms cover cyclic (symmetric) ensembles; a
self-contained numerical solver covers everything else.
"""

from .ensembles import (
    StateEnsemble,
    SymmetrySpec,
    ValidationReport,
    Violation,
    average_state,
    build_depolarized_family,
    build_symmetric_ensemble,
    default_phases,
    validate,
)
from .errors import (
    DegenerateCoefficientError,
    DegenerateMappingError,
    DegenerateTopEigenvalueError,
    GeometryInconsistencyError,
    InfeasibleInputError,
    InvalidPhasesError,
    MaxconfError,
    NoNegativeEigenvalueError,
    NonHermitianError,
    NotConvergedError,
    NotPSDError,
    NotSymmetricError,
)
from .families import (
    FamilySolution,
    SymmetricFamily,
    flat_mixed_solution,
    pure_symmetric_solution,
    qubit_mixed_solution,
    square_root_measurement,
)
from .geometry import (
    MCGeometry,
    geometry,
    is_unambiguous,
    reduce_to_support,
    transformed_states,
    two_state_components,
)
from .operators import (
    Spectrum,
    eig_hermitian,
    is_psd,
    opnorm,
    psd_power,
    support_projector,
)
from .solver import (
    DetectionSet,
    MeasurementStats,
    OptimalityCertificate,
    PerturbationWitness,
    SolveReport,
    evaluate_measurement,
    perturbation_witness,
    solve_numeric,
    solve_rank1_symmetric,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateCoefficientError",
    "DegenerateMappingError",
    "DegenerateTopEigenvalueError",
    "DetectionSet",
    "FamilySolution",
    "GeometryInconsistencyError",
    "InfeasibleInputError",
    "InvalidPhasesError",
    "MCGeometry",
    "MaxconfError",
    "MeasurementStats",
    "NoNegativeEigenvalueError",
    "NonHermitianError",
    "NotConvergedError",
    "NotPSDError",
    "NotSymmetricError",
    "OptimalityCertificate",
    "PerturbationWitness",
    "SolveReport",
    "Spectrum",
    "StateEnsemble",
    "SymmetricFamily",
    "SymmetrySpec",
    "ValidationReport",
    "Violation",
    "average_state",
    "build_depolarized_family",
    "build_symmetric_ensemble",
    "default_phases",
    "eig_hermitian",
    "evaluate_measurement",
    "flat_mixed_solution",
    "geometry",
    "is_psd",
    "is_unambiguous",
    "opnorm",
    "perturbation_witness",
    "psd_power",
    "pure_symmetric_solution",
    "qubit_mixed_solution",
    "reduce_to_support",
    "solve_numeric",
    "solve_rank1_symmetric",
    "square_root_measurement",
    "support_projector",
    "transformed_states",
    "two_state_components",
    "validate",
    "verify_certificate",
]
