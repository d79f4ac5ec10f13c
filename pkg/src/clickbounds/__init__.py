"""Certified lower/upper bounds on photon-number statistics from the click
statistics of a multiplexed on/off detector."""

__version__ = "0.1.0"

from .analytic import (
    HbtSingleModeData,
    HbtTwoModeData,
    hbt_single_from_distribution,
    hbt_two_mode_from_joint,
    hbt_two_mode_from_product,
    p1_lower,
    p1_upper,
    p11_lower,
)
from .bounds import (
    BoundResult,
    LinearObservable,
    assemble_constraints,
    bound_observable,
    feasibility_region,
    mean_photon_bounds,
    probability_bounds,
    sweep,
    wigner_origin_bounds,
)
from .detector import (
    ClickStatistics,
    DetectorConfig,
    VacuumProbabilities,
    click_matrix,
    click_statistics,
    clicks_from_vacuum,
    vacuum_probabilities,
)
from .errors import (
    CertificateError,
    ClickboundsError,
    InfeasibleDataError,
    InvalidParameterError,
    SingularSystemError,
)
from .estimator import MeanPhotonEstimator, build_estimator, estimate
from .lpcore import LinearProgram, LPSolution, solve, verify_certificate
from .states import (
    PhotonDistribution,
    apply_loss,
    coherent,
    parse_state_spec,
    squeezed_vacuum,
    subtracted_squeezed,
    thermal,
)

__all__ = [
    "__version__",
    "BoundResult",
    "CertificateError",
    "ClickStatistics",
    "ClickboundsError",
    "DetectorConfig",
    "HbtSingleModeData",
    "HbtTwoModeData",
    "InfeasibleDataError",
    "InvalidParameterError",
    "LPSolution",
    "LinearObservable",
    "LinearProgram",
    "MeanPhotonEstimator",
    "PhotonDistribution",
    "SingularSystemError",
    "VacuumProbabilities",
    "apply_loss",
    "assemble_constraints",
    "bound_observable",
    "build_estimator",
    "click_matrix",
    "click_statistics",
    "clicks_from_vacuum",
    "coherent",
    "estimate",
    "feasibility_region",
    "hbt_single_from_distribution",
    "hbt_two_mode_from_joint",
    "hbt_two_mode_from_product",
    "mean_photon_bounds",
    "p11_lower",
    "p1_lower",
    "p1_upper",
    "parse_state_spec",
    "probability_bounds",
    "solve",
    "squeezed_vacuum",
    "subtracted_squeezed",
    "sweep",
    "thermal",
    "vacuum_probabilities",
    "verify_certificate",
    "wigner_origin_bounds",
]
