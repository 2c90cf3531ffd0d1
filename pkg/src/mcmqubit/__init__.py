"""Maximum-confidence discrimination of qubit states."""

from .baselines import (
    HelstromMeasurement,
    TwoStateProblem,
    UsdRegimeWarning,
    helstrom_error,
    helstrom_povm,
    usd_inconclusive,
)
from .ensemble import Ensemble
from .families import FamilySpec, GoldenValues, build, golden, parse_ensemble, random_ensemble, serialize_ensemble
from .inconclusive import PovmCompletion, identity_in_hull, minimize_inconclusive
from .mcm import (
    DegenerateEnsembleError,
    McmResult,
    UndefinedConfidenceError,
    confidence_of,
    mcm,
    mcm_all,
    mcm_opnorm,
    mu,
)
from .oracle import GridSpec, brute_min_inconclusive, grid_max_confidence

__all__ = [
    "DegenerateEnsembleError", "Ensemble", "FamilySpec", "GoldenValues", "GridSpec", "HelstromMeasurement",
    "McmResult", "PovmCompletion", "TwoStateProblem", "UndefinedConfidenceError", "UsdRegimeWarning",
    "brute_min_inconclusive", "build", "confidence_of", "golden", "grid_max_confidence", "helstrom_error",
    "helstrom_povm", "identity_in_hull", "mcm", "mcm_all", "mcm_opnorm", "minimize_inconclusive", "mu",
    "parse_ensemble", "random_ensemble", "serialize_ensemble", "usd_inconclusive",
]
