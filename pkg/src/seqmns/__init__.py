"""Sequential-measurement statistics and macroscopic no-signalling witnesses."""

from ._backend import BACKEND
from .constructions import (
    analytic_sd,
    classical_corr_state,
    computational_povm,
    dual_basis_povm,
    build_scenario,
    trine_povm,
)
from .correlations import (
    Infeasible,
    MnsModel,
    WitnessReport,
    construct_mns_model,
    dual_basis_identity_check,
    evaluate_scenario,
    nsit_residual,
    sequential_joint,
    single_time,
    witness,
)
from .errors import SeqMnsError
from .optimize import OptConfig, OptResult, decode, maximize
from .quantum import DensityMatrix, Povm, Scenario, validate_povm, validate_state

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DensityMatrix",
    "Infeasible",
    "MnsModel",
    "OptConfig",
    "OptResult",
    "Povm",
    "Scenario",
    "SeqMnsError",
    "WitnessReport",
    "analytic_sd",
    "classical_corr_state",
    "computational_povm",
    "construct_mns_model",
    "decode",
    "dual_basis_identity_check",
    "dual_basis_povm",
    "evaluate_scenario",
    "maximize",
    "nsit_residual",
    "build_scenario",
    "sequential_joint",
    "single_time",
    "trine_povm",
    "validate_povm",
    "validate_state",
    "witness",
]
