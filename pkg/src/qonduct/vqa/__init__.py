from .ansatz import (
    AnsatzSpec,
    Ansatz,
    EmptySchedule,
    InvalidDelta,
    ParamCountMismatch,
    build_qaoa_circuit,
    build_hea_circuit,
    lr_qaoa_schedule,
    make_ansatz,
    DECLARED_ANSATZ_KINDS,
)
from .optimizers import Spsa, Nft, ParameterShiftGd, OptimizerFailure
from .runtime import (
    VqaTrace,
    run_vqa,
    inject_noise_loss,
    parameter_shift_gradient,
    NegativeEpsilon,
)

__all__ = [
    "AnsatzSpec",
    "Ansatz",
    "EmptySchedule",
    "InvalidDelta",
    "ParamCountMismatch",
    "build_qaoa_circuit",
    "build_hea_circuit",
    "lr_qaoa_schedule",
    "make_ansatz",
    "DECLARED_ANSATZ_KINDS",
    "Spsa",
    "Nft",
    "ParameterShiftGd",
    "OptimizerFailure",
    "VqaTrace",
    "run_vqa",
    "inject_noise_loss",
    "parameter_shift_gradient",
    "NegativeEpsilon",
]
