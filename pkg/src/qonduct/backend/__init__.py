from .circuit import Circuit, to_qasm
from .simulator import (
    ShotResult,
    SizeMismatch,
    TooManyQubits,
    simulate_statevector,
    sample,
    exact_expectation,
    estimate_expectation,
)
from .registry import BackendRecord, BackendRegistry, DuplicateId

__all__ = [
    "Circuit",
    "to_qasm",
    "ShotResult",
    "SizeMismatch",
    "TooManyQubits",
    "simulate_statevector",
    "sample",
    "exact_expectation",
    "estimate_expectation",
    "BackendRecord",
    "BackendRegistry",
    "DuplicateId",
]
