from .qubo import (
    QuboMatrix,
    InvalidDensity,
    LengthMismatch,
    TooLarge,
    qubo_objective,
    objective_vector,
    brute_force_optimum,
    random_qubo,
    uniform_loss_std,
)
from .classes import (
    ProblemInstance,
    ObjectiveReport,
    UnknownProblemClass,
    UnknownMode,
    SchemaViolation,
    NotGraphBased,
    parse_instance,
    formulate_problem,
    evaluate_solution,
    graph_density,
    random_maxcut_instance,
)

__all__ = [
    "QuboMatrix",
    "InvalidDensity",
    "LengthMismatch",
    "TooLarge",
    "qubo_objective",
    "objective_vector",
    "brute_force_optimum",
    "random_qubo",
    "uniform_loss_std",
    "ProblemInstance",
    "ObjectiveReport",
    "UnknownProblemClass",
    "UnknownMode",
    "SchemaViolation",
    "NotGraphBased",
    "parse_instance",
    "formulate_problem",
    "evaluate_solution",
    "graph_density",
    "random_maxcut_instance",
]
