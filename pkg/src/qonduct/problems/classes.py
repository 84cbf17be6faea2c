"""Optimization problem classes and their JSON instance format.

Every class supplies three things: a payload schema (``from_dict``), one or
more QUBO formulation modes (``formulate``), and an objective evaluation that
never touches the QUBO. Documented objective/QUBO relations:

* ``maxcut``    -- for all x and every mode: cut(x) = offset(mode) - qubo(x),
  with a single instance-wide offset per mode (0 for the standard mode).
* ``knapsack``  -- for every capacity-feasible x and every mode:
  total value(x) = -qubo(x). Infeasible x additionally pick up penalties.
* ``qubo`` / ``random_qubo`` -- objective(x) = qubo(x) identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .qubo import QuboMatrix, LengthMismatch, qubo_objective, random_qubo, _as_bits


class UnknownProblemClass(ValueError):
    pass


class UnknownMode(ValueError):
    pass


class SchemaViolation(ValueError):
    def __init__(self, field_name: str, reason: str):
        self.field_name = field_name
        self.reason = reason
        super().__init__(f"field '{field_name}': {reason}")


class NotGraphBased(TypeError):
    pass


@dataclass(frozen=True)
class ObjectiveReport:
    bitstring: tuple[int, ...]
    objective_value: float
    qubo_value: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "bitstring": list(self.bitstring),
            "objective_value": self.objective_value,
            "qubo_value": self.qubo_value,
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class ProblemInstance:
    problem_class: str
    payload: dict = field(repr=False)
    formulation_mode: str = "default"

    @property
    def n(self) -> int:
        return _CLASSES[self.problem_class].n_vars(self.payload)

    def to_dict(self) -> dict:
        doc = {"problem_class": self.problem_class, **self.payload}
        if self.formulation_mode != "default":
            doc["formulation_mode"] = self.formulation_mode
        return doc


@dataclass(frozen=True)
class _ProblemClass:
    name: str
    fields: dict[str, str]  # payload key -> human description (required unless marked optional)
    optional: frozenset[str]
    modes: tuple[str, ...]
    n_vars: Callable[[dict], int]
    validate: Callable[[dict], None]
    formulate: Callable[[dict, str], QuboMatrix]
    evaluate: Callable[[dict, np.ndarray], tuple[float, bool]]
    graph_based: bool = False


_CLASSES: dict[str, _ProblemClass] = {}


def registered_classes() -> tuple[str, ...]:
    return tuple(sorted(_CLASSES))


def modes_for(problem_class: str) -> tuple[str, ...]:
    return _get_class(problem_class).modes


def _get_class(name: str) -> _ProblemClass:
    try:
        return _CLASSES[name]
    except KeyError:
        raise UnknownProblemClass(
            f"unknown problem class '{name}'; registered: {', '.join(sorted(_CLASSES))}"
        ) from None


def parse_instance(document: str | dict) -> ProblemInstance:
    """Parse and validate a JSON problem instance.

    Unknown payload fields are rejected so that typos surface immediately.
    """
    if isinstance(document, str):
        data = json.loads(document)
    else:
        data = dict(document)
    if not isinstance(data, dict):
        raise SchemaViolation("<document>", "instance must be a JSON object")
    if "problem_class" not in data:
        raise SchemaViolation("problem_class", "missing required field")
    cls = _get_class(data.pop("problem_class"))
    mode = data.pop("formulation_mode", cls.modes[0])
    if mode not in cls.modes:
        raise UnknownMode(
            f"mode '{mode}' not registered for class '{cls.name}' (have: {', '.join(cls.modes)})"
        )
    for key in data:
        if key not in cls.fields:
            raise SchemaViolation(key, f"unknown field for class '{cls.name}'")
    for key in cls.fields:
        if key not in data and key not in cls.optional:
            raise SchemaViolation(key, "missing required field")
    cls.validate(data)
    return ProblemInstance(problem_class=cls.name, payload=data, formulation_mode=mode)


def formulate_problem(instance: ProblemInstance, mode: str | None = None) -> QuboMatrix:
    cls = _get_class(instance.problem_class)
    mode = mode if mode is not None else instance.formulation_mode
    if mode not in cls.modes:
        raise UnknownMode(
            f"mode '{mode}' not registered for class '{cls.name}' (have: {', '.join(cls.modes)})"
        )
    return cls.formulate(instance.payload, mode)


def evaluate_solution(instance: ProblemInstance, x) -> ObjectiveReport:
    """Application-metric evaluation, independent of any QUBO formulation."""
    cls = _get_class(instance.problem_class)
    bits = _as_bits(x)
    n = cls.n_vars(instance.payload)
    if bits.shape[0] != n:
        raise LengthMismatch(f"bitstring length {bits.shape[0]} != n={n}")
    objective, feasible = cls.evaluate(instance.payload, bits)
    q = qubo_objective(formulate_problem(instance), bits)
    return ObjectiveReport(
        bitstring=tuple(int(b) for b in bits),
        objective_value=objective,
        qubo_value=q,
        feasible=feasible,
    )


def graph_density(instance: ProblemInstance) -> float:
    cls = _get_class(instance.problem_class)
    if not cls.graph_based:
        raise NotGraphBased(f"class '{cls.name}' is not graph-based")
    n = cls.n_vars(instance.payload)
    edges = instance.payload["edges"]
    return len(edges) / (n * (n - 1) / 2)


def qubo_offset(instance: ProblemInstance, mode: str | None = None) -> float:
    """Instance-wide constant in the class's documented objective/QUBO relation."""
    cls = _get_class(instance.problem_class)
    mode = mode if mode is not None else instance.formulation_mode
    if cls.name == "maxcut":
        if mode == "standard":
            return 0.0
        # complement mode: offset is -(sum of all formulated standard-Q entries)
        q = cls.formulate(instance.payload, "standard")
        return -float(np.sum(q.entries))
    return 0.0


# --- maxcut ---------------------------------------------------------------


def _maxcut_validate(payload: dict) -> None:
    n = payload["nodes"]
    if not isinstance(n, int) or n < 1:
        raise SchemaViolation("nodes", "must be a positive integer")
    seen = set()
    for k, e in enumerate(payload["edges"]):
        if not isinstance(e, (list, tuple)) or len(e) not in (2, 3):
            raise SchemaViolation("edges", f"edge {k} must be [i, j] or [i, j, weight]")
        i, j = int(e[0]), int(e[1])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise SchemaViolation("edges", f"edge {k} endpoints must be distinct nodes in [0, {n})")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise SchemaViolation("edges", f"duplicate edge {key}")
        seen.add(key)


def _maxcut_edges(payload: dict) -> list[tuple[int, int, float]]:
    out = []
    for e in payload["edges"]:
        i, j = int(e[0]), int(e[1])
        w = float(e[2]) if len(e) == 3 else 1.0
        out.append((min(i, j), max(i, j), w))
    return out


def _maxcut_formulate(payload: dict, mode: str) -> QuboMatrix:
    n = payload["nodes"]
    q = np.zeros((n, n))
    # cut(x) = sum w (x_i + x_j - 2 x_i x_j); minimize -cut(x)
    for i, j, w in _maxcut_edges(payload):
        q[i, i] -= w
        q[j, j] -= w
        q[i, j] += 2 * w
    if mode == "standard":
        return QuboMatrix(q)
    # complement mode: substitute x -> 1 - x, drop the constant term
    m = QuboMatrix(q).entries
    qc = np.triu(m, 1).copy()
    off_col = np.sum(np.triu(m, 1), axis=0)
    off_row = np.sum(np.triu(m, 1), axis=1)
    diag = -np.diag(m) - off_col - off_row
    qc += np.diag(diag)
    return QuboMatrix(qc)


def _maxcut_evaluate(payload: dict, bits: np.ndarray) -> tuple[float, bool]:
    cut = sum(w for i, j, w in _maxcut_edges(payload) if bits[i] != bits[j])
    return float(cut), True


_CLASSES["maxcut"] = _ProblemClass(
    name="maxcut",
    fields={"nodes": "node count", "edges": "list of [i, j] or [i, j, weight]"},
    optional=frozenset(),
    modes=("standard", "complement"),
    n_vars=lambda p: p["nodes"],
    validate=_maxcut_validate,
    formulate=_maxcut_formulate,
    evaluate=_maxcut_evaluate,
    graph_based=True,
)


# --- knapsack ---------------------------------------------------------------


def _knapsack_validate(payload: dict) -> None:
    values, weights = payload["values"], payload["weights"]
    if not values or len(values) != len(weights):
        raise SchemaViolation("weights", "values and weights must be nonempty and equally long")
    if any(v < 0 for v in values):
        raise SchemaViolation("values", "item values must be nonnegative")
    if any(w < 0 for w in weights):
        raise SchemaViolation("weights", "item weights must be nonnegative")
    if payload["capacity"] < 0:
        raise SchemaViolation("capacity", "capacity must be nonnegative")
    if "penalty" in payload and payload["penalty"] <= 0:
        raise SchemaViolation("penalty", "penalty must be positive")


def _knapsack_penalty(payload: dict) -> float:
    if "penalty" in payload:
        return float(payload["penalty"])
    return 2.0 * max(payload["values"]) * len(payload["values"])


def _knapsack_formulate(payload: dict, mode: str) -> QuboMatrix:
    values = [float(v) for v in payload["values"]]
    weights = [float(w) for w in payload["weights"]]
    cap = float(payload["capacity"])
    n = len(values)
    penalty = _knapsack_penalty(payload)
    if mode == "pairwise_strong":
        penalty *= 2.0
    q = np.diag([-v for v in values])
    # conflict penalties: any single item or item pair exceeding capacity.
    # Feasible selections never touch a penalized slot, so value(x) = -qubo(x)
    # holds exactly on the feasible set.
    for i in range(n):
        if weights[i] > cap:
            q[i, i] += penalty
        for j in range(i + 1, n):
            if weights[i] + weights[j] > cap:
                q[i, j] += penalty
    return QuboMatrix(q)


def _knapsack_evaluate(payload: dict, bits: np.ndarray) -> tuple[float, bool]:
    value = float(sum(v for v, b in zip(payload["values"], bits) if b))
    weight = sum(w for w, b in zip(payload["weights"], bits) if b)
    return value, bool(weight <= payload["capacity"])


_CLASSES["knapsack"] = _ProblemClass(
    name="knapsack",
    fields={
        "values": "item values",
        "weights": "item weights",
        "capacity": "capacity bound",
        "penalty": "constraint penalty coefficient (optional)",
    },
    optional=frozenset({"penalty"}),
    modes=("pairwise", "pairwise_strong"),
    n_vars=lambda p: len(p["values"]),
    validate=_knapsack_validate,
    formulate=_knapsack_formulate,
    evaluate=_knapsack_evaluate,
)


# --- raw qubo ---------------------------------------------------------------


def _qubo_validate(payload: dict) -> None:
    try:
        QuboMatrix.from_array(payload["matrix"])
    except ValueError as exc:
        raise SchemaViolation("matrix", str(exc)) from exc


def _qubo_evaluate(payload: dict, bits: np.ndarray) -> tuple[float, bool]:
    q = QuboMatrix.from_array(payload["matrix"])
    return qubo_objective(q, bits), True


_CLASSES["qubo"] = _ProblemClass(
    name="qubo",
    fields={"matrix": "square matrix, row-major nested arrays"},
    optional=frozenset(),
    modes=("direct",),
    n_vars=lambda p: len(p["matrix"]),
    validate=_qubo_validate,
    formulate=lambda p, mode: QuboMatrix.from_array(p["matrix"]),
    evaluate=_qubo_evaluate,
)


# --- seeded random qubo -----------------------------------------------------


def _random_qubo_validate(payload: dict) -> None:
    if not isinstance(payload["n"], int) or payload["n"] < 1:
        raise SchemaViolation("n", "must be a positive integer")
    if not (0.0 < payload["density"] <= 1.0):
        raise SchemaViolation("density", "must be in (0, 1]")
    if not isinstance(payload["seed"], int):
        raise SchemaViolation("seed", "must be an integer")


def _random_qubo_matrix(payload: dict) -> QuboMatrix:
    return random_qubo(payload["n"], payload["density"], payload["seed"])


def _random_qubo_evaluate(payload: dict, bits: np.ndarray) -> tuple[float, bool]:
    return qubo_objective(_random_qubo_matrix(payload), bits), True


_CLASSES["random_qubo"] = _ProblemClass(
    name="random_qubo",
    fields={"n": "variable count", "density": "upper-triangular fill fraction", "seed": "rng seed"},
    optional=frozenset(),
    modes=("direct",),
    n_vars=lambda p: p["n"],
    validate=_random_qubo_validate,
    formulate=lambda p, mode: _random_qubo_matrix(p),
    evaluate=_random_qubo_evaluate,
)


def random_maxcut_instance(n: int, density: float, seed: int, weighted: bool = True) -> ProblemInstance:
    """Seeded Erdos-Renyi-style MaxCut instance at a target edge density."""
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    k = max(1, round(density * len(pairs)))
    chosen = rng.choice(len(pairs), size=k, replace=False)
    edges: list[list[Any]] = []
    for idx in sorted(int(c) for c in chosen):
        i, j = pairs[idx]
        w = float(rng.uniform(0.1, 1.0)) if weighted else 1.0
        edges.append([i, j, w])
    return parse_instance({"problem_class": "maxcut", "nodes": n, "edges": edges})
