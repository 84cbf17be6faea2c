"""Assessing an incoming QUBO against the scaling database.

Shot requirements are estimated under every valid decay hypothesis, the worst
case taken, each VQA/optimizer combination classified against the quantum
disadvantage boundary n_shots·n_calls < 2^n, and the cheapest feasible
combination recommended — or the classical fallback if none qualifies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..problems.qubo import QuboMatrix
from .database import ScalingDatabase
from .fits import HypothesisFit, KappaFit, calls_at, estimate_shots

NOT_CHARACTERIZABLE_NEVER_SUCCEEDS = 2  # sizes without convergence → n.c.


class EmptyDatabaseSlice(LookupError):
    pass


class IoFailure(OSError):
    pass


# ---------------------------------------------------------------- matching


@dataclass(frozen=True)
class SliceMatch:
    n: int
    density: float  # measured on the instance
    matched_class: str
    grid_density: float  # nearest database grid point
    records: tuple[dict, ...]


def _measured_density(q: QuboMatrix, problem_class: str) -> float:
    m = q.entries  # canonical upper-triangular storage
    n = q.n
    if problem_class == "maxcut":
        # edge density: nonzero off-diagonal couplings over possible pairs
        pairs = n * (n - 1) // 2
        return float(np.count_nonzero(np.triu(m, k=1))) / pairs if pairs else 0.0
    return q.density()


def analyze_qubo(
    q: QuboMatrix,
    db: ScalingDatabase,
    declared_class: str | None = None,
) -> SliceMatch:
    matched_class = declared_class or "random_qubo"
    density = _measured_density(q, matched_class)
    if density == 0.0:
        raise EmptyDatabaseSlice("zero matrix has no matching database slice")
    grid = db.densities(matched_class)
    if not grid:
        raise EmptyDatabaseSlice(f"database has no '{matched_class}' records")
    # nearest grid density; ties resolved toward the lower density
    # (differences rounded so binary float noise cannot mask an exact tie)
    grid_density = min(grid, key=lambda g: (round(abs(g - density), 12), g))
    records = tuple(db.cell_records(matched_class, grid_density))
    if not records:
        raise EmptyDatabaseSlice(
            f"no records for '{matched_class}' at density {grid_density}"
        )
    return SliceMatch(q.n, density, matched_class, grid_density, records)


# ---------------------------------------------------------------- boundary


def disadvantage_check(n: int, n_shots: float, n_calls: float) -> bool:
    """True iff n_shots·n_calls < 2^n.

    Exact integer arithmetic when both factors are integral; log-space
    comparison otherwise (values far beyond double range stay safe).
    """
    if n_shots <= 0 or n_calls <= 0:
        raise ValueError("n_shots and n_calls must be positive")
    if math.isinf(n_shots) or math.isinf(n_calls):
        return False
    if float(n_shots).is_integer() and float(n_calls).is_integer():
        return int(n_shots) * int(n_calls) < (1 << int(n))
    return math.log2(n_shots) + math.log2(n_calls) < n


# ---------------------------------------------------------------- classify


def classify(
    estimates: dict[str, tuple[float, float, float]],
    never_succeeds_count: int,
    n: int,
    n_calls: float,
) -> tuple[str, float | None]:
    """Status and worst-case shots for one combination.

    `estimates` holds (point, low, high) per *valid* hypothesis only.
    """
    if not estimates or never_succeeds_count >= NOT_CHARACTERIZABLE_NEVER_SUCCEEDS:
        return ("not_characterizable", None)
    worst = max(point for point, _, _ in estimates.values())
    if math.isinf(worst):
        return ("infeasible", worst)
    return ("feasible" if disadvantage_check(n, worst, n_calls) else "infeasible", worst)


# ---------------------------------------------------------------- assessment


@dataclass(frozen=True)
class Assessment:
    n: int
    density: float
    matched_class: str
    grid_density: float
    boundary_log2: int  # boundary is 2**boundary_log2 evaluations
    entries: tuple[dict, ...]
    recommendation: dict

    def to_dict(self) -> dict:
        return {
            "problem": {
                "n": self.n,
                "density": self.density,
                "matched_class": self.matched_class,
                "grid_density": self.grid_density,
            },
            "boundary": {
                "log2": self.boundary_log2,
                "evaluations": float(2.0**self.boundary_log2),
            },
            "combinations": [dict(e) for e in self.entries],
            "recommendation": dict(self.recommendation),
        }


def _json_safe(value: float | None):
    if value is None:
        return None
    return None if math.isinf(value) else float(value)


def _entry_from_record(record: dict, n: int) -> dict:
    hypotheses = record.get("hypotheses") or {}
    kappa_raw = record.get("kappa")
    estimates: dict[str, tuple[float, float, float]] = {}
    per_hypothesis: dict[str, dict] = {}
    if kappa_raw is not None:
        kappa = KappaFit.from_dict(kappa_raw)
        for name, raw in hypotheses.items():
            fit = HypothesisFit.from_dict(raw)
            if not fit.valid:
                per_hypothesis[name] = {"valid": False}
                continue
            point, low, high = estimate_shots(fit, kappa, n)
            estimates[name] = (point, low, high)
            per_hypothesis[name] = {
                "valid": True,
                "point": _json_safe(point),
                "low": _json_safe(low),
                "high": _json_safe(high),
                "unbounded": math.isinf(point),
            }
    calls = record.get("calls") or {"C": 1.0, "gamma": 0.0}
    n_calls = calls_at((calls["C"], calls["gamma"]), n)
    status, worst = classify(
        estimates, record.get("never_succeeds_count", 0), n, n_calls
    )
    return {
        "vqa": dict(record["vqa"]),
        "optimizer": dict(record["optimizer"]),
        "hypotheses": per_hypothesis,
        "worst_case": _json_safe(worst),
        "worst_case_unbounded": worst is not None and math.isinf(worst),
        "n_calls": n_calls,
        "status": status,
    }


def recommend(entries: list[dict]) -> dict:
    feasible = [e for e in entries if e["status"] == "feasible"]
    if not feasible:
        return {"kind": "classical_fallback"}
    best = min(
        feasible,
        key=lambda e: (
            e["worst_case"],
            e["worst_case"] * e["n_calls"],
            (e["vqa"]["id"], e["optimizer"]["id"]),
        ),
    )
    return {"kind": "combination", "vqa": dict(best["vqa"]),
            "optimizer": dict(best["optimizer"]),
            "worst_case": best["worst_case"]}


def assess(
    db: ScalingDatabase,
    q: QuboMatrix,
    declared_class: str | None = None,
) -> Assessment:
    match = analyze_qubo(q, db, declared_class)
    entries = [_entry_from_record(r, match.n) for r in match.records]
    entries.sort(key=lambda e: (e["vqa"]["id"], e["optimizer"]["id"]))
    return Assessment(
        n=match.n,
        density=match.density,
        matched_class=match.matched_class,
        grid_density=match.grid_density,
        boundary_log2=match.n,
        entries=tuple(entries),
        recommendation=recommend(entries),
    )


# ---------------------------------------------------------------- outputs


ASSESSMENT_FILE = "scalability_assessment.json"
CONFIG_FILE = "recommended_config.yaml"

_ANSATZ_TO_ALGORITHM = {"hardware_efficient": "vqe", "qaoa": "qaoa", "lr_qaoa": "lr_qaoa"}
_DEPTH_PARAM = {"hardware_efficient": "layers", "qaoa": "p", "lr_qaoa": "p"}


def _recommended_path(assessment: Assessment, backend_qubits: int) -> dict:
    rec = assessment.recommendation
    if rec.get("kind") != "combination" or assessment.n > backend_qubits:
        return {"algorithm": "classical"}
    ansatz = rec["vqa"].get("ansatz", "qaoa")
    hyper = dict(rec["vqa"].get("hyperparams") or {})
    path: dict = {
        "algorithm": _ANSATZ_TO_ALGORITHM.get(ansatz, "qaoa"),
        "optimizer": rec["optimizer"]["id"],
        "optimizer_hyperparams": dict(rec["optimizer"].get("hyperparams") or {}),
    }
    depth = hyper.get(_DEPTH_PARAM.get(ansatz, "p"))
    if depth is not None:
        path["depth"] = int(depth)
    return path


def recommended_config_dict(
    assessment: Assessment,
    database_path: str | None = None,
    backend_qubits: int = 20,
) -> dict:
    """The tree/path pair serialized into `recommended_config.yaml`."""
    from ..nodes import basic_tree_dict

    return {
        "tree": basic_tree_dict(database=database_path, automation_mode="automatic"),
        "path": _recommended_path(assessment, backend_qubits),
    }


def write_outputs(
    assessment: Assessment,
    target_dir: str | Path,
    database_path: str | None = None,
    backend_qubits: int = 20,
) -> tuple[Path, Path]:
    """Write `scalability_assessment.json` and `recommended_config.yaml`.

    The YAML holds a tree/path pair that validates and runs without prompts,
    pinned to the recommended combination at its database-benchmark values —
    or to the classical path when nothing feasible exists or the instance
    exceeds the backend capacity.
    """
    target = Path(target_dir)
    try:
        target.mkdir(parents=True, exist_ok=True)
        json_path = target / ASSESSMENT_FILE
        json_path.write_text(json.dumps(assessment.to_dict(), indent=1, sort_keys=True))
        payload = recommended_config_dict(assessment, database_path, backend_qubits)
        yaml_path = target / CONFIG_FILE
        yaml_path.write_text(yaml.safe_dump(payload, sort_keys=False))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return (json_path, yaml_path)


def load_recommended_config(path: str | Path):
    """Load the YAML pair back as (TreeConfig, PathSpec)."""
    from ..tree.config import PathSpec, tree_config_from_dict

    raw = yaml.safe_load(Path(path).read_text())
    return (tree_config_from_dict(raw["tree"]), PathSpec(dict(raw["path"] or {})))
