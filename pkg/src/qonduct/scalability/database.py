"""Building, storing, and merging the scaling database.

A sweep plan enumerates benchmark cells (problem type × density × ansatz ×
optimizer). Each cell measures success-versus-noise curves over a size range,
fits the tolerance threshold ε*(n), the three decay hypotheses, the
finite-sampling coefficient κ(n), and the call-count power law. Cells get
seeds derived from (plan seed, cell index), so parallel and serial builds
produce identical records. Databases merge by appending records.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import date as _date
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from .. import builders
from .fits import (
    DegenerateFit,
    HYPOTHESES,
    NeverSucceeds,
    NoCrossing,
    ThresholdPoint,
    epsilon_star_at,
    fit_calls,
    fit_kappa,
    fit_scaling,
    fit_threshold,
)
from .measure import finite_sampling_coefficient, measure_success

SCHEMA = "scaling-db/1"


@dataclass(frozen=True)
class SweepPlan:
    problem_types: tuple[str, ...]
    densities: tuple[float, ...]
    vqas: tuple[dict, ...]  # each {"id", "ansatz", "hyperparams"}
    optimizers: tuple[dict, ...]  # each {"id", "hyperparams"}
    n_range: tuple[int, int]  # inclusive
    epsilons: tuple[float, ...]
    trials: int
    budget: int = 300
    kappa_probes: int = 2
    kappa_shots: int = 256
    kappa_repeats: int = 30

    def to_dict(self) -> dict:
        return asdict(self)

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def cells(self) -> list[tuple[str, float, dict, dict]]:
        return [
            (pt, rho, vqa, opt)
            for pt in self.problem_types
            for rho in self.densities
            for vqa in self.vqas
            for opt in self.optimizers
        ]


def plan_from_dict(raw: dict) -> SweepPlan:
    """Build a sweep plan from a plain mapping (e.g. a parsed YAML file)."""
    known = {f for f in SweepPlan.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown sweep plan keys: {sorted(unknown)}")
    coerced = dict(raw)
    for key in ("problem_types", "vqas", "optimizers", "epsilons"):
        if key in coerced:
            coerced[key] = tuple(coerced[key])
    if "densities" in coerced:
        coerced["densities"] = tuple(float(d) for d in coerced["densities"])
    if "n_range" in coerced:
        lo, hi = coerced["n_range"]
        coerced["n_range"] = (int(lo), int(hi))
    return SweepPlan(**coerced)


def desk_plan(
    trials: int = 20,
    n_range: tuple[int, int] = (3, 8),
    budget: int = 300,
) -> SweepPlan:
    """The shipped desk-scale benchmark plan (minutes, not cluster-days)."""
    epsilons = tuple(float(e) for e in np.geomspace(0.01, 3.0, 8))
    return SweepPlan(
        problem_types=("maxcut", "random_qubo"),
        densities=(0.3, 0.5, 1.0),
        vqas=(
            {"id": "qaoa_p2", "ansatz": "qaoa", "hyperparams": {"p": 2}},
            {"id": "hea_l2", "ansatz": "hardware_efficient", "hyperparams": {"layers": 2}},
        ),
        optimizers=(
            {"id": "spsa", "hyperparams": {"max_iters": 40, "init_probes": 12, "restarts": 2}},
            {"id": "nft", "hyperparams": {"max_sweeps": 6}},
            {"id": "ps_gd", "hyperparams": {"step_length": 0.2, "max_iters": 25}},
        ),
        n_range=n_range,
        epsilons=epsilons,
        trials=trials,
        budget=budget,
    )


def _cell_seed(plan_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([plan_seed, index]).generate_state(1)[0])


def build_cell(plan: SweepPlan, index: int, plan_seed: int) -> dict:
    """Benchmark one (problem type, density, vqa, optimizer) cell."""
    problem_type, density, vqa, optimizer = plan.cells()[index]
    seed = _cell_seed(plan_seed, index)
    ansatz_spec = builders.build(vqa["ansatz"], vqa.get("hyperparams"), kind="ansatz")

    def optimizer_factory():
        return builders.build(optimizer["id"], optimizer.get("hyperparams"), kind="optimizer")

    ns = list(range(plan.n_range[0], plan.n_range[1] + 1))
    eps_grid = list(plan.epsilons)
    points: list[ThresholdPoint] = []
    never_succeeds = 0
    flags: list[dict] = []
    calls_mean: dict[tuple[int, int], float] = {}

    for n in ns:
        curve = []
        for j, eps in enumerate(eps_grid):
            sub_seed = int(np.random.SeedSequence([seed, n, j]).generate_state(1)[0])
            sample = measure_success(
                ansatz_spec, optimizer_factory, problem_type, density,
                n, eps, plan.trials, sub_seed, budget=plan.budget,
            )
            curve.append((eps, sample.rate))
            if sample.calls:
                calls_mean[(n, j)] = float(np.mean(sample.calls))
        try:
            points.append(fit_threshold(curve, n=n, trials=plan.trials))
        except NeverSucceeds:
            never_succeeds += 1
            flags.append({"n": n, "flag": "never_succeeds", "curve": curve})
        except (NoCrossing, DegenerateFit) as exc:
            flags.append({"n": n, "flag": type(exc).__name__, "curve": curve})

    hypotheses: dict[str, dict] = {}
    if len(points) >= 3:
        for name in HYPOTHESES:
            try:
                hypotheses[name] = fit_scaling(points, name).to_dict()
            except DegenerateFit:
                continue

    kappa_seed = int(np.random.SeedSequence([seed, 999]).generate_state(1)[0])
    try:
        kappa, measured = finite_sampling_coefficient(
            ansatz_spec, ns, problem_type, density,
            probes=plan.kappa_probes, seed=kappa_seed,
            n_shots=plan.kappa_shots, repeats=plan.kappa_repeats,
        )
        kappa_dict = kappa.to_dict()
        kappa_dict["measured"] = {str(k): v for k, v in measured.items()}
    except Exception as exc:  # noqa: BLE001 - failures become n.c. fragments
        kappa_dict = None
        flags.append({"flag": "kappa_failure", "detail": repr(exc)})

    # call counts fitted at the grid noise level nearest half the threshold
    call_ns, call_values = [], []
    for point in points:
        target = point.epsilon_star / 2.0
        j = int(np.argmin([abs(math.log(e) - math.log(max(target, 1e-12))) for e in eps_grid]))
        value = calls_mean.get((point.n, j))
        if value:
            call_ns.append(point.n)
            call_values.append(value)
    calls = fit_calls(call_ns, call_values) if call_ns else (float(plan.budget), 0.0)

    return {
        "problem_type": problem_type,
        "density": density,
        "vqa": dict(vqa),
        "optimizer": dict(optimizer),
        "fitted_n_range": [ns[0], ns[-1]],
        "threshold_points": [p.to_dict() for p in points],
        "hypotheses": hypotheses,
        "kappa": kappa_dict,
        "calls": {"C": calls[0], "gamma": calls[1]},
        "never_succeeds_count": never_succeeds,
        "flags": flags,
        "provenance": {
            "plan_hash": plan.hash(),
            "seed": plan_seed,
            "cell_index": index,
            "date": _date.today().isoformat(),
        },
    }


class ScalingDatabase:
    def __init__(self, records: list[dict] | None = None):
        self.records: list[dict] = list(records or [])

    def slice(self, problem_type: str) -> list[dict]:
        return [r for r in self.records if r["problem_type"] == problem_type]

    def densities(self, problem_type: str) -> list[float]:
        return sorted({r["density"] for r in self.slice(problem_type)})

    def cell_records(self, problem_type: str, density: float) -> list[dict]:
        return [r for r in self.slice(problem_type) if r["density"] == density]

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "records": self.records}

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True))

    @staticmethod
    def load(path: str | Path) -> "ScalingDatabase":
        raw = json.loads(Path(path).read_text())
        if raw.get("schema") != SCHEMA:
            raise ValueError(f"unsupported database schema {raw.get('schema')!r}")
        return ScalingDatabase(raw["records"])


def _worker(args) -> dict:
    plan, index, plan_seed = args
    return build_cell(plan, index, plan_seed)


def build_database(
    plan: SweepPlan,
    seed: int,
    processes: int | None = 1,
    progress=None,
) -> ScalingDatabase:
    jobs = [(plan, index, seed) for index in range(len(plan.cells()))]
    if processes is not None and processes <= 1:
        records = []
        for job in jobs:
            records.append(_worker(job))
            if progress:
                progress(len(records), len(jobs))
    else:
        with Pool(processes) as pool:
            records = []
            for record in pool.imap(_worker, jobs):
                records.append(record)
                if progress:
                    progress(len(records), len(jobs))
    return ScalingDatabase(records)


def merge_databases(base: ScalingDatabase, extra: ScalingDatabase) -> ScalingDatabase:
    """Append-merge: records of `base` stay first and unchanged."""
    return ScalingDatabase(list(base.records) + list(extra.records))
