import json

import numpy as np
import pytest

from qonduct.scalability.database import (
    ScalingDatabase,
    SweepPlan,
    build_cell,
    build_database,
    desk_plan,
    merge_databases,
)


def tiny_plan(**overrides):
    base = dict(
        problem_types=("random_qubo",),
        densities=(1.0,),
        vqas=({"id": "qaoa_p1", "ansatz": "qaoa", "hyperparams": {"p": 1}},),
        optimizers=({"id": "nft", "hyperparams": {"max_sweeps": 2}},),
        n_range=(3, 5),
        epsilons=tuple(float(e) for e in np.geomspace(0.02, 2.0, 4)),
        trials=4,
        budget=60,
        kappa_probes=1,
        kappa_shots=128,
        kappa_repeats=10,
    )
    base.update(overrides)
    return SweepPlan(**base)


def strip_dates(db: ScalingDatabase) -> list[dict]:
    records = json.loads(json.dumps(db.to_dict()))["records"]
    for r in records:
        r["provenance"].pop("date")
    return records


def test_build_database_deterministic():
    plan = tiny_plan()
    a = build_database(plan, seed=5)
    b = build_database(plan, seed=5)
    assert strip_dates(a) == strip_dates(b)


def test_build_database_seed_sensitivity():
    plan = tiny_plan()
    a = build_database(plan, seed=5)
    c = build_database(plan, seed=6)
    assert strip_dates(a) != strip_dates(c)


def test_parallel_build_matches_serial():
    plan = tiny_plan(optimizers=(
        {"id": "nft", "hyperparams": {"max_sweeps": 2}},
        {"id": "spsa", "hyperparams": {"max_iters": 10, "init_probes": 4, "restarts": 1}},
    ))
    serial = build_database(plan, seed=9, processes=1)
    parallel = build_database(plan, seed=9, processes=2)
    assert strip_dates(serial) == strip_dates(parallel)


def test_record_shape_and_provenance():
    plan = tiny_plan()
    record = build_cell(plan, 0, plan_seed=5)
    assert record["problem_type"] == "random_qubo"
    assert record["fitted_n_range"] == [3, 5]
    assert record["provenance"]["plan_hash"] == plan.hash()
    assert record["provenance"]["seed"] == 5
    assert "date" in record["provenance"]
    assert set(record["hypotheses"]) <= {"exponential", "power_law", "logarithmic"}
    for point in record["threshold_points"]:
        assert point["epsilon_star"] > 0
        for _, rate in point["success_curve"]:
            assert 0.0 <= rate <= 1.0
    assert record["calls"]["C"] > 0


def test_save_load_round_trip(tmp_path):
    db = build_database(tiny_plan(), seed=3)
    path = tmp_path / "db.json"
    db.save(path)
    again = ScalingDatabase.load(path)
    assert again.to_dict() == db.to_dict()


def test_load_rejects_unknown_schema(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": "something-else", "records": []}))
    with pytest.raises(ValueError):
        ScalingDatabase.load(path)


def test_merge_keeps_old_records_identical():
    plan = tiny_plan()
    old = build_database(plan, seed=5)
    old_bytes = json.dumps(old.to_dict(), sort_keys=True)
    extra = build_database(
        tiny_plan(optimizers=({"id": "spsa", "hyperparams": {"max_iters": 8}},)),
        seed=5,
    )
    merged = merge_databases(old, extra)
    assert merged.records[: len(old.records)] == old.records
    assert len(merged.records) == len(old.records) + len(extra.records)
    assert json.dumps(old.to_dict(), sort_keys=True) == old_bytes


def test_desk_plan_shape():
    plan = desk_plan()
    assert len(plan.cells()) == 36
    assert plan.n_range == (3, 8)
    assert len(plan.epsilons) == 8
    assert plan.trials == 20
    assert plan.hash() == desk_plan().hash()
    assert plan.hash() != desk_plan(trials=5).hash()
