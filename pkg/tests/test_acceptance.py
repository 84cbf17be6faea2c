"""Acceptance criteria for the orchestration engine.

Each criterion is a single test, so `pytest -v tests/test_acceptance.py`
prints exactly one pass/fail line per criterion. Criteria that depend on the
desk-scale benchmark database load the cached copy at data/desk_scaling_db.json
and rebuild it (slow: ~30 minutes on one core) only if the cache is missing
or stale.
"""

import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

import test_backend
import test_scalability
import test_tree

from qonduct.backend.simulator import (
    estimate_expectation,
    exact_expectation,
    sample,
    simulate_statevector,
)
from qonduct.builders import build
from qonduct.problems.classes import (
    evaluate_solution,
    formulate_problem,
    parse_instance,
    qubo_offset,
    random_maxcut_instance,
)
from qonduct.problems.qubo import (
    brute_force_optimum,
    objective_vector,
    qubo_objective,
    random_qubo,
)
from qonduct.queries import ScriptedAnswers
from qonduct.scalability.assess import (
    Assessment,
    assess,
    disadvantage_check,
    load_recommended_config,
    recommend,
    write_outputs,
)
from qonduct.scalability.database import ScalingDatabase, build_database, desk_plan
from qonduct.scalability.fits import (
    HypothesisFit,
    KappaFit,
    epsilon_star_at,
    estimate_shots,
)
from qonduct.tree.config import PathSpec, tree_config_from_dict
from qonduct.tree.engine import build_tree
from qonduct.vqa.ansatz import AnsatzSpec, make_ansatz
from qonduct.vqa.runtime import parameter_shift_gradient, run_vqa

REPO = Path(__file__).resolve().parent.parent
DESK_DB_PATH = REPO / "data" / "desk_scaling_db.json"
DESK_SEED = 7


@pytest.fixture(scope="module")
def desk_db():
    plan = desk_plan()
    if DESK_DB_PATH.exists():
        db = ScalingDatabase.load(DESK_DB_PATH)
        fresh = len(db.records) == len(plan.cells()) and all(
            r["provenance"]["plan_hash"] == plan.hash()
            and r["provenance"]["seed"] == DESK_SEED
            for r in db.records
        )
        if fresh:
            return db
    db = build_database(plan, seed=DESK_SEED)
    DESK_DB_PATH.parent.mkdir(exist_ok=True)
    db.save(DESK_DB_PATH)
    return db


# 1 -------------------------------------------------------------------------


def test_c01_forward_backward_loop_conforms_on_200_random_dags():
    """Execution order, branching, and backward interpretation on random DAGs."""
    test_tree.test_algorithm1_conformance_on_random_dags()


# 2 -------------------------------------------------------------------------


def test_c02_validation_soundness_on_200_random_configs():
    """Validation accepts a config iff no run can hit a missing-key fault."""
    test_tree.test_validation_soundness_on_random_configs()


# 3 -------------------------------------------------------------------------


def test_c03_formulation_independence_exhaustive_small_instances():
    """Every formulation mode preserves the application objective, checked on
    all bitstrings of small MaxCut and Knapsack instances."""
    inst = random_maxcut_instance(6, 0.6, seed=11)
    for mode in ("standard", "complement"):
        q = formulate_problem(inst, mode)
        offset = qubo_offset(inst, mode)
        for bits in itertools.product([0, 1], repeat=6):
            rep = evaluate_solution(inst, bits)
            assert rep.objective_value == pytest.approx(
                offset - qubo_objective(q, bits), abs=1e-9
            )

    knap = parse_instance({
        "problem_class": "knapsack",
        "values": [3, 1, 4, 2, 5],
        "weights": [2, 1, 3, 2, 4],
        "capacity": 6,
    })
    for mode in ("pairwise", "pairwise_strong"):
        q = formulate_problem(knap, mode)
        for bits in itertools.product([0, 1], repeat=5):
            rep = evaluate_solution(knap, bits)
            if rep.feasible:
                assert rep.objective_value == pytest.approx(
                    -qubo_objective(q, bits), abs=1e-9
                )

    # where pair conflicts cover every overweight subset, the QUBO optimum
    # decodes to the best feasible packing in both modes
    tight = parse_instance({
        "problem_class": "knapsack",
        "values": [3, 1, 4],
        "weights": [2, 3, 4],
        "capacity": 5,
    })
    for mode in ("pairwise", "pairwise_strong"):
        q = formulate_problem(tight, mode)
        argmin, _ = brute_force_optimum(q)
        rep = evaluate_solution(tight, argmin)
        assert rep.feasible
        assert rep.objective_value == pytest.approx(4.0, abs=1e-9)


# 4 -------------------------------------------------------------------------


def test_c04_simulator_matches_dense_matrix_oracle_on_50_circuits():
    """Statevector simulation agrees with an independent dense-matrix product
    oracle to 1e-10 on 50 random circuits."""
    rng = np.random.default_rng(2024)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        c = test_backend.random_circuit(n, int(rng.integers(1, 25)), rng)
        got = simulate_statevector(c)
        want = test_backend.dense_oracle(c)
        assert np.max(np.abs(got - want)) < 1e-10


# 5 -------------------------------------------------------------------------


def test_c05_sampling_error_scales_one_over_sqrt_shots():
    """Quadrupling the shot count halves the estimator std (ratio 2.0 ± 0.2,
    200 repetitions, 6-qubit QAOA state)."""
    inst = random_maxcut_instance(6, 0.6, seed=42)
    q = formulate_problem(inst, "standard")
    ansatz = make_ansatz(AnsatzSpec("qaoa", depth=2), q)
    params = np.random.default_rng(7).uniform(-0.8, 0.8, ansatz.parameter_count)
    circuit = ansatz.circuit(params)

    def estimator_std(n_shots):
        estimates = [
            estimate_expectation(sample(circuit, n_shots, seed=s), q)
            for s in range(200)
        ]
        return float(np.std(estimates))

    ratio = estimator_std(256) / estimator_std(1024)
    assert 1.8 <= ratio <= 2.2, f"std ratio {ratio:.3f} outside 2.0 +/- 0.2"


# 6 -------------------------------------------------------------------------


def test_c06_threshold_and_scaling_fits_recover_known_curves():
    """Logistic threshold fits and all three decay-hypothesis fits round-trip
    synthetic data; noisy fits recover parameters within two sigma."""
    test_scalability.test_threshold_round_trip()
    for hypothesis, A, B in [
        ("exponential", 0.5, 0.1),
        ("power_law", 0.8, 1.3),
        ("logarithmic", 1.0, 0.2),
    ]:
        test_scalability.test_scaling_noiseless_round_trip(hypothesis, A, B)
    test_scalability.test_scaling_noisy_recovery_within_two_sigma()


# 7 -------------------------------------------------------------------------


def test_c07_shot_inversion_point(desk_db):
    """Analytic inversion point is hit exactly, and every fitted combination
    in the desk database satisfies the defining inequality for n = 3..100."""
    fit = HypothesisFit("exponential", (0.5, 0.1), ((0.0, 0.0),) * 2, 1.0, (3, 10))
    point, low, high = estimate_shots(fit, KappaFit(1.0, 0.0), 10)
    assert point == 30.0 and low == point == high

    checked = 0
    for record in desk_db.records:
        if record["kappa"] is None:
            continue
        kappa = KappaFit.from_dict(record["kappa"])
        for raw in record["hypotheses"].values():
            hyp = HypothesisFit.from_dict(raw)
            if not hyp.valid:
                continue
            for n in range(3, 101):
                point, low, high = estimate_shots(hyp, kappa, n)
                assert low <= point <= high
                eps_star = epsilon_star_at(hyp, n)
                if math.isinf(point):
                    if eps_star > 0.0:
                        # finite in exact arithmetic but beyond float range:
                        # verify in log space that the requirement really is
                        # above the largest representable double
                        log_kap = math.log(kappa.a) + kappa.b * n
                        log_point = 2.0 * (log_kap - math.log(eps_star))
                        assert log_point >= math.log(sys.float_info.max)
                    continue
                kap = kappa.a * math.exp(kappa.b * n)
                # n_shots is the least shot count with noise at or below ε*
                assert kap / math.sqrt(point) <= eps_star + 1e-12
                assert point == 1 or kap / math.sqrt(point - 1) >= eps_star * (1 - 1e-9)
                checked += 1
    assert checked > 0, "desk database contains no valid fitted combination"


# 8 -------------------------------------------------------------------------


def test_c08_disadvantage_boundary_exact_arithmetic():
    """The 2^n quantum-disadvantage bound: log-space and exact-integer
    evaluation agree on a grid up to n=64, including the n=60 regime."""
    test_scalability.test_disadvantage_log_space_agrees_with_integers()

    # worked example at n=60: 1.9e6 shots x 1e5 calls stays below 2^60
    n_shots, n_calls = 1.9e6, 1e5
    assert int(n_shots) * int(n_calls) < 2**60
    assert disadvantage_check(60, n_shots, n_calls)
    # and a call count that crosses the boundary flips the verdict
    assert not disadvantage_check(60, n_shots, 2.0**60 / n_shots)


# 9 -------------------------------------------------------------------------


def test_c09_end_to_end_assessment_pipeline(desk_db, tmp_path):
    """Fresh 30-variable MaxCut in, both output artifacts out, and the
    recommended configuration replays without a single prompt; ranking and
    fallback semantics verified on controlled fixtures."""
    instance = random_maxcut_instance(30, 0.5, seed=2026)
    q = formulate_problem(instance, "standard")
    assessment = assess(desk_db, q, "maxcut")
    assert assessment.n == 30
    assert len(assessment.entries) == 6  # 2 ansaetze x 3 optimizers in the plan
    assert all(
        e["status"] in ("feasible", "infeasible", "not_characterizable")
        for e in assessment.entries
    )

    json_path, yaml_path = write_outputs(
        assessment, tmp_path, database_path=str(DESK_DB_PATH)
    )
    assert json_path.name == "scalability_assessment.json" and json_path.exists()
    assert yaml_path.name == "recommended_config.yaml" and yaml_path.exists()
    report = json.loads(json_path.read_text())
    assert report["boundary"]["log2"] == 30
    assert report["recommendation"]["kind"] in ("combination", "classical_fallback")

    config, path_spec = load_recommended_config(yaml_path)
    tree = build_tree(config)
    assert tree.validate().ok
    # automatic run with no answer source: any prompt would raise
    result = tree.run(instance.to_dict(), path=path_spec)
    assert result.status == "completed", result.reason
    # 30 variables exceed the 20-qubit backend, so the plan must go classical
    assert result.visited_path[-1] == "classical_solve"

    # ranking on a controlled table: minimum worst-case wins
    table = [
        {"vqa": {"id": "vqe"}, "optimizer": {"id": "ngd"},
         "status": "feasible", "worst_case": 1.9e6, "n_calls": 1e4},
        {"vqa": {"id": "vqe"}, "optimizer": {"id": "powell"},
         "status": "feasible", "worst_case": 8.2e9, "n_calls": 1e4},
        {"vqa": {"id": "vqe"}, "optimizer": {"id": "nft"},
         "status": "infeasible", "worst_case": 1.3e145, "n_calls": 1e4},
        {"vqa": {"id": "vqe"}, "optimizer": {"id": "cobyla"},
         "status": "not_characterizable", "worst_case": None, "n_calls": 1e4},
    ]
    rec = recommend(table)
    assert rec["kind"] == "combination"
    assert (rec["vqa"]["id"], rec["optimizer"]["id"]) == ("vqe", "ngd")
    assert recommend(table[2:]) == {"kind": "classical_fallback"}

    # a never-succeeding combination renders as not characterizable with no
    # worst case, and survives the JSON round trip
    nc = Assessment(
        n=12, density=0.3, matched_class="maxcut", grid_density=0.3,
        boundary_log2=12,
        entries=(
            {"vqa": {"id": "qaoa_p2"}, "optimizer": {"id": "ps_gd"},
             "hypotheses": {}, "worst_case": None, "worst_case_unbounded": False,
             "n_calls": 100.0, "status": "not_characterizable"},
        ),
        recommendation={"kind": "classical_fallback"},
    )
    rendered = json.loads(json.dumps(nc.to_dict()))
    assert rendered["combinations"][0]["status"] == "not_characterizable"
    assert rendered["combinations"][0]["worst_case"] is None


# 10 ------------------------------------------------------------------------


def test_c10_vqa_sanity_and_gradient_oracle():
    """SPSA at n=4 with a 300-call budget solves at least 7 of 10 seeded
    instances to a 5% gap; parameter-shift gradients match finite
    differences to 1e-4."""
    wins = 0
    for seed in range(1000, 1010):
        q = random_qubo(4, 1.0, seed=seed)
        values = np.asarray(objective_vector(q))
        optimum, spread = float(values.min()), float(values.max() - values.min())
        ansatz = make_ansatz(AnsatzSpec("qaoa", depth=2), q)
        trace = run_vqa(ansatz, build("spsa", None, kind="optimizer"), q,
                        n_shots=None, budget=300, seed=seed)
        state = simulate_statevector(ansatz.circuit(np.asarray(trace.best_params)))
        value = float(values[int(np.argmax(np.abs(state) ** 2))])
        if spread == 0.0 or (value - optimum) / spread <= 0.05:
            wins += 1
    assert wins >= 7, f"only {wins}/10 seeds reached a 5% gap"


    rng = np.random.default_rng(3)
    q = random_qubo(4, 0.9, seed=0)
    ansatz = make_ansatz(AnsatzSpec("qaoa", depth=2), q)
    params = rng.uniform(-1.0, 1.0, ansatz.parameter_count)
    grad = parameter_shift_gradient(ansatz, params, lambda c: exact_expectation(c, q))
    h = 1e-4
    for j in range(ansatz.parameter_count):
        up, dn = params.copy(), params.copy()
        up[j] += h
        dn[j] -= h
        fd = (ansatz.exact_loss(up) - ansatz.exact_loss(dn)) / (2 * h)
        assert grad[j] == pytest.approx(fd, abs=1e-4)


# 11 ------------------------------------------------------------------------


def test_c11_mode_equivalence_on_shipped_tree():
    """Scripted manual answers reproduce the automatic run bit for bit on the
    shipped tree configuration."""
    raw = yaml.safe_load((REPO / "configs" / "basic_tree.yaml").read_text())
    instance = json.loads((REPO / "configs" / "example_maxcut.json").read_text())

    auto_tree = build_tree(tree_config_from_dict(raw))
    auto = auto_tree.run(instance, path=PathSpec({"seed": 11}))

    manual_raw = yaml.safe_load((REPO / "configs" / "basic_tree.yaml").read_text())
    manual_raw["flags"]["automation_mode"] = "manual"
    manual_tree = build_tree(tree_config_from_dict(manual_raw))
    manual = manual_tree.run(
        instance,
        path=PathSpec({"seed": 11}),
        answers=ScriptedAnswers({
            "formulation_mode": "standard",
            "algorithm": "qaoa",
            "depth": 2,
            "optimizer": "spsa",
        }),
    )

    assert auto.status == manual.status == "completed"
    assert auto.visited_path == manual.visited_path
    assert json.dumps(auto.result_entries, sort_keys=True, default=str) == \
        json.dumps(manual.result_entries, sort_keys=True, default=str)
