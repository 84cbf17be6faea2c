"""Concrete node classes (namespace "basic") and the shipped basic tree.

The basic tree mirrors the stock hybrid workflow: load the instance, encode
it as a QUBO, provide a backend, optionally consult the scaling database,
pick an algorithm (paths for VQE, QAOA, LR-QAOA, and a classical solver),
converge on optimizer selection, and execute. The backward pass decodes the
winning bitstring back into problem terms.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from . import builders
from .backend.registry import BackendRecord, DuplicateId
from .problems.classes import (
    ProblemInstance,
    evaluate_solution,
    formulate_problem,
    modes_for,
    parse_instance,
    qubo_offset,
)
from .problems.qubo import BRUTE_FORCE_CAP, brute_force_optimum, greedy_descent
from .queries import Query
from .scalability.assess import assess
from .scalability.database import ScalingDatabase
from .tree.node import Node, NodeFailure, register_node
from .vqa.ansatz import make_ansatz
from .vqa.runtime import run_vqa

ALGORITHMS = ("vqe", "qaoa", "lr_qaoa", "classical")


@register_node("basic", "problem_load")
class ProblemLoadNode(Node):
    requires = frozenset({"problem_instance"})
    creates = frozenset({"instance", "problem_class", "n"})

    def execute(self, data, ctx):
        raw = data["problem_instance"]
        instance = raw if isinstance(raw, ProblemInstance) else parse_instance(raw)
        return {"instance": instance, "problem_class": instance.problem_class,
                "n": instance.n}

    def interpret_result(self, data, ctx):
        return {"problem_class": data["problem_class"], "n": data["n"]}


@register_node("basic", "encode")
class EncodeNode(Node):
    requires = frozenset({"instance"})
    creates = frozenset({"qubo_matrix", "qubo_offset", "formulation_mode"})
    path_keys = frozenset({"formulation_mode"})

    def execute(self, data, ctx):
        instance = data["instance"]
        modes = modes_for(instance.problem_class)
        default = self.init_args.get("mode") or modes[0]
        mode = ctx.resolve(Query(
            id="formulation_mode", kind="single_choice",
            prompt=f"QUBO formulation mode for {instance.problem_class}",
            options=tuple(modes), default=default,
        ))
        q = formulate_problem(instance, mode)
        return {
            "qubo_matrix": q.entries,
            "qubo_offset": qubo_offset(instance, mode),
            "formulation_mode": mode,
        }

    def decode(self, data, bits) -> tuple[int, ...]:
        bits = tuple(int(b) for b in bits)
        if data["formulation_mode"] == "complement":
            return tuple(1 - b for b in bits)
        return bits

    def interpret_result(self, data, ctx):
        raw = ctx.results.get("solution_bitstring")
        if raw is None:
            return {}
        decoded = self.decode(data, raw)
        report = evaluate_solution(data["instance"], decoded)
        return {"decoded_solution": list(decoded), "objective_report": report.to_dict()}


@register_node("basic", "backend_provider")
class BackendProviderNode(Node):
    creates = frozenset({"backend_id", "backend_qubits"})
    path_keys = frozenset({"backend"})

    def execute(self, data, ctx):
        backend_id = ctx.path.get("backend", self.init_args.get("backend_id", "statevector_sim"))
        qubits = int(self.init_args.get("qubit_count", 20))
        try:
            ctx.backends.register(BackendRecord(
                id=backend_id, provider=self.name, qubit_count=qubits,
                properties={"kind": "statevector_simulator"},
            ))
        except DuplicateId:
            pass  # already provided by an earlier run on the same tree
        record = ctx.backends.get(backend_id)
        return {"backend_id": record.id, "backend_qubits": record.qubit_count}


@register_node("basic", "assess_scalability")
class AssessScalabilityNode(Node):
    """Recommendation mode: runs between encoding and algorithm selection and
    feeds the selection query; with no database configured it is a no-op."""

    requires = frozenset({"qubo_matrix", "n", "problem_class", "backend_qubits"})
    creates = frozenset({
        "assessment", "recommended_algorithm", "recommended_optimizer",
        "recommended_vqa_hyperparams", "recommended_optimizer_hyperparams",
    })

    def execute(self, data, ctx):
        database = self.init_args.get("database")
        if not database:
            return {}
        db = ScalingDatabase.load(database)
        from .problems.qubo import QuboMatrix

        q = QuboMatrix.from_array(data["qubo_matrix"])
        result = assess(db, q, declared_class=data.get("problem_class"))
        delta: dict[str, Any] = {"assessment": result.to_dict()}
        rec = result.recommendation
        if rec.get("kind") == "combination":
            vqa = rec["vqa"]
            ansatz_kind = vqa.get("ansatz")
            algorithm = {"hardware_efficient": "vqe", "qaoa": "qaoa",
                         "lr_qaoa": "lr_qaoa"}.get(ansatz_kind, "qaoa")
            if int(data["n"]) > int(data["backend_qubits"]):
                ctx.log(
                    f"recommended quantum path needs {data['n']} qubits but the "
                    f"backend offers {data['backend_qubits']}; routing classically"
                )
                delta["recommended_algorithm"] = "classical"
            else:
                delta["recommended_algorithm"] = algorithm
                delta["recommended_optimizer"] = rec["optimizer"]["id"]
                delta["recommended_vqa_hyperparams"] = dict(vqa.get("hyperparams") or {})
                delta["recommended_optimizer_hyperparams"] = dict(
                    rec["optimizer"].get("hyperparams") or {})
        else:
            delta["recommended_algorithm"] = "classical"
        return delta

    def interpret_result(self, data, ctx):
        if "assessment" in data:
            return {"assessment": data["assessment"]}
        return {}


@register_node("basic", "estimate_scalability")
class EstimateScalabilityNode(Node):
    """Estimation mode: annotates the store after selection, changes no routing."""

    requires = frozenset({"qubo_matrix", "problem_class"})
    creates = frozenset({"assessment_estimates"})

    def execute(self, data, ctx):
        database = self.init_args.get("database")
        if not database:
            return {"assessment_estimates": None}
        db = ScalingDatabase.load(database)
        from .problems.qubo import QuboMatrix

        q = QuboMatrix.from_array(data["qubo_matrix"])
        result = assess(db, q, declared_class=data.get("problem_class"))
        return {"assessment_estimates": result.to_dict()}


@register_node("basic", "algorithm_selection")
class AlgorithmSelectionNode(Node):
    creates = frozenset({"algorithm"})
    path_keys = frozenset({"algorithm"})

    def _mapping(self) -> dict[str, str]:
        raw = self.init_args.get("mapping") or {
            "vqe": "vqe_setup", "qaoa": "qaoa_setup",
            "lr_qaoa": "lr_qaoa_setup", "classical": "classical_solve",
        }
        return {k: v for k, v in raw.items() if v in self.children}

    def execute(self, data, ctx):
        mapping = self._mapping()
        rec = data.get("recommended_algorithm")
        recommendation = (rec, "scaling-database recommendation") if rec in mapping else None
        algorithm = ctx.resolve(Query(
            id="algorithm", kind="single_choice",
            prompt="algorithm to run",
            options=tuple(mapping),
            default=self.init_args.get("default", "qaoa"),
            recommendation=recommendation,
        ))
        return {"algorithm": algorithm}

    def next_node(self, data, ctx):
        return self.select_child(data, ctx, "algorithm", self._mapping())


class _SetupNode(Node):
    requires = frozenset({"qubo_matrix"})
    creates = frozenset({"ansatz_spec", "vqa_name"})
    path_keys = frozenset({"depth"})
    ansatz_id = ""
    vqa_name = ""
    depth_param = ""
    default_depth = 2

    def execute(self, data, ctx):
        recommended = data.get("recommended_vqa_hyperparams") or {}
        rec_depth = recommended.get(self.depth_param)
        depth = ctx.resolve(Query(
            id="depth", kind="integer",
            prompt=f"{self.vqa_name} depth",
            default=int(self.init_args.get("depth", self.default_depth)),
            recommendation=(int(rec_depth), "database benchmark depth") if rec_depth else None,
            minimum=1,
        ))
        spec = builders.build(self.ansatz_id, {self.depth_param: depth}, kind="ansatz")
        return {"ansatz_spec": spec, "vqa_name": self.vqa_name}


@register_node("basic", "vqe_setup")
class VqeSetupNode(_SetupNode):
    ansatz_id = "hardware_efficient"
    vqa_name = "vqe"
    depth_param = "layers"
    default_depth = 2


@register_node("basic", "qaoa_setup")
class QaoaSetupNode(_SetupNode):
    ansatz_id = "qaoa"
    vqa_name = "qaoa"
    depth_param = "p"
    default_depth = 2


@register_node("basic", "lr_qaoa_setup")
class LrQaoaSetupNode(Node):
    requires = frozenset({"qubo_matrix"})
    creates = frozenset({"ansatz_spec", "vqa_name"})
    path_keys = frozenset({"depth", "delta"})

    def execute(self, data, ctx):
        depth = ctx.resolve(Query(
            id="depth", kind="integer", prompt="ramp schedule length",
            default=int(self.init_args.get("depth", 8)), minimum=1,
        ))
        delta = ctx.resolve(Query(
            id="delta", kind="real", prompt="ramp height",
            default=float(self.init_args.get("delta", 0.7)), minimum=1e-9,
        ))
        spec = builders.build("lr_qaoa", {"p": depth, "delta": delta}, kind="ansatz")
        return {"ansatz_spec": spec, "vqa_name": "lr_qaoa"}


@register_node("basic", "optimizer_selection")
class OptimizerSelectionNode(Node):
    requires = frozenset({"ansatz_spec"})
    creates = frozenset({"optimizer", "optimizer_id", "optimizer_hyperparams"})
    path_keys = frozenset({"optimizer", "optimizer_hyperparams"})

    def execute(self, data, ctx):
        options = tuple(d.builder_id for d in builders.list_builders("optimizer"))
        rec = data.get("recommended_optimizer")
        optimizer_id = ctx.resolve(Query(
            id="optimizer", kind="single_choice",
            prompt="classical optimizer",
            options=options,
            default=self.init_args.get("default", "spsa"),
            recommendation=(rec, "scaling-database recommendation") if rec in options else None,
        ))
        hyperparams = ctx.path.get("optimizer_hyperparams")
        if hyperparams is None:
            hyperparams = data.get("recommended_optimizer_hyperparams")
            if data.get("recommended_optimizer") != optimizer_id:
                hyperparams = None
        hyperparams = dict(hyperparams or self.init_args.get("hyperparams") or {})
        optimizer = builders.build(optimizer_id, hyperparams, kind="optimizer")
        return {"optimizer": optimizer, "optimizer_id": optimizer_id,
                "optimizer_hyperparams": hyperparams}

    def interpret_result(self, data, ctx):
        return {"optimizer_id": data["optimizer_id"],
                "optimizer_hyperparams": data["optimizer_hyperparams"]}


@register_node("basic", "execute_vqa")
class ExecuteVqaNode(Node):
    requires = frozenset({"qubo_matrix", "ansatz_spec", "optimizer", "backend_qubits"})
    creates = frozenset({"vqa_trace", "solution_bitstring"})
    path_keys = frozenset({"shots", "budget", "seed"})

    def execute(self, data, ctx):
        from .problems.qubo import QuboMatrix

        q = QuboMatrix.from_array(data["qubo_matrix"])
        if q.n > int(data["backend_qubits"]):
            raise NodeFailure(self.name, f"{q.n} qubits exceed backend capacity "
                                         f"{data['backend_qubits']}")
        shots = ctx.path.get("shots", self.init_args.get("shots"))
        budget = int(ctx.path.get("budget", self.init_args.get("budget", 300)))
        seed = int(ctx.path.get("seed", self.init_args.get("seed", 7)))
        ansatz = make_ansatz(data["ansatz_spec"], q)
        trace = run_vqa(
            ansatz, data["optimizer"], q,
            n_shots=int(shots) if shots else None,
            budget=budget, seed=seed,
        )
        return {"vqa_trace": trace, "solution_bitstring": list(trace.best_bitstring)}

    def interpret_result(self, data, ctx):
        trace = data["vqa_trace"]
        return {"solution_bitstring": data["solution_bitstring"],
                "algorithm_trace": trace.to_dict(),
                "vqa_name": data.get("vqa_name", "")}


@register_node("basic", "classical_solve")
class ClassicalSolveNode(Node):
    requires = frozenset({"qubo_matrix"})
    creates = frozenset({"solution_bitstring", "classical_method", "classical_value"})
    path_keys = frozenset({"seed"})

    def execute(self, data, ctx):
        from .problems.qubo import QuboMatrix

        q = QuboMatrix.from_array(data["qubo_matrix"])
        if q.n <= BRUTE_FORCE_CAP:
            bits, value = brute_force_optimum(q)
            method = "brute_force"
        else:
            bits, value = greedy_descent(q, seed=int(ctx.path.get("seed", 0)))
            method = "greedy_descent"
        return {"solution_bitstring": list(bits), "classical_method": method,
                "classical_value": value}

    def interpret_result(self, data, ctx):
        return {"solution_bitstring": data["solution_bitstring"],
                "classical_method": data["classical_method"]}


# ----------------------------------------------------------- shipped tree


def basic_tree_dict(database: str | None = None,
                    automation_mode: str = "automatic") -> dict:
    """TreeConfig dict for the shipped basic workflow."""
    return {
        "node_sources": ["basic"],
        "nodes": [
            {"name": "load", "type": "problem_load", "children": ["encode"]},
            {"name": "encode", "type": "encode", "children": ["backend"]},
            {"name": "backend", "type": "backend_provider", "children": ["assess"]},
            {"name": "assess", "type": "assess_scalability",
             "children": ["select_algorithm"],
             "init_args": {"database": database}},
            {"name": "select_algorithm", "type": "algorithm_selection",
             "children": ["vqe_setup", "qaoa_setup", "lr_qaoa_setup", "classical_solve"]},
            {"name": "vqe_setup", "type": "vqe_setup", "children": ["select_optimizer"]},
            {"name": "qaoa_setup", "type": "qaoa_setup", "children": ["select_optimizer"]},
            {"name": "lr_qaoa_setup", "type": "lr_qaoa_setup",
             "children": ["select_optimizer"]},
            {"name": "select_optimizer", "type": "optimizer_selection",
             "children": ["execute"]},
            {"name": "execute", "type": "execute_vqa"},
            {"name": "classical_solve", "type": "classical_solve"},
        ],
        "root": "load",
        "flags": {"automation_mode": automation_mode},
    }
