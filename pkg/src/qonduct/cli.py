"""Command-line interface.

Subcommands mirror the HTTP service: validate a tree config, execute a run,
assess an instance against a scaling database, build a database from a sweep
plan, and serve the HTTP API. Diagnostics go to stderr; results go to stdout
as JSON. Exit codes: 0 success, 1 operation failed, 2 bad input (missing
file, malformed config).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import yaml

DB_ENV_VAR = "QONDUCT_DB"


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_yaml(path: str):
    p = Path(path)
    if not p.exists():
        _fail(2, f"file not found: {path}")
    try:
        return yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        _fail(2, f"malformed YAML in {path}: {exc}")


def _read_instance(path: str):
    p = Path(path)
    if not p.exists():
        _fail(2, f"file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        _fail(2, f"malformed JSON in {path}: {exc}")


def _load_config(path: str):
    from .tree.config import tree_config_from_dict

    raw = _read_yaml(path)
    try:
        return tree_config_from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        _fail(2, f"invalid tree config {path}: {exc}")


@click.group()
def main() -> None:
    """Orchestrate hybrid quantum-classical optimization runs."""


@main.command()
@click.argument("tree_file")
def validate(tree_file: str) -> None:
    """Validate a tree config: structure, cycles, and key coverage."""
    from .tree.engine import build_tree

    config = _load_config(tree_file)
    try:
        tree = build_tree(config)
    except Exception as exc:  # noqa: BLE001 - construction errors are user input errors
        _fail(2, f"cannot build tree: {exc}")
    report = tree.validate()
    for warning in report.warnings:
        click.echo(f"warning: {warning}", err=True)
    if report.ok:
        click.echo("valid")
        return
    for v in report.violations:
        location = " -> ".join(v.path) if v.path else v.node
        click.echo(f"violation [{v.kind}] at {v.node}: {v.detail} ({location})", err=True)
    sys.exit(1)


@main.command()
@click.argument("tree_file")
@click.argument("instance_file")
@click.option("--path", "path_file", default=None, help="YAML path spec pinning decisions.")
@click.option("--mode", type=click.Choice(["automatic", "manual"]), default=None,
              help="Override the tree's automation mode.")
@click.option("--log-dir", default=None, help="Directory for JSON-lines run logs.")
def run(tree_file: str, instance_file: str, path_file: str | None,
        mode: str | None, log_dir: str | None) -> None:
    """Execute one run and print the result entries as JSON."""
    from .queries import ConsoleAnswers
    from .service import jsonable
    from .tree.config import PathSpec
    from .tree.engine import build_tree

    config = _load_config(tree_file)
    instance = _read_instance(instance_file)
    path_spec = None
    if path_file is not None:
        raw = _read_yaml(path_file)
        if not isinstance(raw, dict):
            _fail(2, f"path spec {path_file} must be a mapping")
        path_spec = PathSpec(raw)

    try:
        tree = build_tree(config, log_dir=log_dir)
        report = tree.validate()
        if not report.ok:
            _fail(2, f"tree failed validation: {report.violations}")
        answers = ConsoleAnswers() if mode == "manual" else None
        result = tree.run(instance, path=path_spec, answers=answers, mode=mode)
    except Exception as exc:  # noqa: BLE001 - never show a stack trace
        _fail(1, f"run failed: {exc}")
    click.echo(json.dumps(jsonable({
        "status": result.status,
        "reason": result.reason,
        "visited_path": result.visited_path,
        "entries": result.result_entries,
    }), indent=2))
    if result.status != "completed":
        sys.exit(1)


@main.command()
@click.argument("instance_file")
@click.option("--db", "db_file", default=None,
              help=f"Scaling database JSON (default: ${DB_ENV_VAR}).")
@click.option("--declared-class", "declared_class", default=None,
              help="Problem class for database slicing (default: inferred).")
@click.option("--combo", default=None, metavar="VQA,OPTIMIZER",
              help="Restrict the report to one vqa,optimizer pair.")
@click.option("--out", "out_dir", default=".",
              help="Directory for scalability_assessment.json and recommended_config.yaml.")
@click.option("--backend-qubits", default=20, show_default=True,
              help="Capacity cap used when building the recommended config.")
def assess(instance_file: str, db_file: str | None, declared_class: str | None,
           combo: str | None, out_dir: str, backend_qubits: int) -> None:
    """Assess an instance against a scaling database and write the outputs."""
    from .scalability import assess as run_assessment
    from .scalability import write_outputs
    from .scalability.database import ScalingDatabase
    from .service import jsonable

    db_file = db_file or os.environ.get(DB_ENV_VAR)
    if not db_file:
        _fail(2, f"no database given: pass --db or set ${DB_ENV_VAR}")
    if not Path(db_file).exists():
        _fail(2, f"file not found: {db_file}")
    instance = _read_instance(instance_file)

    try:
        db = ScalingDatabase.load(db_file)
        q = _instance_qubo(instance)
        assessment = run_assessment(db, q, declared_class)
    except Exception as exc:  # noqa: BLE001
        _fail(1, f"assessment failed: {exc}")

    report = assessment.to_dict()
    if combo is not None:
        try:
            vqa_id, opt_id = (part.strip() for part in combo.split(","))
        except ValueError:
            _fail(2, f"--combo expects 'vqa,optimizer', got {combo!r}")
        report["combinations"] = [
            c for c in report["combinations"]
            if c["vqa"]["id"] == vqa_id and c["optimizer"]["id"] == opt_id
        ]
        if not report["combinations"]:
            _fail(1, f"combination '{combo}' not present in the matched database slice")

    try:
        json_path, yaml_path = write_outputs(
            assessment, out_dir, database_path=db_file, backend_qubits=backend_qubits
        )
    except Exception as exc:  # noqa: BLE001
        _fail(1, f"writing outputs failed: {exc}")
    click.echo(json.dumps(jsonable(report), indent=2))
    click.echo(f"wrote {json_path} and {yaml_path}", err=True)


def _instance_qubo(document):
    from .problems.classes import formulate_problem, parse_instance
    from .problems.qubo import QuboMatrix

    if isinstance(document, dict) and "qubo" in document:
        import numpy as np

        return QuboMatrix.from_array(np.asarray(document["qubo"], dtype=float))
    return formulate_problem(parse_instance(document), "standard")


@main.command("build-db")
@click.argument("plan_file")
@click.option("--seed", default=7, show_default=True, help="Plan-level seed.")
@click.option("--out", "out_file", default="scaling_db.json", show_default=True)
@click.option("--processes", default=1, show_default=True,
              help="Worker processes (results are identical for any count).")
@click.option("--merge-into", default=None,
              help="Existing database JSON to append the new records to.")
def build_db(plan_file: str, seed: int, out_file: str, processes: int,
             merge_into: str | None) -> None:
    """Build a scaling database from a sweep plan YAML ('desk' for the stock plan)."""
    from .scalability.database import (
        ScalingDatabase,
        build_database,
        desk_plan,
        merge_databases,
        plan_from_dict,
    )

    if plan_file == "desk":
        plan = desk_plan()
    else:
        raw = _read_yaml(plan_file)
        try:
            plan = plan_from_dict(raw)
        except (TypeError, ValueError) as exc:
            _fail(2, f"invalid sweep plan {plan_file}: {exc}")

    total = len(plan.cells())
    click.echo(f"building {total} cells (seed {seed}, {processes} process(es))", err=True)

    def progress(done: int, total_jobs: int) -> None:
        cell = plan.cells()[done - 1]
        click.echo(f"  [{done}/{total_jobs}] {cell[0]} density={cell[1]} "
                   f"{cell[2]['id']}+{cell[3]['id']}", err=True)

    try:
        db = build_database(plan, seed=seed, processes=processes, progress=progress)
        if merge_into is not None:
            if not Path(merge_into).exists():
                _fail(2, f"file not found: {merge_into}")
            db = merge_databases(ScalingDatabase.load(merge_into), db)
        db.save(out_file)
    except Exception as exc:  # noqa: BLE001
        _fail(1, f"database build failed: {exc}")
    click.echo(f"wrote {out_file} ({len(db.records)} records)", err=True)


@main.command()
@click.option("--tree", "tree_file", required=True, help="Tree config YAML to serve.")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--db", "db_file", default=None,
              help=f"Scaling database for /assessments (default: ${DB_ENV_VAR}).")
@click.option("--log-dir", default=None, help="Directory for JSON-lines run logs.")
def serve(tree_file: str, port: int, host: str, db_file: str | None,
          log_dir: str | None) -> None:
    """Serve the HTTP API around one tree config."""
    import uvicorn

    from .service import create_app

    db_file = db_file or os.environ.get(DB_ENV_VAR)
    if db_file and not Path(db_file).exists():
        _fail(2, f"file not found: {db_file}")
    config = _load_config(tree_file)
    try:
        app = create_app(config, database_path=db_file, log_dir=log_dir)
    except Exception as exc:  # noqa: BLE001
        _fail(2, f"cannot start service: {exc}")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
