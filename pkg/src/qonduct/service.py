"""HTTP service exposing the decision-tree engine.

The app wraps one built tree (loaded from a tree config at startup). Each run
executes in its own thread; manual-mode runs park on a pending-query channel
that the `/queries` endpoints feed. Handles are kept for a retention window
and then pruned.
"""

from __future__ import annotations

import dataclasses
import math
import threading
import time
import uuid
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from .queries import AlreadyAnswered, AnswerRejected, PendingQueryChannel
from .scalability.assess import EmptyDatabaseSlice, assess, recommended_config_dict
from .scalability.database import ScalingDatabase
from .tree.config import PathSpec, TreeConfig, tree_config_from_dict
from .tree.engine import DecisionTree, UnknownPathKey, build_tree

DEFAULT_RETENTION = 24 * 3600.0


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def jsonable(value: Any) -> Any:
    """Recursively convert run artifacts into JSON-serializable values.

    Non-finite floats become null; numpy scalars/arrays become native
    lists/numbers; anything unrecognized is rendered with str().
    """
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in value]
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return jsonable(dataclasses.asdict(value))
    return str(value)


class RunRequest(BaseModel):
    instance: Any
    path: dict[str, Any] = Field(default_factory=dict)
    mode: str = "automatic"


class AnswerRequest(BaseModel):
    value: Any


class AssessmentRequest(BaseModel):
    instance: Any = None
    qubo: list[list[float]] | None = None
    declared_class: str | None = None


class RunRecord:
    def __init__(self, run_id: str, mode: str, channel: PendingQueryChannel | None):
        self.id = run_id
        self.mode = mode
        self.channel = channel
        self.thread: threading.Thread | None = None
        self.result = None
        self.error: str | None = None
        self.created_at = time.time()

    @property
    def state(self) -> str:
        if self.error is not None:
            return "aborted"
        if self.result is not None:
            return "finished" if self.result.status == "completed" else "aborted"
        if self.thread is None or not self.thread.is_alive():
            return "validating"
        if self.channel is not None and self.channel.pending():
            return "awaiting_query"
        return "running"

    def handle(self) -> dict:
        body = {
            "id": self.id,
            "state": self.state,
            "mode": self.mode,
            "created_at": self.created_at,
            "links": {"self": f"/runs/{self.id}", "queries": f"/runs/{self.id}/queries"},
            "result": None,
            "reason": self.error,
        }
        if self.result is not None:
            body["result"] = jsonable(
                {
                    "status": self.result.status,
                    "reason": self.result.reason,
                    "visited_path": self.result.visited_path,
                    "entries": self.result.result_entries,
                }
            )
            body["reason"] = self.result.reason
        return body


class RunManager:
    """Owns run threads and handles; prunes handles past the retention window."""

    def __init__(self, tree: DecisionTree, retention: float = DEFAULT_RETENTION):
        self.tree = tree
        self.retention = retention
        self._runs: dict[str, RunRecord] = {}
        self._lock = threading.Lock()

    def start(self, instance: Any, path: dict[str, Any], mode: str) -> RunRecord:
        if mode not in ("automatic", "manual"):
            raise _error(422, "invalid_mode", f"mode must be automatic or manual, got {mode!r}")
        declared = self.tree.path_keys()
        for key in path:
            if key not in declared:
                raise _error(422, "invalid_path_key", f"'{key}' is not a path key of any node")
        run_id = uuid.uuid4().hex[:12]
        channel = PendingQueryChannel() if mode == "manual" else None
        record = RunRecord(run_id, mode, channel)

        def target() -> None:
            try:
                record.result = self.tree.run(
                    instance,
                    path=PathSpec(dict(path)),
                    answers=channel,
                    run_id=run_id,
                    mode=mode,
                )
            except Exception as exc:  # noqa: BLE001 - surfaced via the handle
                record.error = repr(exc)

        record.thread = threading.Thread(target=target, daemon=True, name=f"run-{run_id}")
        with self._lock:
            self.prune()
            self._runs[run_id] = record
        record.thread.start()
        return record

    def get(self, run_id: str) -> RunRecord:
        with self._lock:
            self.prune()
            record = self._runs.get(run_id)
        if record is None:
            raise _error(404, "unknown_run", f"no run '{run_id}'")
        return record

    def all(self) -> list[RunRecord]:
        with self._lock:
            self.prune()
            return list(self._runs.values())

    def prune(self) -> None:
        # caller holds the lock or tolerates best-effort pruning
        cutoff = time.time() - self.retention
        stale = [
            rid
            for rid, rec in self._runs.items()
            if rec.created_at < cutoff and (rec.thread is None or not rec.thread.is_alive())
        ]
        for rid in stale:
            del self._runs[rid]


def _load_tree_config(source: TreeConfig | dict | str | Path) -> TreeConfig:
    if isinstance(source, TreeConfig):
        return source
    if isinstance(source, dict):
        return tree_config_from_dict(source)
    return tree_config_from_dict(yaml.safe_load(Path(source).read_text()))


def create_app(
    tree_config: TreeConfig | dict | str | Path,
    database_path: str | Path | None = None,
    log_dir: str | Path | None = None,
    retention: float = DEFAULT_RETENTION,
) -> FastAPI:
    config = _load_tree_config(tree_config)
    tree = build_tree(config, log_dir=log_dir)
    report = tree.validate()
    if not report.ok:
        raise ValueError(f"tree config failed validation: {report.violations}")

    database = ScalingDatabase.load(database_path) if database_path else None

    app = FastAPI(title="qonduct", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    manager = RunManager(tree, retention=retention)
    app.state.manager = manager
    app.state.tree = tree

    @app.get("/tree")
    def get_tree() -> dict:
        return {
            "root": tree.root,
            "flags": tree.flags,
            "nodes": tree.describe()["nodes"],
            "path_keys": sorted(tree.path_keys()),
            "validation": jsonable(report),
        }

    @app.get("/backends")
    def get_backends() -> list[dict]:
        return [record.to_dict() for record in tree.backends.list()]

    @app.post("/runs", status_code=201)
    def post_run(request: RunRequest) -> dict:
        record = manager.start(request.instance, request.path, request.mode)
        return record.handle()

    @app.get("/runs")
    def list_runs() -> list[dict]:
        return [{"id": r.id, "state": r.state, "links": {"self": f"/runs/{r.id}"}}
                for r in manager.all()]

    @app.get("/runs/{run_id}")
    def get_run(run_id: str) -> dict:
        return manager.get(run_id).handle()

    @app.get("/runs/{run_id}/queries")
    def get_queries(run_id: str) -> list[dict]:
        record = manager.get(run_id)
        if record.channel is None:
            return []
        return [q.to_dict() for q in record.channel.pending()]

    @app.post("/queries/{query_id}/answer", status_code=204)
    def post_answer(query_id: str, request: AnswerRequest) -> None:
        channels = [r.channel for r in manager.all() if r.channel is not None]
        # first pass: a channel where the query is live
        for channel in channels:
            if any(q.id == query_id for q in channel.pending()):
                try:
                    channel.submit_answer(query_id, request.value)
                except AlreadyAnswered as exc:
                    raise _error(409, "already_answered", str(exc)) from exc
                except AnswerRejected as exc:
                    raise _error(422, "invalid_answer", str(exc)) from exc
                except KeyError:
                    break  # resolved between the scan and the submit
                return
        # second pass: already answered somewhere -> conflict, else unknown
        if any(query_id in channel.answered() for channel in channels):
            raise _error(409, "already_answered", f"query '{query_id}' already answered")
        raise _error(404, "unknown_query", f"no pending query '{query_id}'")

    @app.post("/assessments")
    def post_assessment(request: AssessmentRequest) -> dict:
        if database is None:
            raise _error(409, "no_database", "service started without a scaling database")
        try:
            q = _request_qubo(request)
            result = assess(database, q, request.declared_class)
        except EmptyDatabaseSlice as exc:
            raise _error(422, "empty_slice", str(exc)) from exc
        except (TypeError, ValueError, KeyError) as exc:
            raise _error(422, "invalid_instance", repr(exc)) from exc
        return jsonable(result.to_dict())

    @app.post("/assessments/config", response_class=PlainTextResponse)
    def post_assessment_config(request: AssessmentRequest) -> PlainTextResponse:
        """The recommended tree/path pair as downloadable YAML."""
        if database is None:
            raise _error(409, "no_database", "service started without a scaling database")
        try:
            q = _request_qubo(request)
            result = assess(database, q, request.declared_class)
        except EmptyDatabaseSlice as exc:
            raise _error(422, "empty_slice", str(exc)) from exc
        except (TypeError, ValueError, KeyError) as exc:
            raise _error(422, "invalid_instance", repr(exc)) from exc
        payload = recommended_config_dict(
            result, str(database_path) if database_path else None
        )
        return PlainTextResponse(
            yaml.safe_dump(payload, sort_keys=False),
            media_type="application/yaml",
            headers={"Content-Disposition": 'attachment; filename="recommended_config.yaml"'},
        )

    return app


def _request_qubo(request: AssessmentRequest):
    from .problems.classes import formulate_problem, parse_instance
    from .problems.qubo import QuboMatrix

    if request.qubo is not None:
        return QuboMatrix.from_array(np.asarray(request.qubo, dtype=float))
    if request.instance is None:
        raise ValueError("assessment request needs either 'instance' or 'qubo'")
    instance = parse_instance(request.instance)
    return formulate_problem(instance, "standard")
