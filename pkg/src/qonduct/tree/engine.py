"""DAG construction, validation, and the forward/backward execution loop.

A built tree is immutable; each run owns a private data store, walks from the
root applying node deltas, picks a child at every branch, and once a childless
node is reached interprets every visited node in exact reverse order.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..backend.registry import BackendRegistry
from ..queries import AnswerSource, Query, resolve
from .config import PathSpec, TreeConfig
from .data import ProblemData
from .node import Node, NodeFailure, node_registry

logger = logging.getLogger("qonduct.tree")


class UnknownNode(KeyError):
    pass


class DuplicateName(ValueError):
    pass


class MissingRoot(ValueError):
    pass


class InvalidTree(RuntimeError):
    pass


class UnknownPathKey(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str  # "missing_key" | "cycle" | "unknown_child"
    node: str
    detail: str
    path: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunResult:
    result_entries: dict[str, Any]
    visited_path: tuple[str, ...]
    status: str  # "completed" | "aborted"
    reason: str | None = None
    provenance: tuple = ()


class RunContext:
    """Per-run services handed to nodes: path assignments, query resolution,
    tree-level information topics, and logging."""

    def __init__(
        self,
        tree: "DecisionTree",
        path: dict[str, Any],
        mode: str,
        answers: AnswerSource | None,
        sink: Callable[[dict], None],
    ):
        self.path = path
        self.mode = mode
        self.backends = tree.backends
        self._tree = tree
        self._answers = answers
        self._sink = sink
        self.results: dict[str, Any] = {}

    def resolve(self, query: Query) -> Any:
        if query.id in self.path:
            return query.coerce(self.path[query.id])
        return resolve(query, mode=self.mode, source=self._answers)

    def request_info(self, topic: str) -> Any:
        return self._tree.request_info(topic)

    def log(self, message: str, **extra: Any) -> None:
        self._sink({"event": "log", "message": message, **extra})


class DecisionTree:
    def __init__(
        self,
        nodes: dict[str, Node],
        root: str,
        flags: dict[str, Any],
        backend_registry: BackendRegistry | None = None,
        log_dir: str | Path | None = None,
    ):
        self._nodes = nodes
        self._root = root
        self._flags = dict(flags)
        # an empty registry is falsy via __len__, so test identity explicitly
        self.backends = backend_registry if backend_registry is not None else BackendRegistry()
        self._log_dir = Path(log_dir) if log_dir else None
        self._topics: dict[str, Callable[[], Any]] = {
            "backends": self.backends.list,
            "tree": self.describe,
        }
        self._report: ValidationReport | None = None
        self._lock = threading.Lock()

    # -- structure -------------------------------------------------------

    @property
    def root(self) -> str:
        return self._root

    @property
    def flags(self) -> dict[str, Any]:
        return dict(self._flags)

    def node(self, name: str) -> Node:
        try:
            return self._nodes[name]
        except KeyError:
            raise UnknownNode(name) from None

    def node_names(self) -> tuple[str, ...]:
        return tuple(self._nodes)

    def describe(self) -> dict[str, Any]:
        return {
            "root": self._root,
            "nodes": {
                name: {
                    "type": type(n).__name__,
                    "children": list(n.children),
                    "requires": sorted(n.requires),
                    "creates": sorted(n.creates),
                    "path_keys": sorted(n.path_keys),
                }
                for name, n in self._nodes.items()
            },
        }

    def register_topic(self, topic: str, provider: Callable[[], Any]) -> None:
        self._topics[topic] = provider

    def request_info(self, topic: str) -> Any:
        from .node import UnknownTopic

        try:
            provider = self._topics[topic]
        except KeyError:
            raise UnknownTopic(topic) from None
        return provider()

    def path_keys(self) -> frozenset[str]:
        keys: set[str] = set()
        for n in self._nodes.values():
            keys |= n.path_keys
        return frozenset(keys)

    # -- validation --------------------------------------------------------

    def validate(self) -> ValidationReport:
        violations: list[Violation] = []
        warnings: list[str] = []

        for name, n in self._nodes.items():
            for child in n.children:
                if child not in self._nodes:
                    violations.append(
                        Violation("unknown_child", name, f"child '{child}' not in tree")
                    )
        if any(v.kind == "unknown_child" for v in violations):
            report = ValidationReport(False, tuple(violations), tuple(warnings))
            self._report = report
            return report

        # cycle check over the child graph
        state: dict[str, int] = {}  # 0 visiting, 1 done

        def dfs(name: str, trail: tuple[str, ...]) -> bool:
            if state.get(name) == 1:
                return True
            if state.get(name) == 0:
                violations.append(Violation("cycle", name, "cycle detected", trail + (name,)))
                return False
            state[name] = 0
            ok = all(dfs(c, trail + (name,)) for c in self._nodes[name].children)
            state[name] = 1
            return ok

        if not dfs(self._root, ()):
            report = ValidationReport(False, tuple(violations), tuple(warnings))
            self._report = report
            return report

        parents: dict[str, int] = {}
        for n in self._nodes.values():
            for child in n.children:
                parents[child] = parents.get(child, 0) + 1
        for child, count in parents.items():
            if count > 1:
                warnings.append(
                    f"node '{child}' has {count} parents; first arrival wins per run"
                )
        unreachable = set(self._nodes) - self._reachable()
        for name in sorted(unreachable):
            warnings.append(f"node '{name}' is unreachable from the root")

        # every root-to-leaf path must satisfy each node's requires from
        # ancestor creates plus the engine-injected instance key
        seen: set[tuple[str, frozenset[str]]] = set()

        def walk(name: str, available: frozenset[str], trail: tuple[str, ...]) -> None:
            mark = (name, available)
            if mark in seen:
                return
            seen.add(mark)
            n = self._nodes[name]
            trail = trail + (name,)
            for key in sorted(n.requires):
                if key not in available:
                    violations.append(
                        Violation("missing_key", name, f"requires '{key}'", trail)
                    )
            available = available | n.creates
            for child in n.children:
                walk(child, available, trail)

        walk(self._root, frozenset({"problem_instance"}), ())
        report = ValidationReport(not violations, tuple(violations), tuple(warnings))
        self._report = report
        return report

    def _reachable(self) -> set[str]:
        found = set()
        stack = [self._root]
        while stack:
            name = stack.pop()
            if name in found:
                continue
            found.add(name)
            stack.extend(self._nodes[name].children)
        return found

    # -- execution ---------------------------------------------------------

    def run(
        self,
        instance: Any,
        path: PathSpec | None = None,
        answers: AnswerSource | None = None,
        run_id: str | None = None,
        mode: str | None = None,
    ) -> RunResult:
        if self._report is None:
            self.validate()
        if not self._report.ok:
            raise InvalidTree(f"tree failed validation: {self._report.violations}")

        assignments = dict(path.assignments) if path else {}
        declared = self.path_keys()
        for key in assignments:
            if key not in declared:
                raise UnknownPathKey(f"'{key}' is not a path key of any node")

        run_id = run_id or uuid.uuid4().hex[:12]
        sink = self._open_log(run_id)
        run_mode = mode if mode is not None else self._flags["automation_mode"]
        if run_mode not in ("automatic", "manual"):
            raise ValueError(f"unknown automation mode {run_mode!r}")
        ctx = RunContext(self, assignments, run_mode, answers, sink)
        data = ProblemData({"problem_instance": instance})

        visited: list[str] = []
        status, reason = "completed", None
        name = self._root
        sink({"event": "run_start", "root": name, "path": assignments})
        try:
            while True:
                n = self._nodes[name]
                if name in visited:  # converging DAG: first arrival already ran
                    ctx.log(f"node '{name}' reached again; skipping re-execution")
                    break
                try:
                    delta = n.execute(data, ctx) or {}
                    data.apply_delta(name, delta, n.creates, "forward")
                except NodeFailure:
                    raise
                except Exception as exc:  # noqa: BLE001 - node faults become failures
                    raise NodeFailure(name, repr(exc)) from exc
                visited.append(name)
                sink({"event": "execute", "node": name, "keys": sorted(delta)})
                if not n.children:
                    break
                try:
                    name = n.children[0] if len(n.children) == 1 else n.next_node(data, ctx)
                except NodeFailure:
                    raise
                except Exception as exc:  # noqa: BLE001
                    raise NodeFailure(n.name, repr(exc)) from exc
                if name not in n.children:
                    raise NodeFailure(n.name, f"next_node returned undeclared '{name}'")
        except NodeFailure as failure:
            status, reason = "aborted", str(failure)
            sink({"event": "abort", "node": failure.node, "cause": failure.cause})

        # backward pass over the successfully executed prefix, exact reverse
        for name in reversed(visited):
            n = self._nodes[name]
            entries = n.interpret_result(data, ctx) or {}
            ctx.results.update(entries)
            data.record_interpretation(name, tuple(entries))
            sink({"event": "interpret", "node": name, "keys": sorted(entries)})

        sink({"event": "run_end", "status": status, "visited": visited})
        return RunResult(
            result_entries=ctx.results,
            visited_path=tuple(visited),
            status=status,
            reason=reason,
            provenance=data.provenance,
        )

    def _open_log(self, run_id: str) -> Callable[[dict], None]:
        if self._log_dir is None:
            return lambda record: logger.debug("%s", record)
        self._log_dir.mkdir(parents=True, exist_ok=True)
        run_file = self._log_dir / f"run_{run_id}.jsonl"
        persistent = self._log_dir / "qonduct.jsonl"

        def sink(record: dict) -> None:
            line = json.dumps({"run_id": run_id, "ts": time.time(), **record})
            with self._lock:
                with open(run_file, "a") as fh:
                    fh.write(line + "\n")
                with open(persistent, "a") as fh:
                    fh.write(line + "\n")

        return sink


def build_tree(
    config: TreeConfig,
    backend_registry: BackendRegistry | None = None,
    log_dir: str | Path | None = None,
) -> DecisionTree:
    types = node_registry(config.node_sources)
    nodes: dict[str, Node] = {}
    for spec in config.nodes:
        if spec.name in nodes:
            raise DuplicateName(spec.name)
        if spec.type not in types:
            raise UnknownNode(
                f"node type '{spec.type}' not found in namespaces {list(config.node_sources)}"
            )
        nodes[spec.name] = types[spec.type](spec.name, spec.children, **spec.init_args)
    if config.root not in nodes:
        raise MissingRoot(f"root '{config.root}' is not a configured node")
    return DecisionTree(nodes, config.root, config.flags, backend_registry, log_dir)
