"""Decision points with configurable automation.

In automatic mode a query resolves to its recommendation (computed from the
problem data by whichever node posed it) or, failing that, its default. In
manual mode resolution blocks on an answer source: the console, a scripted
map (CI), or a pending-query channel served over HTTP.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from typing import Any, Callable

RETRY_CAP = 3
DEFAULT_ANSWER_TIMEOUT = 15 * 60.0


class NoDefaultAvailable(ValueError):
    pass


class AnswerTimeout(TimeoutError):
    pass


class RetriesExhausted(ValueError):
    pass


class AnswerRejected(ValueError):
    """Raised towards the answering side when a value fails validation."""


class AlreadyAnswered(ValueError):
    pass


QUERY_KINDS = ("integer", "real", "file_path", "single_choice", "multi_value")


@dataclass(frozen=True)
class Query:
    id: str
    kind: str
    prompt: str
    options: tuple = ()
    default: Any = None
    recommendation: tuple[Any, str] | None = None  # (value, rationale)
    minimum: float | None = None
    maximum: float | None = None
    pattern: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in QUERY_KINDS:
            raise ValueError(f"unknown query kind '{self.kind}'")
        if self.kind == "single_choice" and not self.options:
            raise ValueError(f"query '{self.id}': single_choice needs options")
        if self.default is not None:
            self.coerce(self.default)
        if self.recommendation is not None:
            self.coerce(self.recommendation[0])

    def coerce(self, raw):
        """Parse and validate an answer; raises AnswerRejected on violation."""
        try:
            if self.kind == "integer":
                value = int(raw)
            elif self.kind == "real":
                value = float(raw)
            elif self.kind == "file_path":
                value = str(raw)
                if self.pattern and not re.fullmatch(self.pattern, value):
                    raise AnswerRejected(f"'{value}' does not match pattern {self.pattern!r}")
            elif self.kind == "single_choice":
                value = raw
                if value not in self.options:
                    raise AnswerRejected(f"'{value}' is not one of {list(self.options)}")
            else:  # multi_value
                value = list(raw)
        except AnswerRejected:
            raise
        except (TypeError, ValueError, OverflowError) as exc:
            raise AnswerRejected(f"cannot interpret {raw!r} as {self.kind}: {exc}") from exc
        if self.kind in ("integer", "real"):
            if self.minimum is not None and value < self.minimum:
                raise AnswerRejected(f"{value} below minimum {self.minimum}")
            if self.maximum is not None and value > self.maximum:
                raise AnswerRejected(f"{value} above maximum {self.maximum}")
        return value

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "prompt": self.prompt,
            "options": list(self.options),
            "default": self.default,
            "recommendation": (
                {"value": self.recommendation[0], "rationale": self.recommendation[1]}
                if self.recommendation
                else None
            ),
            "minimum": self.minimum,
            "maximum": self.maximum,
        }


def resolve(query: Query, mode: str, source: "AnswerSource | None" = None,
            retry_cap: int = RETRY_CAP):
    """Resolve one query. Automatic precedence: recommendation > default."""
    if mode == "automatic":
        if query.recommendation is not None:
            return query.coerce(query.recommendation[0])
        if query.default is not None:
            return query.coerce(query.default)
        raise NoDefaultAvailable(f"query '{query.id}' has neither recommendation nor default")
    if source is None:
        raise ValueError("manual mode requires an answer source")
    for _ in range(retry_cap):
        raw = source.get_answer(query)
        try:
            return query.coerce(raw)
        except AnswerRejected as exc:
            source.reject(query, str(exc))
    raise RetriesExhausted(f"query '{query.id}': no valid answer in {retry_cap} attempts")


# --- answer sources ---------------------------------------------------------


class AnswerSource:
    def get_answer(self, query: Query):  # pragma: no cover - interface
        raise NotImplementedError

    def reject(self, query: Query, reason: str) -> None:
        pass


class ScriptedAnswers(AnswerSource):
    """Headless source mapping query id to a fixed answer (CI / tests)."""

    def __init__(self, answers: dict[str, Any]):
        self.answers = dict(answers)

    def get_answer(self, query: Query):
        if query.id not in self.answers:
            raise NoDefaultAvailable(f"no scripted answer for query '{query.id}'")
        return self.answers[query.id]


class ConsoleAnswers(AnswerSource):
    def get_answer(self, query: Query):
        prompt = query.prompt
        if query.options:
            prompt += f" [{'/'.join(str(o) for o in query.options)}]"
        if query.recommendation is not None:
            prompt += f" (recommended: {query.recommendation[0]} -- {query.recommendation[1]})"
        elif query.default is not None:
            prompt += f" (default: {query.default})"
        raw = input(prompt + " ")
        if raw == "" and query.default is not None:
            return query.default
        return raw

    def reject(self, query: Query, reason: str) -> None:
        print(f"invalid answer: {reason}")


class PendingQueryChannel(AnswerSource):
    """Cross-thread handoff: the run blocks, answers arrive over the service.

    Answers are single-assignment; a second answer to the same query gets
    AlreadyAnswered.
    """

    def __init__(self, timeout: float = DEFAULT_ANSWER_TIMEOUT):
        self.timeout = timeout
        self._lock = threading.Lock()
        self._pending: dict[str, Query] = {}
        self._answers: dict[str, Any] = {}
        self._answered: set[str] = set()
        self._event = threading.Event()

    def pending(self) -> list[Query]:
        with self._lock:
            return list(self._pending.values())

    def answered(self) -> frozenset[str]:
        with self._lock:
            return frozenset(self._answered)

    def submit_answer(self, query_id: str, value) -> None:
        with self._lock:
            if query_id in self._answered:
                raise AlreadyAnswered(f"query '{query_id}' already answered")
            if query_id not in self._pending:
                raise KeyError(f"no pending query '{query_id}'")
            self._pending[query_id].coerce(value)  # validate before accepting
            self._answers[query_id] = value
            self._answered.add(query_id)
            self._event.set()

    def get_answer(self, query: Query):
        with self._lock:
            self._pending[query.id] = query
            self._event.clear()
        while True:
            with self._lock:
                if query.id in self._answers:
                    del self._pending[query.id]
                    return self._answers.pop(query.id)
            if not self._event.wait(self.timeout):
                with self._lock:
                    self._pending.pop(query.id, None)
                raise AnswerTimeout(f"no answer for query '{query.id}' within {self.timeout}s")
            self._event.clear()

    def reject(self, query: Query, reason: str) -> None:
        # validation happens in submit_answer, so resolve-side rejects are rare;
        # re-open the query for another answer
        with self._lock:
            self._answered.discard(query.id)


# --- query trees -------------------------------------------------------------


@dataclass
class QueryTree:
    """Conditional query chains: edges fire on predicates over the parent answer."""

    root: Query
    edges: list[tuple[str, Callable[[Any], bool], Query]] = field(default_factory=list)
    _queries: dict[str, Query] = field(default_factory=dict, init=False)

    def __post_init__(self) -> None:
        self._queries[self.root.id] = self.root
        order = {self.root.id: 0}
        for parent_id, _pred, child in self.edges:
            if parent_id not in order:
                raise ValueError(f"edge parent '{parent_id}' unknown or out of order")
            if child.id in order:
                raise ValueError(f"query '{child.id}' appears twice (cycle or duplicate)")
            order[child.id] = order[parent_id] + 1
            self._queries[child.id] = child

    def resolve(self, mode: str, source: AnswerSource | None = None) -> dict[str, Any]:
        answers: dict[str, Any] = {}
        frontier = [self.root]
        while frontier:
            query = frontier.pop(0)
            value = resolve(query, mode, source)
            answers[query.id] = value
            for parent_id, pred, child in self.edges:
                if parent_id == query.id and pred(value):
                    frontier.append(child)
        return answers


def resolve_tree(qt: QueryTree, mode: str, source: AnswerSource | None = None) -> dict[str, Any]:
    return qt.resolve(mode, source)
