"""The keyed store that flows through a decision tree.

Nodes never mutate the store directly: they return a delta, and the engine
applies it here, so every write is attributed to a node and checked against
the keys that node declared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Mapping

import numpy as np


class MissingKey(KeyError):
    pass


class UndeclaredWrite(ValueError):
    def __init__(self, node: str, key: str):
        super().__init__(f"node '{node}' wrote undeclared key '{key}'")
        self.node = node
        self.key = key


@dataclass(frozen=True)
class ProvenanceRecord:
    node: str
    keys: tuple[str, ...]
    direction: str  # "forward" | "backward"


def _check_value(key: str, value: Any) -> Any:
    if key == "qubo_matrix":
        arr = np.asarray(value, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"'qubo_matrix' must be a square 2-d array, got shape {arr.shape}")
        return arr
    return value


class ProblemData:
    """Keyed store with an append-only provenance log."""

    def __init__(self, initial: Mapping[str, Any] | None = None):
        self._entries: dict[str, Any] = {}
        self._provenance: list[ProvenanceRecord] = []
        if initial:
            for key, value in initial.items():
                self._entries[key] = _check_value(key, value)
            self._provenance.append(
                ProvenanceRecord("<engine>", tuple(sorted(initial)), "forward")
            )

    def __getitem__(self, key: str) -> Any:
        try:
            return self._entries[key]
        except KeyError:
            raise MissingKey(key) from None

    def get(self, key: str, default: Any = None) -> Any:
        return self._entries.get(key, default)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def keys(self) -> Iterator[str]:
        return iter(self._entries)

    @property
    def provenance(self) -> tuple[ProvenanceRecord, ...]:
        return tuple(self._provenance)

    def apply_delta(
        self,
        node: str,
        delta: Mapping[str, Any],
        declared: frozenset[str] | set[str],
        direction: str = "forward",
    ) -> None:
        """Write a node's delta, rejecting keys outside its declaration."""
        if not delta:
            return
        for key in delta:
            if key not in declared:
                raise UndeclaredWrite(node, key)
        checked = {key: _check_value(key, value) for key, value in delta.items()}
        self._entries.update(checked)
        self._provenance.append(ProvenanceRecord(node, tuple(delta), direction))

    def record_interpretation(self, node: str, keys: tuple[str, ...]) -> None:
        """Log result entries produced on the backward pass."""
        if keys:
            self._provenance.append(ProvenanceRecord(node, keys, "backward"))

    def snapshot(self) -> dict[str, Any]:
        return dict(self._entries)
