"""Registry of execution backends."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field


class DuplicateId(ValueError):
    pass


@dataclass(frozen=True)
class BackendRecord:
    id: str
    provider: str  # node name handling communication with this backend
    qubit_count: int
    properties: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "provider": self.provider,
            "qubit_count": self.qubit_count,
            "properties": dict(self.properties),
        }


class BackendRegistry:
    """Thread-safe backend record store; the only shared mutable state of a tree."""

    def __init__(self) -> None:
        self._records: dict[str, BackendRecord] = {}
        self._lock = threading.Lock()

    def register(self, record: BackendRecord) -> None:
        with self._lock:
            if record.id in self._records:
                raise DuplicateId(f"backend id '{record.id}' already registered")
            self._records[record.id] = record

    def update_properties(self, backend_id: str, **properties) -> None:
        with self._lock:
            old = self._records[backend_id]
            merged = {**old.properties, **properties}
            self._records[backend_id] = BackendRecord(
                id=old.id, provider=old.provider, qubit_count=old.qubit_count, properties=merged
            )

    def list(self) -> list[BackendRecord]:
        with self._lock:
            return list(self._records.values())

    def get(self, backend_id: str) -> BackendRecord:
        with self._lock:
            return self._records[backend_id]

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)
