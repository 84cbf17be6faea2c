"""Minimal gate-list circuit representation.

The gate set (H, RX, RY, RZ, CX, RZZ) is the smallest one expressing the
alternating cost/mixer ansatz, fixed-schedule variants, and layered
rotation/entangler ansatzes used by the runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

ONE_QUBIT_GATES = {"h", "rx", "ry", "rz"}
TWO_QUBIT_GATES = {"cx", "rzz"}
PARAMETRIC = {"rx", "ry", "rz", "rzz"}


@dataclass
class Circuit:
    n_qubits: int
    gates: list[tuple] = field(default_factory=list)
    measure_all: bool = False

    def _check_qubit(self, q: int) -> None:
        if not (0 <= q < self.n_qubits):
            raise ValueError(f"qubit index {q} out of range for {self.n_qubits} qubits")

    def _check_angle(self, theta: float) -> float:
        theta = float(theta)
        if not math.isfinite(theta):
            raise ValueError(f"gate angle must be finite, got {theta}")
        return theta

    def h(self, q: int) -> "Circuit":
        self._check_qubit(q)
        self.gates.append(("h", q))
        return self

    def rx(self, q: int, theta: float) -> "Circuit":
        self._check_qubit(q)
        self.gates.append(("rx", q, self._check_angle(theta)))
        return self

    def ry(self, q: int, theta: float) -> "Circuit":
        self._check_qubit(q)
        self.gates.append(("ry", q, self._check_angle(theta)))
        return self

    def rz(self, q: int, theta: float) -> "Circuit":
        self._check_qubit(q)
        self.gates.append(("rz", q, self._check_angle(theta)))
        return self

    def cx(self, control: int, target: int) -> "Circuit":
        self._check_qubit(control)
        self._check_qubit(target)
        if control == target:
            raise ValueError("cx control and target must differ")
        self.gates.append(("cx", control, target))
        return self

    def rzz(self, q1: int, q2: int, theta: float) -> "Circuit":
        self._check_qubit(q1)
        self._check_qubit(q2)
        if q1 == q2:
            raise ValueError("rzz qubits must differ")
        self.gates.append(("rzz", q1, q2, self._check_angle(theta)))
        return self

    def count(self, name: str) -> int:
        return sum(1 for g in self.gates if g[0] == name)


def to_qasm(circuit: Circuit) -> str:
    """OpenQASM-2-compatible export of the declared gate subset."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.n_qubits}];",
    ]
    if circuit.measure_all:
        lines.append(f"creg c[{circuit.n_qubits}];")
    for g in circuit.gates:
        name = g[0]
        if name == "h":
            lines.append(f"h q[{g[1]}];")
        elif name in ("rx", "ry", "rz"):
            lines.append(f"{name}({g[2]!r}) q[{g[1]}];")
        elif name == "cx":
            lines.append(f"cx q[{g[1]}],q[{g[2]}];")
        elif name == "rzz":
            lines.append(f"rzz({g[3]!r}) q[{g[1]}],q[{g[2]}];")
        else:  # pragma: no cover - append methods guard the gate set
            raise ValueError(f"unknown gate {name}")
    if circuit.measure_all:
        lines.append("measure q -> c;")
    return "\n".join(lines) + "\n"
