"""Statevector simulation, seeded shot sampling, and expectation estimates.

Basis convention: qubit 0 is the most significant bit of the statevector
index, so index ``i`` corresponds to the bitstring ``format(i, f"0{n}b")``
and lines up with the bitstring enumeration used by the QUBO oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..problems.qubo import QuboMatrix, objective_vector
from .circuit import Circuit

STATEVECTOR_CAP = 20

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


class TooManyQubits(ValueError):
    pass


class SizeMismatch(ValueError):
    pass


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _apply_single(state: np.ndarray, gate: np.ndarray, q: int) -> np.ndarray:
    moved = np.tensordot(gate, state, axes=([1], [q]))
    return np.moveaxis(moved, 0, q)


def apply_gate(state: np.ndarray, gate: tuple) -> np.ndarray:
    """Apply one gate to a (2,)*n tensor-shaped statevector."""
    name = gate[0]
    if name == "h":
        return _apply_single(state, _H, gate[1])
    if name == "rx":
        return _apply_single(state, _rx(gate[2]), gate[1])
    if name == "ry":
        return _apply_single(state, _ry(gate[2]), gate[1])
    if name == "rz":
        _, q, theta = gate
        out = state.copy()
        idx0 = [slice(None)] * state.ndim
        idx0[q] = 0
        idx1 = list(idx0)
        idx1[q] = 1
        out[tuple(idx0)] *= np.exp(-0.5j * theta)
        out[tuple(idx1)] *= np.exp(0.5j * theta)
        return out
    if name == "cx":
        _, c, t = gate
        out = state.copy()
        sel0 = [slice(None)] * state.ndim
        sel0[c] = 1
        sel0[t] = 0
        sel1 = list(sel0)
        sel1[t] = 1
        out[tuple(sel0)], out[tuple(sel1)] = state[tuple(sel1)], state[tuple(sel0)]
        return out
    if name == "rzz":
        _, q1, q2, theta = gate
        out = state.copy()
        for b1 in (0, 1):
            for b2 in (0, 1):
                sel = [slice(None)] * state.ndim
                sel[q1] = b1
                sel[q2] = b2
                sign = 1.0 if b1 == b2 else -1.0
                out[tuple(sel)] *= np.exp(-0.5j * theta * sign)
        return out
    raise ValueError(f"unknown gate {name}")


def simulate_statevector(circuit: Circuit, cap: int = STATEVECTOR_CAP) -> np.ndarray:
    """Exact amplitudes of the circuit applied to |0...0>, length 2^n."""
    n = circuit.n_qubits
    if n > cap:
        raise TooManyQubits(f"{n} qubits exceeds simulator cap {cap}")
    state = np.zeros((2,) * n, dtype=complex)
    state[(0,) * n] = 1.0
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state.reshape(-1)


@dataclass(frozen=True)
class ShotResult:
    counts: dict[str, int]
    n_shots: int

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.n_shots:
            raise ValueError("counts must sum to n_shots")


def probabilities(circuit: Circuit) -> np.ndarray:
    amps = simulate_statevector(circuit)
    return np.abs(amps) ** 2


def sample(circuit: Circuit, n_shots: int, seed: int) -> ShotResult:
    """Seeded measurement sampling from |amplitude|^2."""
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    probs = probabilities(circuit)
    probs = probs / probs.sum()  # renormalize rounding residue
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(n_shots, probs)
    n = circuit.n_qubits
    counts = {
        format(i, f"0{n}b"): int(c) for i, c in enumerate(draws) if c > 0
    }
    return ShotResult(counts=counts, n_shots=n_shots)


def exact_expectation(circuit: Circuit, Q: QuboMatrix) -> float:
    """Noise-free objective expectation: sum_x |psi_x|^2 * objective(x)."""
    if circuit.n_qubits != Q.n:
        raise SizeMismatch(f"circuit has {circuit.n_qubits} qubits, Q has n={Q.n}")
    return float(probabilities(circuit) @ objective_vector(Q))


def estimate_expectation(shot_result: ShotResult, Q: QuboMatrix) -> float:
    """Counts-weighted mean of the objective over sampled bitstrings."""
    total = 0.0
    vals = objective_vector(Q)
    for bitstring, count in shot_result.counts.items():
        if len(bitstring) != Q.n:
            raise SizeMismatch(f"bitstring length {len(bitstring)} != n={Q.n}")
        total += count * vals[int(bitstring, 2)]
    return total / shot_result.n_shots
