"""Variational circuit families: alternating cost/mixer layers, the fixed
linear-ramp variant, and the layered rotation/entangler ansatz.

Cost layers encode the objective in the Ising picture: with
``x_i = (1 - z_i)/2`` the QUBO becomes ``const - sum_i h_i z_i +
sum_{i<j} (Q_ij/4) z_i z_j`` where ``h_i = Q_ii/2 + sum_j Q_ij/4`` over
couplings touching ``i``. Each coupling turns into one RZZ, each field into
one RZ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..backend.circuit import Circuit
from ..backend.simulator import apply_gate
from ..problems.qubo import QuboMatrix, objective_vector

# Kinds the scaling-database schema accepts. Only the first three have circuit
# constructions here; the rest are recognized identifiers for imported records.
DECLARED_ANSATZ_KINDS = (
    "qaoa",
    "lr_qaoa",
    "hardware_efficient",
    "ma_qaoa",
    "qaoa_plus",
    "dc_qaoa",
    "ws_qaoa",
)


class EmptySchedule(ValueError):
    pass


class InvalidDelta(ValueError):
    pass


class ParamCountMismatch(ValueError):
    pass


def _ising_fields(Q: QuboMatrix) -> tuple[np.ndarray, list[tuple[int, int, float]]]:
    m = Q.entries
    n = Q.n
    couplings = [(i, j, m[i, j]) for i in range(n) for j in range(i + 1, n) if m[i, j] != 0.0]
    h = np.diag(m) / 2.0
    for i, j, w in couplings:
        h[i] += w / 4.0
        h[j] += w / 4.0
    return h, couplings


def build_qaoa_circuit(Q: QuboMatrix, gammas, betas) -> Circuit:
    """H layer, then alternating cost (RZZ/RZ) and mixer (RX) layers."""
    gammas = [float(g) for g in gammas]
    betas = [float(b) for b in betas]
    if not gammas or len(gammas) != len(betas):
        raise EmptySchedule("need equally long, nonempty gamma and beta schedules")
    n = Q.n
    h, couplings = _ising_fields(Q)
    c = Circuit(n)
    for q in range(n):
        c.h(q)
    for gamma, beta in zip(gammas, betas):
        for i, j, w in couplings:
            c.rzz(i, j, 0.5 * gamma * w)
        for q in range(n):
            if h[q] != 0.0:
                c.rz(q, -2.0 * gamma * h[q])
        for q in range(n):
            c.rx(q, 2.0 * beta)
    return c


def lr_qaoa_schedule(p: int, delta: float) -> tuple[list[float], list[float]]:
    """Linear ramp: gamma_k = (k/p) * delta rising, beta_k falling to zero."""
    if p < 1:
        raise EmptySchedule(f"schedule length must be >= 1, got {p}")
    if not (delta > 0):
        raise InvalidDelta(f"delta must be positive, got {delta}")
    gammas = [(k / p) * delta for k in range(1, p + 1)]
    betas = [(1 - k / p) * delta for k in range(1, p + 1)]
    return gammas, betas


def build_hea_circuit(n: int, layers: int, params) -> Circuit:
    """Per layer: one RY rotation per qubit, then a linear CX entangling chain."""
    params = [float(t) for t in params]
    if len(params) != n * layers:
        raise ParamCountMismatch(f"expected {n * layers} parameters, got {len(params)}")
    c = Circuit(n)
    k = 0
    for _ in range(layers):
        for q in range(n):
            c.ry(q, params[k])
            k += 1
        for q in range(n - 1):
            c.cx(q, q + 1)
    return c


@dataclass(frozen=True)
class AnsatzSpec:
    kind: str
    depth: int = 1  # p for cost/mixer families, layer count for hardware_efficient
    delta: float = 0.7  # ramp height, lr_qaoa only

    def __post_init__(self) -> None:
        if self.kind not in DECLARED_ANSATZ_KINDS:
            raise ValueError(f"unknown ansatz kind '{self.kind}'")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    def parameter_count(self, n: int) -> int:
        if self.kind == "qaoa":
            return 2 * self.depth
        if self.kind == "lr_qaoa":
            return 0
        if self.kind == "hardware_efficient":
            return n * self.depth
        raise NotImplementedError(f"ansatz kind '{self.kind}' has no construction here")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "depth": self.depth, "delta": self.delta}


class Ansatz:
    """A circuit family bound to one problem matrix.

    Exposes the bound circuit, a parametric gate map for shift-rule
    gradients, and a fast exact-loss path that skips explicit RZZ/RZ gates
    by applying the diagonal cost phase directly.
    """

    def __init__(self, spec: AnsatzSpec, Q: QuboMatrix):
        self.spec = spec
        self.Q = Q
        self.n = Q.n
        self.parameter_count = spec.parameter_count(self.n)
        self._qvec: np.ndarray | None = None

    @property
    def kind(self) -> str:
        return self.spec.kind

    def initial_params(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "qaoa":
            p = self.spec.depth
            ramp_g = np.array([(k / p) * 0.5 for k in range(1, p + 1)])
            ramp_b = np.array([(1 - k / p) * 0.5 for k in range(1, p + 1)])
            jitter = rng.uniform(-0.1, 0.1, size=2 * p)
            return np.concatenate([ramp_g, ramp_b]) + jitter
        if self.kind == "lr_qaoa":
            return np.zeros(0)
        return rng.uniform(-0.6, 0.6, size=self.parameter_count)

    def _schedules(self, params) -> tuple[list[float], list[float]]:
        p = self.spec.depth
        if self.kind == "lr_qaoa":
            return lr_qaoa_schedule(p, self.spec.delta)
        return list(params[:p]), list(params[p:])

    def circuit(self, params) -> Circuit:
        params = np.asarray(params, dtype=float)
        if params.shape[0] != self.parameter_count:
            raise ParamCountMismatch(
                f"expected {self.parameter_count} parameters, got {params.shape[0]}"
            )
        if self.kind in ("qaoa", "lr_qaoa"):
            gammas, betas = self._schedules(params)
            return build_qaoa_circuit(self.Q, gammas, betas)
        return build_hea_circuit(self.n, self.spec.depth, params)

    def parametric_gate_map(self, params) -> list[tuple[int, int, float]]:
        """(gate index, parameter index, d(angle)/d(parameter)) triples.

        Matches the gate order of :meth:`circuit` for the same parameters.
        """
        if self.kind == "lr_qaoa":
            return []
        if self.kind == "hardware_efficient":
            out = []
            gate_idx = 0
            k = 0
            for _ in range(self.spec.depth):
                for _q in range(self.n):
                    out.append((gate_idx, k, 1.0))
                    gate_idx += 1
                    k += 1
                gate_idx += self.n - 1  # entangling chain
            return out
        # qaoa: params = [gamma_1..p, beta_1..p]
        h, couplings = _ising_fields(self.Q)
        p = self.spec.depth
        out = []
        gate_idx = self.n  # skip the H layer
        for layer in range(p):
            for _i, _j, w in couplings:
                out.append((gate_idx, layer, 0.5 * w))
                gate_idx += 1
            for q in range(self.n):
                if h[q] != 0.0:
                    out.append((gate_idx, layer, -2.0 * h[q]))
                    gate_idx += 1
            for _q in range(self.n):
                out.append((gate_idx, p + layer, 2.0))
                gate_idx += 1
        return out

    # --- fast exact loss ------------------------------------------------

    def _objective_vector(self) -> np.ndarray:
        if self._qvec is None:
            self._qvec = objective_vector(self.Q)
        return self._qvec

    def exact_loss(self, params) -> float:
        """Exact expectation of the objective, without building gate lists."""
        params = np.asarray(params, dtype=float)
        qvec = self._objective_vector()
        n = self.n
        if self.kind in ("qaoa", "lr_qaoa"):
            gammas, betas = self._schedules(params)
            state = np.full(2**n, 2 ** (-n / 2), dtype=complex)
            for gamma, beta in zip(gammas, betas):
                state = state * np.exp(-1j * gamma * qvec)
                tensor = state.reshape((2,) * n)
                for q in range(n):
                    tensor = apply_gate(tensor, ("rx", q, 2.0 * beta))
                state = tensor.reshape(-1)
            return float((np.abs(state) ** 2) @ qvec)
        circuit = self.circuit(params)
        state = np.zeros((2,) * n, dtype=complex)
        state[(0,) * n] = 1.0
        for gate in circuit.gates:
            state = apply_gate(state, gate)
        return float((np.abs(state.reshape(-1)) ** 2) @ qvec)


def make_ansatz(spec: AnsatzSpec, Q: QuboMatrix) -> Ansatz:
    spec.parameter_count(Q.n)  # raises NotImplementedError for schema-only kinds
    return Ansatz(spec, Q)
