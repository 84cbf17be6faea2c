"""The optimize-measure loop with loss-call accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..backend.simulator import estimate_expectation, sample
from ..problems.qubo import QuboMatrix, objective_vector, uniform_loss_std
from .ansatz import Ansatz
from .optimizers import BudgetReached, OptimizerFailure

EXACT_MODE_READOUT_SHOTS = 4096


class NegativeEpsilon(ValueError):
    pass


@dataclass
class VqaTrace:
    n_calls: int
    n_circuit_evals: int  # includes gradient-rule evaluations at shifted gate angles
    best_params: list[float]
    best_loss: float
    best_bitstring: tuple[int, ...]
    history: list[tuple[list[float], float]] = field(repr=False, default_factory=list)
    shots_per_call: int | None = None
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "n_calls": self.n_calls,
            "n_circuit_evals": self.n_circuit_evals,
            "best_params": list(self.best_params),
            "best_loss": self.best_loss,
            "best_bitstring": list(self.best_bitstring),
            "shots_per_call": self.shots_per_call,
            "budget_exhausted": self.budget_exhausted,
        }


def inject_noise_loss(Q: QuboMatrix, exact_loss, epsilon: float, seed: int):
    """Exact loss plus Gaussian noise of std epsilon * sigma_U.

    sigma_U is the uniform-bitstring loss std of Q, making epsilon a
    dimensionless noise level comparable across instances and sizes.
    epsilon = 0 returns the exact loss unchanged.
    """
    if epsilon < 0:
        raise NegativeEpsilon(f"epsilon must be >= 0, got {epsilon}")
    if epsilon == 0:
        return exact_loss
    sigma = epsilon * uniform_loss_std(Q)
    rng = np.random.default_rng(seed)

    def noisy(params):
        return exact_loss(params) + rng.normal(0.0, sigma)

    return noisy


def _shift_gate_angle(circuit, gate_idx: int, delta: float):
    from ..backend.circuit import Circuit

    gates = list(circuit.gates)
    g = gates[gate_idx]
    gates[gate_idx] = g[:-1] + (g[-1] + delta,)
    return Circuit(circuit.n_qubits, gates)


def parameter_shift_gradient(ansatz: Ansatz, params, circuit_loss) -> np.ndarray:
    """Shift-rule gradient, correct for shared and scaled gate angles.

    Every parametric gate in the bound circuit contributes
    coeff * (L(angle + pi/2) - L(angle - pi/2)) / 2 to its parameter.
    ``circuit_loss`` maps a Circuit to a loss value.
    """
    params = np.asarray(params, dtype=float)
    base = ansatz.circuit(params)
    grad = np.zeros(ansatz.parameter_count)
    for gate_idx, param_idx, coeff in ansatz.parametric_gate_map(params):
        lp = circuit_loss(_shift_gate_angle(base, gate_idx, math.pi / 2))
        lm = circuit_loss(_shift_gate_angle(base, gate_idx, -math.pi / 2))
        grad[param_idx] += coeff * (lp - lm) / 2.0
    return grad


def _pick_bitstring(counts: dict[str, int], qvec: np.ndarray, exact_mode: bool) -> tuple[int, ...]:
    if exact_mode:
        # lowest objective among sampled candidates
        best = min(counts, key=lambda b: (qvec[int(b, 2)], b))
    else:
        best = max(counts, key=lambda b: (counts[b], -qvec[int(b, 2)], b))
    return tuple(int(ch) for ch in best)


def run_vqa(
    ansatz: Ansatz,
    optimizer,
    Q: QuboMatrix,
    n_shots: int | None,
    budget: int,
    seed: int,
    noise_epsilon: float = 0.0,
) -> VqaTrace:
    """Drive one variational run and return its complete trace.

    ``n_shots=None`` selects exact mode (noise-free expectations, optionally
    with injected Gaussian noise of level ``noise_epsilon``); an integer
    selects seeded sampling with that many shots per loss call. ``budget``
    caps the total number of circuit evaluations, gradient evaluations
    included. A fixed-schedule ansatz performs exactly one call.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    rng = np.random.default_rng(seed)
    exact_mode = n_shots is None

    history: list[tuple[list[float], float]] = []
    evals = {"total": 0}
    budget_hit = {"flag": False}

    grad_noise_rng = np.random.default_rng(int(rng.integers(2**63)))
    grad_sigma = noise_epsilon * uniform_loss_std(Q) if noise_epsilon else 0.0

    def circuit_loss(circuit) -> float:
        # gradient evaluations: consume budget, no history entry
        if evals["total"] >= budget:
            budget_hit["flag"] = True
            raise BudgetReached
        evals["total"] += 1
        if exact_mode:
            from ..backend.simulator import exact_expectation

            value = exact_expectation(circuit, Q)
            if grad_sigma:
                # gradient probes see the same noise level as loss calls
                value += grad_noise_rng.normal(0.0, grad_sigma)
            return value
        shot_seed = int(rng.integers(2**63))
        return estimate_expectation(sample(circuit, n_shots, seed=shot_seed), Q)

    if exact_mode:
        base_loss = ansatz.exact_loss
        if noise_epsilon:
            base_loss = inject_noise_loss(Q, base_loss, noise_epsilon, seed=int(rng.integers(2**63)))
    else:
        if noise_epsilon:
            raise ValueError("noise injection applies to exact mode only")

        def base_loss(params):
            shot_seed = int(rng.integers(2**63))
            return estimate_expectation(sample(ansatz.circuit(params), n_shots, seed=shot_seed), Q)

    def counted_loss(params) -> float:
        if evals["total"] >= budget:
            budget_hit["flag"] = True
            raise BudgetReached
        evals["total"] += 1
        value = float(base_loss(np.asarray(params, dtype=float)))
        history.append(([float(v) for v in params], value))
        return value

    def counted_grad(params) -> np.ndarray:
        return parameter_shift_gradient(ansatz, params, circuit_loss)

    x0 = ansatz.initial_params(rng)
    if ansatz.parameter_count == 0:
        counted_loss(x0)
    else:
        try:
            optimizer.minimize(counted_loss, x0, rng, grad=counted_grad)
        except BudgetReached:
            pass
        except OptimizerFailure:
            raise
        except Exception as exc:  # optimizer-internal failure
            raise OptimizerFailure(str(exc)) from exc

    if not history:
        # budget consumed entirely by gradient probes before any loss call
        raise OptimizerFailure("optimizer made no loss evaluations within budget")

    best_idx = min(range(len(history)), key=lambda i: history[i][1])
    best_params, best_loss = history[best_idx]

    readout_shots = EXACT_MODE_READOUT_SHOTS if exact_mode else n_shots
    readout = sample(ansatz.circuit(best_params), readout_shots, seed=seed)
    qvec = objective_vector(Q)
    best_bits = _pick_bitstring(readout.counts, qvec, exact_mode)

    return VqaTrace(
        n_calls=len(history),
        n_circuit_evals=evals["total"],
        best_params=best_params,
        best_loss=best_loss,
        best_bitstring=best_bits,
        history=history,
        shots_per_call=n_shots,
        budget_exhausted=budget_hit["flag"],
    )
