"""Empirical measurements feeding the scaling database.

Success rates are measured by running the hybrid loop on freshly sampled
instances with synthetic loss noise, and the finite-sampling coefficient κ(n)
is measured as the shot-normalized standard deviation of the sampled loss
estimator, relative to the uniform-bitstring loss spread σ_U.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..backend.simulator import estimate_expectation, sample, simulate_statevector
from ..problems.classes import formulate_problem, random_maxcut_instance
from ..problems.qubo import (
    QuboMatrix,
    brute_force_optimum,
    objective_vector,
    random_qubo,
    uniform_loss_std,
)
from ..vqa.ansatz import Ansatz, AnsatzSpec, make_ansatz
from ..vqa.runtime import run_vqa

DEFAULT_GAP = 0.05
DEFAULT_BUDGET = 300


def make_instance(problem_type: str, n: int, density: float, seed: int) -> QuboMatrix:
    """Fresh seeded benchmark instance of the requested family."""
    if problem_type == "maxcut":
        instance = random_maxcut_instance(n, density, seed)
        return formulate_problem(instance, "standard")
    if problem_type == "random_qubo":
        return random_qubo(n, density, seed)
    raise ValueError(f"no benchmark instance family for '{problem_type}'")


@dataclass(frozen=True)
class SuccessSample:
    rate: float
    calls: tuple[int, ...]  # loss-call counts of the successful trials
    trials: int


def measure_success(
    ansatz_spec: AnsatzSpec,
    optimizer_factory,
    problem_type: str,
    density: float,
    n: int,
    epsilon: float,
    trials: int,
    seed: int,
    gap: float = DEFAULT_GAP,
    budget: int | None = None,
) -> SuccessSample:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(trials)
    successes = 0
    calls: list[int] = []
    for child in children:
        trial_seed = int(child.generate_state(1)[0])
        q = make_instance(problem_type, n, density, trial_seed)
        values = np.asarray(objective_vector(q))
        optimum_value = float(values.min())
        spread = float(values.max()) - optimum_value
        ansatz = make_ansatz(ansatz_spec, q)
        optimizer = optimizer_factory()
        trace = run_vqa(
            ansatz, optimizer, q,
            n_shots=None,
            budget=budget if budget is not None else DEFAULT_BUDGET,
            seed=trial_seed + 1,
            noise_epsilon=epsilon,
        )
        # judge the run by the modal bitstring of the state the optimizer
        # settled on — a noise-corrupted loss must not be rescued by readout
        state = simulate_statevector(ansatz.circuit(np.asarray(trace.best_params)))
        index = int(np.argmax(np.abs(state) ** 2))
        value = float(values[index])
        # optimality gap relative to the objective spread, so near-degenerate
        # instances are judged on the same scale as well-separated ones
        if spread == 0.0 or (value - optimum_value) / spread <= gap:
            successes += 1
            calls.append(trace.n_calls)
    return SuccessSample(rate=successes / trials, calls=tuple(calls), trials=trials)


def measure_success_rate(*args, **kwargs) -> float:
    return measure_success(*args, **kwargs).rate


# ---------------------------------------------------------------- kappa


def kappa_of_state(
    probs: np.ndarray,
    q: QuboMatrix,
    n_shots: int,
    repeats: int,
    rng: np.random.Generator,
) -> float:
    """Shot-normalized estimator std of one state, in units of σ_U."""
    qvec = objective_vector(q)
    estimates = []
    for _ in range(repeats):
        counts = _sample_probs(probs, n_shots, rng)
        estimates.append(float(np.dot(counts, qvec)) / n_shots)
    sigma_u = uniform_loss_std(q)
    return float(np.std(estimates, ddof=1)) * np.sqrt(n_shots) / sigma_u


def _sample_probs(probs: np.ndarray, n_shots: int, rng: np.random.Generator) -> np.ndarray:
    return rng.multinomial(n_shots, probs)


def finite_sampling_coefficient(
    ansatz_spec: AnsatzSpec,
    ns: list[int],
    problem_type: str,
    density: float,
    probes: int,
    seed: int,
    n_shots: int = 256,
    repeats: int = 40,
    param_points: int = 3,
):
    """Measure κ(n) over sizes `ns` and fit κ(n)=a·e^{bn}.

    Returns (KappaFit, {n: κ(n)} measurements).
    """
    from .fits import fit_kappa

    if probes < 1:
        raise ValueError("probe set must be nonempty")
    rng = np.random.default_rng(seed)
    measured: dict[int, float] = {}
    for n in ns:
        values = []
        for _ in range(probes):
            q = make_instance(problem_type, n, density, int(rng.integers(2**31)))
            ansatz = make_ansatz(ansatz_spec, q)
            for _ in range(param_points):
                params = ansatz.initial_params(rng)
                state = simulate_statevector(ansatz.circuit(params))
                probs = np.abs(state) ** 2
                probs /= probs.sum()
                values.append(kappa_of_state(probs, q, n_shots, repeats, rng))
        measured[n] = float(np.mean(values))
    fit = fit_kappa(list(measured), list(measured.values()))
    return fit, measured
