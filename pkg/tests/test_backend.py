import math

import numpy as np
import pytest
from scipy import stats

from qonduct.backend import (
    BackendRecord,
    BackendRegistry,
    Circuit,
    DuplicateId,
    ShotResult,
    SizeMismatch,
    TooManyQubits,
    estimate_expectation,
    exact_expectation,
    sample,
    simulate_statevector,
    to_qasm,
)
from qonduct.problems import QuboMatrix, random_qubo, objective_vector


# --- dense-matrix oracle -----------------------------------------------------

_I = np.eye(2, dtype=complex)


def _gate_matrix(gate):
    name = gate[0]
    if name == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if name == "rx":
        t = gate[2]
        return np.array(
            [[math.cos(t / 2), -1j * math.sin(t / 2)], [-1j * math.sin(t / 2), math.cos(t / 2)]]
        )
    if name == "ry":
        t = gate[2]
        return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]], dtype=complex)
    if name == "rz":
        t = gate[2]
        return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    raise AssertionError(name)


def _embed_single(n, q, m):
    ops = [m if k == q else _I for k in range(n)]
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _embed_cx(n, c, t):
    dim = 2**n
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[c] == 1:
            bits[t] ^= 1
        j = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        u[j, i] = 1.0
    return u


def _embed_rzz(n, q1, q2, theta):
    dim = 2**n
    diag = np.zeros(dim, dtype=complex)
    for i in range(dim):
        b1 = (i >> (n - 1 - q1)) & 1
        b2 = (i >> (n - 1 - q2)) & 1
        sign = 1.0 if b1 == b2 else -1.0
        diag[i] = np.exp(-0.5j * theta * sign)
    return np.diag(diag)


def dense_oracle(circuit: Circuit) -> np.ndarray:
    """Full 2^n x 2^n matrix product, independent of the simulator's kernels."""
    n = circuit.n_qubits
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for g in circuit.gates:
        if g[0] == "cx":
            u = _embed_cx(n, g[1], g[2])
        elif g[0] == "rzz":
            u = _embed_rzz(n, g[1], g[2], g[3])
        else:
            u = _embed_single(n, g[1], _gate_matrix(g))
        state = u @ state
    return state


def random_circuit(n, n_gates, rng) -> Circuit:
    c = Circuit(n)
    kinds = ["h", "rx", "ry", "rz"] + (["cx", "rzz"] if n > 1 else [])
    for _ in range(n_gates):
        kind = rng.choice(kinds)
        q = int(rng.integers(n))
        if kind == "h":
            c.h(q)
        elif kind in ("rx", "ry", "rz"):
            getattr(c, kind)(q, float(rng.uniform(-np.pi, np.pi)))
        else:
            q2 = int(rng.integers(n - 1))
            q2 = q2 if q2 < q else q2 + 1
            if kind == "cx":
                c.cx(q, q2)
            else:
                c.rzz(q, q2, float(rng.uniform(-np.pi, np.pi)))
    return c


class TestStatevector:
    def test_hadamard(self):
        amps = simulate_statevector(Circuit(1).h(0))
        assert np.allclose(amps, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_empty_circuit(self):
        assert np.allclose(simulate_statevector(Circuit(2)), [1, 0, 0, 0])

    def test_bell_state_against_oracle(self):
        c = Circuit(2).h(0).h(1).cx(0, 1)
        assert np.allclose(simulate_statevector(c), dense_oracle(c), atol=1e-12)

    def test_qubit_cap(self):
        with pytest.raises(TooManyQubits):
            simulate_statevector(Circuit(25))

    def test_fifty_random_circuits_match_oracle(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            n = int(rng.integers(1, 7))
            c = random_circuit(n, int(rng.integers(1, 25)), rng)
            got = simulate_statevector(c)
            want = dense_oracle(c)
            assert np.max(np.abs(got - want)) < 1e-10

    def test_norm_preserved_after_every_gate(self):
        rng = np.random.default_rng(5)
        c = random_circuit(4, 30, rng)
        state = np.zeros((2,) * 4, dtype=complex)
        state[(0,) * 4] = 1.0
        from qonduct.backend.simulator import apply_gate

        for g in c.gates:
            state = apply_gate(state, g)
            assert abs(np.linalg.norm(state) - 1.0) < 1e-10


class TestSampling:
    def test_hadamard_frequency(self):
        res = sample(Circuit(1).h(0), 100_000, seed=1)
        assert abs(res.counts.get("1", 0) / 100_000 - 0.5) < 0.01

    def test_empty_circuit_all_zero_string(self):
        res = sample(Circuit(3), 100, seed=0)
        assert res.counts == {"000": 100}

    def test_deterministic_per_seed(self):
        c = Circuit(2).h(0).h(1)
        assert sample(c, 500, seed=9).counts == sample(c, 500, seed=9).counts

    def test_counts_sum_invariant(self):
        with pytest.raises(ValueError):
            ShotResult(counts={"0": 3}, n_shots=5)

    def test_chi_square_against_statevector_distribution(self):
        rng = np.random.default_rng(77)
        c = random_circuit(3, 15, rng)
        probs = np.abs(simulate_statevector(c)) ** 2
        res = sample(c, 100_000, seed=123)
        observed = np.array([res.counts.get(format(i, "03b"), 0) for i in range(8)])
        mask = probs > 1e-12
        chi2 = np.sum((observed[mask] - 100_000 * probs[mask]) ** 2 / (100_000 * probs[mask]))
        # 0.1% significance for dof = number of outcomes - 1
        assert chi2 < stats.chi2.ppf(0.999, df=int(mask.sum()) - 1)


class TestExpectations:
    def test_uniform_superposition_mean(self):
        q = random_qubo(3, 1.0, seed=4)
        c = Circuit(3).h(0).h(1).h(2)
        assert exact_expectation(c, q) == pytest.approx(float(np.mean(objective_vector(q))), abs=1e-10)

    def test_ground_state_is_zero(self):
        q = random_qubo(3, 1.0, seed=4)
        assert exact_expectation(Circuit(3), q) == 0.0

    def test_basis_state_via_x_rotations(self):
        q = random_qubo(3, 1.0, seed=8)
        c = Circuit(3).rx(0, math.pi).rx(2, math.pi)  # |101>
        vals = objective_vector(q)
        assert exact_expectation(c, q) == pytest.approx(vals[0b101], abs=1e-10)

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            exact_expectation(Circuit(2), random_qubo(3, 1.0, seed=0))

    def test_estimate_single_bitstring(self):
        q = QuboMatrix.from_array([[1.0, 2.0], [0.0, 3.0]])
        res = ShotResult(counts={"11": 10}, n_shots=10)
        assert estimate_expectation(res, q) == 6.0

    def test_estimator_mean_matches_exact_within_3_sigma(self):
        q = random_qubo(4, 1.0, seed=3)
        rng = np.random.default_rng(0)
        c = random_circuit(4, 12, rng)
        exact = exact_expectation(c, q)
        n_shots = 512
        estimates = [estimate_expectation(sample(c, n_shots, seed=s), q) for s in range(200)]
        sem = np.std(estimates) / math.sqrt(len(estimates))
        assert abs(np.mean(estimates) - exact) < 3 * sem + 1e-9

    def test_error_decreases_with_shots(self):
        q = random_qubo(4, 1.0, seed=3)
        rng = np.random.default_rng(1)
        c = random_circuit(4, 12, rng)
        exact = exact_expectation(c, q)
        errs = []
        for n_shots in (64, 1024, 16384):
            reps = [abs(estimate_expectation(sample(c, n_shots, seed=s), q) - exact) for s in range(40)]
            errs.append(np.mean(reps))
        assert errs[0] > errs[1] > errs[2]


class TestRegistry:
    def test_register_and_list(self):
        reg = BackendRegistry()
        reg.register(BackendRecord("sim", provider="backend_provider", qubit_count=20))
        assert len(reg.list()) == 1

    def test_duplicate_id(self):
        reg = BackendRegistry()
        reg.register(BackendRecord("sim", provider="p", qubit_count=20))
        with pytest.raises(DuplicateId):
            reg.register(BackendRecord("sim", provider="p", qubit_count=20))

    def test_property_update_visible(self):
        reg = BackendRegistry()
        reg.register(BackendRecord("sim", provider="p", qubit_count=20, properties={"queue_length": 0}))
        reg.update_properties("sim", queue_length=3)
        assert reg.get("sim").properties["queue_length"] == 3


class TestQasm:
    def test_export_contains_declared_gates(self):
        c = Circuit(2, measure_all=True).h(0).rzz(0, 1, 0.5).rx(1, 0.25).cx(0, 1)
        text = to_qasm(c)
        assert "OPENQASM 2.0;" in text
        assert "rzz(0.5) q[0],q[1];" in text
        assert "measure q -> c;" in text
