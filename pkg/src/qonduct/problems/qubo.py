"""QUBO matrices and exact reference operations.

The binary objective is ``sum_{i<=j} x_i Q_ij x_j``. Matrices are stored in
upper-triangular-plus-diagonal convention: on ingestion any lower-triangular
entry ``Q_ji`` is folded into ``Q_ij``, so equivalent symmetric inputs hash
and count identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BRUTE_FORCE_CAP = 20


class InvalidDensity(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class QuboMatrix:
    """Square real matrix defining the objective x^T Q x.

    ``entries`` is always upper-triangular (including the diagonal); use
    :meth:`from_array` to ingest arbitrary square input.
    """

    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"QUBO matrix must be square, got shape {m.shape}")
        if m.shape[0] < 1:
            raise ValueError("QUBO matrix must have at least one variable")
        if not np.all(np.isfinite(m)):
            raise ValueError("QUBO matrix entries must be finite")
        if np.any(np.tril(m, -1) != 0.0):
            raise ValueError(
                "entries below the diagonal must be zero; use QuboMatrix.from_array"
            )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_array(cls, raw) -> "QuboMatrix":
        """Symmetrize arbitrary square input into the canonical storage form."""
        m = np.asarray(raw, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"QUBO matrix must be square, got shape {m.shape}")
        folded = np.triu(m) + np.tril(m, -1).T
        return cls(folded)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def density(self) -> float:
        """Fraction of nonzero entries among the n(n+1)/2 upper-triangular slots."""
        slots = self.n * (self.n + 1) // 2
        nonzero = int(np.count_nonzero(self.entries))
        return nonzero / slots

    def to_list(self) -> list:
        return self.entries.tolist()


def _as_bits(x) -> np.ndarray:
    bits = np.asarray(x, dtype=int)
    if bits.ndim != 1 or not np.all((bits == 0) | (bits == 1)):
        raise ValueError(f"expected a flat 0/1 vector, got {x!r}")
    return bits


def qubo_objective(Q: QuboMatrix, x) -> float:
    """Evaluate sum_{i<=j} x_i Q_ij x_j for one bitstring."""
    bits = _as_bits(x)
    if bits.shape[0] != Q.n:
        raise LengthMismatch(f"bitstring length {bits.shape[0]} != n={Q.n}")
    return float(bits @ Q.entries @ bits)


def all_bitstrings(n: int) -> np.ndarray:
    """All 2^n bitstrings as a (2^n, n) array; row index is the binary value."""
    idx = np.arange(2**n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int8)


def objective_vector(Q: QuboMatrix) -> np.ndarray:
    """Objective of every bitstring, indexed by binary value (MSB = qubit 0)."""
    if Q.n > BRUTE_FORCE_CAP:
        raise TooLarge(f"n={Q.n} exceeds enumeration cap {BRUTE_FORCE_CAP}")
    bits = all_bitstrings(Q.n).astype(float)
    return np.einsum("bi,ij,bj->b", bits, Q.entries, bits)


def brute_force_optimum(Q: QuboMatrix, cap: int = BRUTE_FORCE_CAP) -> tuple[tuple[int, ...], float]:
    """Exhaustive minimum over all 2^n bitstrings.

    Ties are broken by the lowest binary value of x (MSB = variable 0).
    """
    if Q.n > cap:
        raise TooLarge(f"n={Q.n} exceeds brute-force cap {cap}")
    vals = objective_vector(Q)
    best = int(np.argmin(vals))  # argmin returns the first (lowest) index on ties
    bits = tuple(int(b) for b in all_bitstrings(Q.n)[best])
    return bits, float(vals[best])


def random_qubo(n: int, density: float, seed: int) -> QuboMatrix:
    """Seeded random QUBO with the requested upper-triangular fill fraction.

    The number of nonzero slots is round(density * n(n+1)/2), at least one;
    values are uniform in [-1, 1].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 < density <= 1.0):
        raise InvalidDensity(f"density must be in (0, 1], got {density}")
    slots = n * (n + 1) // 2
    k = max(1, round(density * slots))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(slots, size=k, replace=False)
    iu, ju = np.triu_indices(n)
    m = np.zeros((n, n))
    values = rng.uniform(-1.0, 1.0, size=k)
    values[values == 0.0] = 0.5  # zero draws have measure zero but would break the count
    m[iu[chosen], ju[chosen]] = values
    return QuboMatrix(m)


def uniform_loss_std(Q: QuboMatrix) -> float:
    """Population std of the objective under uniform random bitstrings.

    Used to normalize injected noise levels and finite-sampling errors.
    """
    vals = objective_vector(Q)
    return float(np.sqrt(np.mean(vals**2) - np.mean(vals) ** 2))


def greedy_descent(Q: QuboMatrix, seed: int = 0, restarts: int = 8) -> tuple[tuple[int, ...], float]:
    """Deterministic multi-start single-bit-flip descent.

    Classical fallback for instances above the brute-force cap; exact for
    n = 1 and a heuristic otherwise.
    """
    rng = np.random.default_rng(seed)
    n = Q.n
    sym = Q.entries + Q.entries.T - np.diag(np.diag(Q.entries))
    best_bits: np.ndarray | None = None
    best_val = math.inf
    for _ in range(restarts):
        x = rng.integers(0, 2, size=n).astype(float)
        val = float(x @ Q.entries @ x)
        improved = True
        while improved:
            improved = False
            # delta of flipping bit i: (1-2x_i) * (sum_j sym_ij x_j excl. diag + Q_ii)
            field_ = sym @ x - np.diag(sym) * x + np.diag(Q.entries)
            deltas = (1 - 2 * x) * field_
            i = int(np.argmin(deltas))
            if deltas[i] < -1e-12:
                x[i] = 1 - x[i]
                val += deltas[i]
                improved = True
        if val < best_val:
            best_val = val
            best_bits = x.copy()
    assert best_bits is not None
    return tuple(int(b) for b in best_bits), float(best_val)
