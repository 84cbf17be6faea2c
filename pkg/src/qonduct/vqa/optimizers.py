"""Classical optimizers driving the variational loop.

Each optimizer minimizes a black-box loss until the runtime's call budget
interrupts it (see :mod:`qonduct.vqa.runtime`); none keeps state between
``minimize`` calls.
"""

from __future__ import annotations

import math

import numpy as np


class OptimizerFailure(RuntimeError):
    pass


class BudgetReached(Exception):
    """Internal control flow: raised by counted losses when the budget is hit."""


class Spsa:
    """Simultaneous perturbation stochastic approximation with standard gains.

    Optionally probes a batch of random starting points first and descends
    from the best ones; rugged variational landscapes reward the extra
    exploration far more than the handful of loss calls it costs.
    """

    def __init__(self, a: float = 1.0, c: float = 0.3, max_iters: int = 200,
                 alpha: float = 0.602, gamma: float = 0.101,
                 init_probes: int = 20, restarts: int = 1):
        if a <= 0 or c <= 0:
            raise OptimizerFailure("SPSA gains a and c must be positive")
        if restarts < 1:
            raise OptimizerFailure("restarts must be >= 1")
        self.a = a
        self.c = c
        self.max_iters = max_iters
        self.alpha = alpha
        self.gamma = gamma
        self.init_probes = init_probes
        self.restarts = restarts

    def _descend(self, loss, x0, rng) -> None:
        x = np.asarray(x0, dtype=float).copy()
        stability = 0.1 * self.max_iters
        for k in range(self.max_iters):
            ck = self.c / (k + 1) ** self.gamma
            ak = self.a / (k + 1 + stability) ** self.alpha
            delta = rng.choice([-1.0, 1.0], size=x.shape)
            y_plus = loss(x + ck * delta)
            y_minus = loss(x - ck * delta)
            ghat = (y_plus - y_minus) / (2.0 * ck) * delta
            x = x - ak * ghat
        loss(x)  # record the final iterate

    def minimize(self, loss, x0, rng: np.random.Generator, grad=None) -> None:
        x0 = np.asarray(x0, dtype=float)
        starts = [x0]
        if self.init_probes > 0:
            probes = [rng.uniform(-np.pi, np.pi, size=x0.shape) for _ in range(self.init_probes)]
            values = [loss(p) for p in probes]
            starts = [probes[i] for i in np.argsort(values)]
        for start in starts[: self.restarts]:
            self._descend(loss, start, rng)


class Nft:
    """Sequential single-parameter sinusoidal updates.

    For rotation gates with half-spectrum generators the loss is a shifted
    sinusoid in each parameter; three evaluations locate its minimum exactly.
    Shared-parameter layers make this a (well-behaved) approximation, so the
    anchor value is re-measured at the start of every sweep.
    """

    def __init__(self, max_sweeps: int = 20):
        self.max_sweeps = max_sweeps

    def minimize(self, loss, x0, rng: np.random.Generator, grad=None) -> None:
        x = np.asarray(x0, dtype=float).copy()
        for _ in range(self.max_sweeps):
            z0 = loss(x)
            for j in range(x.shape[0]):
                shifted = x.copy()
                shifted[j] = x[j] + math.pi / 2
                z1 = loss(shifted)
                shifted[j] = x[j] - math.pi / 2
                z3 = loss(shifted)
                a3 = (z1 + z3) / 2.0
                b_cos = z0 - a3
                b_sin = (z3 - z1) / 2.0
                phi = math.atan2(b_sin, b_cos)
                x[j] = x[j] + phi + math.pi
                z0 = a3 - math.hypot(b_cos, b_sin)
            loss(x)  # measured anchor for the sweep's end point


class ParameterShiftGd:
    """Plain gradient descent on shift-rule gradients supplied by the runtime."""

    def __init__(self, step_length: float = 0.1, max_iters: int = 100):
        if not (0 < step_length <= 1):
            raise OptimizerFailure("step_length must be in (0, 1]")
        self.step_length = step_length
        self.max_iters = max_iters

    def minimize(self, loss, x0, rng: np.random.Generator, grad=None) -> None:
        if grad is None:
            raise OptimizerFailure("parameter-shift gradient descent needs a gradient callback")
        x = np.asarray(x0, dtype=float).copy()
        for _ in range(self.max_iters):
            loss(x)
            g = grad(x)
            x = x - self.step_length * g
        loss(x)
