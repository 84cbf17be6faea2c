"""Fitting machinery for the scaling database.

Three layers: a logistic fit of success-versus-noise curves yielding the
optimizer tolerance threshold ε*(n) at the 50% success level, weighted linear
fits of ε*(n) under three decay hypotheses, and an exponential fit of the
finite-sampling coefficient κ(n). Shot estimates invert ε_FS = κ/√n_shots < ε*
with delta-method uncertainty bounds at 95%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

HYPOTHESES = ("exponential", "power_law", "logarithmic")
VALIDITY_R2 = 0.8
Z95 = 1.959963984540054


class NoCrossing(ValueError):
    """Success never drops below 50%: the threshold lies beyond the tested range."""


class NeverSucceeds(ValueError):
    """Success never reaches 50%: no threshold exists at this size."""


class DegenerateFit(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdPoint:
    n: int
    epsilon_star: float
    std_error: float  # std of ε* itself
    trials: int
    success_curve: tuple[tuple[float, float], ...]

    @property
    def var_log(self) -> float:
        """Variance of ln ε*, used as fit weight."""
        if self.epsilon_star <= 0:
            return 0.0
        return (self.std_error / self.epsilon_star) ** 2

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon_star": self.epsilon_star,
            "std_error": self.std_error,
            "trials": self.trials,
            "success_curve": [list(pair) for pair in self.success_curve],
        }

    @staticmethod
    def from_dict(raw: dict) -> "ThresholdPoint":
        return ThresholdPoint(
            n=int(raw["n"]),
            epsilon_star=float(raw["epsilon_star"]),
            std_error=float(raw["std_error"]),
            trials=int(raw["trials"]),
            success_curve=tuple((float(e), float(s)) for e, s in raw["success_curve"]),
        )


@dataclass(frozen=True)
class HypothesisFit:
    """One decay hypothesis fitted to ε*(n).

    `params` holds (A, B) of the hypothesis form; `covariance` is the 2×2
    covariance of the linear fit parameters (ln A, B) for the exponential and
    power-law forms and of (A, B) for the logarithmic form.
    """

    hypothesis: str
    params: tuple[float, float]
    covariance: tuple[tuple[float, float], ...]
    r_squared: float
    fitted_n_range: tuple[int, int]

    @property
    def valid(self) -> bool:
        return self.r_squared >= VALIDITY_R2 and self.params[1] > 0

    def to_dict(self) -> dict:
        return {
            "hypothesis": self.hypothesis,
            "A": self.params[0],
            "B": self.params[1],
            "covariance": [list(row) for row in self.covariance],
            "r_squared": self.r_squared,
            "fitted_n_range": list(self.fitted_n_range),
            "valid": self.valid,
        }

    @staticmethod
    def from_dict(raw: dict) -> "HypothesisFit":
        return HypothesisFit(
            hypothesis=raw["hypothesis"],
            params=(float(raw["A"]), float(raw["B"])),
            covariance=tuple(tuple(float(v) for v in row) for row in raw["covariance"]),
            r_squared=float(raw["r_squared"]),
            fitted_n_range=tuple(raw["fitted_n_range"]),
        )


@dataclass(frozen=True)
class KappaFit:
    """κ(n) = a·exp(b·n); covariance over (ln a, b)."""

    a: float
    b: float
    covariance: tuple[tuple[float, float], ...] = ((0.0, 0.0), (0.0, 0.0))

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b,
                "covariance": [list(row) for row in self.covariance]}

    @staticmethod
    def from_dict(raw: dict) -> "KappaFit":
        return KappaFit(
            a=float(raw["a"]),
            b=float(raw["b"]),
            covariance=tuple(tuple(float(v) for v in row) for row in raw["covariance"]),
        )


# ---------------------------------------------------------------- threshold


def fit_threshold(success_curve, n: int = 0, trials: int = 0) -> ThresholdPoint:
    """Fit s(ε) = 1/(1+exp((ln ε − ln ε*)/w)); ε* is the 50% crossing."""
    curve = sorted((float(e), float(s)) for e, s in success_curve)
    eps = np.array([e for e, _ in curve])
    rates = np.array([s for _, s in curve])
    if np.any(eps <= 0):
        raise ValueError("noise levels must be positive")
    distinct = np.unique(eps)
    if len(distinct) < 4:
        raise ValueError("need at least 4 distinct noise levels")
    if distinct.max() / distinct.min() < 10.0:
        raise ValueError("noise levels must span at least one decade")
    if rates.max() < 0.5:
        raise NeverSucceeds(f"max success rate {rates.max():.3f} < 0.5")
    if rates.min() >= 0.5:
        raise NoCrossing(f"min success rate {rates.min():.3f} >= 0.5")

    log_eps = np.log(eps)

    def model(x, mu, w):
        return 1.0 / (1.0 + np.exp((x - mu) / w))

    # starting crossing: first noise level where the rate drops below 0.5
    below = np.nonzero(rates < 0.5)[0][0]
    mu0 = log_eps[below] if below == 0 else 0.5 * (log_eps[below - 1] + log_eps[below])
    try:
        popt, pcov = curve_fit(
            model, log_eps, rates, p0=[mu0, 0.5],
            bounds=([log_eps.min() - 10, 1e-4], [log_eps.max() + 10, 100.0]),
            maxfev=10000,
        )
    except RuntimeError as exc:
        raise DegenerateFit(str(exc)) from exc
    mu, _w = popt
    var_mu = float(pcov[0, 0]) if np.isfinite(pcov[0, 0]) else 0.0
    epsilon_star = float(np.exp(mu))
    std_error = epsilon_star * math.sqrt(max(var_mu, 0.0))
    return ThresholdPoint(
        n=n, epsilon_star=epsilon_star, std_error=std_error,
        trials=trials, success_curve=tuple(curve),
    )


# ---------------------------------------------------------------- scaling


def _weighted_linear(x: np.ndarray, y: np.ndarray, var_y: np.ndarray):
    """WLS of y = c0 + c1·x. Returns (c0, c1), 2×2 covariance, R²."""
    if len(x) < 3:
        raise DegenerateFit("need at least 3 points")
    if np.ptp(x) == 0:
        raise DegenerateFit("all abscissae identical")
    w = np.where(var_y > 0, 1.0 / np.maximum(var_y, 1e-300), 1.0)
    if np.any(var_y <= 0):
        w = np.ones_like(x)  # exact points: unweighted
    X = np.column_stack([np.ones_like(x), x])
    A = X.T @ (w[:, None] * X)
    try:
        Ainv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise DegenerateFit("singular design") from exc
    beta = Ainv @ (X.T @ (w * y))
    resid = y - X @ beta
    dof = len(x) - 2
    ss_res = float(np.sum(w * resid**2))
    ybar = float(np.sum(w * y) / np.sum(w))
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    if ss_tot <= 0:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = max(0.0, 1.0 - ss_res / ss_tot)
    scale = ss_res / dof if dof > 0 else 0.0
    cov = Ainv * scale
    return (float(beta[0]), float(beta[1])), cov, r2


def fit_scaling(points: list[ThresholdPoint], hypothesis: str) -> HypothesisFit:
    if hypothesis not in HYPOTHESES:
        raise ValueError(f"unknown hypothesis '{hypothesis}'")
    pts = sorted(points, key=lambda p: p.n)
    ns = np.array([p.n for p in pts], dtype=float)
    eps = np.array([p.epsilon_star for p in pts])
    var_log = np.array([p.var_log for p in pts])

    if hypothesis == "exponential":
        x, y, var_y = ns, np.log(eps), var_log
    elif hypothesis == "power_law":
        x, y, var_y = np.log(ns), np.log(eps), var_log
    else:  # logarithmic: ε* = A − B·ln n, fitted on the raw scale
        x, y = np.log(ns), eps
        var_y = np.array([p.std_error**2 for p in pts])

    (c0, c1), cov, r2 = _weighted_linear(x, y, var_y)
    # slope is −B in every form; intercept is ln A (exp/power) or A (log)
    B = -c1
    A = math.exp(c0) if hypothesis in ("exponential", "power_law") else c0
    # flip the slope sign in the covariance: cov(u, B) = −cov(u, slope)
    covariance = (
        (float(cov[0, 0]), float(-cov[0, 1])),
        (float(-cov[1, 0]), float(cov[1, 1])),
    )
    return HypothesisFit(
        hypothesis=hypothesis,
        params=(A, B),
        covariance=covariance,
        r_squared=r2,
        fitted_n_range=(int(pts[0].n), int(pts[-1].n)),
    )


def epsilon_star_at(fit: HypothesisFit, n: float) -> float:
    A, B = fit.params
    if fit.hypothesis == "exponential":
        return A * math.exp(-B * n)
    if fit.hypothesis == "power_law":
        return A * n**-B
    return A - B * math.log(n)


def _var_log_epsilon(fit: HypothesisFit, n: float) -> float:
    (v00, v01), (_, v11) = fit.covariance
    if fit.hypothesis == "exponential":
        x = n
    else:
        x = math.log(n)
    if fit.hypothesis in ("exponential", "power_law"):
        # ln ε* = ln A − B·x
        return max(0.0, v00 + x * x * v11 - 2 * x * v01)
    eps = epsilon_star_at(fit, n)
    if eps <= 0:
        return 0.0
    var_eps = max(0.0, v00 + x * x * v11 - 2 * x * v01)
    return var_eps / eps**2


# ---------------------------------------------------------------- kappa/calls


def fit_kappa(ns, kappas) -> KappaFit:
    """Fit κ(n) = a·e^{bn} from measured coefficients (linear in ln κ)."""
    ns = np.asarray(ns, dtype=float)
    kappas = np.asarray(kappas, dtype=float)
    if np.any(kappas <= 0):
        raise DegenerateFit("kappa values must be positive to fit")
    (c0, c1), cov, _ = _weighted_linear(ns, np.log(kappas), np.zeros_like(ns))
    covariance = tuple(tuple(float(v) for v in row) for row in cov)
    return KappaFit(a=math.exp(c0), b=c1, covariance=covariance)


def kappa_at(fit: KappaFit, n: float) -> float:
    return fit.a * math.exp(fit.b * n)


def _var_log_kappa(fit: KappaFit, n: float) -> float:
    (v00, v01), (_, v11) = fit.covariance
    return max(0.0, v00 + n * n * v11 + 2 * n * v01)


def fit_calls(ns, calls) -> tuple[float, float]:
    """Fit n_calls(n) = C·n^γ; returns (C, γ). Falls back to a flat mean."""
    ns = np.asarray(ns, dtype=float)
    calls = np.asarray(calls, dtype=float)
    keep = calls > 0
    if keep.sum() < 3 or np.ptp(ns[keep]) == 0:
        mean = float(calls[keep].mean()) if keep.any() else 1.0
        return (max(mean, 1.0), 0.0)
    (c0, c1), _, _ = _weighted_linear(
        np.log(ns[keep]), np.log(calls[keep]), np.zeros(int(keep.sum()))
    )
    return (math.exp(c0), c1)


def calls_at(params: tuple[float, float], n: float) -> float:
    C, gamma = params
    return C * n**gamma


# ---------------------------------------------------------------- inversion


def estimate_shots(
    fit: HypothesisFit, kappa: KappaFit, n_target: float
) -> tuple[float, float, float]:
    """Minimum shots so κ(n)/√n_shots < ε*(n), with 95% bounds.

    Returns (point, low, high); all three are +inf when the hypothesis puts
    ε* at or below zero for n_target (infinite requirement).
    """
    eps = epsilon_star_at(fit, n_target)
    if eps <= 0:
        return (math.inf, math.inf, math.inf)
    kap = kappa_at(kappa, n_target)
    log_point = 2.0 * (math.log(kap) - math.log(eps))
    var_log = 4.0 * (_var_log_kappa(kappa, n_target) + _var_log_epsilon(fit, n_target))
    sigma = math.sqrt(var_log)
    def shots(log_value: float) -> float:
        # exp() overflows float range well before the requirement is truly
        # infinite; saturate instead of raising
        try:
            return float(math.ceil(math.exp(log_value)))
        except OverflowError:
            return math.inf

    return (shots(log_point), shots(log_point - Z95 * sigma), shots(log_point + Z95 * sigma))
