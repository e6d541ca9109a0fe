"""Riemannian subgradient iteration with exogenous and Polyak step sizes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .convex import SubgradientOracle
from .geometry import Manifold, ManifoldError

BASEL_SIGMA = math.pi**2 / 6

STOP_MODES = ("subgradient", "feasibility", "gap")


class SolverError(RuntimeError):
    """A geometric failure inside the iteration; ``iteration`` is the index k."""

    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


def exogenous_default(k: int) -> float:
    """Step 1/(k+1); its squares sum to pi^2/6."""
    return 1.0 / (k + 1)


def polyak_step(value: float, f_star: float, subgrad_norm: float, alpha: float) -> float:
    if not subgrad_norm > 0:
        raise ValueError("Polyak step needs a nonzero subgradient")
    if value < f_star:
        raise ValueError(f"value {value!r} is below the optimal value {f_star!r}")
    return alpha * (value - f_star) / subgrad_norm


def polyak_alpha_upper(kappa: float, d_hat: float) -> float:
    """Supremum of admissible Polyak factors, 2 tanh(x)/x with x = sqrt(|kappa|) d_hat."""
    if kappa > 0:
        raise ValueError(f"kappa must be <= 0, got {kappa}")
    if d_hat < 0:
        raise ValueError(f"d_hat must be nonnegative, got {d_hat}")
    x = math.sqrt(-kappa) * d_hat
    if x == 0.0:
        return 2.0
    return 2.0 * math.tanh(x) / x


@dataclass(frozen=True)
class Exogenous:
    """Predetermined steps t_k = sequence(k) with finite sum of squares ``sigma``."""

    sequence: Callable[[int], float] = exogenous_default
    sigma: float = BASEL_SIGMA

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be finite and positive, got {self.sigma}")

    def step(self, k: int, value: float, subgrad_norm: float, f_star=None) -> float:
        t = float(self.sequence(k))
        if not t > 0:
            raise ValueError(f"exogenous step t_{k} = {t} is not positive")
        return t


@dataclass(frozen=True)
class Polyak:
    """Polyak steps alpha (f(p_k) - f*) / ||s_k||.

    ``d_hat`` overestimates the distance from the start to the solution set;
    ``kappa`` is the curvature bound entering the admissible range of alpha.
    When ``f_star`` is None the oracle's optimal value is used.
    """

    alpha: float
    d_hat: float
    kappa: float = 0.0
    f_star: Optional[float] = None

    def __post_init__(self):
        upper = polyak_alpha_upper(self.kappa, self.d_hat)
        if not 0 < self.alpha < upper:
            raise ValueError(
                f"alpha={self.alpha!r} outside (0, {upper!r}) for "
                f"kappa={self.kappa}, d_hat={self.d_hat}"
            )

    @classmethod
    def from_factor(cls, factor: float, d_hat: float, kappa: float = 0.0,
                    alpha_kappa: float | None = None, f_star=None) -> "Polyak":
        """alpha = factor * tanh(x)/x, x = sqrt(|alpha_kappa|) d_hat.

        ``alpha_kappa`` defaults to ``kappa``.  A factor just below 2 gives the
        largest admissible step.
        """
        ak = kappa if alpha_kappa is None else alpha_kappa
        alpha = factor * 0.5 * polyak_alpha_upper(ak, d_hat)
        return cls(alpha=alpha, d_hat=d_hat, kappa=kappa, f_star=f_star)

    def step(self, k: int, value: float, subgrad_norm: float, f_star=None) -> float:
        fs = self.f_star if self.f_star is not None else f_star
        if fs is None:
            raise ValueError("Polyak step needs the optimal value f*")
        return polyak_step(value, fs, subgrad_norm, self.alpha)


StepSizeRule = Exogenous | Polyak


@dataclass
class SolverConfig:
    max_iterations: int = 1000
    stop_mode: str = "feasibility"
    gap_tol: float = 1e-8
    seed: int = 0
    reference: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.stop_mode not in STOP_MODES:
            raise ValueError(f"stop_mode must be one of {STOP_MODES}, got {self.stop_mode!r}")


@dataclass
class IterateRecord:
    k: int
    point: np.ndarray
    value: float
    step: float
    subgrad_norm: float
    gap: float
    dist_ref: float
    best_value: float


@dataclass
class IterateTrace:
    """Per-iteration record of a run.  ``gap``/``dist_ref`` are NaN when unknown."""

    records: list[IterateRecord] = field(default_factory=list)
    reason: str = ""
    f_star: Optional[float] = None
    lipschitz: Optional[float] = None

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def values(self):
        return self.column("value")

    @property
    def steps(self):
        return self.column("step")

    @property
    def gaps(self):
        return self.column("gap")

    @property
    def dists(self):
        return self.column("dist_ref")

    @property
    def subgrad_norms(self):
        return self.column("subgrad_norm")

    @property
    def points(self):
        return [r.point for r in self.records]

    @property
    def iterations(self) -> int:
        """Number of steps taken."""
        return len(self.records) - 1


def subgradient_step(m: Manifold, p, s, t: float) -> np.ndarray:
    """exp_p(-t s / ||s||): a geodesic move of length t against the subgradient."""
    if not t > 0:
        raise ValueError(f"step size must be positive, got {t}")
    ns = m.norm(p, s)
    if ns == 0.0:
        raise ValueError("zero subgradient: the stop test should have fired")
    return m.exp(p, (-t / ns) * np.asarray(s))


def run(
    m: Manifold,
    oracle: SubgradientOracle,
    p0,
    rule: StepSizeRule,
    config: SolverConfig | None = None,
) -> IterateTrace:
    """Run the subgradient method from ``p0``.

    The subgradient s_k is evaluated before the step t_k so Polyak steps can
    use ||s_k||.  The run stops when the stop mode is satisfied, when s_k = 0,
    or after ``config.max_iterations`` steps.
    """
    config = config or SolverConfig()
    f_star = oracle.f_star
    if isinstance(rule, Polyak):
        if rule.f_star is None and f_star is None:
            raise ValueError("Polyak rule requires a known optimal value")
        if rule.f_star is not None:
            f_star = rule.f_star
    if config.stop_mode == "gap" and f_star is None:
        raise ValueError("gap stop mode requires a known optimal value")
    try:
        p = m.check_point(p0).copy()
    except ManifoldError as exc:
        raise SolverError(str(exc), 0) from exc
    ref = config.reference

    trace = IterateTrace(f_star=f_star, lipschitz=oracle.lipschitz)
    best = math.inf
    for k in range(config.max_iterations + 1):
        try:
            ev = oracle(p)
            ns = m.norm(p, ev.subgradient)
            d_ref = m.dist(p, ref) if ref is not None else math.nan
        except ManifoldError as exc:
            raise SolverError(str(exc), k) from exc
        gap = ev.value - f_star if f_star is not None else math.nan
        best = min(best, ev.value)

        reason = ""
        if config.stop_mode == "feasibility" and ev.value <= 0:
            reason = "feasible at start" if k == 0 else "feasible"
        elif config.stop_mode == "gap" and gap <= config.gap_tol:
            reason = "gap tolerance reached"
        elif ns == 0.0:
            reason = "zero subgradient"
        elif k == config.max_iterations:
            reason = "max iterations"

        if isinstance(rule, Exogenous):
            t = rule.step(k, ev.value, ns)
        elif ns > 0:
            t = rule.step(k, ev.value, ns, f_star)
        else:
            t = math.nan
        if not reason and not t > 0:
            reason = "zero step"

        trace.records.append(
            IterateRecord(k, p, ev.value, t, ns, gap, d_ref, best)
        )
        if reason:
            trace.reason = reason
            return trace
        try:
            p = subgradient_step(m, p, ev.subgradient, t)
        except ManifoldError as exc:
            raise SolverError(str(exc), k) from exc
    raise AssertionError("unreachable")
