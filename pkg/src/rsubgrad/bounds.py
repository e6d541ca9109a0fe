"""Curvature-dependent constants, complexity bounds and numerical certificates.

Every bound takes the curvature lower bound ``kappa <= 0`` explicitly.  For
``|kappa| < FLAT_KAPPA_TOL`` the closed forms are replaced by their flat
limits, since they divide by sqrt(|kappa|).  Just above the switch the
arccosh term is evaluated as log1p of a small increment, which keeps full
relative precision as kappa -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import Manifold

FLAT_KAPPA_TOL = 1e-12
CERTIFY_TOL = 1e-7

THEOREMS = (
    "exogenous",       # best gap vs. exogenous complexity bound
    "exogenous-step",  # per-step distance inequality, exogenous steps
    "quasi-fejer",     # d^2 increases by at most C t_k^2 per step
    "radius",          # iterates stay in the boundedness ball
    "polyak",          # best gap vs. Polyak complexity bound
    "polyak-sum",      # sum of squared gaps vs. its N-independent cap
    "polyak-step",     # per-step distance decrease, Polyak steps
)


def _is_flat(kappa: float) -> bool:
    if kappa > 0:
        raise ValueError(f"kappa must be <= 0, got {kappa}")
    return -kappa < FLAT_KAPPA_TOL


def _radius_acosh(sigma: float, kappa: float, d0q: float) -> float:
    """arccosh(cosh(a) e^b), a = sqrt|k| d0q, b = x sinh(x)/2, x = sqrt(sigma |k|)."""
    x = math.sqrt(sigma * -kappa)
    a = math.sqrt(-kappa) * d0q
    b = 0.5 * x * math.sinh(x)
    if a + b > 20.0:
        # arccosh(y) = log(2y) up to 1/(4y^2), and log(2 cosh a) = a + log1p(e^{-2a})
        return a + b + math.log1p(math.exp(-2.0 * a))
    # cosh(a) e^b - 1 without cancellation
    u = math.cosh(a) * math.expm1(b) + 2.0 * math.sinh(0.5 * a) ** 2
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


def c_q_kappa(sigma: float, kappa: float, d0q: float) -> float:
    """Constant multiplying t_k^2 in the exogenous per-step inequality (>= 1)."""
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be finite and positive, got {sigma}")
    if _is_flat(kappa):
        return 1.0
    x = math.sqrt(sigma * -kappa)
    return math.sinh(x) / x * (1.0 + _radius_acosh(sigma, kappa, d0q))


def c_kappa_d0(alpha: float, kappa: float, d0: float) -> float:
    """Polyak decrease constant 2/alpha - x/tanh(x), x = sqrt(|kappa|) d0."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    x = 0.0 if _is_flat(kappa) else math.sqrt(-kappa) * d0
    ratio = 1.0 if x == 0.0 else x / math.tanh(x)
    c = 2.0 / alpha - ratio
    if not c > 0:
        raise ValueError(
            f"alpha={alpha!r} is too large for kappa={kappa}, d0={d0}: constant {c!r} <= 0"
        )
    return c


def boundedness_radius(sigma: float, kappa: float, d0q: float) -> float:
    """Radius of the ball around q that contains every exogenous iterate."""
    if _is_flat(kappa):
        raise ValueError("boundedness_radius needs kappa < 0; use flat_radius")
    return _radius_acosh(sigma, kappa, d0q) / math.sqrt(-kappa)


def flat_radius(sigma: float, d0q: float) -> float:
    return math.sqrt(d0q * d0q + sigma)


def distance_radius(sigma: float, kappa: float, d0q: float) -> float:
    if _is_flat(kappa):
        return flat_radius(sigma, d0q)
    return boundedness_radius(sigma, kappa, d0q)


def exogenous_bound(N: int, t_sequence, tau: float, d0_star: float, C: float) -> float:
    """tau (d0^2 + C sum t_k^2) / (2 sum t_k), sums over k = 0..N."""
    t = np.asarray(t_sequence, dtype=float)[: N + 1]
    if len(t) != N + 1:
        raise ValueError(f"need {N + 1} steps, got {len(t)}")
    return tau * (d0_star**2 + C * float(np.sum(t * t))) / (2.0 * float(np.sum(t)))


def polyak_bound(N: int, tau: float, d0: float, C: float) -> float:
    return tau * d0 / math.sqrt(C * (N + 1))


def polyak_sum_bound(tau: float, d0: float, C: float) -> float:
    return tau * tau * d0 * d0 / C


def certify_lemli(m: Manifold, p, q, s, f_p: float, f_q: float, t: float,
                  kappa: float) -> tuple[float, float]:
    """Margins (rhs - lhs) of the two comparison inequalities along exp_p(-t s/||s||).

    The first compares cosh(sqrt|kappa| d(gamma(t), q)); the second compares
    d^2(gamma(t), q).  ``s`` must be a nonzero subgradient at ``p`` of a convex
    function with values ``f_p`` at p and ``f_q`` at q, and ``kappa < 0`` a lower
    curvature bound of ``m``.
    """
    if not kappa < 0:
        raise ValueError(f"kappa must be negative, got {kappa}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    ns = m.norm(p, s)
    if ns == 0.0:
        raise ValueError("subgradient must be nonzero")
    g = m.exp(p, (-t / ns) * np.asarray(s)) if t > 0 else np.asarray(p)
    k = math.sqrt(-kappa)
    d = m.dist(p, q)
    dg = m.dist(g, q)
    x = k * d
    tanh_ratio = 1.0 if x == 0.0 else math.tanh(x) / x
    drop = (f_p - f_q) / ns

    ch = math.cosh(x)
    rhs1 = ch + k * ch * math.sinh(t * k) * (0.5 * t - tanh_ratio * drop)
    margin_cosh = rhs1 - math.cosh(k * dg)

    rhs2 = d * d + math.sinh(k * t) / k * (t / tanh_ratio - 2.0 * drop)
    margin_sq = rhs2 - dg * dg
    return margin_cosh, margin_sq


@dataclass
class CurvatureConstants:
    """Inputs of the trace certificates.

    ``d_ref`` is d(p_0, q) for the reference point q of the trace; it defaults
    to the first ``dist_ref`` entry.  The reference must be a minimizer.
    """

    kappa: float
    tau: float = 1.0
    sigma: Optional[float] = None
    alpha: Optional[float] = None
    d_ref: Optional[float] = None

    def c_q(self, d_ref: float) -> float:
        if self.sigma is None:
            raise ValueError("sigma is required for exogenous certificates")
        return c_q_kappa(self.sigma, self.kappa, d_ref)

    def c_polyak(self, d_ref: float) -> float:
        if self.alpha is None:
            raise ValueError("alpha is required for Polyak certificates")
        return c_kappa_d0(self.alpha, self.kappa, d_ref)


@dataclass
class BoundReport:
    theorem: str
    N: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    constants: dict = field(default_factory=dict)
    tol: float = CERTIFY_TOL

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margin)) if len(self.N) else math.inf

    @property
    def ok(self) -> bool:
        return self.min_margin >= -self.tol

    @property
    def first_violation(self) -> Optional[int]:
        bad = np.flatnonzero(self.margin < -self.tol)
        return int(self.N[bad[0]]) if len(bad) else None

    def __len__(self):
        return len(self.N)


def _need(arr: np.ndarray, name: str) -> np.ndarray:
    if len(arr) == 0 or np.any(np.isnan(arr)):
        raise ValueError(f"trace column {name!r} is missing or incomplete")
    return arr


def certify_trace(trace, theorem: str, constants: CurvatureConstants) -> BoundReport:
    """Evaluate one certificate on every row (or step) of a trace."""
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    n_rows = len(trace)
    if n_rows == 0:
        raise ValueError("empty trace")
    dists = _need(trace.dists, "dist_ref")
    d0 = constants.d_ref if constants.d_ref is not None else float(dists[0])
    tau = constants.tau
    consts = {"kappa": constants.kappa, "tau": tau, "d_ref": d0}
    N_all = np.arange(n_rows)
    N_step = np.arange(n_rows - 1)

    if theorem in ("exogenous", "exogenous-step", "quasi-fejer", "radius"):
        consts["sigma"] = constants.sigma
    if theorem in ("exogenous", "exogenous-step", "quasi-fejer"):
        C = constants.c_q(d0)
        consts["C"] = C
    elif theorem.startswith("polyak"):
        C = constants.c_polyak(d0)
        consts["alpha"] = constants.alpha
        consts["C"] = C

    if theorem == "exogenous":
        gaps = _need(trace.gaps, "gap")
        t = _need(trace.steps, "step")
        lhs = np.minimum.accumulate(gaps)
        rhs = tau * (d0**2 + C * np.cumsum(t * t)) / (2.0 * np.cumsum(t))
        return BoundReport(theorem, N_all, lhs, rhs, consts)

    if theorem == "radius":
        radius = distance_radius(constants.sigma, constants.kappa, d0)
        consts["radius"] = radius
        return BoundReport(theorem, N_all, dists, np.full(n_rows, radius), consts)

    if theorem == "polyak":
        gaps = _need(trace.gaps, "gap")
        lhs = np.minimum.accumulate(gaps)
        rhs = tau * d0 / np.sqrt(C * (N_all + 1))
        return BoundReport(theorem, N_all, lhs, rhs, consts)

    if theorem == "polyak-sum":
        gaps = _need(trace.gaps, "gap")
        lhs = np.cumsum(gaps * gaps)
        return BoundReport(theorem, N_all, lhs, np.full(n_rows, polyak_sum_bound(tau, d0, C)), consts)

    # per-step certificates over transitions p_N -> p_{N+1}
    t = _need(trace.steps[:-1], "step")
    d2 = dists * dists
    lhs = d2[1:]
    if theorem == "quasi-fejer":
        rhs = d2[:-1] + C * t * t
    elif theorem == "exogenous-step":
        gaps = _need(trace.gaps[:-1], "gap")
        ns = _need(trace.subgrad_norms[:-1], "subgrad_norm")
        rhs = d2[:-1] + C * t * t - 2.0 * t / ns * gaps
    else:  # polyak-step
        rhs = d2[:-1] - C * t * t
    return BoundReport(theorem, N_step, lhs, rhs, consts)
