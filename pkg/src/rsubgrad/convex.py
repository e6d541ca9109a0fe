"""Subgradient oracles for geodesic distance functions and their max-composites."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Manifold

# below this distance p and a are treated as the same point
COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class OracleEvaluation:
    value: float
    subgradient: np.ndarray
    active_index: Optional[int] = None


class SubgradientOracle:
    """A convex function together with a rule selecting one subgradient.

    Attributes
    ----------
    manifold : Manifold
    lipschitz : float
        Lipschitz constant of the function; bounds every returned subgradient.
    f_star : float or None
        Optimal value, when known.
    """

    def __init__(self, manifold: Manifold, lipschitz: float, f_star: float | None = None):
        self.manifold = manifold
        self.lipschitz = float(lipschitz)
        self.f_star = None if f_star is None else float(f_star)

    def __call__(self, p) -> OracleEvaluation:
        raise NotImplementedError

    def value(self, p) -> float:
        return self(p).value


def _unit_distance_gradient(m: Manifold, p, a):
    """Value d(p, a) and the subgradient -log_p(a) / d(p, a) (zero at p = a)."""
    d = m.dist(p, a)
    if d <= COINCIDENT_TOL:
        return d, m.zero_tangent(p)
    v = m.log(p, a)
    nv = m.norm(p, v)
    if nv == 0.0:
        return d, m.zero_tangent(p)
    # normalize by the tangent norm so the unit length is exact
    return d, -v / nv


class DistanceOracle(SubgradientOracle):
    """f(p) = d(p, a)."""

    def __init__(self, manifold: Manifold, center):
        super().__init__(manifold, lipschitz=1.0, f_star=0.0)
        self.center = np.asarray(center, dtype=float)

    def __call__(self, p) -> OracleEvaluation:
        value, s = _unit_distance_gradient(self.manifold, p, self.center)
        return OracleEvaluation(value, s, 0)


class FeasibilityOracle(SubgradientOracle):
    """f(p) = max{d(p, a_1) - r - eps, ..., d(p, a_m) - r - eps, -eps}.

    The returned subgradient belongs to the first index attaining the max.
    When the constant branch wins (including ties with it) the zero tangent
    is returned and ``active_index`` is None.
    """

    def __init__(self, manifold: Manifold, centers: Sequence, r: float, eps: float):
        if len(centers) == 0:
            raise ValueError("at least one center is required")
        if r <= 0 or eps <= 0:
            raise ValueError(f"r and eps must be positive, got r={r}, eps={eps}")
        super().__init__(manifold, lipschitz=1.0, f_star=-eps)
        self.centers = [np.asarray(a, dtype=float) for a in centers]
        self.r = float(r)
        self.eps = float(eps)

    def components(self, p) -> np.ndarray:
        """Values f_i(p) = d(p, a_i) - r - eps for every center."""
        m = self.manifold
        return np.array([m.dist(p, a) for a in self.centers]) - self.r - self.eps

    def __call__(self, p) -> OracleEvaluation:
        fi = self.components(p)
        i = int(np.argmax(fi))
        if not fi[i] > -self.eps:
            return OracleEvaluation(-self.eps, self.manifold.zero_tangent(p), None)
        _, s = _unit_distance_gradient(self.manifold, p, self.centers[i])
        return OracleEvaluation(float(fi[i]), s, i)


def dist_oracle(m: Manifold, a) -> DistanceOracle:
    return DistanceOracle(m, a)


def feasibility_oracle(m: Manifold, centers, r: float, eps: float) -> FeasibilityOracle:
    return FeasibilityOracle(m, centers, r, eps)


def check_subgradient(m: Manifold, oracle: SubgradientOracle, p, q) -> float:
    """Margin of the subgradient inequality f(q) >= f(p) + <s, log_p q>.

    A valid subgradient gives a nonnegative margin up to round-off.
    """
    ev = oracle(p)
    fq = oracle.value(q)
    return fq - ev.value - m.inner(p, ev.subgradient, m.log(p, q))
