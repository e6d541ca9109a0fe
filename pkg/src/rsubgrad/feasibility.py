"""Seeded convex feasibility instances: intersections of geodesic balls.

Each instance hides a point q and places the centers a_i on the sphere of
radius r around it, so every ball B[a_i, r + eps] contains B[q, eps].  With
the objective max{d(p, a_i) - r - eps, -eps}, q is a minimizer and f* = -eps.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .convex import FeasibilityOracle
from .geometry import (
    SPD,
    Manifold,
    ManifoldError,
    Sphere,
    random_spd,
    random_symmetric,
    safety_radius,
)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass
class FeasibilityInstance:
    manifold: Manifold
    centers: list
    r: float
    eps: float
    q: np.ndarray
    p0: np.ndarray
    seed: int
    lam: Optional[float] = None

    @property
    def m(self) -> int:
        return len(self.centers)

    def oracle(self) -> FeasibilityOracle:
        return FeasibilityOracle(self.manifold, self.centers, self.r, self.eps)

    def check(self, tol: float = 1e-8) -> None:
        """Raise AssertionError unless every center lies at distance r from q."""
        man = self.manifold
        rho = safety_radius(man)
        for i, a in enumerate(self.centers):
            d = man.dist(self.q, a)
            if abs(d - self.r) > tol:
                raise AssertionError(f"center {i}: d(q, a_i) = {d!r}, expected {self.r!r}")
            if not d < rho:
                raise AssertionError(f"center {i} is outside the safety radius {rho}")


def place_center(m: Manifold, q, v, r: float) -> np.ndarray:
    """exp_q(r v / ||v||)."""
    if m.K > 0 and not r < safety_radius(m):
        raise ManifoldError(f"r={r} must be below the safety radius {safety_radius(m)}")
    nv = m.norm(q, v)
    if nv == 0.0:
        raise ManifoldError("direction must be nonzero")
    return m.exp(q, (r / nv) * np.asarray(v))


def generate_spd(n: int = 10, m: int = 10, r: float = 1.0, eps: float = 0.1,
                 seed: int = 0, kappa: float | None = None) -> FeasibilityInstance:
    """q and p0 with spectra in (0, 100); directions with spectra in (-100, 100)."""
    if n < 2 or m < 1:
        raise ValueError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    man = SPD(n) if kappa is None else SPD(n, kappa)
    rng = make_rng(seed)
    q = random_spd(n, rng, 0.0, 100.0)
    p0 = random_spd(n, rng, 0.0, 100.0)
    centers = [place_center(man, q, random_symmetric(n, rng, -100.0, 100.0), r)
               for _ in range(m)]
    return FeasibilityInstance(man, centers, float(r), float(eps), q, p0, seed)


def generate_sphere(n: int = 200, m: int = 50, r: float = math.pi / 16,
                    eps: float = 0.001, seed: int = 0,
                    lam: float | None = None) -> FeasibilityInstance:
    """q = (1,...,1)/sqrt(n); p0 = exp_q(lam (pi/8) v/||v||).

    ``lam`` is drawn uniformly from (0, 1) when not given.
    """
    if n < 2 or m < 1:
        raise ValueError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    man = Sphere(n)
    if not 0 < r < safety_radius(man):
        raise ValueError(f"r={r} must lie in (0, pi/4)")
    rng = make_rng(seed)
    q = np.full(n, 1.0 / math.sqrt(n))
    centers = [place_center(man, q, man.random_tangent(q, rng), r) for _ in range(m)]
    v = man.random_unit_tangent(q, rng)
    drawn = rng.uniform(0.0, 1.0)
    lam = drawn if lam is None else float(lam)
    if not 0 <= lam < 1:
        raise ValueError(f"lambda must lie in [0, 1), got {lam}")
    p0 = man.exp(q, (lam * math.pi / 8) * v)
    return FeasibilityInstance(man, centers, float(r), float(eps), q, p0, seed, lam)


def generate(kind: str, seed: int = 0, **params) -> FeasibilityInstance:
    if kind == "spd":
        return generate_spd(seed=seed, **params)
    if kind == "sphere":
        return generate_sphere(seed=seed, **params)
    raise ValueError(f"unknown manifold kind {kind!r}")


def is_feasible(instance: FeasibilityInstance, p) -> bool:
    fi = instance.oracle().components(p)
    return bool(np.max(fi) <= 0.0)
