"""Closed-form geometry of the unit sphere and the affine-invariant SPD manifold.

Points and tangent vectors are plain numpy arrays in the ambient
representation: unit vectors in R^n for the sphere, symmetric n x n matrices
for SPD(n).  A tangent vector is always passed together with its base point.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
import scipy.linalg

POINT_TOL = 1e-10
EIGENVALUE_FLOOR = 1e-12
ANTIPODAL_TOL = 1e-10

# Sectional curvature of the affine-invariant metric lies in [-1/2, 0].
SPD_KAPPA = -0.5


class ManifoldError(ValueError):
    """Invalid input to a geometric operation."""


class NotPositiveDefiniteError(ManifoldError):
    pass


class AntipodalPointsError(ManifoldError):
    """Raised when no unique minimal geodesic joins two sphere points."""


def sym(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.T)


def spectral_apply(
    func: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    floor: float | None = None,
) -> np.ndarray:
    """Apply a scalar function to a symmetric matrix through its eigenbasis.

    Parameters
    ----------
    func : callable
        Vectorized scalar function applied to the eigenvalues.
    x : ndarray, shape (n, n)
        Symmetric matrix.
    floor : float, optional
        If given, every eigenvalue must exceed it (use for log and sqrt).

    Returns
    -------
    ndarray, shape (n, n)
        ``Q func(L) Q^T``, symmetrized.
    """
    w, q = np.linalg.eigh(x)
    if floor is not None and w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {w[0]:.3e} is below the floor {floor:.0e}"
        )
    return sym((q * func(w)) @ q.T)


def _sqrt_and_isqrt(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, q = np.linalg.eigh(x)
    if w[0] <= EIGENVALUE_FLOOR:
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {w[0]:.3e} is below the floor {EIGENVALUE_FLOOR:.0e}"
        )
    sw = np.sqrt(w)
    return sym((q * sw) @ q.T), sym((q / sw) @ q.T)


class Manifold:
    """Common interface; see :class:`Sphere` and :class:`SPD`.

    Attributes
    ----------
    kind : str
        ``"sphere"`` or ``"spd"``.
    n : int
        Ambient dimension (vector length or matrix order).
    kappa : float
        Lower bound on sectional curvature used by the complexity bounds.
    K : float
        Upper bound on sectional curvature.
    injectivity_radius : float
    """

    kind: str
    K: float
    injectivity_radius: float

    def __init__(self, n: int, kappa: float):
        if n < 1:
            raise ManifoldError(f"dimension must be positive, got {n}")
        if kappa > 0:
            raise ManifoldError(f"curvature lower bound must be <= 0, got {kappa}")
        self.n = int(n)
        self.kappa = float(kappa)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, kappa={self.kappa})"

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.n == other.n
            and self.kappa == other.kappa
        )

    def __hash__(self):
        return hash((self.kind, self.n, self.kappa))

    @property
    def shape(self) -> tuple[int, ...]:
        raise NotImplementedError

    def _check_shape(self, x, what="point"):
        x = np.asarray(x, dtype=float)
        if x.shape != self.shape:
            raise ManifoldError(
                f"{what} has shape {x.shape}, expected {self.shape} for {self!r}"
            )
        return x

    def norm(self, p, v) -> float:
        return math.sqrt(max(self.inner(p, v, v), 0.0))

    def zero_tangent(self, p) -> np.ndarray:
        return np.zeros(self.shape)

    def safety_radius(self) -> float:
        return safety_radius(self)


class Sphere(Manifold):
    """Unit sphere S^{n-1} in R^n with the round metric."""

    kind = "sphere"
    K = 1.0
    injectivity_radius = math.pi

    def __init__(self, n: int):
        super().__init__(n, 0.0)

    def __repr__(self):
        return f"Sphere(n={self.n})"

    @property
    def shape(self):
        return (self.n,)

    def check_point(self, x) -> np.ndarray:
        x = self._check_shape(x)
        err = abs(np.linalg.norm(x) - 1.0)
        if not err <= POINT_TOL:
            raise ManifoldError(f"point is off the sphere by {err:.3e}")
        return x

    def check_tangent(self, x, v) -> np.ndarray:
        v = self._check_shape(v, "tangent")
        err = abs(float(v @ x))
        if not err <= POINT_TOL * max(1.0, np.linalg.norm(v)):
            raise ManifoldError(f"tangent is not orthogonal to its base ({err:.3e})")
        return v

    def proj(self, x, u) -> np.ndarray:
        """Orthogonal projection of an ambient vector onto T_x S."""
        return u - (x @ u) * x

    def inner(self, x, u, v) -> float:
        return float(np.dot(u, v))

    def norm(self, x, v) -> float:
        return float(np.linalg.norm(v))

    def exp(self, x, v) -> np.ndarray:
        x = self._check_shape(x)
        v = self._check_shape(v, "tangent")
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return x.copy()
        y = math.cos(nv) * x + (math.sin(nv) / nv) * v
        return y / np.linalg.norm(y)

    def _split(self, x, y):
        c = float(x @ y)
        w = y - c * x
        # second pass removes the residual component along x
        w = w - (x @ w) * x
        return c, w

    def log(self, x, y) -> np.ndarray:
        x = self._check_shape(x)
        y = self._check_shape(y)
        c, w = self._split(x, y)
        if c < -1.0 + ANTIPODAL_TOL:
            raise AntipodalPointsError("points are (nearly) antipodal")
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return np.zeros(self.shape)
        theta = math.atan2(nw, c)
        return (theta / nw) * w

    def dist(self, x, y) -> float:
        x = self._check_shape(x)
        y = self._check_shape(y)
        c, w = self._split(x, y)
        return math.atan2(float(np.linalg.norm(w)), c)

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        x = rng.standard_normal(self.n)
        return x / np.linalg.norm(x)

    def random_tangent(self, x, rng: np.random.Generator) -> np.ndarray:
        return self.proj(x, rng.standard_normal(self.n))

    def random_unit_tangent(self, x, rng: np.random.Generator) -> np.ndarray:
        v = self.random_tangent(x, rng)
        return v / np.linalg.norm(v)


class SPD(Manifold):
    """Symmetric positive-definite n x n matrices, metric tr(V X^-1 U X^-1)."""

    kind = "spd"
    K = 0.0
    injectivity_radius = math.inf

    def __init__(self, n: int, kappa: float = SPD_KAPPA):
        super().__init__(n, kappa)

    @property
    def shape(self):
        return (self.n, self.n)

    def check_point(self, x) -> np.ndarray:
        x = self._check_shape(x)
        asym = float(np.max(np.abs(x - x.T)))
        if not asym <= POINT_TOL * max(1.0, float(np.max(np.abs(x)))):
            raise ManifoldError(f"point is not symmetric (asymmetry {asym:.3e})")
        w = np.linalg.eigvalsh(x)
        if not w[0] > 0:
            raise NotPositiveDefiniteError(f"point has eigenvalue {w[0]:.3e} <= 0")
        return x

    def check_tangent(self, x, v) -> np.ndarray:
        v = self._check_shape(v, "tangent")
        asym = float(np.max(np.abs(v - v.T)))
        if not asym <= POINT_TOL * max(1.0, float(np.max(np.abs(v)))):
            raise ManifoldError(f"tangent is not symmetric (asymmetry {asym:.3e})")
        return v

    def proj(self, x, u) -> np.ndarray:
        return sym(u)

    def inner(self, x, u, v) -> float:
        x = self._check_shape(x)
        a = np.linalg.solve(x, u)
        b = np.linalg.solve(x, v)
        return float(np.sum(a * b.T))

    def norm(self, x, v) -> float:
        _, isq = _sqrt_and_isqrt(self._check_shape(x))
        return float(np.linalg.norm(isq @ v @ isq))

    def exp(self, x, v) -> np.ndarray:
        x = self._check_shape(x)
        v = self._check_shape(v, "tangent")
        sq, isq = _sqrt_and_isqrt(x)
        e = spectral_apply(np.exp, sym(isq @ v @ isq))
        return sym(sq @ e @ sq)

    def log(self, x, y) -> np.ndarray:
        x = self._check_shape(x)
        y = self._check_shape(y)
        sq, isq = _sqrt_and_isqrt(x)
        ell = spectral_apply(np.log, sym(isq @ y @ isq), floor=EIGENVALUE_FLOOR)
        return sym(sq @ ell @ sq)

    def dist(self, x, y) -> float:
        x = self._check_shape(x)
        y = self._check_shape(y)
        # generalized eigenvalues of (y, x) are the spectrum of x^{-1/2} y x^{-1/2}
        try:
            w = scipy.linalg.eigh(y, x, eigvals_only=True)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(str(exc)) from exc
        if w[0] <= EIGENVALUE_FLOOR:
            raise NotPositiveDefiniteError(
                f"smallest eigenvalue {w[0]:.3e} is below the floor {EIGENVALUE_FLOOR:.0e}"
            )
        return float(np.linalg.norm(np.log(w)))

    def random_point(
        self, rng: np.random.Generator, low: float = 0.0, high: float = 100.0
    ) -> np.ndarray:
        return random_spd(self.n, rng, low, high)

    def random_tangent(self, x, rng: np.random.Generator) -> np.ndarray:
        return sym(rng.standard_normal(self.shape))

    def random_unit_tangent(self, x, rng: np.random.Generator) -> np.ndarray:
        sq, _ = _sqrt_and_isqrt(self._check_shape(x))
        s = sym(rng.standard_normal(self.shape))
        s /= np.linalg.norm(s)
        # ||x^{1/2} s x^{1/2}||_x = ||s||_F
        return sym(sq @ s @ sq)


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random orthogonal matrix from the QR factorization of a Gaussian matrix."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def random_symmetric(
    n: int, rng: np.random.Generator, low: float, high: float
) -> np.ndarray:
    """Symmetric matrix with eigenvalues drawn uniformly from (low, high)."""
    q = haar_orthogonal(n, rng)
    w = rng.uniform(low, high, size=n)
    return sym((q * w) @ q.T)


def random_spd(
    n: int, rng: np.random.Generator, low: float = 0.0, high: float = 100.0
) -> np.ndarray:
    if low < 0:
        raise ManifoldError("SPD spectrum must be nonnegative")
    w = np.zeros(1)
    while np.min(w) <= EIGENVALUE_FLOOR:
        q = haar_orthogonal(n, rng)
        w = rng.uniform(low, high, size=n)
    return sym((q * w) @ q.T)


def safety_radius(m: Manifold) -> float:
    """Half the minimum of the injectivity radius and pi / (2 sqrt(K)).

    ``1/sqrt(K)`` is taken as infinite when ``K <= 0``.
    """
    return _safety_radius(m.injectivity_radius, m.K)


def _safety_radius(inj: float, K: float) -> float:
    focal = math.inf if K <= 0 else math.pi / (2.0 * math.sqrt(K))
    return 0.5 * min(inj, focal)


def random_unit_tangent(m: Manifold, p, rng: np.random.Generator) -> np.ndarray:
    return m.random_unit_tangent(p, rng)


def make_manifold(kind: str, n: int, kappa: float | None = None) -> Manifold:
    if kind == "sphere":
        if kappa not in (None, 0.0):
            raise ManifoldError("the sphere's curvature lower bound is fixed at 0")
        return Sphere(n)
    if kind == "spd":
        return SPD(n, SPD_KAPPA if kappa is None else kappa)
    raise ManifoldError(f"unknown manifold kind {kind!r}")
