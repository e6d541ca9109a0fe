import math

import numpy as np


def random_spd_moderate(n, rng, spread=2.0):
    """SPD matrix exp(S) with ||S||_2 <= spread; keeps condition numbers tame."""
    s = rng.standard_normal((n, n))
    s = 0.5 * (s + s.T)
    s *= spread / np.max(np.abs(np.linalg.eigvalsh(s)))
    w, q = np.linalg.eigh(s)
    return (q * np.exp(w)) @ q.T


def sample_near(man, center, rng, radius):
    """Point exp_c(u v) with v a unit tangent and u uniform on [0, radius)."""
    v = man.random_unit_tangent(center, rng)
    return man.exp(center, rng.uniform(0, radius) * v)


def ball_radius(man):
    """Sampling radius: the safety radius on the sphere, a few units on SPD."""
    rho = man.safety_radius()
    return rho if math.isfinite(rho) else 3.0
