"""
Geodesics on the sphere and on SPD matrices
===========================================

Both manifolds expose the same handful of operations: exp, log, dist,
inner and norm.  This walk-through checks a few of them by hand.
"""

import math

import numpy as np

from rsubgrad import SPD, Sphere

rng = np.random.default_rng(0)

# the unit sphere in R^3: a quarter turn from e1 towards e2 lands on e2
s = Sphere(3)
e = np.eye(3)
print("exp_e1(pi/2 e2) =", np.round(s.exp(e[0], math.pi / 2 * e[1]), 15))
print("d(e1, e2)       =", s.dist(e[0], e[1]), "(pi/2 =", math.pi / 2, ")")

# log is the inverse of exp, as long as we stay away from the antipode
x = s.random_point(rng)
v = 2.0 * s.random_unit_tangent(x, rng)
print("round trip error on the sphere:", np.linalg.norm(s.log(x, s.exp(x, v)) - v))

# SPD matrices with the affine-invariant metric
m = SPD(3)
print("d(I, 2I) =", m.dist(np.eye(3), 2 * np.eye(3)), "= sqrt(3) log 2 =", math.sqrt(3) * math.log(2))

a, b = m.random_point(rng), m.random_point(rng)
g = rng.standard_normal((3, 3))
print("d(a, b)             =", m.dist(a, b))
print("d(g^T a g, g^T b g) =", m.dist(g.T @ a @ g, g.T @ b @ g))

# walking along the geodesic from a to b covers distance proportionally
w = m.log(a, b)
for t in (0.25, 0.5, 1.0):
    print(f"t={t:4}: d(a, exp_a(t w)) / d(a, b) = {m.dist(a, m.exp(a, t * w)) / m.dist(a, b):.12f}")

# curvature data used by the complexity constants
for man in (s, m):
    print(f"{man.kind:6s} kappa={man.kappa} K={man.K} injectivity={man.injectivity_radius}")
