"""
Distance functions and their subgradients
=========================================

The feasibility objective is a max of shifted distance functions.  Its
subgradient at p is the unit vector pointing away from the farthest ball.
"""

import numpy as np

from rsubgrad import check_subgradient, dist_oracle, generate_spd

rng = np.random.default_rng(2024)
inst = generate_spd(n=4, m=5, seed=1)
man, oracle = inst.manifold, inst.oracle()

p = man.random_point(rng)
ev = oracle(p)
print("f(p) =", ev.value)
print("active ball:", ev.active_index, " |s| =", man.norm(p, ev.subgradient))
print("per-ball values:", np.round(oracle.components(p), 4))

# q sits on every sphere of radius r, so f(q) = -eps up to rounding
print("f(q) + eps =", oracle(inst.q).value + inst.eps)

# the subgradient inequality f(y) >= f(p) + <s, log_p y> on random pairs
margins = [check_subgradient(man, oracle, man.random_point(rng), man.random_point(rng))
           for _ in range(200)]
print("smallest subgradient margin over 200 pairs:", min(margins))

# a single distance function has unit-norm subgradients except at its center
d = dist_oracle(man, inst.centers[0])
print("|s| away from center:", man.norm(p, d(p).subgradient))
print("|s| at the center:  ", man.norm(inst.centers[0], d(inst.centers[0]).subgradient))
