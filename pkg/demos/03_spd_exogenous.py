"""
Balls of SPD matrices with exogenous steps
==========================================

Ten geodesic balls of radius 1 in 10x10 SPD matrices share a common point.
The subgradient method with t_k = 1/(k+1) finds a point in their
intersection, and the best gap stays under the exogenous complexity bound.
"""

import math

import numpy as np

from rsubgrad import (CurvatureConstants, Exogenous, SolverConfig, boundedness_radius,
                      certify_trace, generate_spd, run)

inst = generate_spd(seed=0)
man = inst.manifold
trace = run(man, inst.oracle(), inst.p0, Exogenous(), SolverConfig(reference=inst.q))
print(f"{trace.reason} after {trace.iterations} iterations")
print("f along the run:", np.round(trace.values[:8], 3), "...")

constants = CurvatureConstants(kappa=man.kappa, sigma=math.pi**2 / 6)
report = certify_trace(trace, "exogenous", constants)
print(f"bound holds on all {len(report)} rows: {report.ok} (min margin {report.min_margin:.4f})")
for row in (0, len(report) // 2, len(report) - 1):
    print(f"  N={report.N[row]:3d}  best gap {report.lhs[row]:.4f}  bound {report.rhs[row]:.4f}")

# every iterate stays in the boundedness ball around q
radius = boundedness_radius(math.pi**2 / 6, man.kappa, trace.dists[0])
print(f"max d(p_k, q) = {trace.dists.max():.3f} <= radius {radius:.3f}")
