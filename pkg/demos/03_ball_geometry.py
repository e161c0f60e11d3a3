"""
Ball and annulus intersection volumes
=====================================

The level-set estimators reduce everything to |B(x, rho) inter annulus|
fibers, so these volumes carry the whole accuracy budget.
"""

import math

import numpy as np

from orlicz_levelset.geometry import (
    ball_annulus_intersection,
    ball_ball_intersection,
    unit_ball_volume,
)

print("unit ball volumes omega_N")
for dim in range(1, 8):
    print(f"  N={dim}: {unit_ball_volume(dim):.12f}")

# the classic planar lens: two unit discs, centers one apart
lens = ball_ball_intersection(1.0, 1.0, 1.0, 2)
closed = 2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0
print(f"\nplanar lens d=1, r1=r2=1: {lens:.15f}")
print(f"closed form 2 pi/3 - sqrt(3)/2: {closed:.15f}")

# N=1 is interval arithmetic and makes a transparent oracle
d, r1, r2 = 0.7, 0.5, 0.4
got = ball_ball_intersection(d, r1, r2, 1)
oracle = max(0.0, min(r1, d + r2) - max(-r1, d - r2))
print(f"\nintervals: |[-0.5,0.5] inter [0.3,1.1]| = {got:.15f} (oracle {oracle})")

# containment and tangency come out exact, not approximately
print("\nedge cases, dim=3")
print(f"  disjoint (d=3):      {ball_ball_intersection(3.0, 1.0, 1.0, 3)}")
print(f"  tangent (d=2):       {ball_ball_intersection(2.0, 1.0, 1.0, 3)}")
print(f"  contained (d=0.1):   {ball_ball_intersection(0.1, 2.0, 0.5, 3):.12f}")
print(f"  omega_3 * 0.5^3:     {unit_ball_volume(3) * 0.125:.12f}")

# annuli via inclusion-exclusion; infinite outer radius means complement
v = ball_annulus_intersection(0.5, 1.0, 1.0, math.inf, 1)
print(f"\n|[-0.5,1.5] minus [-1,1]| = {v:.15f} (by hand: 0.5)")

# vectorized over the center distance; monotone decreasing as balls separate
ds = np.linspace(0.0, 2.0, 5)
vols = ball_ball_intersection(ds, 1.0, 1.0, 2)
print("\nlens volume vs center distance (r1=r2=1, dim=2)")
for dd, vv in zip(ds, vols):
    print(f"  d={dd:.2f}: {vv:.9f}")
