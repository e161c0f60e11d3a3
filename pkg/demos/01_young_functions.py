"""
Young functions: evaluation, doubling constants, certification
==============================================================

Walks the shipped convex-gauge families and the checks that guard them.
Run as a plain script; prints only.
"""

import numpy as np

from orlicz_levelset.young import (
    LLogL,
    PiecewiseLinearConvex,
    Power,
    PowerLog,
    certify_young,
    delta2_constant,
    phi_inverse,
)

# the four families; all vanish at 0, convex, nondecreasing
families = {
    "Power(2)": Power(2.0),
    "Power(3.5)": Power(3.5),
    "PowerLog(1)": PowerLog(1.0),
    "LLogL": LLogL(),
}

ts = np.array([0.01, 0.1, 1.0, 10.0])
print("values on a small grid")
for name, phi in families.items():
    print(f"  {name:12s} {phi(ts)}")

# doubling: sup over t of Phi(2t)/Phi(t). Closed forms exist for every
# shipped family; the grid estimate must agree and never exceed them.
print("\ndoubling constants (grid estimate vs closed form)")
for name, phi in families.items():
    d2 = delta2_constant(phi)
    print(f"  {name:12s} estimate {d2.estimate:.6f}   analytic {d2.analytic}")

# certification checks midpoint convexity and monotonicity on a log grid.
# A kinked gauge that dips below its chords fails loudly instead of
# producing garbage level-set numbers later.
good = PiecewiseLinearConvex(((0.0, 0.0), (1.0, 1.0), (2.0, 3.0)))
bad = PiecewiseLinearConvex(((0.0, 0.0), (1.0, 2.0), (2.0, 3.0)))  # concave kink
print("\ncertification")
for name, phi in [("convex piecewise", good), ("concave kink", bad)]:
    rep = certify_young(phi)
    print(f"  {name:16s} midpoint_convex={rep.midpoint_convex} monotone={rep.monotone}")

# inversion: used to pick thresholds that pin a target Phi(t) level
phi = LLogL()
target = 1e-6
t = phi_inverse(phi, target)
print(f"\nphi_inverse: LLogL(t) = {target:g} at t = {t:.6e}, check {phi(t):.3e}")
