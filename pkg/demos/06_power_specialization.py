"""
Power-law specialization cross-check
====================================

With Phi(t) = t^p the gauge drops out and the level set is the plain
p-power difference-quotient set. Two independently coded routes (the
generic Orlicz path and a direct power path) share sample streams, so
they must agree to near machine precision pointwise, and their common
limit is 2 omega_N * integral |u|^p.
"""

import math

from orlicz_levelset.level_sets import direct_power_weighted, phi_weighted
from orlicz_levelset.radial_functions import Gaussian
from orlicz_levelset.sweeps import gu_yung_specialize, make_t_grid
from orlicz_levelset.young import Power

g = Gaussian(1.0, 1.0, dim=1)

# pointwise: identical seeds, identical numbers
print("route agreement at fixed thresholds (shared seed 123, 100k pairs)")
for t in (0.05, 0.02, 0.01):
    a = phi_weighted(
        g, Power(2.0), t, method="monte_carlo_full",
        mc_samples=100_000, seed=123, truncation_radius=6.0,
    )
    b = direct_power_weighted(
        g, 2.0, t, method="monte_carlo_full",
        mc_samples=100_000, seed=123, truncation_radius=6.0,
    )
    rel = abs(a.value - b.value) / abs(b.value)
    print(f"  t={t:<6} orlicz {a.value:.12f}  direct {b.value:.12f}  rel gap {rel:.1e}")

# the bundled verdict runs both sweeps and checks the limit too.
# closed forms: p=1 -> 4 sqrt(pi), p=2 -> 4 sqrt(pi/2)
print("\nfull specialization verdicts (500k pairs per threshold)")
for p, closed in ((1.0, 4.0 * math.sqrt(math.pi)), (2.0, 4.0 * math.sqrt(math.pi / 2.0))):
    v = gu_yung_specialize(
        g, p, make_t_grid(0.05, 0.005, 5),
        method="monte_carlo_full", budget=500_000, seed=31, truncation_radius=6.0,
    )
    print(f"  p={p:g} (closed-form limit {closed:.6f})")
    print(f"    passed={v.passed}  {v.detail}")
