# Sub-, super- and uncorrelated radiance for N=100 under two-atom decay.
import numpy as np

from dickeradiance import solve
from dickeradiance.observables import observables

N = 100
ratios = np.logspace(-2, 6, 17)  # gamma_p / Gamma_2

print(" gp/G2       R_f     sigma_z    xi2")
for r in ratios:
    o = observables(solve(N, r, 0.0, 1.0))
    tag = "sub" if o.r_f < -0.01 else ("super" if o.r_f > 0.01 else "")
    print(f"{r:9.3g} {o.r_f:+8.4f} {o.sigma_z:+8.4f} {o.xi2:8.4f}  {tag}")

# same axis, single-atom decay: the subradiant window is much narrower
for channel, (g1, g2) in (("Gamma_1", (1.0, 0.0)), ("Gamma_2", (0.0, 1.0))):
    grid = np.logspace(-2, 2, 81)
    neg = np.mean([observables(solve(N, r, g1, g2)).r_f < 0 for r in grid])
    print(f"{channel}-only: R_f < 0 on {neg:.0%} of [1e-2, 1e2]")
