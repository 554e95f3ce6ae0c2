# Equal-time photon correlations from ladder moments.
import math

import numpy as np

from dickeradiance.dicke import CircuitParams, ModelParams, build_basis, build_generator, effective_rates, steady_state
from dickeradiance.observables import observables

two_pi = 2 * math.pi

# circuit numbers: all in 2pi*Hz
cp = CircuitParams(two_pi * 20e6, two_pi * 20e6, two_pi * 200e6, two_pi * 1.6e6, two_pi * 10e3, 100)
lam, gamma_2 = effective_rates(cp)
print(f"lambda/2pi = {lam / two_pi:.6g} Hz, Gamma_2/2pi = {gamma_2 / two_pi:.6g} Hz")

# pump at 1 kHz
state = steady_state(build_generator(build_basis(100), ModelParams(100, two_pi * 1e3, 0.0, gamma_2)))
print("g2_2(0) at gamma_p/2pi = 1 kHz:", round(observables(state).g2_2, 4))

# two-atom decay always bunches; look for the super-bunching peak
grid = np.logspace(-2, 6, 49)
g = []
for r in grid:
    g.append(observables(steady_state(build_generator(build_basis(100), ModelParams(100, r, 0.0, 1.0)))).g2_2)
g = np.array(g)
i = int(np.argmax(g))
print(f"g2_2 ranges over [{g.min():.3f}, {g.max():.3f}], peak at gp/G2 = {grid[i]:.3g}")

# single-atom decay gets close to coherent light in the superradiant window
g1 = [observables(steady_state(build_generator(build_basis(100), ModelParams(100, r, 1.0)))).g2_1 for r in grid]
j = int(np.argmin(np.abs(np.array(g1) - 1)))
print(f"closest g2_1 to 1: {g1[j]:.4f} at gp/G1 = {grid[j]:.3g}")
