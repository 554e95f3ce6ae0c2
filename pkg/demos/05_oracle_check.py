# Reduced solver against the brute-force 2^N density matrix.
import numpy as np

from dickeradiance import solve
from dickeradiance.dicke import build_basis
from dickeradiance.oracle import full_atomic_liouvillian, full_steady_state, project_to_dicke, swap_atoms
from dickeradiance.verify import adiabatic_elimination

N = 4
gp, g1, g2 = 0.8, 0.5, 1.2
full = full_steady_state(full_atomic_liouvillian(N, gp, g1, g2))
projected, coherence = project_to_dicke(full, build_basis(N))
reduced = solve(N, gp, g1, g2)

print("max population difference:", np.abs(projected.p - reduced.p).max())
print("coherence left after projection:", coherence)
print("atoms 0 <-> 3 swap changes rho by", np.abs(swap_atoms(full, 0, 3) - full.rho).max())

# cavity model vs. the eliminated two-atom decay
for ratio in (0.05, 0.02):
    print(adiabatic_elimination(coupling_ratio=ratio).line())
