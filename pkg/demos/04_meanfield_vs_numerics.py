# Second-order mean-field against the exact reduced solver (single-atom decay).
import numpy as np

from dickeradiance import solve
from dickeradiance.meanfield import mf_evolve, mf_observables, mf_steady_state
from dickeradiance.observables import observables

for N in (10, 100):
    print(f"N = {N}")
    print("   gp/G1     <J+J->mf    <J+J->exact   rel.dev")
    for r in np.logspace(-2, 2, 9):
        jpjm_mf, _, _ = mf_observables(mf_steady_state(N, r, 1.0), N)
        exact = observables(solve(N, r, 1.0, 0.0)).jpjm
        print(f"{r:9.3g} {jpjm_mf:12.5g} {exact:12.5g} {abs(jpjm_mf - exact) / exact:9.2%}")

# the closure is worst near gamma_p ~ N Gamma_1 for large N

# relaxation from the ground state, mean-field dynamics
tr = mf_evolve(50, 5.0, 1.0, (-1.0, 0.0, 1.0), 5.0, n_points=6)
for t, sz, c in zip(tr.t, tr.sig_z, tr.sig_corr):
    print(f"t={t:4.1f}  sigma_z={sz:+.5f}  corr={c:+.3e}")
print("closed-form steady state:", mf_steady_state(50, 5.0, 1.0))
