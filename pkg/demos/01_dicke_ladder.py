# The Dicke ladder for a handful of atoms, and how population settles on it.
import numpy as np

from dickeradiance import solve
from dickeradiance.dicke import build_basis, degeneracy, ladder_coefficient
from dickeradiance.observables import ladder_distribution

N = 6
basis = build_basis(N)
print("N =", N, "->", basis.size, "Dicke states")  # (N/2+1)^2 for even N
for J, d in basis.sectors:
    print(f"  J={J:3.1f}  degeneracy={d:2d}  states={int(2 * J + 1)}")

# every block counted with its multiplicity rebuilds the full 2^N space
print("sum d(2J+1) =", sum(d * int(2 * J + 1) for J, d in basis.sectors), "= 2^N =", 2**N)

# ladder coefficients: one- and two-step lowering from the top of J = 3
for M in (3, 2, 1, 0):
    a1 = ladder_coefficient(3, M, 1)
    a2 = ladder_coefficient(3, M, 2)
    print(f"  |3,{M:+d}>  A1={a1:.4f}  A2={a2:.4f}")

# degeneracies grow fast; the largest block at N=100 is near J=5
d100 = [degeneracy(100, J) for J in range(0, 51)]
print("largest degeneracy at N=100:", max(d100), "for J =", int(np.argmax(d100)))

# weak pump, two-atom decay: population sinks to small J
dist = ladder_distribution(solve(N, 0.1, 0.0, 1.0))
for (J, M), p in sorted(dist.entries.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  P(J={J}, M={M:+}) = {p:.4f}")
