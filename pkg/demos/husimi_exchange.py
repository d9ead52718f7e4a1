"""Husimi functions of two-particle states under exchange of one slot.

Swapping the particles on the bra side only (U) is not a relabelling of
phase space: it changes the Husimi function by a Gaussian weight and moves
one argument to the complex continuation. Here we watch that happen on a
coherent product state, and then use it to tell bosons from fermions.
"""

import numpy as np

from phasestat import GridSpec, coherent_state, coherent_superposition, projector
from phasestat.husimi import (bosonic_check_husimi, husimi, husimi_integral, husimi_two_point,
                              verify_husimi_exchange)
from phasestat.states import apply_exchange

grid = GridSpec(n=64, L=8.0, hbar=1.0, particles=2)
a, b = 0.5 + 0.5j, -0.7 + 0.2j

# a product of coherent states, one particle at a and one at b
rho = projector(coherent_state([a, b], grid))
print("trace:", abs(husimi_integral(rho)))

# H[rho] peaks at (a, b) with height (2 pi hbar)^-2
print("peak:", husimi(rho, [a, b]).real, (2 * np.pi) ** -2)

# exchanging on the bra side gives a complex, smaller function
Z = np.array([[0.2 + 0.3j, -0.1 - 0.2j]])
print("H[U rho](Z)  =", husimi(apply_exchange(rho, "U"), Z))

# the same number from the unexchanged state: swap z, keep z-bar, add the weight
d = Z[:, 0] - Z[:, 1]
rhs = np.exp(-np.conj(d) * d / 2) * husimi_two_point(rho, Z[:, ::-1], Z)
print("weight * H[rho](sigma Z, Zbar) =", rhs)

for which in "UV":
    print(verify_husimi_exchange(rho, which=which, count=100))

# symmetric and antisymmetric pairs: only the bosonic one satisfies both identities
for sign, name in [(1, "bosonic"), (-1, "fermionic")]:
    pair = projector(coherent_superposition([1, sign], [[a, b], [b, a]], grid))
    r = bosonic_check_husimi(pair)
    print(f"{name:9s} residual {r.max_rel_err:.2e}")
