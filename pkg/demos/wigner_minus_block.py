"""Wigner function in the rotated coordinates and the minus-block transform.

After the 45 degree rotation (q1, q2) -> (q+, q-) exchanging the particles
touches only the minus pair. On the bra-exchanged state the minus block turns
into a symplectic Fourier transform of the original block at half hbar.
"""

import numpy as np

from phasestat import GridSpec, coherent_state, projector, symplectic_fourier
from phasestat.states import apply_exchange
from phasestat.wigner import (minus_block, verify_wigner_exchange, verify_wminus_exchange, wigner,
                              wigner_rotated)

grid = GridSpec(64, 8.0, 1.0, 2)
rho = projector(coherent_state([0.5 + 0.5j, -0.7 + 0.2j], grid))

W = wigner(rho)
print("integral:", W.integral().real)
print("max |Im W| / max |W|:", W.max_abs_imag_ratio())

# the plus slice through the peak
Wr = wigner_rotated(rho)
M = np.abs(Wr.first_marginal())
a, b = np.unravel_index(np.argmax(M), M.shape)
print("plus peak at q+ = %.3f, p+ = %.3f" % (grid.x[a], grid.xi[b]))

lhs = wigner_rotated(apply_exchange(rho, "U")).second_block(a, b).values
block = minus_block(rho, a, b, refine=2)  # finer, wider block for the half-hbar sum
rhs = symplectic_fourier(block, grid.hbar / 2, q_out=grid.x, p_out=grid.xi).values
print("largest difference:", np.abs(lhs - rhs).max(), "of", np.abs(lhs).max())

print(verify_wigner_exchange(rho, "U"))
print(verify_wigner_exchange(rho, "V"))
print(verify_wminus_exchange(rho, "U", count=20))
