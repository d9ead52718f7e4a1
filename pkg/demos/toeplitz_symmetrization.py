"""Building bosonic and fermionic states from a positive phase-space symbol.

Quantize a Gaussian symbol h, average it over the exchanges and check that
both averages are positive, symmetric (or antisymmetric) and that their
traces add up as they should. We work in the one-particle relative picture,
where U and V are the reflections x -> -x on the bra and the ket.
"""

import numpy as np

from phasestat import GaussianSymbol, GridSpec, symmetrize, toeplitz_quantize
from phasestat.statistics import check_state, kernel_trace, trace_sum_rule
from phasestat.toeplitz import cross_check_UH, offdiag_trace, toeplitz_kernel

grid = GridSpec(64, 8.0, 1.0, 1)
h = GaussianSymbol([1.0], [[0.7 + 0.4j]], [0.5]).normalized()
H = toeplitz_quantize(h, grid)
print("trace H:", kernel_trace(H, grid).real, "(expected", h.trace_value().real, ")")

# U H three ways: reflected kernel, off-diagonal quantizer, continued symbol
print(cross_check_UH(h, grid))
print("trace UH:", offdiag_trace(h).real)

for kind in ("bosonic", "fermionic"):
    r = check_state(symmetrize(H, kind), kind, grid)
    d = r.details
    print(f"{kind:9s} lambda_min {d['lambda_min']:+.2e}  residuals {d['residual_U']:.1e} "
          f"{d['residual_V']:.1e}  trace {d['trace'][0]:.6f}")

# the two traces are not 1 each; their sum is fixed
print(trace_sum_rule(H, grid))

# the closed-form kernel works as well, with no quadrature at all
K = toeplitz_kernel(h)
x = np.linspace(-2, 2, 5)
print(np.round(K(x, -x), 6))
