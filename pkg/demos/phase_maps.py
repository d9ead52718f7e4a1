"""The linear maps behind the exchange identities.

Each is kept as an exact sympy matrix with the coordinate ordering it acts
on, so determinants and the canonical/anticanonical test are decided exactly.
"""

import sympy as sp

from phasestat.symplectic import builtin, builtin_labels, pm_rotation, substitute_exact, wminus_map

for label in builtin_labels():
    S = builtin(label)
    print(f"{label:10s} {S.ordering:36s} det {str(S.det):3s} {S.classification}")

# the rotation preserves the form in both orderings
for R in (pm_rotation(4), pm_rotation(8)):
    print(R.ordering, sp.simplify(R.m.T * R.J() * R.m - R.J()) == sp.zeros(R.dim))

# how the W- identity moves its arguments
q, xi, p, x = sp.symbols("q_- xi_- p_- x_-")
print("U:", substitute_exact(wminus_map("U"), [q, xi, p, x]))
print("V:", substitute_exact(wminus_map("V"), [q, xi, p, x]))

# products of two anticanonical maps are canonical
P = builtin("U_complex") @ builtin("V_complex")
print(P.m, P.classification)
