import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from phasestat.core import DimensionError, DomainError
from phasestat.symplectic import (LinearPhaseMap, builtin, builtin_labels, classify, pm_rotation,
                                  standard_J, substitute, substitute_exact, wminus_map)


def test_identity_is_canonical():
    assert classify(LinearPhaseMap(sp.eye(2), "custom", "q,p")) == "canonical"


def test_husimi_complex_matrix():
    S = builtin("S_c_H")
    assert S.classification == "anticanonical" and S.det == -1


def test_exchange_pair_matrices():
    for label in ("U_complex", "V_complex"):
        assert builtin(label).det == -1
        assert builtin(label).classification == "anticanonical"


def test_wigner_matrices():
    assert builtin("S_c_W").det == 1
    assert builtin("R_quarter").classification == "canonical"
    assert builtin("S_doubled").classification == "canonical"


def test_rotation_preserves_both_forms():
    for R in (pm_rotation(4), pm_rotation(8)):
        assert sp.simplify(R.m.T * R.J() * R.m - R.J()) == sp.zeros(R.dim)


def test_doubled_matrix_pattern():
    S = builtin("S_doubled")
    v = sp.symbols("qp xip pp xp qm xim pm xm")
    out = substitute_exact(S, v)
    assert out[:4] == list(v[:4])
    qm, xim, pm, xm = v[4:]
    assert out[4:] == [xm, -pm, xim, -qm]


def test_substitute_identity_and_numeric():
    I = LinearPhaseMap(sp.eye(4), "custom", "q,xi;p,x")
    v = np.array([0.1, -2.0, 3.5, 0.25])
    assert np.array_equal(substitute(I, v), v)
    assert np.allclose(substitute(builtin("S_c_H"), [1.0, 2.0]), [-2j, 1j])


def test_composition_closure_exhaustive():
    maps = [builtin(k) for k in builtin_labels()] + [pm_rotation(4), wminus_map("U"), wminus_map("V")]
    sign = {"canonical": 1, "anticanonical": -1}
    pairs = 0
    for A, B in itertools.product(maps, repeat=2):
        if A.ordering != B.ordering:
            continue
        pairs += 1
        C = A @ B
        assert sign[C.classification] == sign[A.classification] * sign[B.classification]
        assert sp.simplify(C.det - A.det * B.det) == 0
    assert pairs >= 10


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 3))
def test_numeric_shear_and_scale_are_canonical(b, c, s):
    S = LinearPhaseMap(sp.Matrix([[s, 0], [0, 1 / s]]) * sp.Matrix([[1, b], [0, 1]]), "custom", "q,p")
    assert S.classification == "canonical"
    flip = LinearPhaseMap(sp.Matrix([[1, 0], [c, -1]]), "custom", "q,p")
    assert flip.classification == "anticanonical"


def test_standard_J_groups():
    J = standard_J("q,xi;p,x")
    assert J == sp.Matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])


def test_to_json_fields():
    d = builtin("S_c_H").to_json()
    assert d["det"] == "-1" and d["classification"] == "anticanonical" and d["ordering"] == "q_-,p_-"


def test_errors():
    with pytest.raises(DomainError):
        builtin("nope")
    with pytest.raises(DimensionError):
        pm_rotation(6)
    with pytest.raises(DimensionError):
        substitute(builtin("S_c_H"), [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        builtin("S_c_H") @ builtin("S_c_W")
