"""Linear phase maps with exact canonical/anticanonical classification.

Matrices are held as :class:`sympy.Matrix` so that entries such as ``i`` and
``1/sqrt 2`` stay exact; determinants and ``S^T J S`` comparisons are then
decided symbolically. Matrices containing floats fall back to a 1e-14
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import sympy as sp

from .core import DimensionError, DomainError

__all__ = [
    "LinearPhaseMap",
    "standard_J",
    "classify",
    "builtin",
    "builtin_labels",
    "substitute",
    "wminus_map",
    "pm_rotation",
]

LABELS = ("S_c_H", "S_c_W", "R_quarter", "S_doubled", "U_complex", "V_complex", "custom")
NUMERIC_TOL = 1e-14


def standard_J(ordering: str) -> sp.Matrix:
    """Block symplectic form for an ordering string.

    The ordering is a comma-separated coordinate list grouped into conjugate
    pairs as written, e.g. ``"q,p"``, ``"q_i,q_j,p_i,p_j"`` (blocks ``(q, p)``)
    or ``"q,xi,p,x"`` (pairs ``(q, xi)`` and ``(p, x)``). The form pairs the
    first half of each group with the second half of the same group.
    """
    groups = [g.strip() for g in ordering.split(";")]
    blocks = []
    for g in groups:
        k = len(g.split(","))
        if k % 2:
            raise DimensionError(f"odd coordinate group {g!r}")
        h = k // 2
        I = sp.eye(h)
        Z = sp.zeros(h)
        blocks.append(sp.Matrix(sp.BlockMatrix([[Z, I], [-I, Z]])))
    return sp.diag(*blocks)


@dataclass(frozen=True)
class LinearPhaseMap:
    """Square complex matrix acting on a documented coordinate ordering.

    ``ordering`` lists the coordinates; groups separated by ``;`` carry their
    own ``[[0, I], [-I, 0]]`` block of the symplectic form.
    """

    m: sp.Matrix
    label: str = "custom"
    ordering: str = ""
    note: str = field(default="", compare=False)

    def __post_init__(self):
        m = sp.Matrix(self.m)
        if m.rows != m.cols:
            raise DimensionError("a phase map is square")
        if self.label not in LABELS:
            raise DomainError(f"unknown label {self.label!r}")
        object.__setattr__(self, "m", sp.ImmutableMatrix(m))
        if self.ordering and len(self.ordering.replace(";", ",").split(",")) != m.rows:
            raise DimensionError("ordering length does not match the matrix size")

    @property
    def dim(self) -> int:
        return self.m.rows

    @property
    def exact(self) -> bool:
        return not any(e.has(sp.Float) for e in self.m)

    def J(self) -> sp.Matrix:
        if self.ordering:
            return standard_J(self.ordering)
        if self.dim % 2:
            raise DimensionError("classification needs an even dimension")
        h = self.dim // 2
        return sp.Matrix(sp.BlockMatrix([[sp.zeros(h), sp.eye(h)], [-sp.eye(h), sp.zeros(h)]]))

    @cached_property
    def det(self):
        return sp.nsimplify(sp.simplify(self.m.det())) if self.exact else self.m.det()

    @cached_property
    def classification(self) -> str:
        return _classify(self)

    def numeric(self) -> np.ndarray:
        M = np.array(self.m.evalf(), dtype=complex)
        return M.real if np.all(M.imag == 0) else M

    def __matmul__(self, other: "LinearPhaseMap") -> "LinearPhaseMap":
        if self.ordering != other.ordering:
            raise DimensionError("composition needs matching orderings")
        return LinearPhaseMap(self.m * other.m, "custom", self.ordering)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "ordering": self.ordering,
            "matrix": [[str(sp.nsimplify(e)) for e in self.m.row(i)] for i in range(self.dim)],
            "det": str(self.det),
            "classification": self.classification,
            "note": self.note,
        }


def _is_zero(M: sp.Matrix, exact: bool) -> bool:
    if exact:
        return all(sp.simplify(sp.expand(e)) == 0 for e in M)
    return bool(np.abs(np.array(M.evalf(), dtype=complex)).max() <= NUMERIC_TOL)


def _classify(S: LinearPhaseMap) -> str:
    if S.dim % 2:
        raise DimensionError("classification needs an even dimension")
    J = S.J()
    F = S.m.T * J * S.m
    if _is_zero(F - J, S.exact):
        return "canonical"
    if _is_zero(F + J, S.exact):
        return "anticanonical"
    return "neither"


def classify(S: LinearPhaseMap) -> str:
    """``canonical`` if ``S^T J S = J``, ``anticanonical`` if ``= -J``, else ``neither``."""
    return _classify(S)


def substitute(S: LinearPhaseMap, v) -> np.ndarray:
    """``S v`` for an argument vector (or a stack of them along the last axis)."""
    v = np.asarray(v)
    if v.shape[-1] != S.dim:
        raise DimensionError(f"argument length {v.shape[-1]} does not match {S.dim}")
    return v @ S.numeric().T


def substitute_exact(S: LinearPhaseMap, symbols) -> list:
    """Symbolic substitution, useful to read off the pattern."""
    if len(symbols) != S.dim:
        raise DimensionError("argument length does not match")
    return list(S.m * sp.Matrix(symbols))


def pm_rotation(size: int = 4) -> LinearPhaseMap:
    """The ±45° rotation on ``(q_i, q_j, p_i, p_j)`` (size 4) or on the doubled
    coordinates (size 8); it maps each pair ``(a_i, a_j)`` to ``(a_-, a_+)``."""
    r = 1 / sp.sqrt(2)
    B = sp.Matrix([[r, -r], [r, r]])
    if size == 4:
        return LinearPhaseMap(sp.diag(B, B), "custom", "q_i,q_j,p_i,p_j")
    if size == 8:
        return LinearPhaseMap(sp.diag(B, B, B, B), "R_quarter",
                              "q_i,q_j,xi_i,xi_j;p_i,p_j,x_i,x_j",
                              "same rotation block on all four pairs")
    raise DimensionError("size must be 4 or 8")


def _s_minus() -> sp.Matrix:
    return sp.Matrix([[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]])


def builtin(label: str) -> LinearPhaseMap:
    """Exact matrices of the exchange analysis with their orderings."""
    I = sp.I
    if label == "S_c_H":
        return LinearPhaseMap(sp.Matrix([[0, -I], [I, 0]]), label, "q_-,p_-",
                              "Husimi exchange on the minus pair: (q-, p-) -> (-i p-, i q-)")
    if label == "S_c_W":
        return LinearPhaseMap(sp.Matrix([[0, I], [I, 0]]), label, "theta_-,z_-",
                              "theta = q + i xi, z = p + i x on the doubled minus block")
    if label == "U_complex":
        return LinearPhaseMap(sp.Matrix([[0, -I], [I, 0]]), label, "q_-,p_-")
    if label == "V_complex":
        return LinearPhaseMap(sp.Matrix([[0, I], [-I, 0]]), label, "q_-,p_-")
    if label == "R_quarter":
        return pm_rotation(8)
    if label == "S_doubled":
        m = sp.diag(sp.eye(4), _s_minus())
        return LinearPhaseMap(m, label, "q_+,xi_+;p_+,x_+;q_-,xi_-;p_-,x_-")
    raise DomainError(f"unknown builtin {label!r}")


def builtin_labels() -> tuple[str, ...]:
    return LABELS[:-1]


def wminus_map(which: str = "U") -> LinearPhaseMap:
    """Argument substitution of the W- exchange identity on ``(q-, xi-, p-, x-)``.

    ``diag(1/8, -8, 1/8, -8) * S_-`` for U and its negative for V. It reverses
    ``dq^dxi + dp^dx`` (anticanonical in that ordering) and preserves the form
    ``dp^dx - dq^dxi`` native to W-.
    """
    m = sp.diag(sp.Rational(1, 8), -8, sp.Rational(1, 8), -8) * _s_minus()
    if which == "V":
        m = -m
    elif which != "U":
        raise DomainError(f"unknown exchange {which!r}")
    return LinearPhaseMap(m, "custom", "q_-,xi_-;p_-,x_-", f"W- substitution for {which}")
