"""Built-in states and symbols exercised by ``verify``.

Centres are given in units of ``sqrt(hbar)`` so the same corpus stays inside
the trusted box for every admissible hbar.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GridSpec
from .states import DensityMatrix, coherent_state, coherent_superposition, mixture, projector
from .toeplitz import GaussianSymbol

__all__ = ["CORPUS_VERSION", "CorpusState", "states", "symbols", "relative_symbols", "describe"]

CORPUS_VERSION = "1"

_A = 0.5 + 0.5j
_B = -0.7 + 0.2j
_MIX = [(0.3 + 0.2j, -0.5 + 0.1j), (-0.6 - 0.3j, 0.4 + 0.5j), (0.1 + 0.6j, 0.2 - 0.4j)]


@dataclass(frozen=True)
class CorpusState:
    name: str
    rho: DensityMatrix
    statistics: str  # bosonic | fermionic | none
    coherent: bool
    params: dict


def states(grid: GridSpec) -> list[CorpusState]:
    """Two-particle corpus on ``grid``."""
    g = grid.with_particles(2)
    s = np.sqrt(g.hbar)
    a, b = _A * s, _B * s
    d = (0.3 - 0.4j) * s
    mix = [(z1 * s, z2 * s) for z1, z2 in _MIX]
    out = [
        CorpusState("coherent_product", projector(coherent_state([a, b], g)), "none", True,
                    {"Z": [a, b]}),
        CorpusState("coherent_diagonal", projector(coherent_state([d, d], g)), "bosonic", True,
                    {"Z": [d, d]}),
        CorpusState("mixture_rank3",
                    mixture([0.5, 0.3, 0.2], [coherent_state(list(z), g) for z in mix]), "none",
                    False, {"weights": [0.5, 0.3, 0.2], "Z": mix}),
        CorpusState("bosonic_pair",
                    projector(coherent_superposition([1, 1], [[a, b], [b, a]], g)), "bosonic",
                    False, {"coeffs": [1, 1], "Z": [[a, b], [b, a]]}),
        CorpusState("fermionic_pair",
                    projector(coherent_superposition([1, -1], [[a, b], [b, a]], g)), "fermionic",
                    False, {"coeffs": [1, -1], "Z": [[a, b], [b, a]]}),
    ]
    return out


def symbols(hbar: float = 1.0) -> dict[str, GaussianSymbol]:
    """Two-particle Gaussian symbols, each scaled to unit Töplitz trace."""
    s = np.sqrt(hbar)
    return {
        "unit_gaussian": GaussianSymbol([1.0], [[0j, 0j]], [1.0], hbar).normalized(),
        "offset_gaussian": GaussianSymbol([1.0], [[(0.6 + 0.3j) * s, (-0.4 + 0.5j) * s]], [0.5],
                                          hbar).normalized(),
        "two_term": GaussianSymbol([0.7, 0.3], [[(0.5 + 0.2j) * s, (-0.5 - 0.1j) * s],
                                                [(-0.3 + 0.6j) * s, (0.4 - 0.2j) * s]],
                                   [0.5, 1.0], hbar).normalized(),
    }


def relative_symbols(hbar: float = 1.0) -> dict[str, GaussianSymbol]:
    """One-particle symbols for the relative-coordinate picture."""
    s = np.sqrt(hbar)
    return {
        "unit_gaussian": GaussianSymbol([1.0], [[0j]], [1.0], hbar).normalized(),
        "offset_gaussian": GaussianSymbol([1.0], [[(0.7 + 0.4j) * s]], [0.5], hbar).normalized(),
        "two_term": GaussianSymbol([0.7, 0.3], [[(0.5 + 0.2j) * s], [(-0.3 + 0.6j) * s]],
                                   [0.5, 1.0], hbar).normalized(),
    }


def _cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


def describe(grid: GridSpec) -> dict:
    """JSON-ready listing of the corpus."""
    def conv(v):
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, (complex, np.complexfloating)):
            return _cplx(v)
        return v

    return {
        "version": CORPUS_VERSION,
        "hbar": grid.hbar,
        "states": [{"name": c.name, "statistics": c.statistics, "coherent": c.coherent,
                    **{k: conv(v) for k, v in c.params.items()}} for c in states(grid)],
        "symbols": {name: {"c": [_cplx(c) for c in h.c], "Z0": [[_cplx(z) for z in row] for row in h.z0],
                           "alpha": [float(a) for a in h.alpha]}
                    for name, h in symbols(grid.hbar).items()},
        "relative_symbols": {name: {"c": [_cplx(c) for c in h.c],
                                    "Z0": [[_cplx(z) for z in row] for row in h.z0],
                                    "alpha": [float(a) for a in h.alpha]}
                             for name, h in relative_symbols(grid.hbar).items()},
    }
