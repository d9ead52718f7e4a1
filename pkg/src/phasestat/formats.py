"""State/symbol JSON files, report JSON and field CSV dumps.

Floats are written with ``repr``, the shortest string that round-trips to the
same double, independently of the locale.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import GridSpec, Report
from .states import DensityMatrix, Wavefunction, coherent_state
from .toeplitz import GaussianSymbol

__all__ = [
    "SchemaError",
    "load_state",
    "state_to_json",
    "load_symbol",
    "symbol_to_json",
    "reports_to_json",
    "write_json",
    "write_csv",
]


class SchemaError(ValueError):
    """Input document does not match the expected schema."""


def _num(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _pair(v, where: str) -> complex:
    if not isinstance(v, list) or len(v) != 2:
        raise SchemaError(f"{where}: expected [re, im]")
    return complex(_num(v[0], f"{where}[0]"), _num(v[1], f"{where}[1]"))


def _zlist(v, where: str) -> list[complex]:
    if not isinstance(v, list) or not v:
        raise SchemaError(f"{where}: expected a non-empty list of [re, im] pairs")
    return [_pair(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _field(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    return doc[key]


def _read(src) -> dict:
    if isinstance(src, dict):
        return src
    try:
        return json.loads(Path(src).read_text())
    except json.JSONDecodeError as e:
        raise SchemaError(f"{src}: line {e.lineno}: {e.msg}") from None


def load_state(src) -> DensityMatrix:
    """Build a density matrix from a state document or file.

    Schema: ``{"hbar": real, "grid": {"n": int, "L": real}, "terms": [{"c": [re, im],
    "ket": {"Z": [[re, im], ...]}, "bra": {"Z": [[re, im], ...]}}]}``.
    """
    doc = _read(src)
    hbar = _num(_field(doc, "hbar", "state"), "state.hbar")
    gd = _field(doc, "grid", "state")
    n = _field(gd, "n", "state.grid")
    if isinstance(n, bool) or not isinstance(n, int):
        raise SchemaError("state.grid.n: expected an integer")
    L = _num(_field(gd, "L", "state.grid"), "state.grid.L")
    terms = _field(doc, "terms", "state")
    if not isinstance(terms, list) or not terms:
        raise SchemaError("state.terms: expected a non-empty list")
    parsed = []
    N = None
    for i, t in enumerate(terms):
        w = f"state.terms[{i}]"
        c = _pair(_field(t, "c", w), f"{w}.c")
        kz = _zlist(_field(_field(t, "ket", w), "Z", f"{w}.ket"), f"{w}.ket.Z")
        bz = _zlist(_field(_field(t, "bra", w), "Z", f"{w}.bra"), f"{w}.bra.Z")
        N = N or len(kz)
        if len(kz) != N or len(bz) != N:
            raise SchemaError(f"{w}: every Z must have the same number of particles")
        parsed.append((c, kz, bz))
    if N not in (1, 2):
        raise SchemaError("state: one or two particles are supported")
    try:
        grid = GridSpec(n, L, hbar, N)
    except ValueError as e:
        raise SchemaError(f"state.grid: {e}") from None
    cache: dict = {}

    def cs(z):
        key = tuple(z)
        if key not in cache:
            cache[key] = coherent_state(list(z), grid)
        return cache[key]

    out = []
    for c, kz, bz in parsed:
        k = cs(kz)
        b = k if kz == bz else cs(bz)
        out.append((c, k, b))
    return DensityMatrix(tuple(out), grid)


def _coherent_parts(wf: Wavefunction):
    if wf.expansion is None:
        raise SchemaError("only coherent-state expansions can be written to a state file")
    c, Z = wf.expansion
    return list(zip(np.asarray(c, dtype=complex), np.asarray(Z, dtype=complex)))


def _cplx(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def state_to_json(rho: DensityMatrix) -> dict:
    """Inverse of :func:`load_state`; multi-component kets and bras are expanded."""
    g = rho.grid
    terms = []
    for c, ket, bra in rho.terms:
        for a, zk in _coherent_parts(ket):
            for b, zb in _coherent_parts(bra):
                terms.append({"c": _cplx(c * a * np.conj(b)),
                              "ket": {"Z": [_cplx(z) for z in zk]},
                              "bra": {"Z": [_cplx(z) for z in zb]}})
    return {"hbar": float(g.hbar), "grid": {"n": int(g.n), "L": float(g.L)}, "terms": terms}


def load_symbol(src) -> GaussianSymbol:
    """Schema: ``{"hbar": real, "terms": [{"c": [re, im], "Z0": [[re, im], ...], "alpha": real}]}``."""
    doc = _read(src)
    hbar = _num(_field(doc, "hbar", "symbol"), "symbol.hbar")
    terms = _field(doc, "terms", "symbol")
    if not isinstance(terms, list) or not terms:
        raise SchemaError("symbol.terms: expected a non-empty list")
    cs, zs, al = [], [], []
    for i, t in enumerate(terms):
        w = f"symbol.terms[{i}]"
        cs.append(_pair(_field(t, "c", w), f"{w}.c"))
        zs.append(_zlist(_field(t, "Z0", w), f"{w}.Z0"))
        al.append(_num(_field(t, "alpha", w), f"{w}.alpha"))
        if len(zs[-1]) != len(zs[0]):
            raise SchemaError(f"{w}.Z0: particle number differs from the first term")
    try:
        return GaussianSymbol(cs, zs, al, hbar)
    except ValueError as e:
        raise SchemaError(f"symbol: {e}") from None


def symbol_to_json(h: GaussianSymbol) -> dict:
    return {"hbar": float(h.hbar),
            "terms": [{"c": _cplx(c), "Z0": [_cplx(z) for z in z0], "alpha": float(a)}
                      for c, z0, a in zip(h.c, h.z0, h.alpha)]}


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return _cplx(v)
    return v


def reports_to_json(reports: list[Report]) -> list[dict]:
    return [_plain(r.to_json()) for r in reports]


def write_json(obj, path):
    text = json.dumps(_plain(obj), indent=2, allow_nan=False)
    Path(path).write_text(text + "\n")


def write_csv(path, names: list[str], axes: list[np.ndarray], values: np.ndarray,
              value_name: str = "w", stride: int = 1):
    """One row per grid point, axes varying slowest first, then the value.

    An extra ``<value>_im`` column is written when the imaginary part is not
    negligible (above 1e-10 of the maximum).
    """
    values = np.asarray(values)
    sl = tuple(slice(None, None, stride) for _ in axes)
    values = values[sl]
    axes = [np.asarray(a)[::stride] for a in axes]
    imag = np.abs(values.imag).max() > 1e-10 * max(np.abs(values).max(), 1e-300) \
        if np.iscomplexobj(values) else False
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh] + [values.real.ravel()]
    header = names + [value_name]
    if imag:
        cols.append(values.imag.ravel())
        header.append(value_name + "_im")
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*(c.tolist() for c in cols)):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
