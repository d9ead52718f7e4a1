"""Bosonic and fermionic symmetrizers and state checks.

``H^B = (H + VH + UH + UVH)/4`` and ``H^F = (H - VH - UH + UVH)/4``. For a
Töplitz ``H`` with ``h >= 0`` both are positive: in the one-particle relative
picture ``H^B = 1/4 int h(z) |psi_z + psi_-z><psi_z + psi_-z| dz/(2 pi hbar)``
and ``H^F`` is the same with ``psi_z - psi_-z``.
"""

from __future__ import annotations

import numpy as np

from .core import DimensionError, DomainError, GridSpec, Report
from .states import DensityMatrix, LazyKernel, apply_exchange, spectrum, trace

__all__ = ["symmetrize", "check_state", "trace_sum_rule", "kernel_trace", "normalized", "SIGNS"]

SIGNS = {"bosonic": 1.0, "fermionic": -1.0}


def _sign(kind: str) -> float:
    try:
        return SIGNS[kind]
    except KeyError:
        raise DomainError(f"kind must be bosonic or fermionic, got {kind!r}") from None


def symmetrize(H, kind: str = "bosonic"):
    """``(H + s VH + s UH + UVH)/4`` with ``s = +1`` (bosonic) or ``-1`` (fermionic).

    Accepts a :class:`DensityMatrix` (term lists are concatenated) or a
    :class:`LazyKernel` (evaluators are combined).
    """
    s = _sign(kind)
    parts = [(0.25, H), (0.25 * s, apply_exchange(H, "V")), (0.25 * s, apply_exchange(H, "U")),
             (0.25, apply_exchange(H, "UV"))]
    if isinstance(H, LazyKernel):
        evs = [(w, P.evaluator) for w, P in parts]

        def ev(X, Y):
            return sum(w * e(X, Y) for w, e in evs)

        return LazyKernel(ev, H.particles, H.hbar, f"{kind}({H.tag})", dict(H.info))
    terms = []
    for w, P in parts:
        terms.extend((w * c, k, b) for c, k, b in P.terms)
    return DensityMatrix(tuple(terms), H.grid)


def _kernel_on_grid(rho, grid: GridSpec) -> np.ndarray:
    """Galerkin matrix ``K(x_a, x_b) * dx`` on the position grid (one particle) or
    its tensor grid (two particles)."""
    if isinstance(rho, DensityMatrix):
        return rho.kernel_matrix() * grid.dx**grid.particles
    if rho.particles == 1:
        return rho.matrix(grid) * grid.dx
    mesh = np.stack(np.meshgrid(grid.x, grid.x, indexing="ij"), axis=-1).reshape(-1, 2)
    return rho(mesh[:, None, :], mesh[None, :, :]) * grid.dx**2


def kernel_trace(rho, grid: GridSpec) -> complex:
    """``trace rho``: term overlaps for low-rank input, diagonal Riemann sum otherwise."""
    if isinstance(rho, DensityMatrix):
        return trace(rho)
    if rho.particles == 1:
        return complex(np.sum(rho(grid.x, grid.x)) * grid.dx)
    mesh = np.stack(np.meshgrid(grid.x, grid.x, indexing="ij"), axis=-1)
    return complex(np.sum(rho(mesh, mesh)) * grid.dx**2)


def _sample_points(grid: GridSpec, count: int, seed: int):
    rng = np.random.default_rng(seed)
    N = grid.particles
    X = rng.uniform(-grid.q_box, grid.q_box, (count, N))
    Y = rng.uniform(-grid.q_box, grid.q_box, (count, N))
    return X, Y


def _values(rho, X, Y):
    if isinstance(rho, LazyKernel):
        return rho(X, Y)
    return rho.kernel(X, Y)


def check_state(rho, kind: str, grid: GridSpec | None = None, count: int = 100, seed: int = 42,
                eig_floor: float = 1e-9, sym_tol: float = 1e-12) -> Report:
    """Symmetry residuals, positivity floor and traces of a symmetrized state.

    Residuals ``max |U rho - s rho| / max |rho|`` (and for V) at sampled kernel
    points; smallest eigenvalue of the Galerkin matrix on the position grid;
    trace raw and normalized. Passes iff both residuals are at most
    ``sym_tol`` and ``lambda_min >= -eig_floor * lambda_max``.

    Raises
    ------
    DomainError
        For input that is not Hermitian on the grid, or a trace that vanishes.
    """
    s = _sign(kind)
    grid = grid or getattr(rho, "grid", None)
    if grid is None:
        raise DimensionError("a grid is required for kernel input")
    M = _kernel_on_grid(rho, grid)
    herm = float(np.abs(M - M.conj().T).max() / max(np.abs(M).max(), 1e-300))
    if herm > 1e-10:
        raise DomainError(f"check_state needs Hermitian input (asymmetry {herm:.2e})")
    ev = spectrum(rho) if isinstance(rho, DensityMatrix) else np.linalg.eigvalsh((M + M.conj().T) / 2)
    lmin, lmax = float(ev.min()), float(ev.max())
    X, Y = _sample_points(grid, count, seed)
    base = _values(rho, X, Y)
    scale = max(float(np.abs(base).max()), 1e-300)
    res = {}
    for which in ("U", "V"):
        res[which] = float(np.abs(_values(apply_exchange(rho, which), X, Y) - s * base).max() / scale)
    tr = kernel_trace(rho, grid)
    if abs(tr) <= 1e-300:
        raise DomainError("degenerate trace")
    ok = res["U"] <= sym_tol and res["V"] <= sym_tol and lmin >= -eig_floor * max(lmax, 0.0)
    details = {
        "kind": kind,
        "residual_U": res["U"],
        "residual_V": res["V"],
        "lambda_min": lmin,
        "lambda_max": lmax,
        "trace": [tr.real, tr.imag],
        "trace_normalized": _normalized_trace(rho, tr, grid),
    }
    return Report("symmetrizer_state", "UV", count, seed, max(res.values()), sym_tol, ok, details)


def normalized(rho, grid: GridSpec | None = None):
    """``rho / trace rho``."""
    tr = kernel_trace(rho, grid or getattr(rho, "grid", None))
    if abs(tr) <= 1e-300:
        raise DomainError("degenerate trace")
    return rho.scaled(1 / tr)


def _normalized_trace(rho, tr, grid):
    t = kernel_trace(rho.scaled(1 / tr), grid)
    return [t.real, t.imag]


def trace_sum_rule(H, grid: GridSpec | None = None, tolerance: float = 1e-8) -> Report:
    """``trace H^B + trace H^F = (trace H + trace UVH)/2``."""
    grid = grid or getattr(H, "grid", None)
    tb = kernel_trace(symmetrize(H, "bosonic"), grid)
    tf = kernel_trace(symmetrize(H, "fermionic"), grid)
    ref = 0.5 * (kernel_trace(H, grid) + kernel_trace(apply_exchange(H, "UV"), grid))
    err = float(abs(tb + tf - ref) / max(abs(ref), 1e-300))
    return Report("trace_sum_rule", "UV", 1, None, err, tolerance, err <= tolerance,
                  {"trace_bosonic": [tb.real, tb.imag], "trace_fermionic": [tf.real, tf.imag],
                   "half_sum": [ref.real, ref.imag]})
