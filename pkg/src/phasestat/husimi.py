"""Husimi functions, their two-point continuation, and the exchange checks.

The continuation treats ``Z`` and ``Z-bar`` as independent: the value at
``(Z_a, conj(Z_b))`` is holomorphic in ``Z_a``, antiholomorphic in ``Z_b`` and
restricts to the Husimi function on the diagonal.  Substitutions such as
``z_i <-> z_j`` with ``z-bar`` fixed are then plain evaluations.
"""

from __future__ import annotations


import numpy as np

from .core import DimensionError, DomainError, GridSpec, Report
from .states import DensityMatrix, ExchangePair, apply_exchange, coherent_values

__all__ = [
    "Report",
    "husimi",
    "husimi_two_point",
    "husimi_grid",
    "phase_grid",
    "husimi_integral",
    "verify_husimi_exchange",
    "verify_husimi_composition",
    "bosonic_check_husimi",
    "bosonic_factorization_check",
]

HUSIMI_TOL = 1e-6


def _as_points(Z, N: int) -> np.ndarray:
    Z = np.asarray(getattr(Z, "z", Z), dtype=complex)
    if Z.ndim == 0:
        Z = Z[None]
    if Z.shape[-1] != N:
        raise DimensionError(f"phase points need {N} components, got {Z.shape[-1]}")
    return Z


def _coherent_rows(z: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Rows ``phi_{z_s}(x)`` on the grid for a flat array of 1-particle centres."""
    return coherent_values(z[:, None], grid.x[None, :], grid.hbar)


def _brackets(rho: DensityMatrix, Zb: np.ndarray, Za: np.ndarray) -> np.ndarray:
    """``<phi_{Zb}| rho |phi_{Za}>`` for matching stacks of points, by quadrature."""
    g = rho.grid
    dv = g.dx**g.particles
    out = np.zeros(Za.shape[:-1], dtype=complex)
    flat_a = Za.reshape(-1, g.particles)
    flat_b = Zb.reshape(-1, g.particles)
    acc = np.zeros(len(flat_a), dtype=complex)
    for c, ket, bra in rho.terms:
        if g.particles == 1:
            Pb = _coherent_rows(flat_b[:, 0], g)
            Pa = _coherent_rows(flat_a[:, 0], g)
            left = Pb.conj() @ ket.values
            right = Pa @ bra.values.conj()
        else:
            B1, B2 = _coherent_rows(flat_b[:, 0], g), _coherent_rows(flat_b[:, 1], g)
            A1, A2 = _coherent_rows(flat_a[:, 0], g), _coherent_rows(flat_a[:, 1], g)
            left = np.einsum("sa,ab,sb->s", B1.conj(), ket.values, B2.conj())
            right = np.einsum("sa,ab,sb->s", A1, bra.values.conj(), A2)
        acc += c * left * right
    out[...] = (acc * dv * dv).reshape(out.shape)
    return out


def husimi(rho: DensityMatrix, Z) -> np.ndarray | complex:
    """``(2 pi hbar)^-N <phi_Z| rho |phi_Z>`` by grid quadrature.

    ``Z`` may be a single phase point or a stack of shape ``(..., N)``.
    """
    g = rho.grid
    Z = _as_points(Z, g.particles)
    val = _brackets(rho, Z, Z) / (2 * np.pi * g.hbar) ** g.particles
    return complex(val) if val.ndim == 0 else val


def husimi_two_point(rho: DensityMatrix, Za, Zb) -> np.ndarray | complex:
    """Continuation of the Husimi function to independent ``(Z_a, conj Z_b)``.

    Returns::

        (2 pi hbar)^-N <phi_Zb| rho |phi_Za>
            * exp[(|Za|^2 + |Zb|^2)/4hbar - conj(Zb).Za/2hbar]
            * exp[-i (qa.pa - qb.pb)/2hbar]

    The last factor removes the non-holomorphic phase carried by the
    phase-free coherent states; it equals one whenever ``Za`` is a permutation
    of ``Zb``.
    """
    g = rho.grid
    Za = _as_points(Za, g.particles)
    Zb = _as_points(Zb, g.particles)
    if Za.shape != Zb.shape:
        raise DimensionError("Za and Zb must have the same shape")
    h = g.hbar
    expo = ((np.abs(Za) ** 2).sum(-1) + (np.abs(Zb) ** 2).sum(-1)) / (4 * h) \
        - (np.conj(Zb) * Za).sum(-1) / (2 * h) \
        - 1j * ((Za.real * Za.imag).sum(-1) - (Zb.real * Zb.imag).sum(-1)) / (2 * h)
    val = _brackets(rho, Zb, Za) / (2 * np.pi * h) ** g.particles * np.exp(expo)
    return complex(val) if val.ndim == 0 else val


def phase_grid(grid: GridSpec, m: int = 32, q_half: float | None = None,
               p_half: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Uniform ``m``-point axes for q in ``[-q_half, q_half)`` and p likewise.

    Defaults cover the whole position window and the trusted momentum box.
    """
    q_half = grid.L if q_half is None else q_half
    p_half = 2 * grid.p_box if p_half is None else p_half
    q = -q_half + 2 * q_half / m * np.arange(m)
    p = -p_half + 2 * p_half / m * np.arange(m)
    return q, p


def husimi_grid(rho: DensityMatrix, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Husimi function on the tensor phase grid, axes ``(q1, p1[, q2, p2])``.

    Two-particle values use the separable structure of ``phi_Z``, so the cost
    is matrix products rather than one quadrature per phase point.
    """
    g = rho.grid
    h = g.hbar
    zz = (q[:, None] + 1j * p[None, :]).reshape(-1)
    P = _coherent_rows(zz, g).conj()              # (s, x) = conj phi_z(x)
    dv = g.dx
    total = 0
    for c, ket, bra in rho.terms:
        if g.particles == 1:
            total = total + c * (P @ ket.values) * np.conj(P @ bra.values) * dv**2
        else:
            A = P @ ket.values @ P.T * dv**2
            B = P @ bra.values @ P.T * dv**2
            total = total + c * A * np.conj(B)
    m1, m2 = len(q), len(p)
    out = np.asarray(total) / (2 * np.pi * h) ** g.particles
    if g.particles == 1:
        return out.reshape(m1, m2)
    return out.reshape(m1, m2, m1, m2)


def husimi_integral(rho: DensityMatrix, m: int = 32, **box) -> complex:
    """Phase-space Riemann sum of the Husimi function on an ``m``-point grid per axis."""
    q, p = phase_grid(rho.grid, m, **box)
    vals = husimi_grid(rho, q, p)
    return complex(vals.sum() * ((q[1] - q[0]) * (p[1] - p[0])) ** rho.particles)


def _rel(lhs, rhs, floor: float = 1e-300) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), floor)
    return np.abs(lhs - rhs) / scale


def _samples(rho: DensityMatrix, samples, seed: int | None, count: int):
    if samples is None:
        rng = np.random.default_rng(seed)
        samples = rho.grid.sample_box(count, rng)
    samples = _as_points(samples, rho.particles)
    if samples.size == 0:
        raise DomainError("no samples given")
    return samples.reshape(-1, rho.particles)


def _pair_swap(Z: np.ndarray, pair: ExchangePair) -> np.ndarray:
    i, j = pair.i - 1, pair.j - 1
    S = Z.copy()
    S[:, [i, j]] = Z[:, [j, i]]
    return S


def verify_husimi_exchange(rho: DensityMatrix, pair: ExchangePair = ExchangePair(),
                           which: str = "U", samples=None, seed: int = 42,
                           count: int = 100, tolerance: float = HUSIMI_TOL) -> Report:
    """Check the exchange lemma for the Husimi function at sampled points.

    U: ``H[U rho](Z) = exp(-(zb_i - zb_j)(z_i - z_j)/2hbar) * H[rho](sigma Z, conj Z)``
    V: ``H[V rho](Z) = exp(-|z_i - z_j|^2/2hbar) * H[rho](Z, conj sigma Z)``
    """
    if rho.particles != 2:
        raise DimensionError("the Husimi exchange lemma is stated for N = 2")
    Z = _samples(rho, samples, seed, count)
    S = _pair_swap(Z, pair)
    i, j = pair.i - 1, pair.j - 1
    d = Z[:, i] - Z[:, j]
    h = rho.grid.hbar
    if which == "U":
        lhs = husimi(apply_exchange(rho, "U"), Z)
        rhs = np.exp(-np.conj(d) * d / (2 * h)) * husimi_two_point(rho, S, Z)
    elif which == "V":
        lhs = husimi(apply_exchange(rho, "V"), Z)
        rhs = np.exp(-np.abs(d) ** 2 / (2 * h)) * husimi_two_point(rho, Z, S)
    else:
        raise ValueError(f"unknown exchange {which!r}")
    err = float(_rel(lhs, rhs).max())
    return Report("husimi_exchange", which, len(Z), seed if samples is None else None,
                  err, tolerance, err <= tolerance)


def verify_husimi_composition(rho: DensityMatrix, samples=None, seed: int = 42,
                              count: int = 100, tolerance: float = 1e-10) -> Report:
    """``H[VU rho](Z) = H[rho](sigma Z)``: a pure relabelling, no Gaussian weight.

    Both sides are the same quadrature summed in a different order, so the
    error is measured against the largest value in the sample set; far-tail
    samples would otherwise report rounding noise of the cancelling sums.
    """
    Z = _samples(rho, samples, seed, count)
    lhs = husimi(apply_exchange(rho, "UV"), Z)
    rhs = husimi(rho, Z[:, ::-1])
    err = float(np.abs(lhs - rhs).max() / max(np.abs(rhs).max(), 1e-300))
    return Report("husimi_uv_composition", "UV", len(Z), seed if samples is None else None,
                  err, tolerance, err <= tolerance,
                  {"pointwise_rel_err": float(_rel(lhs, rhs).max())})


def bosonic_check_husimi(rho: DensityMatrix, samples=None, seed: int = 42,
                         count: int = 100, tolerance: float = HUSIMI_TOL) -> Report:
    """Test both identities characterizing bosonic states through the Husimi function.

    A state passes iff, at every sample, ``H(Z)`` equals the weighted value
    with ``z`` swapped and, separately, with ``z-bar`` swapped.
    """
    if rho.particles != 2:
        raise DimensionError("the bosonic criterion is stated for N = 2")
    Z = _samples(rho, samples, seed, count)
    S = Z[:, ::-1]
    d = Z[:, 0] - Z[:, 1]
    w = np.exp(-np.conj(d) * d / (2 * rho.grid.hbar))
    base = husimi(rho, Z)
    r1 = _rel(base, w * husimi_two_point(rho, S, Z))
    r2 = _rel(base, w * husimi_two_point(rho, Z, S))
    err = float(max(r1.max(), r2.max()))
    return Report("husimi_bosonic", "UV", len(Z), seed if samples is None else None,
                  err, tolerance, err <= tolerance,
                  {"z_swap_err": float(r1.max()), "zbar_swap_err": float(r2.max())})


def factorized_symbol(rho: DensityMatrix, u, ubar, s, sbar) -> np.ndarray:
    """``G(u, ubar, s, sbar) = exp(+ubar*u/4hbar) * H(Z_a, conj Z_b)`` with
    ``Z_a = ((s+u)/2, (s-u)/2)`` and ``conj Z_b = ((sbar+ubar)/2, (sbar-ubar)/2)``.

    For bosonic states ``G`` is even in ``u`` and in ``ubar`` separately.
    """
    u, ubar, s, sbar = (np.asarray(a, dtype=complex) for a in (u, ubar, s, sbar))
    Za = np.stack([(s + u) / 2, (s - u) / 2], axis=-1)
    Zb = np.conj(np.stack([(sbar + ubar) / 2, (sbar - ubar) / 2], axis=-1))
    return np.exp(ubar * u / (4 * rho.grid.hbar)) * husimi_two_point(rho, Za, Zb)


def bosonic_factorization_check(rho: DensityMatrix, samples=None, seed: int = 42,
                                count: int = 100, tolerance: float = HUSIMI_TOL) -> Report:
    """Evenness of the factorized symbol under ``u -> -u`` and ``ubar -> -ubar``.

    Samples are phase points ``Z`` (so ``u = z1 - z2`` and ``ubar = conj u``);
    ``u`` and ``ubar`` are then flipped independently.
    """
    if rho.particles != 2:
        raise DimensionError("the factorized criterion is stated for N = 2")
    Z = _samples(rho, samples, seed, count)
    u = Z[:, 0] - Z[:, 1]
    s = Z[:, 0] + Z[:, 1]
    ub, sb = np.conj(u), np.conj(s)
    G = factorized_symbol(rho, u, ub, s, sb)
    r1 = _rel(G, factorized_symbol(rho, -u, ub, s, sb))
    r2 = _rel(G, factorized_symbol(rho, u, -ub, s, sb))
    err = float(max(r1.max(), r2.max()))
    return Report("husimi_bosonic_factorization", "UV", len(Z), seed if samples is None else None,
                  err, tolerance, err <= tolerance,
                  {"u_flip_err": float(r1.max()), "ubar_flip_err": float(r2.max())})
