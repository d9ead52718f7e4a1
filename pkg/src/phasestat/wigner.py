"""Wigner functions, the ±45° rotated picture, and the exchange identities.

Convention::

    W[rho](X, Xi) = (2 pi hbar)^-N  int rho(X + y/2, X - y/2) exp(-i y.Xi/hbar) dy

so that ``int W = trace rho`` and ``trace(rho rho') = (2 pi hbar)^N int W W'``.
The offset ``y`` runs over ``s*dx`` for ``s = -n/2 .. n/2-1``; the kernel is
evaluated at half-grid positions ``X +- s dx/2`` directly from the low-rank
factors, so the momentum axis is the full dual grid of the position grid.

Two-particle fields are kept separable, ``sum_k c_k A_k(x1, xi1) B_k(x2, xi2)``,
because a materialized 4-axis field at n = 64 is 16.7M complex values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import DimensionError, Field2D, GridSpec, Report, TruncationWarning, symplectic_fourier
from .states import DensityMatrix, Wavefunction, apply_exchange
from . import symplectic

__all__ = [
    "WignerField",
    "cross_wigner_1d",
    "wigner",
    "wigner_rotated",
    "verify_wigner_exchange",
    "verify_wigner_composition",
    "wminus",
    "wminus_substitution",
    "verify_wminus_exchange",
]

WIGNER_TOL = 1e-5
WMINUS_TOL = 1e-4


def _cross_wigner(f: Wavefunction, g: Wavefunction, X: np.ndarray, step: float,
                  count: int) -> np.ndarray:
    """Offset sum over ``y = s*step``, ``s = -count/2 .. count/2-1``; output on
    ``xi_j = 2 pi hbar/(count*step) * (j - count/2)``."""
    h = f.grid.hbar
    s = np.arange(count) - count // 2
    Xc = np.asarray(X)[:, None]
    F = f.evaluate(Xc + s[None, :] * step / 2) * np.conj(g.evaluate(Xc - s[None, :] * step / 2))
    G = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(F, axes=1), axis=1), axes=1)
    return G * step / (2 * np.pi * h)


def cross_wigner_1d(f: Wavefunction, g: Wavefunction, pad: int = 2) -> np.ndarray:
    """Wigner transform of ``|f><g|`` on ``(x_k, xi_m)``, one particle, via FFT over the offset.

    Offsets run over ``pad`` times the window width, so the integrand is not
    cut at ``|y| = L``; every ``pad``-th frequency of the longer transform is
    exactly the dual grid.
    """
    grid = f.grid
    return _cross_wigner(f, g, grid.x, grid.dx, pad * grid.n)[:, ::pad]


def refined_axes(grid: GridSpec, factor: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Axes with ``factor`` times the window and ``1/factor`` the spacing in both
    position and momentum; they contain the coarse nodes."""
    m = factor * factor * grid.n
    step = grid.dx / factor
    x = -factor * grid.L + step * np.arange(m)
    xi = 2 * np.pi * grid.hbar / (m * step) * (np.arange(m) - m // 2)
    return x, xi


def cross_wigner_refined(f: Wavefunction, g: Wavefunction, factor: int = 2) -> np.ndarray:
    """:func:`cross_wigner_1d` on :func:`refined_axes`."""
    x, _ = refined_axes(f.grid, factor)
    return _cross_wigner(f, g, x, f.grid.dx / factor, len(x))


@dataclass
class WignerField:
    """Separable Wigner field over ``(q1, p1[, q2, p2])`` on position x dual axes."""

    grid: GridSpec
    factors: list = field(default_factory=list)
    names: tuple[str, ...] = ("q1", "p1", "q2", "p2")

    @property
    def particles(self) -> int:
        return self.grid.particles

    @property
    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return self.grid.x, self.grid.xi

    @property
    def values(self) -> np.ndarray:
        """Materialized field, shape ``(n, n)`` or ``(n, n, n, n)``."""
        if self.particles == 1:
            return sum(c * A for c, A, _ in self.factors)
        n = self.grid.n
        out = np.zeros((n,) * 4, dtype=complex)
        for c, A, B in self.factors:
            out += c * A[:, :, None, None] * B[None, None, :, :]
        return out

    def cell(self) -> float:
        return (self.grid.dx * self.grid.dxi) ** self.particles

    def integral(self) -> complex:
        if self.particles == 1:
            return complex(self.values.sum() * self.cell())
        return complex(sum(c * A.sum() * B.sum() for c, A, B in self.factors) * self.cell())

    def pair_integral(self, other: "WignerField") -> complex:
        """``int W W'`` (no conjugation)."""
        tot = 0j
        for c, A, B in self.factors:
            for d, C, D in other.factors:
                if self.particles == 1:
                    tot += c * d * np.sum(A * C)
                else:
                    tot += c * d * np.sum(A * C) * np.sum(B * D)
        return complex(tot * self.cell())

    def second_block(self, a: int, b: int) -> Field2D:
        """Slice at first-pair grid indices ``(a, b)``, returned over the second pair."""
        if self.particles != 2:
            raise DimensionError("second_block needs a two-particle field")
        vals = sum(c * A[a, b] * B for c, A, B in self.factors)
        return Field2D(vals, self.axes, self.names[2:4])

    def first_marginal(self) -> np.ndarray:
        """Integral over the second pair, as a function of the first."""
        if self.particles != 2:
            raise DimensionError("first_marginal needs a two-particle field")
        cell = self.grid.dx * self.grid.dxi
        return sum(c * A * B.sum() * cell for c, A, B in self.factors)

    def particles_swapped(self) -> "WignerField":
        return WignerField(self.grid, [(c, B, A) for c, A, B in self.factors], self.names)

    def max_abs_imag_ratio(self) -> float:
        v = self.values
        return float(np.abs(v.imag).max() / max(np.abs(v).max(), 1e-300))


def _factor_pairs(rho: DensityMatrix, rotated: bool) -> list:
    """``(c, (u, u'), (v, v'))`` with ``rho = sum c |u v><u' v'|`` (two particles)."""
    out = []
    for c, ket, bra in rho.terms:
        if rotated:
            ket, bra = ket.rotated(), bra.rotated()
        for s, u, v in ket.factors():
            for t, u2, v2 in bra.factors():
                out.append((c * s * np.conj(t), (u, u2), (v, v2)))
    return out


def _field_from_pairs(rho: DensityMatrix, rotated: bool) -> WignerField:
    g = rho.grid
    if g.particles == 1:
        if rotated:
            raise DimensionError("the rotated picture needs two particles")
        factors = [(c, cross_wigner_1d(k, b), None) for c, k, b in rho.terms]
        return WignerField(g, factors, ("q", "p"))
    factors = [(c, cross_wigner_1d(*P), cross_wigner_1d(*M))
               for c, P, M in _factor_pairs(rho, rotated)]
    names = ("q+", "p+", "q-", "p-") if rotated else ("q1", "p1", "q2", "p2")
    return WignerField(g, factors, names)


def minus_block(rho: DensityMatrix, a: int, b: int, refine: int = 1) -> Field2D:
    """Rotated Wigner function at plus grid indices ``(a, b)`` over the minus pair.

    ``refine > 1`` returns the block on :func:`refined_axes`.
    """
    if rho.particles != 2:
        raise DimensionError("minus_block needs N = 2")
    g = rho.grid
    vals = 0
    for c, P, M in _factor_pairs(rho, rotated=True):
        A = _cross_wigner(P[0], P[1], g.x[a:a + 1], g.dx, 2 * g.n)[0, ::2][b]
        B = cross_wigner_1d(*M) if refine == 1 else cross_wigner_refined(*M, factor=refine)
        vals = vals + c * A * B
    axes = (g.x, g.xi) if refine == 1 else refined_axes(g, refine)
    return Field2D(vals, axes, ("q-", "p-"), {"refine": refine, "plus": (a, b)})


def wigner(rho: DensityMatrix) -> WignerField:
    """Wigner function of ``rho`` (one or two particles)."""
    return _field_from_pairs(rho, rotated=False)


def wigner_rotated(rho: DensityMatrix) -> WignerField:
    """Wigner function in ``(q+, p+, q-, p-)``, ``a_pm = (a_1 +- a_2)/sqrt 2``.

    The rotation is orthogonal, so this is the Wigner function of the kernel
    written in rotated coordinates; coherent factors are rotated exactly.
    """
    if rho.particles != 2:
        raise DimensionError("wigner_rotated needs N = 2")
    return _field_from_pairs(rho, rotated=True)


def _plus_slices(W: WignerField, count: int) -> list[tuple[int, int]]:
    """Grid indices of the plus pair at the peak of the plus marginal and nearby."""
    M = np.abs(W.first_marginal())
    a, b = np.unravel_index(np.argmax(M), M.shape)
    cand = [(a, b), (a + 2, b - 1), (a - 1, b + 2), (a + 3, b + 3), (a - 2, b - 3)]
    n = W.grid.n
    return [(i % n, j % n) for i, j in cand[:count]]


def verify_wigner_exchange(rho: DensityMatrix, which: str = "U", slices: int = 3,
                           tolerance: float = WIGNER_TOL, floor: float = 1e-8,
                           refine: int = 2) -> Report:
    """Minus-block exchange identity of the rotated Wigner function.

    U: ``W_rot[U rho](q+, p+; q-, p-) = F_{hbar/2}[W_rot[rho](q+, p+; ., .)](q-, p-)``
    V: the same transform evaluated at ``(-q-, -p-)``,

    where ``F_h`` is the symplectic Fourier transform at parameter ``h``; the
    halved parameter is fixed by the ``y/2`` offsets of the Wigner convention.
    The transform is summed over a block refined by ``refine`` in both
    directions, which pushes the periodic images of the half-hbar Riemann sum
    off the comparison grid. Points compared: the whole minus block where
    ``|LHS| >= floor*max``.
    """
    if rho.particles != 2:
        raise DimensionError("the Wigner exchange lemma is stated for N = 2")
    if which not in ("U", "V"):
        raise ValueError(f"unknown exchange {which!r}")
    g = rho.grid
    W = wigner_rotated(rho)
    Wx = wigner_rotated(apply_exchange(rho, which))
    sign = 1.0 if which == "U" else -1.0
    worst = 0.0
    checked = 0
    for a, b in _plus_slices(W, slices):
        F = minus_block(rho, a, b, refine=refine)
        rhs = symplectic_fourier(F, g.hbar / 2, q_out=sign * g.x, p_out=sign * g.xi).values
        lhs = Wx.second_block(a, b).values
        big = np.abs(lhs) >= floor * np.abs(lhs).max()
        rel = np.abs(lhs - rhs)[big] / np.abs(lhs)[big]
        worst = max(worst, float(rel.max()))
        checked += int(big.sum())
    return Report("wigner_exchange", which, checked, None, worst, tolerance,
                  worst <= tolerance and checked > 0, {"slices": slices, "refine": refine})


def verify_wigner_composition(rho: DensityMatrix, tolerance: float = 1e-10) -> Report:
    """``W[VU rho]`` equals ``W[rho]`` with the particle pairs ``(q_i, p_i) <-> (q_j, p_j)``."""
    lhs = wigner(apply_exchange(rho, "UV")).values
    rhs = np.transpose(wigner(rho).values, (2, 3, 0, 1))
    err = float(np.abs(lhs - rhs).max() / np.abs(rhs).max())
    return Report("wigner_uv_composition", "UV", lhs.size, None, err, tolerance, err <= tolerance)


def _grid_index(axis: np.ndarray, values: np.ndarray) -> np.ndarray:
    step = axis[1] - axis[0]
    idx = np.rint((np.asarray(values) - axis[0]) / step).astype(int)
    if np.any(np.abs(axis[0] + idx * step - values) > 1e-9 * abs(step)):
        raise DimensionError("wminus evaluation points must lie on the field's grid nodes")
    return idx


def wminus(F: Field2D, points, hbar: float, edge_tol: float = 1e-6) -> np.ndarray:
    """Quadratic transform of a minus-block field at ``points = (u, v, x, xi)``::

        W-[F](u, v; x, xi) = int conj F(u + 2 d hbar, v + 2 d' hbar)
                                 * F(u - 2 d hbar, v - 2 d' hbar) exp(i (x d - xi d')) dd dd'

    Evaluated by the change of variables ``s = u + 2 d hbar``, ``t = v + 2 d' hbar``
    as a Riemann sum over the field's own nodes; ``(u, v)`` must be grid nodes
    so that the mirrored samples ``(2u - s, 2v - t)`` are nodes too. Samples
    beyond the grid count as zero; a :class:`TruncationWarning` reports the
    edge mass when it exceeds ``edge_tol`` of the peak.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 4:
        raise DimensionError("wminus points are (u, v, x, xi)")
    s_ax, t_ax = F.axes
    vals = np.asarray(F.values)
    n1, n2 = vals.shape
    peak = np.abs(vals).max()
    if peak == 0:
        return np.zeros(len(pts), dtype=complex)
    edge = max(np.abs(vals[[0, -1], :]).max(), np.abs(vals[:, [0, -1]]).max())
    if edge > edge_tol * peak:
        warnings.warn(f"W- quadrature: field edge/peak = {edge / peak:.2e}; expect a truncation "
                      f"error of that relative size", TruncationWarning, stacklevel=2)
    ds, dt = F.spacings
    ia = _grid_index(s_ax, pts[:, 0])
    ib = _grid_index(t_ax, pts[:, 1])
    k = np.arange(n1)
    m = np.arange(n2)
    out = np.empty(len(pts), dtype=complex)
    for r, (a, b, (u, v, x, xi)) in enumerate(zip(ia, ib, pts)):
        kk = 2 * a - k
        mm = 2 * b - m
        ok_k = (kk >= 0) & (kk < n1)
        ok_m = (mm >= 0) & (mm < n2)
        mirror = np.zeros_like(vals)
        mirror[np.ix_(ok_k, ok_m)] = vals[np.ix_(kk[ok_k], mm[ok_m])]
        phase = np.exp(1j * (x * (s_ax - u))[:, None] / (2 * hbar)
                       - 1j * (xi * (t_ax - v))[None, :] / (2 * hbar))
        out[r] = np.sum(np.conj(vals) * mirror * phase) * ds * dt / (2 * hbar) ** 2
    return out


def wminus_substitution(which: str = "U") -> symplectic.LinearPhaseMap:
    """Argument map carrying the U- (or V-) exchanged W- to the unexchanged one.

    Acts on ``(q-, xi-, p-, x-)`` where ``p-`` names the first minus slot and
    ``q-`` the second; it is the doubled-space matrix ``S_-`` composed with the
    rescaling ``diag(1/8, -8, 1/8, -8)`` forced by the ``2 d hbar`` shifts and
    the half-hbar transform. V is the point reflection of U.
    """
    return symplectic.wminus_map(which)


def _near_peak(field: np.ndarray, rng: np.random.Generator, count: int, radius: int):
    a, b = np.unravel_index(np.argmax(np.abs(field)), field.shape)
    ia = np.clip(a + rng.integers(-radius, radius + 1, count), 0, field.shape[0] - 1)
    ib = np.clip(b + rng.integers(-radius, radius + 1, count), 0, field.shape[1] - 1)
    return ia, ib


def _to_vec(pts):
    # (u, v, x, xi) -> (q-, xi-, p-, x-) with p- the first slot and q- the second
    return np.stack([pts[:, 1], pts[:, 3], pts[:, 0], pts[:, 2]], axis=1)


def _from_vec(vec):
    return np.stack([vec[:, 2], vec[:, 0], vec[:, 3], vec[:, 1]], axis=1)


def _points_for_targets(M, u, v, A, B):
    """Pick ``(x, xi)`` so that the substituted slots land on nodes ``(A, B)``."""
    # image slots p' (row 2) and q' (row 0) as functions of (xi, x) given (v, u)
    rows = [2, 0]
    K = M[np.ix_(rows, [1, 3])]
    C = M[np.ix_(rows, [0, 2])]
    tgt = np.stack([A, B], axis=1) - np.stack([v, u], axis=1) @ C.T
    xi_x = np.linalg.solve(K, tgt.T).T
    return np.stack([u, v, xi_x[:, 1], xi_x[:, 0]], axis=1)


def verify_wminus_exchange(rho: DensityMatrix, which: str = "U", points=None, seed: int = 42,
                           count: int = 20, tolerance: float = WMINUS_TOL,
                           refine: int = 2) -> Report:
    """``W-[W_rot[U rho]](p-, q-; x-, xi-) = W-[W_rot[rho]]`` at the substituted arguments.

    The substitution is produced by :func:`wminus_substitution` acting on the
    argument vector. Both minus blocks are taken at the peak plus slice on
    axes refined by ``refine``. Random evaluation points are drawn around the
    peaks of both blocks (seeded); the error is measured relative to the
    largest left-hand value.
    """
    if rho.particles != 2:
        raise DimensionError("the W- identity is stated for N = 2")
    g = rho.grid
    h = g.hbar
    a, b = _plus_slices(wigner_rotated(rho), 1)[0]
    F = minus_block(rho, a, b, refine=refine)
    Fx = minus_block(apply_exchange(rho, which), a, b, refine=refine)
    S = wminus_substitution(which)
    M = S.numeric()
    if points is None:
        rng = np.random.default_rng(seed)
        xs, ps = F.axes
        rad = max(1, int(round(1.5 * np.sqrt(h) / (xs[1] - xs[0]))))
        ua, vb = _near_peak(Fx.values, rng, count, rad)
        Aa, Bb = _near_peak(F.values, rng, count, rad)
        lhs_pts = _points_for_targets(M, xs[ua], ps[vb], xs[Aa], ps[Bb])
    else:
        lhs_pts = np.atleast_2d(np.asarray(points, dtype=float))
    rhs_pts = _from_vec(symplectic.substitute(S, _to_vec(lhs_pts)))
    lhs = wminus(Fx, lhs_pts, h)
    rhs = wminus(F, rhs_pts, h)
    scale = max(np.abs(lhs).max(), 1e-300)
    err = float(np.abs(lhs - rhs).max() / scale)
    return Report("wminus_exchange", which, len(lhs_pts), seed if points is None else None,
                  err, tolerance, err <= tolerance,
                  {"plus_slice": [float(g.x[a]), float(g.xi[b])], "refine": refine})
