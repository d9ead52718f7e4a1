"""Töplitz (anti-Wick) quantization of Gaussian symbols.

``Top(h) = (2 pi hbar)^-N int h(Z) |phi_Z><phi_Z| dZ``.  Symbols are finite
mixtures ``sum_k c_k exp(-alpha_k |Z - Z0_k|^2 / hbar)``; each term factorizes
over particles, so both the closed-form kernel and the phase quadrature are
built per particle.

Exchanges are handled through the continued projector.  Writing
``phi_z(x) conj phi_z(y) = P(z, zbar)(x, y)`` with

    P(a, b)(x, y) = (pi hbar)^-1/2 exp(-b a/2hbar) g(a, x) g(b, y),
    g(a, x) = exp(-x^2/2hbar + x a/hbar - a^2/4hbar),

``P`` is entire in ``(a, b)``, and e.g. ``U Top(h)`` is the real-grid integral of
``h(Z) exp(-|z1 - z2|^2/2hbar) P(Z, sigma Zbar)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.special import erfc

from .core import DimensionError, DomainError, GridSpec, Report, TruncationError, TruncationWarning
from .states import (
    DensityMatrix,
    LazyKernel,
    coherent_state,
    trace,
)

__all__ = [
    "GaussianSymbol",
    "ContinuedSymbol",
    "ProductOperator",
    "toeplitz_kernel",
    "toeplitz_quantize",
    "phase_nodes",
    "coupling_check",
    "symbol_exchange",
    "verify_toeplitz_exchange",
    "verify_toeplitz_composition",
    "verify_quadrature_gate",
    "toeplitz_offdiag_quantize",
    "verify_offdiag_lemma",
    "bargmann_check",
    "cross_check_UH",
]

BOX_SIGMAS = 6.0
MAX_NODES_2P = 24
DEFAULT_NODES_1P = 48
PRUNE = 1e-12
MASS_TOL = 1e-6


@dataclass(frozen=True)
class GaussianSymbol:
    """``h(Z) = sum_k c_k exp(-alpha_k |Z - Z0_k|^2 / hbar)`` on ``C^N``.

    Parameters
    ----------
    c : array of complex, shape (K,)
    z0 : array of complex, shape (K, N)
    alpha : array of float, shape (K,), all positive
    hbar : float
    """

    c: np.ndarray
    z0: np.ndarray
    alpha: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=complex))
        z0 = np.asarray(self.z0, dtype=complex)
        if z0.ndim == 1:
            z0 = z0[:, None] if len(c) == len(z0) and len(c) > 1 else z0[None, :]
        a = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if not (len(c) == len(z0) == len(a)) or len(c) == 0:
            raise DimensionError("c, z0 and alpha need one entry per term")
        if z0.shape[1] not in (1, 2):
            raise DimensionError("symbols live on one or two particles")
        if np.any(a <= 0):
            raise DomainError("alpha must be positive")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")
        for name, v in (("c", c), ("z0", z0), ("alpha", a)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def single(cls, z0, alpha: float = 1.0, c: complex = 1.0, hbar: float = 1.0) -> "GaussianSymbol":
        return cls([c], [np.atleast_1d(z0)], [alpha], hbar)

    @property
    def particles(self) -> int:
        return self.z0.shape[1]

    def __len__(self):
        return len(self.c)

    def continued(self, Z, Zbar) -> np.ndarray:
        """Entire continuation: ``|Z - Z0|^2`` becomes ``(Zbar - conj Z0).(Z - Z0)``."""
        Z = np.asarray(Z, dtype=complex)
        Zb = np.asarray(Zbar, dtype=complex)
        out = 0
        for c, z0, a in zip(self.c, self.z0, self.alpha):
            quad = np.sum((Zb - np.conj(z0)) * (Z - z0), axis=-1)
            out = out + c * np.exp(-a * quad / self.hbar)
        return out

    def __call__(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex)
        return self.continued(Z, np.conj(Z))

    def integral(self) -> complex:
        """``int h dZ`` over ``R^2N``."""
        return complex(np.sum(self.c * (np.pi * self.hbar / self.alpha) ** self.particles))

    def trace_value(self) -> complex:
        """``trace Top(h) = (2 pi hbar)^-N int h``."""
        return self.integral() / (2 * np.pi * self.hbar) ** self.particles

    def scaled(self, s: complex) -> "GaussianSymbol":
        return replace(self, c=self.c * s)

    def normalized(self) -> "GaussianSymbol":
        """Rescaled so that ``trace Top(h) = 1``."""
        t = self.trace_value()
        if abs(t) == 0:
            raise DomainError("degenerate trace: the symbol has zero total mass")
        return self.scaled(1 / t)

    def reflected(self) -> "GaussianSymbol":
        """Minus variables negated: ``h(-z)`` for N = 1, particle swap for N = 2."""
        z0 = -self.z0 if self.particles == 1 else self.z0[:, ::-1]
        return replace(self, z0=z0)

    def widths(self) -> np.ndarray:
        """Standard deviation of each term along each real coordinate."""
        return np.sqrt(self.hbar / (2 * self.alpha))

    def box(self, sigmas: float = BOX_SIGMAS) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        """Per particle ``((q_lo, q_hi), (p_lo, p_hi))`` covering every term."""
        s = self.widths()
        out = []
        for k in range(self.particles):
            q, p = self.z0[:, k].real, self.z0[:, k].imag
            out.append(((float(np.min(q - sigmas * s)), float(np.max(q + sigmas * s))),
                        (float(np.min(p - sigmas * s)), float(np.max(p + sigmas * s)))))
        return out

    def mass_outside(self, box) -> float:
        """Fraction of ``sum |c_k| int |term_k|`` outside a product box."""
        s = self.widths()
        mass = np.abs(self.c) * (np.pi * self.hbar / self.alpha) ** self.particles
        frac = np.zeros(len(self))
        for k, ((qa, qb), (pa, pb)) in enumerate(box):
            for centre, lo, hi in ((self.z0[:, k].real, qa, qb), (self.z0[:, k].imag, pa, pb)):
                frac += 0.5 * erfc((centre - lo) / (np.sqrt(2) * s))
                frac += 0.5 * erfc((hi - centre) / (np.sqrt(2) * s))
        return float(np.sum(mass * np.minimum(frac, 1)) / np.sum(mass))


@dataclass(frozen=True)
class ContinuedSymbol:
    """Symbol given only through its continuation ``(Z, Zbar) -> value``."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    particles: int
    hbar: float
    tag: str = ""

    def continued(self, Z, Zbar):
        return self.evaluator(np.asarray(Z, dtype=complex), np.asarray(Zbar, dtype=complex))

    def __call__(self, Z):
        Z = np.asarray(Z, dtype=complex)
        return self.continued(Z, np.conj(Z))


# --- closed form -----------------------------------------------------------

def _kernel_1d(alpha, z0, x, y, hbar):
    q0, p0 = z0.real, z0.imag
    pref = np.sqrt(np.pi * hbar) / (2 * np.pi * hbar * np.sqrt(alpha * (alpha + 1)))
    d = x - y
    s = (x + y) / 2
    return pref * np.exp(1j * p0 * d / hbar - d**2 * (1 / alpha + 1) / (4 * hbar)
                         - alpha * (s - q0) ** 2 / ((alpha + 1) * hbar))


def toeplitz_kernel(h: GaussianSymbol) -> LazyKernel:
    """Closed-form kernel of ``Top(h)`` from the Gaussian phase integral."""
    def ev(X, Y):
        out = 0
        for c, z0, a in zip(h.c, h.z0, h.alpha):
            term = c
            for k in range(h.particles):
                term = term * _kernel_1d(a, z0[k], X[..., k], Y[..., k], h.hbar)
            out = out + term
        return out

    return LazyKernel(ev, h.particles, h.hbar, "Top(closed)")


# --- quadrature ------------------------------------------------------------

def phase_nodes(h: GaussianSymbol, nodes: int | None = None):
    """Per-particle midpoint nodes ``(z, weight)`` covering the symbol.

    Raises
    ------
    TruncationError
        If symbol mass beyond the box exceeds 1e-6, or the node spacing is too
        coarse to resolve coherent-state products (``sqrt(hbar/2)``).
    """
    if nodes is None:
        nodes = MAX_NODES_2P if h.particles == 2 else DEFAULT_NODES_1P
    if h.particles == 2 and nodes > MAX_NODES_2P:
        raise DomainError(f"at most {MAX_NODES_2P} nodes per axis for two particles")
    box = h.box()
    if h.mass_outside(box) > MASS_TOL:
        raise TruncationError("symbol mass outside the quadrature box exceeds 1e-6")
    out = []
    for (qa, qb), (pa, pb) in box:
        dq, dp = (qb - qa) / nodes, (pb - pa) / nodes
        step = max(dq, dp)
        # position resolution of coherent products, and momentum aliasing
        # against the x - y decay of the kernel
        amin = float(np.min(h.alpha))
        K = 2 * np.pi * h.hbar / dp
        if step > np.sqrt(h.hbar / 2) or K**2 / (4 * h.hbar * (1 + amin)) < 18:
            raise TruncationError(
                f"quadrature spacing {step:.3g} too coarse for this symbol; use fewer "
                f"or narrower terms")
        q = qa + dq * (np.arange(nodes) + 0.5)
        p = pa + dp * (np.arange(nodes) + 0.5)
        Q, P = np.meshgrid(q, p, indexing="ij")
        out.append(((Q + 1j * P).ravel(), dq * dp))
    return out


def _quadrature_1d(c, z0, alpha, zs, w, grid: GridSpec, hbar: float) -> DensityMatrix:
    weights = c * np.exp(-alpha * np.abs(zs - z0) ** 2 / hbar) * w / (2 * np.pi * hbar)
    keep = np.abs(weights) >= PRUNE * np.abs(weights).max()
    terms = []
    with warnings.catch_warnings():
        # far nodes carry negligible weight; their kernel values stay exact
        warnings.simplefilter("ignore", TruncationWarning)
        for z, wt in zip(zs[keep], weights[keep]):
            phi = coherent_state([z], grid)
            terms.append((complex(wt), phi, phi))
    return DensityMatrix(tuple(terms), grid)


@dataclass
class ProductOperator:
    """``sum_k c_k A_k (x) B_k`` with one-particle node operators ``A_k, B_k``."""

    factors: list
    grid: GridSpec
    tag: str = "Top(quadrature)"

    @property
    def particles(self) -> int:
        return 2

    def kernel(self, X, Y) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        return sum(c * A.kernel(X[..., 0:1], Y[..., 0:1]) * B.kernel(X[..., 1:2], Y[..., 1:2])
                   for c, A, B in self.factors)

    def trace(self) -> complex:
        return complex(sum(c * trace(A) * trace(B) for c, A, B in self.factors))

    def expectation(self, rho: DensityMatrix) -> complex:
        """``trace(rho T)`` for a two-particle low-rank ``rho``."""
        tot = 0j
        for cr, ket, bra in rho.terms:
            kf, bf = ket.factors(), bra.factors()
            for c, A, B in self.factors:
                for s, u, v in kf:
                    for t, u2, v2 in bf:
                        tot += cr * c * s * np.conj(t) * A.sandwich(u2, u) * B.sandwich(v2, v)
        return complex(tot)

    def node_count(self) -> int:
        return sum(A.rank * B.rank for _, A, B in self.factors)


def toeplitz_quantize(h: GaussianSymbol, grid: GridSpec, method: str = "quadrature",
                      nodes: int | None = None):
    """Töplitz quantization of ``h``.

    ``method="closed"`` returns the analytic :class:`LazyKernel`.
    ``method="quadrature"`` sums coherent projectors over phase nodes: a
    :class:`DensityMatrix` with one term per (unpruned) node for N = 1, and a
    :class:`ProductOperator` of per-particle node sums for N = 2 (the 4-axis
    node grid is the tensor product of the per-particle grids, and each
    Gaussian term factorizes over it exactly).
    """
    if h.particles != grid.particles:
        raise DimensionError("symbol and grid disagree on the particle number")
    if abs(h.hbar - grid.hbar) > 1e-15 * grid.hbar:
        raise DimensionError("symbol and grid use different hbar")
    if method == "closed":
        return toeplitz_kernel(h)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    per = phase_nodes(h, nodes)
    g1 = grid.with_particles(1)
    if h.particles == 1:
        zs, w = per[0]
        terms = []
        for c, z0, a in zip(h.c, h.z0, h.alpha):
            terms.extend(_quadrature_1d(c, z0[0], a, zs, w, g1, h.hbar).terms)
        return DensityMatrix(tuple(terms), grid, hermitian=False)
    factors = []
    for c, z0, a in zip(h.c, h.z0, h.alpha):
        A = _quadrature_1d(1.0, z0[0], a, per[0][0], per[0][1], g1, h.hbar)
        B = _quadrature_1d(1.0, z0[1], a, per[1][0], per[1][1], g1, h.hbar)
        factors.append((complex(c), A, B))
    return ProductOperator(factors, grid)


def _kernel_values(op, X, Y):
    if isinstance(op, LazyKernel):
        return op(X, Y)
    if isinstance(op, ProductOperator):
        return op.kernel(X, Y)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if op.particles == 1 and (X.ndim == 0 or X.shape[-1] != 1):
        X, Y = X[..., None], Y[..., None]
    return op.kernel(X, Y)


def _kernel_pairs(h: GaussianSymbol, grid: GridSpec, count: int, seed: int):
    """Half the pairs near the symbol's centres, half uniform in the trusted box."""
    rng = np.random.default_rng(seed)
    N = h.particles
    k = rng.integers(0, len(h), count)
    spread = h.widths()[k][:, None] + np.sqrt(h.hbar)
    near_x = h.z0[k].real + spread * rng.standard_normal((count, N))
    near_y = h.z0[k].real + spread * rng.standard_normal((count, N))
    box_x = rng.uniform(-grid.q_box, grid.q_box, (count, N))
    box_y = rng.uniform(-grid.q_box, grid.q_box, (count, N))
    take = (np.arange(count) % 2 == 0)[:, None]
    X = np.clip(np.where(take, near_x, box_x), -grid.q_box, grid.q_box)
    Y = np.clip(np.where(take, near_y, box_y), -grid.q_box, grid.q_box)
    return X, Y


def _kernel_scale(h: GaussianSymbol, K: LazyKernel, extra: np.ndarray) -> float:
    centres = h.z0.real
    diag = np.abs(K(centres, centres))
    return float(max(diag.max(), np.abs(extra).max(), 1e-300))


def verify_quadrature_gate(h: GaussianSymbol, grid: GridSpec, count: int = 100, seed: int = 42,
                           tolerance: float = 1e-6) -> Report:
    """Quadrature kernel against the closed-form kernel at random position pairs."""
    K = toeplitz_kernel(h)
    T = toeplitz_quantize(h, grid)
    X, Y = _kernel_pairs(h, grid, count, seed)
    a = K(X, Y)
    b = _kernel_values(T, X, Y)
    err = float(np.abs(a - b).max() / _kernel_scale(h, K, a))
    tr = complex(T.trace() if isinstance(T, ProductOperator) else trace(T))
    return Report("toeplitz_quadrature_gate", "-", count, seed, err, tolerance, err <= tolerance,
                  {"trace_quadrature": [tr.real, tr.imag],
                   "trace_rule": [h.trace_value().real, h.trace_value().imag]})


# --- coupling --------------------------------------------------------------

def coupling_check(rho: DensityMatrix, hp: GaussianSymbol, m: int = 32,
                   tolerance: float = 1e-5) -> Report:
    """``int Hus[rho] h' dZ = trace(rho Top(h'))``.

    Left side: Riemann sum of Husimi values on :func:`husimi.phase_grid`;
    right side: the trace against the quadrature quantization.
    """
    from . import husimi
    from .states import trace_product

    g = rho.grid
    if hp.particles != rho.particles:
        raise DimensionError("symbol and state disagree on the particle number")
    q, p = husimi.phase_grid(g, m)
    Hv = husimi.husimi_grid(rho, q, p)
    cell = (q[1] - q[0]) * (p[1] - p[0])
    if rho.particles == 1:
        Z = (q[:, None] + 1j * p[None, :])[..., None]
        lhs = np.sum(Hv * hp(Z)) * cell
    else:
        z = q[:, None] + 1j * p[None, :]
        lhs = 0
        for c, z0, a in zip(hp.c, hp.z0, hp.alpha):
            f1 = np.exp(-a * np.abs(z - z0[0]) ** 2 / hp.hbar)
            f2 = np.exp(-a * np.abs(z - z0[1]) ** 2 / hp.hbar)
            lhs = lhs + c * np.einsum("ab,abcd,cd->", f1, Hv, f2)
        lhs = lhs * cell**2
    T = toeplitz_quantize(hp, g)
    rhs = T.expectation(rho) if isinstance(T, ProductOperator) else trace_product(rho, T)
    err = float(abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return Report("husimi_toeplitz_coupling", "-", int(Hv.size), None, err, tolerance,
                  err <= tolerance, {"lhs": [float(np.real(lhs)), float(np.imag(lhs))],
                                     "rhs": [float(np.real(rhs)), float(np.imag(rhs))]})


# --- exchange ----------------------------------------------------------------

def _swap_minus_bar(Z, Zbar, which, N):
    """Continued arguments of the exchanged symbol.

    U keeps ``z`` and sends ``zbar_-`` to ``-zbar_-``; V sends ``z_-`` to ``-z_-``.
    In real coordinates U is ``(q-, p-) -> (i p-, -i q-)`` and V is
    ``(q-, p-) -> (-i p-, i q-)``.
    """
    flip = (lambda A: A[..., ::-1]) if N == 2 else (lambda A: -A)
    if which == "U":
        return Z, flip(Zbar)
    return flip(Z), Zbar


def symbol_exchange(h: GaussianSymbol, which: str = "U") -> ContinuedSymbol:
    """Continued symbol of the exchanged operator.

    ``h_U(Z, Zbar) = exp(zbar_- z_-/hbar) h(z_+, zbar_+, z_-, -zbar_-)`` and
    ``h_V(Z, Zbar) = exp(zbar_- z_-/hbar) h(z_+, zbar_+, -z_-, zbar_-)`` with
    ``z_- = (z1 - z2)/sqrt 2`` (N = 2) or ``z_- = z`` in the one-particle relative
    picture. The weight grows along the real phase space, so these symbols are
    meaningful through their continuation; on the real diagonal ``z_- = 0``
    they reduce to ``h``.
    """
    if which not in ("U", "V"):
        raise ValueError(f"unknown exchange {which!r}")
    N = h.particles

    def minus_sq(Z, Zb):
        if N == 2:
            return (Zb[..., 0] - Zb[..., 1]) * (Z[..., 0] - Z[..., 1]) / 2
        return Zb[..., 0] * Z[..., 0]

    def ev(Z, Zb):
        A, B = _swap_minus_bar(Z, Zb, which, N)
        return np.exp(minus_sq(Z, Zb) / h.hbar) * h.continued(A, B)

    return ContinuedSymbol(ev, N, h.hbar, f"{which}-exchanged")


def _g(a, x, hbar):
    return np.exp(-x**2 / (2 * hbar) + x * a / hbar - a**2 / (4 * hbar))


def continued_projector(A, B, X, Y, hbar):
    """``prod_k P(a_k, b_k)(x_k, y_k)``; equals ``phi_Z(X) conj phi_Z(Y)`` at ``B = conj A``."""
    c2 = 1 / np.sqrt(np.pi * hbar)
    return np.prod(c2 * np.exp(-B * A / (2 * hbar)) * _g(A, X, hbar) * _g(B, Y, hbar), axis=-1)


def _full_nodes(h: GaussianSymbol, nodes=None):
    per = phase_nodes(h, nodes)
    if h.particles == 1:
        return per[0][0][:, None], per[0][1]
    z1, w1 = per[0]
    z2, w2 = per[1]
    Z = np.stack(np.broadcast_arrays(z1[:, None], z2[None, :]), axis=-1).reshape(-1, 2)
    return Z, w1 * w2


def exchanged_by_quadrature(h: GaussianSymbol, which: str, X, Y, nodes=None) -> np.ndarray:
    """Kernel of the exchanged Töplitz operator from the continued symbol.

    ``(2 pi hbar)^-N sum_nodes w h_x(Z, Zbar') P(Z', Zbar')(X, Y)`` where
    ``(Z', Zbar')`` are the exchanged continued arguments, evaluated on the
    real phase grid.
    """
    hx = symbol_exchange(h, which)
    Z, w = _full_nodes(h, nodes)
    Zb = np.conj(Z)
    A, B = _swap_minus_bar(Z, Zb, which, h.particles)
    vals = hx.continued(A, B) * w / (2 * np.pi * h.hbar) ** h.particles
    # the continued projector grows like the inverse weight, so prune on |h|
    size = np.abs(h(Z))
    keep = size >= PRUNE * size.max()
    A, B, vals = A[keep], B[keep], vals[keep]
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    out = np.empty(len(X), dtype=complex)
    for r in range(len(X)):
        out[r] = np.sum(vals * continued_projector(A, B, X[r], Y[r], h.hbar))
    return out


def verify_toeplitz_exchange(h: GaussianSymbol, which: str = "U", grid: GridSpec | None = None,
                             count: int = 50, seed: int = 42, tolerance: float = 1e-5) -> Report:
    """Operator-kernel form of the exchange lemma for Töplitz operators.

    A: the closed-form kernel of ``Top(h)`` with the exchange applied to its
    arguments. B: quadrature of :func:`symbol_exchange` against the continued
    projector. Error relative to the kernel maximum.
    """
    grid = grid or GridSpec(particles=h.particles, hbar=h.hbar)
    K = toeplitz_kernel(h)
    X, Y = _kernel_pairs(h, grid, count, seed)
    a = K.exchanged(which)(X, Y)
    b = exchanged_by_quadrature(h, which, X, Y)
    err = float(np.abs(a - b).max() / _kernel_scale(h, K, a))
    return Report("toeplitz_exchange", which, count, seed, err, tolerance, err <= tolerance)


def verify_toeplitz_composition(h: GaussianSymbol, grid: GridSpec | None = None, count: int = 50,
                                seed: int = 42, tolerance: float = 1e-6) -> Report:
    """``UV Top(h) = Top(h reflected)``: exchanged closed form against the
    quadrature quantization of the point-reflected symbol."""
    grid = grid or GridSpec(particles=h.particles, hbar=h.hbar)
    K = toeplitz_kernel(h)
    X, Y = _kernel_pairs(h, grid, count, seed)
    a = K.exchanged("UV")(X, Y)
    b = _kernel_values(toeplitz_quantize(h.reflected(), grid), X, Y)
    err = float(np.abs(a - b).max() / _kernel_scale(h, K, a))
    return Report("toeplitz_uv_composition", "UV", count, seed, err, tolerance, err <= tolerance)


# --- off-diagonal quantizer (one-particle relative picture) ------------------

def _need_one(h: GaussianSymbol):
    if h.particles != 1:
        raise DimensionError("the off-diagonal quantizer works in the one-particle relative picture")


def toeplitz_offdiag_quantize(h: GaussianSymbol, sign: str = "U", nodes=None) -> LazyKernel:
    """``int h(z) |psi_{+z}><psi_{-z}| dz/(2 pi hbar)`` (U) or ``|psi_{-z}><psi_{+z}|`` (V).

    Lazily evaluated by phase quadrature at the requested points; no Gaussian
    weight is involved.
    """
    _need_one(h)
    if sign not in ("U", "V"):
        raise ValueError(f"unknown sign {sign!r}")
    Z, w = _full_nodes(h, nodes)
    z = Z[:, 0]
    vals = h(Z) * w / (2 * np.pi * h.hbar)
    keep = np.abs(vals) >= PRUNE * np.abs(vals).max()
    z, vals = z[keep], vals[keep]
    hb = h.hbar
    c = (np.pi * hb) ** -0.25

    def psi(zz, x):
        return c * np.exp(-(x - zz.real) ** 2 / (2 * hb) + 1j * zz.imag * x / hb)

    ket_s, bra_s = (1, -1) if sign == "U" else (-1, 1)

    def ev(X, Y):
        Xf = np.asarray(X)[..., 0].ravel()
        Yf = np.asarray(Y)[..., 0].ravel()
        out = np.array([np.sum(vals * psi(ket_s * z, x) * np.conj(psi(bra_s * z, y)))
                        for x, y in zip(Xf, Yf)])
        return out.reshape(np.asarray(X).shape[:-1])

    return LazyKernel(ev, 1, hb, f"Toff_{sign}", {"nodes": int(len(z))})


def bargmann_check(hbar: float = 1.0, count: int = 50, seed: int = 42,
                   tolerance: float = 1e-10) -> Report:
    """Pointwise identity behind the off-diagonal lemma, closed forms only::

        psi_z(x) conj psi_z(-y) = exp(-|z|^2/hbar) P(z, -zbar)(x, y)

    The right side is the continued projector with the bra argument reflected.
    The literal variant ``exp(-|z|^2/hbar) psi_z(x) conj psi_z(y)`` is reported
    in ``details`` for comparison.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(-3, 3, count) * np.sqrt(hbar)
    y = rng.uniform(-3, 3, count) * np.sqrt(hbar)
    z = (rng.uniform(-1.5, 1.5, count) + 1j * rng.uniform(-1.5, 1.5, count)) * np.sqrt(hbar)
    c = (np.pi * hbar) ** -0.25

    def psi(zz, t):
        return c * np.exp(-(t - zz.real) ** 2 / (2 * hbar) + 1j * zz.imag * t / hbar)

    lhs = psi(z, x) * np.conj(psi(z, -y))
    weight = np.exp(-np.abs(z) ** 2 / hbar)
    rhs = weight * continued_projector(z[:, None], -np.conj(z)[:, None], x[:, None], y[:, None], hbar)
    literal = weight * psi(z, x) * np.conj(psi(z, y))
    scale = np.abs(lhs) + 1e-300
    err = float(np.max(np.abs(lhs - rhs) / scale))
    lit = float(np.max(np.abs(lhs - literal) / scale))
    return Report("bargmann_identity", "U", count, seed, err, tolerance, err <= tolerance,
                  {"literal_form_residual": lit})


def verify_offdiag_lemma(h: GaussianSymbol, grid: GridSpec | None = None, count: int = 50,
                         seed: int = 42, tolerance: float = 1e-6) -> list[Report]:
    """``U Top(h) = Toff_U(h)`` and ``V Top(h) = Toff_V(h)`` at sampled pairs,
    plus the Bargmann identity and ``U^2 = V^2 = 1`` on kernels."""
    _need_one(h)
    grid = grid or GridSpec(particles=1, hbar=h.hbar)
    K = toeplitz_kernel(h)
    X, Y = _kernel_pairs(h, grid, count, seed)
    reports = []
    for which in ("U", "V"):
        a = K.exchanged(which)(X, Y)
        b = toeplitz_offdiag_quantize(h, which)(X, Y)
        err = float(np.abs(a - b).max() / _kernel_scale(h, K, a))
        reports.append(Report("offdiag_lemma", which, count, seed, err, tolerance, err <= tolerance))
    reports.append(bargmann_check(h.hbar, count, seed))
    base = K(X, Y)
    inv = max(float(np.abs(K.exchanged(w).exchanged(w)(X, Y) - base).max()) for w in "UV")
    reports.append(Report("exchange_involution", "UV", count, seed, inv, 0.0, inv == 0.0))
    return reports


def cross_check_UH(h: GaussianSymbol, grid: GridSpec | None = None, count: int = 50, seed: int = 42,
                   tolerance: float = 1e-5) -> Report:
    """``U Top(h)`` three ways: reflected closed form, off-diagonal quantizer
    (no weight) and the diagonal weighted continued-projector quadrature."""
    _need_one(h)
    grid = grid or GridSpec(particles=1, hbar=h.hbar)
    K = toeplitz_kernel(h)
    X, Y = _kernel_pairs(h, grid, count, seed)
    a = K.exchanged("U")(X, Y)
    b = toeplitz_offdiag_quantize(h, "U")(X, Y)
    c = exchanged_by_quadrature(h, "U", X, Y)
    scale = _kernel_scale(h, K, a)
    err = float(max(np.abs(a - b).max(), np.abs(a - c).max(), np.abs(b - c).max()) / scale)
    return Report("uh_three_paths", "U", count, seed, err, tolerance, err <= tolerance,
                  {"closed_vs_offdiag": float(np.abs(a - b).max() / scale),
                   "closed_vs_diagonal": float(np.abs(a - c).max() / scale)})


def offdiag_trace(h: GaussianSymbol) -> complex:
    """``int h(z) <psi_{-z}|psi_z> dz/(2 pi hbar)`` in closed form."""
    _need_one(h)
    tot = 0j
    for c, z0, a in zip(h.c, h.z0[:, 0], h.alpha):
        tot += c * np.pi * h.hbar / (a + 1) * np.exp(-a * abs(z0) ** 2 / ((a + 1) * h.hbar))
    return tot / (2 * np.pi * h.hbar)
