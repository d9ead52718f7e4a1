"""Coherent states, low-rank density matrices and the exchange maps U, V.

A :class:`DensityMatrix` is a finite sum ``sum_k c_k |ket_k><bra_k|``; its
kernel ``rho(X; Y) = sum_k c_k ket_k(X) conj(bra_k(Y))`` is never materialized
unless asked for.  Wavefunctions built from coherent states remember their
expansion, which lets every transform evaluate them exactly off the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .core import DimensionError, DomainError, GridSpec, PhasePoint, warn_truncation

__all__ = [
    "Wavefunction",
    "DensityMatrix",
    "ExchangePair",
    "LazyKernel",
    "coherent_values",
    "coherent_state",
    "coherent_superposition",
    "overlap_closed_form",
    "projector",
    "mixture",
    "exchange_U",
    "exchange_V",
    "reflect_U",
    "reflect_V",
    "apply_exchange",
    "trace",
    "trace_product",
    "spectrum",
]


def coherent_values(z, x, hbar: float) -> np.ndarray:
    """One-particle coherent state ``(pi hbar)^-1/4 exp(-(x-q)^2/2hbar + i p x/hbar)``.

    ``z`` and ``x`` broadcast against each other.
    """
    z = np.asarray(z, dtype=complex)
    q, p = z.real, z.imag
    return (np.pi * hbar) ** -0.25 * np.exp(-((x - q) ** 2) / (2 * hbar) + 1j * p * x / hbar)


def overlap_closed_form(za, zb, hbar: float) -> complex:
    """``<phi_za | phi_zb>`` for (tensor) coherent states.

    Per particle the Gaussian integral gives
    ``exp(-|za-zb|^2/4hbar + i (pb-pa)(qa+qb)/2hbar)``.
    """
    za = np.asarray(getattr(za, "z", za), dtype=complex)
    zb = np.asarray(getattr(zb, "z", zb), dtype=complex)
    if za.shape[-1:] != zb.shape[-1:]:
        raise DimensionError("phase points of different lengths")
    d = za - zb
    expo = -(d.real**2 + d.imag**2) / (4 * hbar) + 1j * (zb.imag - za.imag) * (za.real + zb.real) / (2 * hbar)
    return np.exp(expo.sum(axis=-1))


@dataclass(frozen=True)
class Wavefunction:
    """Samples of an N-particle wavefunction on the tensor grid.

    ``expansion``, when present, is ``(coeffs, Z)`` with ``Z`` of shape
    ``(K, N)`` meaning ``sum_k coeffs[k] * phi_{Z[k]}``; it is kept in sync by
    every operation and is used for exact evaluation away from grid nodes.
    """

    values: np.ndarray
    grid: GridSpec
    expansion: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise DimensionError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "values", v)
        if self.expansion is not None:
            c, Z = self.expansion
            c = np.asarray(c, dtype=complex).reshape(-1)
            Z = np.asarray(Z, dtype=complex).reshape(len(c), self.grid.particles)
            object.__setattr__(self, "expansion", (c, Z))

    @property
    def particles(self) -> int:
        return self.grid.particles

    def inner(self, other: "Wavefunction") -> complex:
        """Grid quadrature of ``<self|other>``."""
        if not self.grid == other.grid:
            raise DimensionError("wavefunctions live on different grids")
        return complex(np.vdot(self.values, other.values) * self.grid.dx**self.particles)

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self).real))

    def scaled(self, a: complex) -> "Wavefunction":
        exp = None if self.expansion is None else (a * self.expansion[0], self.expansion[1])
        return Wavefunction(a * self.values, self.grid, exp)

    def __add__(self, other: "Wavefunction") -> "Wavefunction":
        if not self.grid == other.grid:
            raise DimensionError("wavefunctions live on different grids")
        exp = None
        if self.expansion is not None and other.expansion is not None:
            exp = (np.concatenate([self.expansion[0], other.expansion[0]]),
                   np.concatenate([self.expansion[1], other.expansion[1]]))
        return Wavefunction(self.values + other.values, self.grid, exp)

    def __sub__(self, other: "Wavefunction") -> "Wavefunction":
        return self + other.scaled(-1.0)

    def swapped(self) -> "Wavefunction":
        """Exchange the two particle coordinates, ``psi(x2, x1)``."""
        if self.particles != 2:
            raise DimensionError("swapping needs two particles")
        exp = None
        if self.expansion is not None:
            exp = (self.expansion[0], self.expansion[1][:, ::-1])
        return Wavefunction(self.values.T, self.grid, exp)

    def reflected(self) -> "Wavefunction":
        """``psi(-x)`` for a one-axis wavefunction.

        On the grid ``-x_k = x_{n-k}``; index 0 wraps onto itself (periodic
        identification of ``-L`` with ``L``), keeping the map an exact involution.
        """
        if self.particles != 1:
            raise DimensionError("reflection acts on the one-axis (relative) picture")
        exp = None if self.expansion is None else (self.expansion[0], -self.expansion[1])
        return Wavefunction(np.roll(self.values[::-1], 1), self.grid, exp)

    def evaluate(self, points) -> np.ndarray:
        """Values at arbitrary positions, ``points`` of shape ``(..., N)``.

        Exact when a coherent expansion is attached; otherwise band-limited
        (trigonometric) interpolation of the samples, zero outside ``[-L, L)``.
        """
        pts = np.asarray(points, dtype=float)
        N = self.particles
        if N == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        if pts.shape[-1] != N:
            raise DimensionError(f"points need a trailing axis of length {N}")
        if self.expansion is not None:
            c, Z = self.expansion
            out = np.zeros(pts.shape[:-1], dtype=complex)
            for ck, Zk in zip(c, Z):
                term = np.full(pts.shape[:-1], ck, dtype=complex)
                for a in range(N):
                    term = term * coherent_values(Zk[a], pts[..., a], self.grid.hbar)
                out += term
            return out
        if N == 1:
            return _trig_interp(self.values, self.grid, pts[..., 0])
        out = np.zeros(pts.shape[:-1], dtype=complex)
        for s, u, v in self.factors():
            out += s * u.evaluate(pts[..., 0]) * v.evaluate(pts[..., 1])
        return out

    def factors(self, rtol: float = 1e-14) -> list[tuple[complex, "Wavefunction", "Wavefunction"]]:
        """Split a two-particle wavefunction into ``sum_k s_k u_k(x1) v_k(x2)``.

        Coherent expansions split exactly term by term; raw samples go through
        an SVD truncated at ``rtol`` relative to the largest singular value.
        """
        if self.particles != 2:
            raise DimensionError("factors() needs two particles")
        g1 = self.grid.with_particles(1)
        if self.expansion is not None:
            out = []
            for ck, Zk in zip(*self.expansion):
                out.append((ck, coherent_state(Zk[0], g1), coherent_state(Zk[1], g1)))
            return out
        u, s, vh = np.linalg.svd(self.values)
        keep = s > rtol * s[0] if s[0] > 0 else s > 0
        return [(complex(s[k]), Wavefunction(u[:, k], g1), Wavefunction(vh[k], g1))
                for k in np.flatnonzero(keep)]

    def rotated(self) -> "Wavefunction":
        """The same state written in ``(x_+, x_-)`` coordinates.

        Coherent products stay coherent products with rotated centres, so the
        expansion is rotated exactly; raw samples are re-evaluated at the
        rotated grid points.
        """
        if self.particles != 2:
            raise DimensionError("rotation needs two particles")
        g = self.grid
        if self.expansion is not None:
            c, Z = self.expansion
            Zr = np.stack([(Z[:, 0] + Z[:, 1]), (Z[:, 0] - Z[:, 1])], axis=1) / np.sqrt(2)
            return _from_expansion(c, Zr, g)
        xp, xm = np.meshgrid(g.x, g.x, indexing="ij")
        x1 = (xp + xm) / np.sqrt(2)
        x2 = (xp - xm) / np.sqrt(2)
        return Wavefunction(self.evaluate(np.stack([x1, x2], axis=-1)), g)


def _trig_interp(values: np.ndarray, grid: GridSpec, x: np.ndarray) -> np.ndarray:
    n = grid.n
    c = np.fft.fft(values) / n
    k = np.fft.fftfreq(n, d=1.0 / n)
    omega = 2 * np.pi * k / (n * grid.dx)
    xr = np.asarray(x, dtype=float)
    t = xr.reshape(-1, 1) - grid.x[0]
    phase = np.exp(1j * t * omega[None, :])
    nyq = n // 2
    phase[:, nyq] = np.cos(t[:, 0] * np.pi / grid.dx)
    out = (phase @ c).reshape(xr.shape)
    return np.where((xr >= -grid.L) & (xr < grid.L), out, 0.0)


def _from_expansion(c, Z, grid: GridSpec) -> Wavefunction:
    c = np.asarray(c, dtype=complex).reshape(-1)
    Z = np.asarray(Z, dtype=complex).reshape(len(c), grid.particles)
    mesh = np.stack(np.meshgrid(*([grid.x] * grid.particles), indexing="ij"), axis=-1)
    vals = np.zeros(grid.shape, dtype=complex)
    for ck, Zk in zip(c, Z):
        term = np.full(grid.shape, ck, dtype=complex)
        for a in range(grid.particles):
            term = term * coherent_values(Zk[a], mesh[..., a], grid.hbar)
        vals += term
    return Wavefunction(vals, grid, (c, Z))


def coherent_state(Z, grid: GridSpec) -> Wavefunction:
    """Tensor-product coherent state ``phi_Z`` sampled on ``grid``.

    For one particle ``phi_z(x) = (pi hbar)^-1/4 exp(-(x-q)^2/2hbar) exp(i p x/hbar)``.
    Warns with :class:`~phasestat.core.TruncationWarning` when a centre is
    closer than ``4 sqrt(hbar)`` to the grid edge.
    """
    z = np.atleast_1d(np.asarray(getattr(Z, "z", Z), dtype=complex))
    if len(z) != grid.particles:
        raise DimensionError(f"phase point of length {len(z)} for a {grid.particles}-particle grid")
    if np.any(np.abs(z.real) > grid.L - 4 * np.sqrt(grid.hbar)):
        warn_truncation(f"coherent state centred at q={z.real} leaves the grid [-{grid.L}, {grid.L})")
    return _from_expansion([1.0], z[None, :], grid)


def coherent_superposition(coeffs, Zs, grid: GridSpec, normalize: bool = True) -> Wavefunction:
    """``sum_k coeffs[k] phi_{Zs[k]}``, normalized with the closed-form Gram matrix."""
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    Z = np.asarray(Zs, dtype=complex).reshape(len(c), grid.particles)
    if normalize:
        gram = overlap_closed_form(Z[:, None, :], Z[None, :, :], grid.hbar)
        nrm2 = np.real(np.conj(c) @ gram @ c)
        if nrm2 <= 0:
            raise DomainError("superposition has zero norm")
        c = c / np.sqrt(nrm2)
    return _from_expansion(c, Z, grid)


@dataclass(frozen=True)
class ExchangePair:
    i: int = 1
    j: int = 2

    def __post_init__(self):
        if self.i == self.j or min(self.i, self.j) < 1 or max(self.i, self.j) > 2:
            raise DomainError(f"invalid exchange pair ({self.i}, {self.j}) for N <= 2")


Term = tuple[complex, Wavefunction, Wavefunction]


@dataclass(frozen=True)
class DensityMatrix:
    """Low-rank operator ``sum_k c_k |ket_k><bra_k|`` on one grid."""

    terms: tuple[Term, ...]
    grid: GridSpec
    hermitian: bool = False
    normalized: bool = False

    def __post_init__(self):
        terms = tuple((complex(c), k, b) for c, k, b in self.terms)
        if not terms:
            raise DomainError("a density matrix needs at least one term")
        for _, k, b in terms:
            if k.grid != self.grid or b.grid != self.grid:
                raise DimensionError("all terms must share the density matrix grid")
        object.__setattr__(self, "terms", terms)
        if self.hermitian:
            for c, k, b in terms:
                if k is not b and not np.array_equal(k.values, b.values):
                    raise DomainError("hermitian flag requires bra == ket in every term")
                if c.imag != 0 or c.real < 0:
                    raise DomainError("hermitian flag requires real non-negative weights")
        if self.normalized and abs(trace(self) - 1) > 1e-10:
            raise DomainError(f"normalized flag set but trace = {trace(self)}")

    @property
    def particles(self) -> int:
        return self.grid.particles

    @property
    def rank(self) -> int:
        return len(self.terms)

    def map_terms(self, fn: Callable[[Term], Term], **flags) -> "DensityMatrix":
        return DensityMatrix(tuple(fn(t) for t in self.terms), self.grid, **flags)

    def scaled(self, a: complex) -> "DensityMatrix":
        return DensityMatrix(tuple((a * c, k, b) for c, k, b in self.terms), self.grid)

    def __add__(self, other: "DensityMatrix") -> "DensityMatrix":
        if other.grid != self.grid:
            raise DimensionError("density matrices live on different grids")
        return DensityMatrix(self.terms + other.terms, self.grid)

    def __sub__(self, other: "DensityMatrix") -> "DensityMatrix":
        return self + other.scaled(-1.0)

    def kernel(self, X, Y) -> np.ndarray:
        """``rho(X; Y)`` at position arrays of shape ``(..., N)`` (exact for coherent terms)."""
        out = 0
        for c, k, b in self.terms:
            out = out + c * k.evaluate(X) * np.conj(b.evaluate(Y))
        return np.asarray(out)

    def kernel_matrix(self) -> np.ndarray:
        """Dense ``rho(X_a; Y_b)`` over grid nodes, shape ``(n^N, n^N)``."""
        kets = np.stack([k.values.reshape(-1) for _, k, _ in self.terms], axis=1)
        bras = np.stack([b.values.reshape(-1) for _, _, b in self.terms], axis=1)
        c = np.array([t[0] for t in self.terms])
        return (kets * c) @ bras.conj().T

    def apply(self, wf: Wavefunction) -> Wavefunction:
        vals = sum(c * b.inner(wf) * k.values for c, k, b in self.terms)
        return Wavefunction(vals, self.grid)

    def sandwich(self, left: Wavefunction, right: Wavefunction) -> complex:
        """``<left| rho |right>`` by grid quadrature."""
        return complex(sum(c * left.inner(k) * b.inner(right) for c, k, b in self.terms))


def projector(wf: Wavefunction, weight: float = 1.0) -> DensityMatrix:
    return DensityMatrix(((weight, wf, wf),), wf.grid, hermitian=weight >= 0)


def mixture(weights: Sequence[float], states: Sequence[Wavefunction]) -> DensityMatrix:
    """Convex combination of pure states, flagged Hermitian."""
    if len(weights) != len(states):
        raise DimensionError("one weight per state")
    terms = tuple((float(w), s, s) for w, s in zip(weights, states))
    return DensityMatrix(terms, states[0].grid, hermitian=all(w >= 0 for w in weights))


def _need_two(rho: DensityMatrix, pair: ExchangePair):
    if rho.particles != 2:
        raise DimensionError("exchange maps need N = 2 (use reflect_U/reflect_V for the relative picture)")
    ExchangePair(pair.i, pair.j)


def exchange_U(rho: DensityMatrix, pair: ExchangePair = ExchangePair()) -> DensityMatrix:
    """``U rho(X; Y) = rho(X; Y)|_{y_i <-> y_j}``: swap the bra coordinates."""
    _need_two(rho, pair)
    return rho.map_terms(lambda t: (t[0], t[1], t[2].swapped()))


def exchange_V(rho: DensityMatrix, pair: ExchangePair = ExchangePair()) -> DensityMatrix:
    """``V rho(X; Y) = rho(X; Y)|_{x_i <-> x_j}``: swap the ket coordinates."""
    _need_two(rho, pair)
    return rho.map_terms(lambda t: (t[0], t[1].swapped(), t[2]))


def reflect_U(rho: DensityMatrix) -> DensityMatrix:
    """Relative-coordinate U: ``rho(x, y) -> rho(x, -y)``."""
    if rho.particles != 1:
        raise DimensionError("reflect_U acts on the one-axis relative picture")
    return rho.map_terms(lambda t: (t[0], t[1], t[2].reflected()))


def reflect_V(rho: DensityMatrix) -> DensityMatrix:
    """Relative-coordinate V: ``rho(x, y) -> rho(-x, y)``."""
    if rho.particles != 1:
        raise DimensionError("reflect_V acts on the one-axis relative picture")
    return rho.map_terms(lambda t: (t[0], t[1].reflected(), t[2]))


def apply_exchange(rho, which: str):
    """Apply ``U``, ``V`` or ``UV`` picking the picture from the particle count.

    Two particles: coordinate swaps; one axis: the relative-coordinate parity
    flips. Also accepts a :class:`LazyKernel`.
    """
    if isinstance(rho, LazyKernel):
        return rho.exchanged(which)
    ops = {2: {"U": exchange_U, "V": exchange_V}, 1: {"U": reflect_U, "V": reflect_V}}[rho.particles]
    if which == "UV":
        return ops["U"](ops["V"](rho))
    if which not in ops:
        raise ValueError(f"unknown exchange {which!r}")
    return ops[which](rho)


def trace(rho: DensityMatrix) -> complex:
    return complex(sum(c * b.inner(k) for c, k, b in rho.terms))


def trace_product(rho: DensityMatrix, sigma: DensityMatrix) -> complex:
    """``trace(rho sigma) = sum_{k,l} c_k d_l <bra_k|ket'_l> <bra'_l|ket_k>``."""
    if rho.grid != sigma.grid:
        raise DimensionError("density matrices live on different grids")
    dv = rho.grid.dx**rho.particles
    A = np.stack([b.values.reshape(-1) for _, _, b in rho.terms])
    B = np.stack([k.values.reshape(-1) for _, k, _ in sigma.terms])
    C = np.stack([b.values.reshape(-1) for _, _, b in sigma.terms])
    D = np.stack([k.values.reshape(-1) for _, k, _ in rho.terms])
    ab = (A.conj() @ B.T) * dv          # <bra_k|ket'_l>
    cd = (C.conj() @ D.T) * dv          # <bra'_l|ket_k>
    c = np.array([t[0] for t in rho.terms])
    d = np.array([t[0] for t in sigma.terms])
    return complex(np.einsum("k,l,kl,lk->", c, d, ab, cd))


def spectrum(rho: DensityMatrix) -> np.ndarray:
    """Eigenvalues of the Hermitian part of ``rho`` acting on grid functions.

    Uses the dense Galerkin matrix ``K * dx^N`` when ``n^N`` does not exceed
    the total ket/bra count, and otherwise the compression onto an orthonormal
    basis of the span of kets and bras (the operator vanishes off that span).
    """
    dv = rho.grid.dx**rho.particles
    size = rho.grid.n**rho.particles
    kets = np.stack([k.values.reshape(-1) for _, k, _ in rho.terms], axis=1)
    bras = np.stack([b.values.reshape(-1) for _, _, b in rho.terms], axis=1)
    c = np.array([t[0] for t in rho.terms])
    if size <= 2 * rho.rank:
        M = ((kets * c) @ bras.conj().T) * dv
    else:
        Q, R = np.linalg.qr(np.concatenate([kets, bras], axis=1))
        keep = np.abs(np.diag(R)) > 1e-13 * np.abs(np.diag(R)).max()
        Q = Q[:, keep]
        M = ((Q.conj().T @ kets) * c) @ (bras.conj().T @ Q) * dv
    M = 0.5 * (M + M.conj().T)
    return np.linalg.eigvalsh(M)


@dataclass(frozen=True)
class LazyKernel:
    """Kernel ``K(X; Y)`` given by an evaluator on position arrays ``(..., N)``."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    particles: int
    hbar: float
    tag: str = ""
    info: dict = field(default_factory=dict, compare=False)

    def __call__(self, X, Y) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if self.particles == 1:
            if X.ndim == 0 or X.shape[-1] != 1:
                X = X[..., None]
            if Y.ndim == 0 or Y.shape[-1] != 1:
                Y = Y[..., None]
        return self.evaluator(X, Y)

    def exchanged(self, which: str) -> "LazyKernel":
        """U / V / UV as point maps on the bra / ket arguments."""
        if self.particles == 2:
            flip = lambda P: P[..., ::-1]
        else:
            flip = lambda P: -P
        ev = self.evaluator
        if which == "U":
            fn = lambda X, Y: ev(X, flip(Y))
        elif which == "V":
            fn = lambda X, Y: ev(flip(X), Y)
        elif which == "UV":
            fn = lambda X, Y: ev(flip(X), flip(Y))
        else:
            raise ValueError(f"unknown exchange {which!r}")
        return replace(self, evaluator=fn, tag=f"{which}({self.tag})")

    def __add__(self, other: "LazyKernel") -> "LazyKernel":
        a, b = self.evaluator, other.evaluator
        return replace(self, evaluator=lambda X, Y: a(X, Y) + b(X, Y), tag=f"{self.tag}+{other.tag}")

    def scaled(self, s: complex) -> "LazyKernel":
        a = self.evaluator
        return replace(self, evaluator=lambda X, Y: s * a(X, Y), tag=f"{s}*{self.tag}")

    def matrix(self, grid: GridSpec) -> np.ndarray:
        """Dense kernel on the grid nodes (one-axis kernels only)."""
        if self.particles != 1:
            raise DimensionError("matrix() is provided for one-axis kernels")
        X, Y = np.meshgrid(grid.x, grid.x, indexing="ij")
        return self(X, Y)
