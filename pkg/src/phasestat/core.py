"""Grids, Riemann quadrature, the ± rotation and the semiclassical symplectic
Fourier transform shared by every symbol module.

Conventions
-----------
Positions live on ``x_k = -L + k*dx`` with ``dx = 2L/n``; momenta live on the
FFT dual grid ``xi_m = (pi*hbar/L) * (m - n/2)``.  With these two axes the
kernel ``exp(-i x xi / hbar)`` lines up with a plain length-``n`` DFT, so no
interpolation is needed anywhere in the package.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = [
    "DimensionError",
    "DomainError",
    "TruncationError",
    "TruncationWarning",
    "GridSpec",
    "PhasePoint",
    "Field2D",
    "rotate_pm",
    "integrate",
    "symplectic_fourier",
    "Report",
]


class DimensionError(ValueError):
    """Shapes, lengths or grids do not match."""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class TruncationError(RuntimeError):
    """The grid is too small (or too coarse) for the requested computation."""


class TruncationWarning(UserWarning):
    """Mass of a state or symbol approaches the edge of the grid."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform position grid with its semiclassical parameter.

    Parameters
    ----------
    n : int
        Points per axis, a power of two.
    L : float
        Half-width of the position window ``[-L, L)``.
    hbar : float
        Semiclassical parameter.
    particles : int
        Number of particles (1 or 2); the grid is tensorized.
    """

    n: int = 64
    L: float = 8.0
    hbar: float = 1.0
    particles: int = 2

    def __post_init__(self):
        n = int(self.n)
        if n < 2 or n & (n - 1):
            raise DomainError(f"n must be a power of two, got {self.n}")
        if not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L}")
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if self.particles not in (1, 2):
            raise DomainError(f"particles must be 1 or 2, got {self.particles}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def dxi(self) -> float:
        return np.pi * self.hbar / self.L

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @property
    def xi(self) -> np.ndarray:
        return self.dxi * (np.arange(self.n) - self.n // 2)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.particles

    @property
    def q_box(self) -> float:
        """Half-width of the trusted position box used for sampling."""
        return self.L / 2

    @property
    def p_box(self) -> float:
        """Half-width of the trusted momentum box (half the dual range)."""
        return np.pi * self.hbar * self.n / (4 * self.L)

    def with_particles(self, particles: int) -> "GridSpec":
        return GridSpec(self.n, self.L, self.hbar, particles)

    def same_axes(self, other: "GridSpec") -> bool:
        return (self.n, self.L, self.hbar) == (other.n, other.L, other.hbar)

    def check_resolution(self):
        """Raise :class:`TruncationError` unless Gaussians of width sqrt(hbar)
        are both contained (``L**2/hbar >= 16``) and resolved
        (``dx <= pi*sqrt(hbar)/4``) by the grid."""
        if self.L**2 / self.hbar < 16:
            raise TruncationError(
                f"L^2/hbar = {self.L**2 / self.hbar:.3g} < 16: Gaussian tails leave the grid"
            )
        if self.dx > np.pi * np.sqrt(self.hbar) / 4:
            raise TruncationError(
                f"dx = {self.dx:.3g} exceeds pi*sqrt(hbar)/4 = "
                f"{np.pi * np.sqrt(self.hbar) / 4:.3g}: wave packets are under-resolved"
            )

    def sample_box(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform phase points in the trusted box, shape ``(count, particles)``."""
        shape = (count, self.particles)
        q = rng.uniform(-self.q_box, self.q_box, shape)
        p = rng.uniform(-self.p_box, self.p_box, shape)
        return q + 1j * p


@dataclass(frozen=True)
class PhasePoint:
    """Complex phase point ``z_k = q_k + i p_k``.

    Build it from ``z`` directly or through :meth:`from_qp`; the real views are
    derived, never stored separately.
    """

    z: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.z, dtype=complex))
        if z.ndim != 1:
            raise DimensionError("a phase point is a 1-d complex vector")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @classmethod
    def from_qp(cls, q, p) -> "PhasePoint":
        q = np.atleast_1d(np.asarray(q, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if q.shape != p.shape:
            raise DimensionError("q and p must have equal lengths")
        return cls(q + 1j * p)

    @property
    def q(self) -> np.ndarray:
        return self.z.real

    @property
    def p(self) -> np.ndarray:
        return self.z.imag

    def __len__(self):
        return len(self.z)

    def swapped(self, i: int = 0, j: int = 1) -> "PhasePoint":
        z = self.z.copy()
        z[[i, j]] = z[[j, i]]
        return PhasePoint(z)


@dataclass
class Field2D:
    """Complex samples over a two-axis grid together with the axis coordinates."""

    values: np.ndarray
    axes: tuple[np.ndarray, np.ndarray]
    names: tuple[str, str] = ("x", "xi")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        a0, a1 = (np.asarray(a, dtype=float) for a in self.axes)
        self.axes = (a0, a1)
        if self.values.shape != (len(a0), len(a1)):
            raise DimensionError(
                f"values shape {self.values.shape} does not match axes ({len(a0)}, {len(a1)})"
            )

    @property
    def spacings(self) -> tuple[float, float]:
        return tuple(float(a[1] - a[0]) if len(a) > 1 else 1.0 for a in self.axes)

    def integral(self) -> complex:
        return integrate(self.values, *self.spacings)


def rotate_pm(v, direction: str = "forward") -> np.ndarray:
    """Map a pair ``(a_i, a_j)`` to ``(a_+, a_-) = ((a_i+a_j)/sqrt2, (a_i-a_j)/sqrt2)``.

    The matrix is symmetric and orthogonal, so the inverse equals the forward
    map; ``direction`` is accepted for readability at call sites. Works
    elementwise on arrays whose leading axis has length 2.
    """
    v = np.asarray(v)
    if v.ndim == 0 or v.shape[0] != 2:
        raise DimensionError(f"rotate_pm expects a length-2 leading axis, got shape {v.shape}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    s = np.sqrt(0.5)
    return np.stack([(v[0] + v[1]) * s, (v[0] - v[1]) * s])


def integrate(values, *spacings) -> complex:
    """Uniform-weight Riemann sum ``sum(values) * prod(spacings)``.

    One spacing per axis; a single spacing is broadcast over all axes.
    """
    f = np.asarray(values)
    if f.size == 0:
        raise DomainError("cannot integrate an empty field")
    if len(spacings) == 1:
        spacings = spacings * f.ndim
    if len(spacings) != f.ndim:
        raise DimensionError(f"{len(spacings)} spacings for a {f.ndim}-axis field")
    return complex(f.sum() * np.prod(spacings))


def _dft(src: np.ndarray, out: np.ndarray, sign: float, hbar: float) -> np.ndarray:
    return np.exp(sign * 1j * np.outer(out, src) / hbar)


def symplectic_fourier(f: Field2D, hbar: float, q_out=None, p_out=None) -> Field2D:
    """Semiclassical symplectic Fourier transform of a field over ``(x, xi)``::

        F[f](q, p) = (2 pi hbar)^-1 * int f(x, xi) exp(i (q xi - p x)/hbar) dx dxi

    With ``q_out``/``p_out`` omitted, the input must sit on a position axis and
    its FFT dual axis (``n`` points each, ``dxi = 2 pi hbar / (n dx)``); the
    output is then returned on the same pair of axes via FFT.  Explicit output
    axes switch to a direct DFT sum, which also serves other values of hbar.
    """
    x, xi = f.axes
    n = len(x)
    if len(xi) != n:
        raise DimensionError("symplectic_fourier needs a square field")
    dx, dxi = f.spacings
    pref = dx * dxi / (2 * np.pi * hbar)
    if q_out is None and p_out is None:
        if not np.isclose(dx * dxi * n, 2 * np.pi * hbar, rtol=1e-12):
            raise DimensionError("axes are not FFT-dual for this hbar; pass q_out/p_out")
        # exp(i x_a xi_m/hbar) factors into an inverse DFT over m and
        # exp(-i xi_b x_k/hbar) into a forward DFT over k, up to offset phases.
        g = f.values * np.exp(1j * x[0] * (xi - xi[0]) / hbar)[None, :]
        g = n * np.fft.ifft(g, axis=1) * np.exp(1j * x * xi[0] / hbar)[None, :]
        g = g * np.exp(-1j * xi[0] * (x - x[0]) / hbar)[:, None]
        h = np.fft.fft(g, axis=0).T * np.exp(-1j * xi * x[0] / hbar)[None, :]
        return Field2D(pref * h, (x, xi), ("q", "p"), dict(f.meta))
    q_out = x if q_out is None else np.asarray(q_out, dtype=float)
    p_out = xi if p_out is None else np.asarray(p_out, dtype=float)
    eq = _dft(xi, q_out, +1.0, hbar)  # (a, m)
    ep = _dft(x, p_out, -1.0, hbar)   # (b, k)
    out = pref * (eq @ f.values.T @ ep.T)
    return Field2D(out, (q_out, p_out), ("q", "p"), dict(f.meta))


@dataclass
class Report:
    """Outcome of one verification; serializes to the JSON report schema."""

    lemma: str
    which: str
    samples: int
    seed: int | None
    max_rel_err: float
    tolerance: float
    passed: bool
    details: dict | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if d["details"] is None:
            d.pop("details")
        return d


def warn_truncation(message: str):
    warnings.warn(message, TruncationWarning, stacklevel=3)
