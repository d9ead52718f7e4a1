import numpy as np
import pytest

from phasestat.core import DimensionError, DomainError, GridSpec, TruncationError
from phasestat.husimi import husimi
from phasestat.states import coherent_state, overlap_closed_form, projector, trace
from phasestat.toeplitz import (GaussianSymbol, ProductOperator, bargmann_check, coupling_check,
                                cross_check_UH, offdiag_trace, phase_nodes, symbol_exchange,
                                toeplitz_kernel, toeplitz_offdiag_quantize, toeplitz_quantize,
                                verify_offdiag_lemma, verify_quadrature_gate,
                                verify_toeplitz_composition, verify_toeplitz_exchange)

G1 = GridSpec(64, 8.0, 1.0, 1)
G2 = GridSpec(64, 8.0, 1.0, 2)


def _brute_kernel(c, z0, alpha, x, y, hbar=1.0, m=241, half=7.0):
    # independent midpoint sum of h(z) phi_z(x) conj phi_z(y) / (2 pi hbar)
    t = np.linspace(-half, half, m)
    d = t[1] - t[0]
    Q, P = np.meshgrid(t + z0.real, t + z0.imag, indexing="ij")
    z = Q + 1j * P
    h = c * np.exp(-alpha * np.abs(z - z0) ** 2 / hbar)
    phi = lambda s: (np.pi * hbar) ** -0.25 * np.exp(-(s - Q) ** 2 / (2 * hbar) + 1j * P * s / hbar)
    return np.sum(h * phi(x) * np.conj(phi(y))) * d * d / (2 * np.pi * hbar)


@pytest.mark.parametrize("alpha, z0", [(1.0, 0j), (0.5, 0.7 + 0.4j), (2.0, -0.3 - 0.8j)])
def test_closed_form_kernel_against_brute_force(alpha, z0):
    h = GaussianSymbol([1.0], [[z0]], [alpha])
    K = toeplitz_kernel(h)
    for x, y in [(0.0, 0.0), (0.4, -0.9), (1.3, 0.2)]:
        assert abs(K(x, y) - _brute_kernel(1.0, z0, alpha, x, y)) < 1e-9


def test_trace_of_unit_gaussian():
    h = GaussianSymbol([1.0], [[0j]], [1.0])
    assert h.trace_value() == pytest.approx(0.5, abs=1e-15)
    assert abs(trace(toeplitz_quantize(h, G1)) - 0.5) < 1e-6


def test_two_particle_trace_rule():
    h = GaussianSymbol([0.7, 0.3], [[0.5 + 0.2j, -0.5], [0.1j, 0.4]], [0.5, 1.0])
    T = toeplitz_quantize(h, G2)
    assert isinstance(T, ProductOperator)
    oracle = (0.7 * (np.pi / 0.5) ** 2 + 0.3 * np.pi**2) / (2 * np.pi) ** 2
    assert abs(T.trace() - oracle) < 1e-6


@pytest.mark.parametrize("particles", [1, 2])
def test_quadrature_gate(particles):
    z0 = [0.6 + 0.3j, -0.4 + 0.5j][:particles]
    h = GaussianSymbol([1.0], [z0], [0.5])
    g = G1 if particles == 1 else G2
    r = verify_quadrature_gate(h, g, count=100, seed=42)
    assert r.passed and r.max_rel_err <= 1e-6


def test_concentration_limit():
    z0 = 0.5 - 0.3j
    phi = coherent_state([z0], G1)
    x = np.array([[-0.5], [0.3], [1.0]])
    y = np.array([[0.2], [0.3], [-0.4]])
    target = projector(phi).kernel(x, y)
    errs = []
    for alpha in (50.0, 200.0):
        h = GaussianSymbol([2 * alpha], [[z0]], [alpha])  # integral 2 pi hbar
        errs.append(np.abs(toeplitz_kernel(h)(x, y) - target).max())
    assert errs[1] < errs[0] / 3
    assert errs[1] * 200 < 1.0


def _coupling_oracle(z_state, z_sym, alpha, hbar=1.0):
    # int e^{-alpha|z-z0|^2/hbar} e^{-|z-w|^2/2hbar} dz / (2 pi hbar), per particle
    a, b = alpha / hbar, 1 / (2 * hbar)
    vals = np.pi / (a + b) * np.exp(-a * b / (a + b) * np.abs(np.asarray(z_state) - z_sym) ** 2)
    return np.prod(vals / (2 * np.pi * hbar))


def test_coupling_coherent_state_two_particles():
    w = np.array([0.5 + 0.5j, -0.7 + 0.2j])
    z0 = np.array([0.6 + 0.3j, -0.4 + 0.5j])
    hp = GaussianSymbol([1.0], [z0], [0.5])
    r = coupling_check(projector(coherent_state(w, G2)), hp)
    oracle = _coupling_oracle(w, z0, 0.5)
    assert r.passed
    assert abs(r.details["rhs"][0] - oracle) < 1e-7 and abs(r.details["lhs"][0] - oracle) < 1e-5


def test_coupling_narrow_symbol_picks_husimi_value():
    w = np.array([0.2 - 0.4j])
    z1 = np.array([0.5 + 0.1j])
    alpha = 40.0
    hp = GaussianSymbol([1.0], [z1], [alpha])
    rho = projector(coherent_state(w, G1))
    rhs = trace_top = toeplitz_quantize(hp, G1)
    from phasestat.states import trace_product
    val = trace_product(rho, trace_top)
    approx = husimi(rho, z1) * hp.integral()
    assert abs(val - _coupling_oracle(w, z1, alpha)) < 1e-7
    assert abs(val - approx) < 0.05 * abs(approx)


def test_coupling_top_top_closed_form():
    # rho = Top(h) for the unit-trace Gaussian, h' = h, one particle
    alpha = 1.0
    h = GaussianSymbol([2 * alpha], [[0j]], [alpha])
    rho = toeplitz_quantize(h, G1)
    r = coupling_check(rho, h, m=64)
    beta = (alpha / 2) / (alpha + 0.5)
    oracle = 2 * alpha * 2 * alpha * (np.pi / (alpha + 0.5)) * (np.pi / (alpha + beta)) / (2 * np.pi) ** 2
    assert r.passed
    assert abs(r.details["rhs"][0] - oracle) < 1e-6
    # trace(rho^2) of a unit-trace positive operator
    assert oracle <= 1


def test_symbol_exchange_on_diagonal():
    h = GaussianSymbol([1.0], [[0.6 + 0.3j, -0.4 + 0.5j]], [0.5])
    z = np.array([[0.3 - 0.2j, 0.3 - 0.2j], [-1.0 + 0.5j, -1.0 + 0.5j]])
    for which in "UV":
        assert np.allclose(symbol_exchange(h, which)(z), h(z), rtol=1e-14)


def test_symbol_exchange_weight_of_radial_symbol():
    # for h radial in z_- the continuation gives h_U = e^{|z_-|^2/hbar} h(z_+, -|z_-|^2)
    h = GaussianSymbol([1.0], [[0j, 0j]], [1.0])
    z = np.array([[0.4 + 0.1j, -0.2 + 0.3j]])
    zp = (z[:, 0] + z[:, 1]) / np.sqrt(2)
    zm = (z[:, 0] - z[:, 1]) / np.sqrt(2)
    oracle = np.exp(np.abs(zm) ** 2) * np.exp(-np.abs(zp) ** 2 + np.abs(zm) ** 2)
    assert np.allclose(symbol_exchange(h, "U")(z), oracle, rtol=1e-13)


@pytest.mark.parametrize("which", ["U", "V"])
def test_exchange_offset_symbol(which):
    h = GaussianSymbol([1.0], [[0.6 + 0.3j, -0.4 + 0.5j]], [0.5]).normalized()
    r = verify_toeplitz_exchange(h, which, G2, count=50, seed=42)
    assert r.passed and r.max_rel_err <= 1e-5


def test_exchange_symmetric_concentration_point():
    w = 0.3 - 0.2j
    h = GaussianSymbol([1.0], [[w, w]], [2.0])
    assert verify_toeplitz_exchange(h, "U", G2, count=20, seed=3, tolerance=1e-6).passed


def test_uv_composition_two_particles():
    h = GaussianSymbol([0.7, 0.3], [[0.5 + 0.2j, -0.5 - 0.1j], [-0.3 + 0.6j, 0.4 - 0.2j]], [0.5, 1.0])
    assert verify_toeplitz_composition(h, G2, count=50, seed=42).max_rel_err <= 1e-6


def test_uv_composition_one_particle():
    h = GaussianSymbol([1.0], [[0.7 + 0.4j]], [0.5])
    assert verify_toeplitz_composition(h, G1, count=50, seed=42).passed


def test_offdiag_lemma_unit_gaussian():
    h = GaussianSymbol([1.0], [[0j]], [1.0])
    reports = verify_offdiag_lemma(h, G1, count=50, seed=42)
    assert [r.lemma for r in reports] == ["offdiag_lemma", "offdiag_lemma", "bargmann_identity",
                                          "exchange_involution"]
    assert all(r.passed for r in reports)
    assert reports[-1].max_rel_err == 0.0


def test_bargmann_identity():
    r = bargmann_check(1.0)
    assert r.max_rel_err <= 1e-10
    assert r.details["literal_form_residual"] > 1e-3
    z0 = bargmann_check(0.5, count=5, seed=1)
    assert z0.passed


def test_offdiag_kernels_conjugate_for_even_symbol():
    h = GaussianSymbol([1.0], [[0j]], [0.7])
    KU, KV = toeplitz_offdiag_quantize(h, "U"), toeplitz_offdiag_quantize(h, "V")
    x = np.array([0.3, -1.0, 0.8])
    y = np.array([-0.5, 0.2, 1.4])
    assert np.allclose(KU(x, y), np.conj(KV(y, x)), atol=1e-14)


def test_offdiag_narrow_at_origin_is_ground_projector():
    alpha = 200.0
    h = GaussianSymbol([2 * alpha], [[0j]], [alpha])
    K = toeplitz_offdiag_quantize(h, "U")
    x = np.array([0.3, -0.7])
    y = np.array([0.1, 0.5])
    phi0 = lambda s: np.pi**-0.25 * np.exp(-s**2 / 2)
    assert np.abs(K(x, y) - phi0(x) * phi0(y)).max() < 0.02


def test_offdiag_trace_against_overlap_integral():
    h = GaussianSymbol([0.7, 0.3], [[0.5 + 0.2j], [-0.3 + 0.6j]], [0.5, 1.0])
    t = np.linspace(-8, 8, 321)
    d = t[1] - t[0]
    z = (t[:, None] + 1j * t[None, :]).ravel()
    ov = overlap_closed_form(z[:, None], -z[:, None], 1.0)
    oracle = np.sum(h(z[:, None]) * ov) * d * d / (2 * np.pi)
    assert abs(offdiag_trace(h) - oracle) < 1e-6
    K = toeplitz_offdiag_quantize(h, "U")
    assert abs(np.sum(K(G1.x, G1.x)) * G1.dx - oracle) < 1e-6


def test_three_paths_agree():
    h = GaussianSymbol([1.0], [[0.7 + 0.4j]], [0.5])
    assert cross_check_UH(h, G1, count=50, seed=42).max_rel_err <= 1e-5


def test_guards():
    h = GaussianSymbol([1.0], [[0j]], [0.02])  # too wide for the node budget
    with pytest.raises(TruncationError):
        phase_nodes(h)
    with pytest.raises(DomainError):
        GaussianSymbol([1.0], [[0j]], [0.0])
    with pytest.raises(DimensionError):
        toeplitz_quantize(GaussianSymbol([1.0], [[0j]], [1.0]), G2)
    with pytest.raises(DomainError):
        GaussianSymbol([1.0, -1.0], [[0j], [0j]], [1.0, 1.0]).normalized()
