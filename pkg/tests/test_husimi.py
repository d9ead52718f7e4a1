import numpy as np
import pytest

from phasestat.core import DimensionError, GridSpec
from phasestat.husimi import (bosonic_check_husimi, bosonic_factorization_check, husimi,
                              husimi_integral, husimi_two_point, verify_husimi_composition,
                              verify_husimi_exchange)
from phasestat.states import (apply_exchange, coherent_state, coherent_superposition, mixture,
                              overlap_closed_form, projector)

G1 = GridSpec(64, 8.0, 1.0, 1)
G2 = GridSpec(64, 8.0, 1.0, 2)
A, B = 0.5 + 0.5j, -0.7 + 0.2j


def _pair(sign, g=G2):
    a, b = A * np.sqrt(g.hbar), B * np.sqrt(g.hbar)
    return projector(coherent_superposition([1, sign], [[a, b], [b, a]], g))


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_coherent_husimi_oracle(hbar):
    g = GridSpec(64, 8.0, hbar, 2)
    z0 = np.array([0.4 - 0.3j, -0.6 + 0.8j])
    rho = projector(coherent_state(z0, g))
    rng = np.random.default_rng(1)
    Z = g.sample_box(40, rng)
    oracle = np.exp(-np.sum(np.abs(Z - z0) ** 2, axis=-1) / (2 * hbar)) / (2 * np.pi * hbar) ** 2
    assert np.abs(husimi(rho, Z) - oracle).max() < 1e-7
    assert abs(husimi(rho, z0) - (2 * np.pi * hbar) ** -2) < 1e-7


def test_husimi_integral_rank2_mixture():
    rho = mixture([0.7, 0.3], [coherent_state([0.5 + 0.1j, -0.3j], G2),
                               coherent_state([-0.8 + 0.4j, 0.6 - 0.2j], G2)])
    assert abs(husimi_integral(rho, 32) - 1) < 1e-5


def test_two_point_diagonal():
    rho = mixture([0.6, 0.4], [coherent_state([0.5 + 0.1j, -0.3j], G2),
                               coherent_state([-0.8 + 0.4j, 0.6 - 0.2j], G2)])
    Z = G2.sample_box(10, np.random.default_rng(3))
    assert np.allclose(husimi_two_point(rho, Z, Z), husimi(rho, Z), rtol=1e-12, atol=0)


def test_two_point_ground_state_is_holomorphic():
    # <phi_b|phi_0><phi_0|phi_a> times the continuation weight collapses to exp(-conj(b) a / 2)
    rho = projector(coherent_state([0j], G1))
    rng = np.random.default_rng(5)
    a = rng.uniform(-1.5, 1.5, 8) + 1j * rng.uniform(-1.5, 1.5, 8)
    b = rng.uniform(-1.5, 1.5, 8) + 1j * rng.uniform(-1.5, 1.5, 8)
    val = husimi_two_point(rho, a[:, None], b[:, None])
    assert np.abs(val - np.exp(-np.conj(b) * a / 2) / (2 * np.pi)).max() < 1e-7
    # Cauchy-Riemann: d/dq = -i d/dp in the first argument
    eps = 1e-4
    f = lambda z: husimi_two_point(rho, z[:, None], b[:, None])
    dq = (f(a + eps) - f(a - eps)) / (2 * eps)
    dp = (f(a + 1j * eps) - f(a - 1j * eps)) / (2 * eps)
    assert np.abs(dq + 1j * dp).max() < 1e-6


def test_two_point_swap_is_relabelling():
    z = np.array([0.5 + 0.2j, -0.4 + 0.3j])
    rho = projector(coherent_state(z, G2))
    rng = np.random.default_rng(9)
    # moderate |Z| keeps the growing continuation weight from amplifying rounding
    Za, Zb = (rng.uniform(-2, 2, (2, 10, 2)) * [[[1]], [[1j]]]).sum(0), \
        (rng.uniform(-2, 2, (2, 10, 2)) * [[[1]], [[1j]]]).sum(0)
    # <phi_W|phi_sigma Za> = <phi_sigma W|phi_Za>; only the cross weight conj(Zb).Za is not symmetric
    cross = lambda X: np.exp((np.conj(Zb) * X).sum(-1) / 2)
    lhs = husimi_two_point(rho, Za[:, ::-1], Zb) * cross(Za[:, ::-1])
    rhs = husimi_two_point(apply_exchange(rho, "U"), Za, Zb) * cross(Za)
    assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(rhs).max()


def test_two_point_closed_form_product_state():
    # per particle: <phi_b|phi_w><phi_w|phi_a> from the overlap oracle
    w = np.array([0.5 + 0.2j, -0.4 + 0.3j])
    rho = projector(coherent_state(w, G2))
    rng = np.random.default_rng(11)
    Za, Zb = G2.sample_box(6, rng), G2.sample_box(6, rng)
    bra = overlap_closed_form(Zb, w, 1.0) * overlap_closed_form(w, Za, 1.0)
    expo = ((np.abs(Za) ** 2).sum(-1) + (np.abs(Zb) ** 2).sum(-1)) / 4 \
        - (np.conj(Zb) * Za).sum(-1) / 2 - 1j * ((Za.real * Za.imag).sum(-1) - (Zb.real * Zb.imag).sum(-1)) / 2
    oracle = bra * np.exp(expo) / (2 * np.pi) ** 2
    assert np.allclose(husimi_two_point(rho, Za, Zb), oracle, rtol=1e-7, atol=1e-12)


@pytest.mark.parametrize("which", ["U", "V"])
def test_exchange_lemma_product_state(which):
    rho = projector(coherent_state([A, B], G2))
    r = verify_husimi_exchange(rho, which=which, seed=42, count=100)
    assert r.passed and r.max_rel_err <= 1e-6


def test_exchange_lemma_symmetric_point():
    # on z_i = z_j the weight is one and sigma Z = Z
    rho = _pair(+1)
    z = np.array([[0.3 + 0.1j, 0.3 + 0.1j]])
    assert np.isclose(husimi(apply_exchange(rho, "U"), z), husimi(rho, z), rtol=1e-12)
    assert verify_husimi_exchange(rho, which="U", samples=z).passed


def test_composition():
    rho = mixture([0.5, 0.5], [coherent_state([A, B], G2), coherent_state([B, 0.1j], G2)])
    r = verify_husimi_composition(rho, seed=42, count=100, tolerance=1e-6)
    assert r.passed


def test_bosonic_passes_fermionic_fails():
    assert bosonic_check_husimi(_pair(+1)).max_rel_err <= 1e-6
    assert bosonic_factorization_check(_pair(+1)).max_rel_err <= 1e-6
    r = bosonic_check_husimi(_pair(-1))
    assert not r.passed and r.max_rel_err > 1.0
    f = bosonic_factorization_check(_pair(-1))
    assert not f.passed and abs(f.max_rel_err - 2) < 1e-6


def test_diagonal_product_passes():
    d = 0.3 - 0.4j
    assert bosonic_check_husimi(projector(coherent_state([d, d], G2))).passed


def test_bosonic_check_at_other_hbar():
    assert bosonic_check_husimi(_pair(+1, GridSpec(64, 8.0, 0.5, 2)), seed=7).passed


def test_wrong_particle_number():
    with pytest.raises(DimensionError):
        verify_husimi_exchange(projector(coherent_state([0j], G1)))
