"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary (and directly when the module is run as a script).
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from phasestat import corpus, husimi, statistics, suites, symplectic, toeplitz, wigner
from phasestat.core import Field2D, GridSpec, symplectic_fourier
from phasestat.states import trace

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

GRID = GridSpec(64, 8.0, 1.0, 2)
G1 = GRID.with_particles(1)


def _record(number, title, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_1_husimi_exchange():
    worst, slowest = 0.0, 0.0
    for cs in corpus.states(GRID):
        t = time.perf_counter()
        for which in "UV":
            r = husimi.verify_husimi_exchange(cs.rho, which=which, seed=42, count=100, tolerance=1e-6)
            worst = max(worst, r.max_rel_err)
        slowest = max(slowest, time.perf_counter() - t)
    ok = worst <= 1e-6 and slowest <= 10
    assert _record(1, "Husimi exchange lemma, U and V, 100 samples", ok,
                   f"max err {worst:.2e} <= 1e-6, slowest state {slowest:.2f}s <= 10s")


def test_criterion_2_bosonic_corollaries():
    ok = True
    bos_err, ferm_min, even_err = 0.0, np.inf, 0.0
    for cs in corpus.states(GRID):
        if cs.statistics == "none":
            continue
        r = husimi.bosonic_check_husimi(cs.rho, seed=42, count=100, tolerance=1e-6)
        f = husimi.bosonic_factorization_check(cs.rho, seed=42, count=100, tolerance=1e-6)
        if cs.statistics == "bosonic":
            bos_err = max(bos_err, r.max_rel_err)
            even_err = max(even_err, f.max_rel_err)
        else:
            ferm_min = min(ferm_min, r.max_rel_err, f.max_rel_err)
    ok = bos_err <= 1e-6 and even_err <= 1e-6 and ferm_min >= 0.5
    assert _record(2, "bosonic criteria pass, fermionic fail O(1), evenness", ok,
                   f"bosonic {bos_err:.2e}, evenness {even_err:.2e}, fermionic residual {ferm_min:.2f}")


def test_criterion_3_wigner_exchange():
    t = time.perf_counter()
    ex, wm = 0.0, 0.0
    for cs in corpus.states(GRID):
        if not cs.coherent:
            continue
        for which in "UV":
            ex = max(ex, wigner.verify_wigner_exchange(cs.rho, which, tolerance=1e-5).max_rel_err)
            wm = max(wm, wigner.verify_wminus_exchange(cs.rho, which, seed=42, count=20,
                                                       tolerance=1e-4).max_rel_err)
    dt = time.perf_counter() - t
    ok = ex <= 1e-5 and wm <= 1e-4 and dt <= 60
    assert _record(3, "Wigner exchange lemma and W- identity", ok,
                   f"exchange {ex:.2e} <= 1e-5, W- {wm:.2e} <= 1e-4, {dt:.1f}s <= 60s")


def test_criterion_4_normalizations():
    hus, wig, tr, coup = 0.0, 0.0, 0.0, 0.0
    states = corpus.states(GRID)
    for cs in states:
        t = trace(cs.rho)
        hus = max(hus, abs(husimi.husimi_integral(cs.rho) - t))
        wig = max(wig, abs(wigner.wigner(cs.rho).integral() - t))
    syms = corpus.symbols(GRID.hbar)
    for h in syms.values():
        tr = max(tr, abs(toeplitz.toeplitz_quantize(h, GRID).trace() - h.trace_value()))
    for cs in states:
        coup = max(coup, toeplitz.coupling_check(cs.rho, syms["offset_gaussian"]).max_rel_err)
    ok = hus <= 1e-5 and wig <= 1e-6 and tr <= 1e-6 and coup <= 1e-5
    assert _record(4, "Husimi, Wigner, trace rule and coupling normalizations", ok,
                   f"Husimi {hus:.1e}, Wigner {wig:.1e}, trace {tr:.1e}, coupling {coup:.1e}")


def test_criterion_5_toeplitz_exchange():
    ex, comp = 0.0, 0.0
    for h in corpus.symbols(GRID.hbar).values():
        for which in "UV":
            ex = max(ex, toeplitz.verify_toeplitz_exchange(h, which, GRID, count=50, seed=42).max_rel_err)
        comp = max(comp, toeplitz.verify_toeplitz_composition(h, GRID, count=50, seed=42).max_rel_err)
    ok = ex <= 1e-5 and comp <= 1e-6
    assert _record(5, "Toplitz exchange lemmas and UV composition", ok,
                   f"exchange {ex:.2e} <= 1e-5, composition {comp:.2e} <= 1e-6")


def test_criterion_6_offdiag():
    paths, barg, inv = 0.0, 0.0, 0.0
    for h in corpus.relative_symbols(G1.hbar).values():
        paths = max(paths, toeplitz.cross_check_UH(h, G1, count=50, seed=42).max_rel_err)
        rs = {r.lemma: r for r in toeplitz.verify_offdiag_lemma(h, G1, count=50, seed=42)}
        inv = max(inv, rs["exchange_involution"].max_rel_err)
    barg = toeplitz.bargmann_check(G1.hbar).max_rel_err
    ok = paths <= 1e-5 and barg <= 1e-10 and inv == 0.0
    assert _record(6, "off-diagonal lemma: UH paths, Bargmann identity, U^2 = V^2 = 1", ok,
                   f"paths {paths:.2e} <= 1e-5, Bargmann {barg:.2e} <= 1e-10, involution {inv}")


def test_criterion_7_symmetrizers():
    floor_ok, resid, rule = True, 0.0, 0.0
    for h in corpus.relative_symbols(G1.hbar).values():
        H = toeplitz.toeplitz_quantize(h, G1)
        for kind in ("bosonic", "fermionic"):
            d = statistics.check_state(statistics.symmetrize(H, kind), kind, G1).details
            floor_ok &= d["lambda_min"] >= -1e-9 * d["lambda_max"]
            resid = max(resid, d["residual_U"], d["residual_V"])
        rule = max(rule, statistics.trace_sum_rule(H, G1).max_rel_err)
    ok = floor_ok and resid <= 1e-12 and rule <= 1e-8
    assert _record(7, "symmetrizers positive, symmetric, trace sum rule", ok,
                   f"floor {'ok' if floor_ok else 'violated'}, residual {resid:.1e} <= 1e-12, "
                   f"sum rule {rule:.1e} <= 1e-8")


def test_criterion_8_matrix_facts():
    b = symplectic.builtin
    facts = [
        b("S_c_H").det == -1,
        b("S_c_W").det == 1,
        b("U_complex").det == -1,
        b("V_complex").det == -1,
        b("R_quarter").classification == "canonical",
        b("S_doubled").classification == "canonical",
        b("S_c_H").classification == "anticanonical",
        b("U_complex").classification == "anticanonical",
        b("V_complex").classification == "anticanonical",
        all(b(k).exact for k in symplectic.builtin_labels()),
    ]
    ok = all(facts)
    assert _record(8, "determinants and classifications, exact arithmetic", ok,
                   f"{sum(facts)}/{len(facts)} facts hold")


def test_criterion_9_fourier_and_gate():
    g = G1
    X, XI = np.meshgrid(g.x, g.xi, indexing="ij")
    inv = 0.0
    for q0, p0, w in [(0.0, 0.0, 1.0), (0.5, -0.3, 0.7), (-1.0, 0.8, 1.5)]:
        f = np.exp(-((X - q0) ** 2 + (XI - p0) ** 2) / (2 * w)) * np.exp(0.4j * X - 0.2j * XI)
        F = Field2D(f, (g.x, g.xi))
        inv = max(inv, float(np.abs(symplectic_fourier(symplectic_fourier(F, 1.0), 1.0).values - f).max()))
    gate = max(toeplitz.verify_quadrature_gate(h, GRID, count=100, seed=42).max_rel_err
               for h in corpus.symbols(GRID.hbar).values())
    ok = inv <= 1e-8 and gate <= 1e-6
    assert _record(9, "symplectic Fourier involution and quadrature gate", ok,
                   f"involution {inv:.1e} <= 1e-8, gate {gate:.1e} <= 1e-6")


def test_criterion_10_full_verify_runtime():
    t = time.perf_counter()
    r = subprocess.run([sys.executable, "-m", "phasestat.cli", "verify", "--suite", "all", "--quiet"],
                       capture_output=True, text=True, timeout=600)
    dt = time.perf_counter() - t
    ok = r.returncode == 0 and dt <= 300
    assert _record("10", "verify --suite all at defaults", ok,
                   f"exit {r.returncode}, {r.stdout.strip().splitlines()[-1] if r.stdout else ''}, "
                   f"{dt:.1f}s <= 300s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
