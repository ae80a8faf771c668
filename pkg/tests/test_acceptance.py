"""Acceptance checks, one test per criterion, each reporting a PASS/FAIL line.

Lines are collected while the module runs and written to the terminal when
it finishes, so they show up in ``pytest -v`` output without ``-s``.
"""

import math

import numpy as np
import pytest

from braidhash.braid import TAU, evaluate, generator_matrix, parse
from braidhash.compiler import HashParams, bootstrap_table
from braidhash.icosa import build_group
from braidhash.pseudogroup import closing_index, fine_rotation_distances, format_table
from braidhash.search import build_table
from braidhash.stats import (
    DEFAULT_SEED,
    brute_force_decay,
    decay_fit,
    deviation_analysis,
    fit_wd,
    max_deviation_norm,
    run_suite,
    write_suite_csv,
)
from braidhash.su2 import IDENTITY, PAULI_X, distance

REFERENCE_WORD = "s1^-2 s2^2 s1^-4 s2^2 s1^-4 s2^2 s1^-4 s2^2 s1^-2"
DECAY_LENGTHS = [6, 8, 10, 12, 14]

_lines = {}


def report(criterion, ok, detail):
    status = "PASS" if ok else "FAIL"
    prev = _lines.get(criterion)
    if prev is not None:
        status = "FAIL" if "FAIL" in (prev[0], status) else "PASS"
        detail = f"{prev[1]}; {detail}"
    _lines[criterion] = (status, detail)


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    write = tr.write_line if tr else print
    write("")
    write("acceptance criteria:")
    for k in sorted(_lines):
        status, detail = _lines[k]
        write(f"  {status} criterion {k}: {detail}")


# shared artifacts


@pytest.fixture(scope="module")
def t8():
    return build_table(8)


@pytest.fixture(scope="module")
def t24_mitm():
    return build_table(24, method="mitm", threads=1)


@pytest.fixture(scope="module")
def tabs(t8, t24_mitm):
    return {8: t8, 24: t24_mitm}


@pytest.fixture(scope="module")
def suite(tabs):
    return run_suite(1000, HashParams(), tabs, seed=DEFAULT_SEED, threads=1)


@pytest.fixture(scope="module")
def decay_means():
    return brute_force_decay(DECAY_LENGTHS, 100, seed=DEFAULT_SEED, alphabet="even")


@pytest.fixture(scope="module")
def fine(t8, t24_mitm):
    return {(N, n): fine_rotation_distances(t, n) for N, t in ((8, t8), (24, t24_mitm)) for n in (3, 4)}


# criteria


def test_criterion_1_braid_algebra():
    s1, s2 = generator_matrix(1), generator_matrix(2)
    yb = np.max(np.abs(s1 @ s2 @ s1 - s2 @ s1 @ s2))
    tenth = max(np.max(np.abs(np.linalg.matrix_power(m, 10) - IDENTITY)) for m in (s1, s2))
    w5 = np.exp(2j * math.pi / 5)
    exact1 = np.diag([w5**-2, -(w5**-1)])
    off = -math.sqrt(TAU) * w5
    exact2 = np.array([[-TAU * np.exp(-1j * math.pi / 5), off], [off, -TAU]])
    entries = max(np.max(np.abs(s1 - exact1)), np.max(np.abs(s2 - exact2)))
    ok = yb <= 1e-12 and tenth <= 1e-12 and entries <= 1e-15
    report(1, ok, f"braid relation {yb:.1e}, tenth power {tenth:.1e}, entries {entries:.1e}")
    assert ok


def test_criterion_2_reference_braid():
    w = parse(REFERENCE_WORD)
    d = distance(evaluate(w), -1j * PAULI_X)
    ok = len(w) == 24 and abs(d - 0.0031) <= 0.15 * 0.0031
    report(2, ok, f"length {len(w)}, distance to -iX {d:.6f} (target 0.0031 +-15%)")
    assert ok


def test_criterion_3_icosahedral_group():
    g = build_group()
    census = g.order_census()
    rng = np.random.default_rng(DEFAULT_SEED)
    i, j, k = rng.integers(0, 60, (3, 100_000))
    assoc = bool(np.all(g.table[g.table[i, j], k] == g.table[i, g.table[j, k]]))
    hom = max(
        distance(g.element_su2(a) @ g.element_su2(b), g.element_su2(g.compose(a, b)))
        for a in range(60)
        for b in range(60)
    )
    ok = len(g) == 60 and census == {1: 1, 2: 15, 3: 20, 5: 24} and assoc and hom <= 1e-12
    report(3, ok, f"{len(g)} elements, census {census}, associative on 1e5 triples {assoc}, "
                  f"homomorphism residual {hom:.1e}")
    assert ok


def test_criterion_4_table_quality(t24_mitm):
    d = t24_mitm.dists[1:]
    exhaustive = build_table(24)
    ok = d.min() >= 0.001 and d.max() <= 0.12 and 0.01 <= d.mean() <= 0.04
    report(4, ok, f"N=24 (mitm) errors in [{d.min():.4f}, {d.max():.4f}], mean {d.mean():.4f}; "
                  f"matches exhaustive build {t24_mitm == exhaustive}")
    assert ok
    assert t24_mitm == exhaustive


def test_criterion_5_brute_force_decay(decay_means):
    xi = decay_fit(DECAY_LENGTHS, decay_means)
    ok = 6 <= xi <= 9
    report(5, ok, f"xi = {xi:.3f} over L = {DECAY_LENGTHS} (target [6, 9])")
    assert ok


def test_criterion_6_headline_suite(suite):
    fit = fit_wd(suite)
    slowest = float(suite.compile_times.max())
    ok = len(suite) >= 1000 and suite.mean <= 1.5e-3 and fit.ks_stat < 0.05 and slowest <= 2.0
    report(6, ok, f"{len(suite)} targets, mean {suite.mean:.3e} (<= 1.5e-3), KS {fit.ks_stat:.4f} (< 0.05), "
                  f"slowest compile {slowest:.3f}s")
    assert ok


def test_criterion_7_wigner_dyson_fits(fine):
    fits = {n: fit_wd(fine[(24, n)]) for n in (3, 4)}
    ok = all(f.ks_stat < 0.05 for f in fits.values())
    report(7, ok, "KS S(24,3) = {:.4f}, S(24,4) = {:.4f} (< 0.05)".format(fits[3].ks_stat, fits[4].ks_stat))
    assert ok


def test_criterion_7_scale_ordering(fine):
    means = {key: float(v.mean()) for key, v in fine.items()}
    below_pre = means[(24, 4)] < means[(8, 3)]
    ratios = [means[(8, n)] / means[(24, n)] for n in (3, 4)]
    ok = below_pre and all(5 <= r <= 20 for r in ratios)
    report(7, ok, f"mean S(24,4) {means[(24, 4)]:.4f} < mean S(8,3) {means[(8, 3)]:.4f}; "
                  f"N=8/N=24 mean ratios {ratios[0]:.1f}, {ratios[1]:.1f} (order of magnitude)")
    assert ok


def test_criterion_8_reduction_factor(suite):
    factor = float(suite.preprocessed.mean() / suite.mean)
    ok = 10 <= factor <= 90
    report(8, ok, f"mean preprocessed / mean final = {factor:.1f} (predicted 30, accepted [10, 90])")
    assert ok


def test_criterion_9_first_order_deviation(t8, t24_mitm):
    g = t24_mitm.group
    rng = np.random.default_rng(DEFAULT_SEED)
    worst, res8, res24 = 0.0, [], []
    for _ in range(1000):
        tri = [int(x) for x in rng.integers(0, 60, 3)]
        tup = tri + [closing_index(g, tri)]
        _, _, r24, deltas = deviation_analysis(t24_mitm, tup)
        bound = 10 * max_deviation_norm(deltas) ** 2
        worst = max(worst, r24 / bound if bound else (0.0 if r24 == 0 else math.inf))
        res24.append(r24)
        res8.append(deviation_analysis(t8, tup)[2])
    ratio = float(np.median(res8) / np.median(res24))
    ok = worst <= 1.0 and ratio >= 4
    report(9, ok, f"max residual / (10 max|Delta|^2) = {worst:.3f}, median residual N=8/N=24 = {ratio:.1f} (>= 4)")
    assert ok


def test_criterion_10_iteration_scaling(tabs):
    second = bootstrap_table(HashParams(), tabs)
    tabs2 = dict(tabs)
    tabs2[second.N] = second
    q1 = run_suite(100, HashParams(), tabs, seed=DEFAULT_SEED)
    q2 = run_suite(100, HashParams(q=2, levels=(24, second.N)), tabs2, seed=DEFAULT_SEED)
    factor = q1.mean / q2.mean
    ok = 10 <= factor <= 90
    report(10, ok, f"bootstrapped N={second.N}, q=1 mean {q1.mean:.3e}, q=2 mean {q2.mean:.3e}, "
                   f"factor {factor:.1f} (accepted [10, 90])")
    assert ok


def test_criterion_11_determinism(tmp_path, t24_mitm, suite, decay_means, fine, tabs):
    checks = {}
    checks["table (mitm, 2 threads)"] = format_table(build_table(24, "mitm", threads=2)) == format_table(t24_mitm)
    checks["table (exhaustive, 2 threads)"] = format_table(build_table(24, threads=2)) == format_table(t24_mitm)
    again = run_suite(1000, HashParams(), tabs, seed=DEFAULT_SEED, threads=2)
    a = write_suite_csv(suite, tmp_path / "t1.csv").read_bytes()
    b = write_suite_csv(again, tmp_path / "t2.csv").read_bytes()
    checks["suite csv (2 threads)"] = a == b
    checks["preprocessed errors"] = suite.preprocessed.tobytes() == again.preprocessed.tobytes()
    redo = brute_force_decay(DECAY_LENGTHS, 100, seed=DEFAULT_SEED, alphabet="even")
    checks["decay means"] = np.array(redo).tobytes() == np.array(decay_means).tobytes()
    parts = np.concatenate([fine_rotation_distances(t24_mitm, 3, leading=[k]) for k in range(59, -1, -1)])
    blocks = np.concatenate([fine_rotation_distances(t24_mitm, 3, leading=[k]) for k in range(60)])
    checks["S(24,3) distances (partitioned)"] = np.sort(parts).tobytes() == np.sort(fine[(24, 3)]).tobytes() \
        and blocks.tobytes() == fine[(24, 3)].tobytes()
    ok = all(checks.values())
    report(11, ok, ", ".join(f"{k} {'identical' if v else 'DIFFERS'}" for k, v in checks.items()))
    assert ok
