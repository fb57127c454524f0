"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports its measured numbers.
"""
import math
import time

import numpy as np
import pytest

from neumann_scissors.closed_form import M2_SQUARE, first_zero_j1_prime, szego_bound_product
from neumann_scissors.experiments import THEOREM2, classify_region, verify_theorem1, verify_theorem2
from neumann_scissors.fem import assemble, mesh_parallelogram, mu2_converged, smallest_eigs
from neumann_scissors.geometry import ParallelogramSpec, area, diameter, make_parallelogram, perimeter
from neumann_scissors.scissors import dissect, expected_piece_count, verify_dissection
from neumann_scissors.trial import SeparableTrial, integrals, rayleigh_quotient, transported_integrals

from oracles import bessel_jp_zero_scipy, dense_generalized_eigs

PI2 = math.pi ** 2
SZEGO_CAP = 10.6499 * (1 + 1e-3)



def record(log, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    log.append(line)
    print(line)
    return ok


def theorem1_grid():
    cells = []
    for alpha in np.linspace(math.pi / 6, math.pi / 2, 5):
        for ratio in np.linspace(0.1, math.sin(alpha), 5):
            cells.append((float(ratio), float(alpha)))
    return cells


def theorem2_grid():
    cells = []
    for alpha in np.linspace(math.pi / 6 + 0.01, math.pi / 2, 5):
        top = 2 * math.sin(alpha) - 1
        for frac in np.linspace(0.2, 1.0, 5):
            cells.append((float(frac * top), float(alpha)))
    return cells


def _timed_rows(check, cells):
    start = time.perf_counter()
    rows = [check(ParallelogramSpec(1.0, ratio, alpha), 1e-3) for ratio, alpha in cells]
    return rows, time.perf_counter() - start


@pytest.fixture(scope="module")
def theorem1_rows():
    return _timed_rows(verify_theorem1, theorem1_grid())


@pytest.fixture(scope="module")
def theorem2_rows():
    return _timed_rows(verify_theorem2, theorem2_grid())


def test_criterion_1_dissection_validity(acceptance_log):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst_area = worst_overlap = 0.0
    bad = []
    for _ in range(200):
        b = float(rng.uniform(0.1, 10))
        spec = ParallelogramSpec(b * float(rng.uniform(1, 20)), b, float(rng.uniform(0.05, math.pi / 2)))
        d = dissect(spec)
        report = verify_dissection(d)
        src_area = area(d.source)
        worst_area = max(worst_area, report.area_defect / src_area)
        worst_overlap = max(worst_overlap, report.max_overlap / src_area)
        ok = (report.passed and report.area_defect < 1e-12 * src_area
              and report.max_overlap < 1e-10 * src_area
              and len(d.pieces) == expected_piece_count(d.full_strips, d.remainder)
              and report.horizontal)
        if not ok:
            bad.append(spec)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5
    record(acceptance_log, 1, ok, f"200 specs, {len(bad)} bad, max rel area defect {worst_area:.1e}, "
           f"max rel overlap {worst_overlap:.1e}, {elapsed:.2f}s")
    assert not bad, bad[:3]
    assert elapsed < 5


def test_criterion_2_proof_identity(acceptance_log):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst_q = worst_t = 0.0
    for _ in range(50):
        alpha = float(rng.uniform(0.05, math.pi / 2))
        b = float(rng.uniform(0.1, 10))
        ratio = float(rng.uniform(0.01, 1.0)) * math.sin(alpha)
        spec = ParallelogramSpec(b / ratio, b, alpha)
        trial = SeparableTrial(spec.height)
        q = rayleigh_quotient(trial, make_parallelogram(spec))
        exact = PI2 / (spec.a * math.sin(alpha)) ** 2
        worst_q = max(worst_q, abs(q - exact) / exact)
        whole = integrals(trial, make_parallelogram(spec))
        moved = transported_integrals(dissect(spec), trial)
        worst_t = max(worst_t, abs(moved.gradient - whole.gradient) / whole.gradient,
                      abs(moved.mass - whole.mass) / whole.mass)
    elapsed = time.perf_counter() - start
    ok = worst_q <= 1e-12 and worst_t <= 1e-10 and elapsed < 5
    record(acceptance_log, 2, ok, f"50 specs, quotient rel err {worst_q:.1e}, "
           f"transport rel err {worst_t:.1e}, {elapsed:.2f}s")
    assert worst_q <= 1e-12 and worst_t <= 1e-10
    assert elapsed < 5


def test_criterion_3_eigensolver_oracle(acceptance_log):
    start = time.perf_counter()
    square = ParallelogramSpec(1, 1, math.pi / 2)
    K, M = assemble(mesh_parallelogram(square, 64, 64))
    mu = smallest_eigs(K, M, 4).eigenvalues
    exact = np.array([0, PI2, PI2, 2 * PI2])
    rel = np.abs(mu[1:3] - exact[1:3]) / exact[1:3]
    spectrum_ok = abs(mu[0]) <= 1e-9 and (rel <= 5e-3).all() and mu[1] >= PI2 - 1e-10

    K4, M4 = assemble(mesh_parallelogram(square, 1, 1))
    oracle = dense_generalized_eigs(K4.toarray(), M4.toarray())
    dense_err = float(np.abs(smallest_eigs(K4, M4, 4).eigenvalues - oracle).max())

    levels = []
    for n in (16, 32, 64):
        Kn, Mn = assemble(mesh_parallelogram(square, n, n))
        levels.append(smallest_eigs(Kn, Mn, 2).eigenvalues[1])
    order = math.log2((levels[0] - levels[1]) / (levels[1] - levels[2]))
    elapsed = time.perf_counter() - start

    ok = spectrum_ok and dense_err <= 1e-10 and 1.8 <= order <= 2.2 and elapsed < 60
    record(acceptance_log, 3, ok, f"mu/pi^2 = {np.round(mu / PI2, 5).tolist()}, "
           f"4-node oracle err {dense_err:.1e}, order {order:.3f}, {elapsed:.2f}s")
    assert spectrum_ok, mu
    assert dense_err <= 1e-10
    assert 1.8 <= order <= 2.2
    assert elapsed < 60


def test_criterion_4_theorem1_grid(acceptance_log, theorem1_rows):
    rows, elapsed = theorem1_rows
    failures, square_ratio = [], None
    for row in rows:
        if not (row.passed and row.mu2_fem <= PI2 / math.sin(row.alpha) ** 2 * (1 + 2e-3)):
            failures.append((row.ratio, row.alpha, row.mu2_fem, row.mu2_R))
        if row.alpha == math.pi / 2 and row.ratio == 1.0:
            square_ratio = row.mu2_fem / row.mu2_R
    square_ok = square_ratio is not None and abs(square_ratio - 1) <= 5e-3
    ok = not failures and square_ok and elapsed < 600
    record(acceptance_log, 4, ok, f"25 cells, {len(failures)} failing, "
           f"square mu2_fem/mu2_R = {square_ratio:.6f}, {elapsed:.2f}s")
    assert not failures, failures
    assert square_ok
    assert elapsed < 600


def test_criterion_5_theorem2_grid(acceptance_log, theorem2_rows):
    rows, elapsed = theorem2_rows
    failures, square_m2 = [], None
    for row in rows:
        if not (row.passed and row.M2 <= M2_SQUARE * (1 + 2e-3)):
            failures.append((row.ratio, row.alpha, row.M2))
        if row.alpha == math.pi / 2 and row.ratio == 1.0:
            square_m2 = row.M2
    square_ok = square_m2 is not None and abs(square_m2 / M2_SQUARE - 1) <= 5e-3
    ok = not failures and square_ok and elapsed < 600
    record(acceptance_log, 5, ok, f"25 cells, {len(failures)} failing, "
           f"square M2 = {square_m2:.4f} vs 16 pi^2 = {M2_SQUARE:.4f}, {elapsed:.2f}s")
    assert not failures, failures
    assert square_ok
    assert elapsed < 600


def test_criterion_6_region_logic(acceptance_log):
    ratios = np.concatenate(([1e-9, 1e-6], np.arange(1, 1001) * 1e-3))
    below = np.arange(1e-3, math.pi / 6, 1e-3)
    leaks = [(a, r) for a in below for r in ratios if classify_region(float(r), float(a)) == THEOREM2]
    above = np.append(np.arange(math.pi / 6 + 1e-6, math.pi / 2, 1e-3), math.pi / 2)
    empty = []
    for alpha in above:
        # the largest admissible ratio is 2 sin(alpha) - 1, so probe just below it as well as the grid
        probes = np.append(ratios, 0.5 * (2 * math.sin(alpha) - 1))
        if not any(classify_region(float(r), float(alpha)) == THEOREM2 for r in probes if 0 < r <= 1):
            empty.append(alpha)
    ok = not leaks and not empty
    record(acceptance_log, 6, ok, f"{len(below)} angles below pi/6 with {len(leaks)} leaks, "
           f"{len(above)} angles above with {len(empty)} empty")
    assert not leaks and not empty


def test_criterion_7_sanity_inequalities(acceptance_log, theorem1_rows, theorem2_rows):
    product = szego_bound_product()
    reference = math.pi * bessel_jp_zero_scipy() ** 2
    szego_ok = abs(product - reference) <= 1e-8 and abs(first_zero_j1_prime() - bessel_jp_zero_scipy()) <= 1e-8
    worst_area = worst_shape = 0.0
    rows = theorem1_rows[0] + theorem2_rows[0]
    for row in rows:
        poly = make_parallelogram(ParallelogramSpec(row.a, row.b, row.alpha))
        worst_area = max(worst_area, row.mu2_fem * area(poly))
        worst_shape = max(worst_shape, perimeter(poly) / diameter(poly))
    ok = szego_ok and worst_area <= SZEGO_CAP and worst_shape <= math.pi + 1e-12
    record(acceptance_log, 7, ok, f"pi j'^2 = {product:.10f}, max mu2*area = {worst_area:.4f} "
           f"over {len(rows)} domains, max perimeter/diameter = {worst_shape:.6f}")
    assert szego_ok
    assert worst_area <= SZEGO_CAP
    assert worst_shape <= math.pi + 1e-12
