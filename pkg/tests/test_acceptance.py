"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Every tolerance is pinned here; nothing is deferred.
"""

import math
import time

import numpy as np

from fqlab import (
    GaussianTest,
    IntMatrix,
    LaurentPoly,
    ProperCone,
    change_of_variables_check,
    compute_spectrum,
    cone_support_scan,
    enumerate_truncated,
    find_real_roots,
    gaussian_tail_bound,
    gaussian_tail_integral_check,
    ly_falsify,
    orbit_closure_check,
    pullback_certificate,
    real_rootedness_audit,
    recover_coefficient,
    regularity_check,
    restrict_to_line,
    slab_volume_oracle,
    smith_normal_form,
    verify_summation,
)
from fqlab.harness import gaussian_integral_value

from test_cone import box_scan_oracle

SQRT2 = math.sqrt(2.0)
BETA = SQRT2 - 1.0
DENSITY = 1.0 + SQRT2
ELL = (1.0, SQRT2)

P1 = LaurentPoly.from_terms(2, {(1, 1): 1.0, (0, 0): -1.0})
P2 = LaurentPoly.from_terms(2, {(1, 1): 1.0, (1, 0): 0.5, (0, 1): 0.5, (0, 0): 1.0})
SHEAR_P = LaurentPoly.from_terms(2, {(1, 0): 1.0, (1, -1): 0.5, (0, 1): 0.5, (0, 0): 1.0})
NON_LY = LaurentPoly.from_terms(2, {(0, 0): 2.0, (1, 0): -1.0, (0, 1): -1.0})
SINGULAR_SQ = LaurentPoly.from_terms(2, {(2, 2): 1.0, (1, 1): -2.0, (0, 0): 1.0})
SHEAR_A = IntMatrix.from_rows([[1, 1], [0, 1]])


def _finish(name: str, budget: float, t0: float, checks: list[tuple[str, bool]]):
    elapsed = time.perf_counter() - t0
    ok = all(v for _, v in checks) and elapsed < budget
    detail = "" if ok else " failing: " + ", ".join(l for l, v in checks if not v)
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} [{elapsed:.1f}s / {budget:.0f}s]{detail}")
    for label, v in checks:
        assert v, f"{name}: {label}"
    assert elapsed < budget, f"{name}: runtime {elapsed:.1f}s exceeds {budget}s"


def test_criterion_1_diagonal_exactness():
    t0 = time.perf_counter()
    checks = []

    ks = [(i, j) for i in range(-8, 9) for j in range(-8, 9)]
    table = compute_spectrum(P1, ELL, ks, 256)
    diag_err = max(abs(table.coefficient((j, j)) - DENSITY) for j in range(-8, 9) if j)
    diag_err = max(diag_err, abs(table.coefficient((0, 0)) - DENSITY))
    off_err = max(abs(table.coefficient(k)) for k in ks if k[0] != k[1])
    checks.append(("diagonal coefficients = 1+sqrt2 within 1e-10", diag_err <= 1e-10))
    checks.append(("off-diagonal coefficients vanish within 1e-10", off_err <= 1e-10))

    roots = find_real_roots(restrict_to_line(P1, ELL), (0.0, 1.0), tol=1e-12)
    expected = (0.0, BETA, 2 * BETA)
    roots_ok = len(roots.roots) == 3 and all(
        abs(a - b) <= 1e-10 for a, b in zip(roots.roots, expected)
    )
    checks.append(("roots in [0,1] are {0, sqrt2-1, 2(sqrt2-1)} within 1e-10", roots_ok))

    rep = verify_summation(P1, ELL, GaussianTest(0.0, 1.0), 6.0, 10.0)
    checks.append(("summation residual <= 1e-8 at (T,R) = (6,10)", rep.residual <= 1e-8))

    _finish("1 (diagonal exactness)", 10.0, t0, checks)


def test_criterion_2_stable_quadric():
    t0 = time.perf_counter()
    checks = []

    checks.append(("falsifier passes 10^4 fibers", ly_falsify(P2, 10_000, seed=42).passed))

    f = restrict_to_line(P2, ELL)
    checks.append(("root audit passes on [0, 50]", real_rootedness_audit(f, (0.0, 50.0)).passed))

    density = find_real_roots(f, (0.0, 200.0), tol=1e-10).density()
    checks.append(("zero density on [0,200] = 1+sqrt2 within 0.02", abs(density - DENSITY) <= 0.02))

    scan = cone_support_scan(P2, ELL, ProperCone.first_orthant(2), 8, rel_tol=1e-6)
    checks.append(("first-orthant support scan passes at 1e-6, radius 8", scan.passed))
    m0 = scan.m0

    checks.append(("mass matches root density within 1e-3", abs(m0 - density) <= 1e-3))
    slab = slab_volume_oracle(P2, ELL, 0.05, 1_000_000, seed=42)
    checks.append(
        ("mass matches slab volume within 3 standard errors", abs(m0 - slab.volume) <= 3 * slab.std_error)
    )

    roots500 = find_real_roots(f, (-500.0, 500.0), tol=1e-10)
    table = compute_spectrum(P2, ELL, [(0, 0), (1, 0), (0, 1), (1, 1)], 256)
    pairs = {0.0: (0, 0), 1.0: (1, 0), SQRT2: (0, 1), 1.0 + SQRT2: (1, 1)}
    rec_err = max(
        abs(recover_coefficient(roots500, xi) - table.coefficient(k)) for xi, k in pairs.items()
    )
    checks.append(("coefficient recovery at T=500 within 5e-3 of the table", rec_err <= 5e-3))

    rep = verify_summation(P2, ELL, GaussianTest(1.0, 0.8), 8.0, 12.0)
    checks.append(
        ("summation residual <= 1e-6", rep.residual <= 1e-6 * max(abs(rep.lhs), 1.0))
    )

    _finish("2 (stable quadric)", 120.0, t0, checks)


def test_criterion_3_counterexample_detection():
    t0 = time.perf_counter()
    checks = []

    rep = ly_falsify(NON_LY, 10_000, seed=42)
    cert = (
        rep.violation is not None
        and rep.violation.residual <= 1e-8 * NON_LY.scale
        and (
            all(abs(z) > 1 + 1e-9 for z in rep.violation.point)
            or all(1e-12 < abs(z) < 1 - 1e-9 for z in rep.violation.point)
        )
    )
    checks.append(("certified violation for 2 - z1 - z2 within 10^4 fibers", cert))

    audit = real_rootedness_audit(restrict_to_line(NON_LY, ELL), (0.0, 50.0))
    checks.append(("root audit fails on [0, 50]", not audit.passed))

    checks.append(("regularity fails for the squared factor", not regularity_check(SINGULAR_SQ).passed))

    _finish("3 (counterexample detection)", 30.0, t0, checks)


def test_criterion_4_exact_algebra():
    t0 = time.perf_counter()
    checks = []
    rng = np.random.default_rng(2024)

    snf_ok = True
    for _ in range(200):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 6))
        a = IntMatrix.from_rows(
            [[int(v) for v in rng.integers(-9, 10, n)] for _ in range(m)]
        )
        dec = smith_normal_form(a)  # verify() runs inside and raises on failure
        snf_ok = snf_ok and (dec.s @ dec.d @ dec.t).data == a.data
    checks.append(("200 random decompositions exact with chain", snf_ok))

    row = pullback_certificate(IntMatrix.from_rows([[1, 2]]))
    checks.append(("(1 2) certificate has d = 1", row.d == 1))
    diag = pullback_certificate(IntMatrix.from_rows([[2, 0], [0, 3]]))
    checks.append(("diag(2,3) certificate has d = 6", diag.d == 6))

    done = 0
    pull_ok = True
    while done < 50:
        m = int(rng.integers(1, 4))
        n = int(rng.integers(m, 5))
        a = IntMatrix.from_rows(
            [[int(v) for v in rng.integers(-9, 10, n)] for _ in range(m)]
        )
        if sum(1 for v in smith_normal_form(a).diagonal() if v) != m:
            continue
        cert = pullback_certificate(a)
        try:
            cert.verify(a)
        except Exception:
            pull_ok = False
        done += 1
    checks.append(("50 random full-rank certificates exact", pull_ok))

    _finish("4 (exact algebra)", 10.0, t0, checks)


def test_criterion_5_change_of_variables():
    t0 = time.perf_counter()
    rep = change_of_variables_check(P2, SHEAR_A, (1.0, BETA), 6, rel_tol=1e-6)
    checks = [
        ("pullback polynomial built from the unimodular inverse", rep.det_abs == 1),
        ("ratio constant across supported k within 1e-6", rep.max_ratio_deviation <= 1e-6),
        ("deviation bound passes", rep.passed),
    ]
    _finish("5 (change of variables)", 60.0, t0, checks)


def test_criterion_6_gaussian_bounds():
    t0 = time.perf_counter()
    checks = []

    grid_ok = True
    for n in (1, 2):
        for big_n in (10, 20, 40):
            for radius in (4, 6, 8):
                for eps in (0.1, 0.2):
                    grid_ok = grid_ok and gaussian_tail_bound(
                        n, big_n, radius, eps, (0.0,) * n
                    ).passed
    checks.append(("lattice tail bound over the whole grid", grid_ok))

    int_ok = True
    for n in (1, 2, 3):
        for big_n in (5, 10):
            for radius in (0.5, 1, 2):
                int_ok = int_ok and gaussian_tail_integral_check(n, big_n, radius).passed
    checks.append(("integral tail bound over the whole grid", int_ok))

    anchor_ok = True
    for n in (1, 2, 3):
        for big_n in (5, 10):
            lhs = gaussian_tail_integral_check(n, big_n, 0.0).lhs
            exact = gaussian_integral_value(n, big_n)
            anchor_ok = anchor_ok and abs(lhs - exact) <= 1e-8 * exact
    checks.append(("R -> 0 anchor reproduces the closed form within 1e-8", anchor_ok))

    _finish("6 (gaussian bounds)", 30.0, t0, checks)


def test_criterion_7_cone_enumeration():
    t0 = time.perf_counter()
    checks = []

    orthant = ProperCone.first_orthant(2)
    pts = enumerate_truncated(orthant, ELL, 5.0)
    checks.append(("first orthant, radius 5: exactly 27 points", len(pts) == 27))

    rng = np.random.default_rng(99)
    match = True
    done = 0
    while done < 20:
        rows = [[int(v) for v in rng.integers(-3, 4, 2)] for _ in range(2)]
        try:
            cone = ProperCone(IntMatrix.from_rows(rows))
        except Exception:
            continue
        u = rng.uniform(0.2, 1.5, 2)
        ell = tuple(float(x) for x in np.asarray(cone.base.data) @ u)
        radius = float(rng.uniform(1.0, 6.0))
        match = match and enumerate_truncated(cone, ell, radius) == box_scan_oracle(
            cone, ell, radius
        )
        done += 1
    checks.append(("matches the box-scan oracle on 20 random cones", match))

    _finish("7 (cone enumeration)", 5.0, t0, checks)


def test_criterion_8_orbit_closure():
    t0 = time.perf_counter()
    checks = [
        ("diagonal orbit dense at (delta, T) = (0.05, 200)", orbit_closure_check(P1, ELL, 0.05, 200.0).passed),
        ("quadric orbit dense at (delta, T) = (0.05, 500)", orbit_closure_check(P2, ELL, 0.05, 500.0).passed),
    ]
    _finish("8 (orbit closure)", 60.0, t0, checks)
