"""One test per acceptance criterion; each records a PASS/FAIL line."""

import cmath
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from foxwright import (
    FoxWrightParams,
    HDensitySpec,
    MathieuSpec,
    check_h1,
    eval_pfq,
    eval_series,
    luke_bounds,
    luke_bounds_lambda,
    mathieu_bounds,
    mathieu_bounds_digamma,
    mathieu_sum,
    numeric_cm_check,
    pfq_luke,
    turan_in_A,
    turan_in_sigma,
    zero_count_rectangle,
    zero_count_right_half,
)
from foxwright.hfunction import (
    verify_lambda_transform,
    verify_laplace_rep,
    verify_moment,
    verify_reciprocal_laplace,
    verify_stieltjes_rep,
)
from foxwright.mathieu import verify_mathieu_integral_rep
from foxwright.special_core import riemann_zeta

from param_sets import DENSITY_SETS, h1_sets, h2_sets, luke_sets

EXP = FoxWrightParams([(1, 1)], [(1, 1)])
EXPM1 = FoxWrightParams([(1, 1)], [(2, 1)])
GEOM = FoxWrightParams([(1, 1)], [])


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_closed_forms(report_criterion):
    start = time.perf_counter()
    entire = np.linspace(-8.0, 8.0, 10)
    disc = np.linspace(-0.9, 0.9, 10)
    errors = {
        "exp": max(_rel(eval_series(EXP, z), math.exp(z)) for z in entire),
        "1/(1-z)": max(_rel(eval_series(GEOM, z), 1 / (1 - z)) for z in disc),
        "(e^z-1)/z": max(_rel(eval_series(EXPM1, z), math.expm1(z) / z) for z in entire),
        "-ln(1-z)/z": max(_rel(eval_pfq([1, 1], [2], z), -math.log1p(-z) / z) for z in disc),
    }
    elapsed = time.perf_counter() - start
    worst = max(errors.values())
    ok = worst <= 1e-12 and elapsed < 1.0
    report_criterion(1, ok, f"closed forms, worst rel err {worst:.2e}, {elapsed:.2f}s")
    assert ok, errors


def test_criterion_02_mellin_moments(report_criterion):
    start = time.perf_counter()
    worst = max(verify_moment(HDensitySpec(p), k).rel_residual for p in DENSITY_SETS for k in range(4))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 60
    report_criterion(2, ok, f"moments k=0..3 on {len(DENSITY_SETS)} sets, worst rel {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_03_laplace(report_criterion):
    start = time.perf_counter()
    worst = max(
        verify_laplace_rep(HDensitySpec(p), z).rel_residual for p in DENSITY_SETS for z in (-3, -1, 0, 1, 3)
    )
    # the analytic case: density t on (0,1), so the integral is (e^z - 1)/z
    spec = HDensitySpec(EXPM1)
    analytic = max(_rel(verify_laplace_rep(spec, z).integral, math.expm1(z) / z) for z in (-3, -1, 1, 3))
    elapsed = time.perf_counter() - start
    ok = max(worst, analytic) <= 1e-6 and elapsed < 60
    report_criterion(3, ok, f"Laplace form, worst rel {worst:.2e}, analytic case {analytic:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_04_stieltjes(report_criterion):
    start = time.perf_counter()
    worst = max(
        verify_stieltjes_rep(HDensitySpec(p), sigma, z).rel_residual
        for p in DENSITY_SETS
        for sigma in (0.5, 1, 2)
        for z in (0.25, 0.5, 0.9)
    )
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 60
    report_criterion(4, ok, f"Stieltjes form, worst rel {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_05_reciprocal_and_lambda(report_criterion):
    start = time.perf_counter()
    recip = [verify_reciprocal_laplace(EXP, 2.0).rel_residual]
    recip += [verify_reciprocal_laplace(p, z).rel_residual for p in (EXP, EXPM1) for z in (0.5, 1.0, 4.0)]
    lam = [
        verify_lambda_transform(EXPM1, 1.0, 1.0, 2.0).rel_residual,
        verify_lambda_transform(EXPM1, 2.0, 1.0, 3.0).rel_residual,
    ]
    lam += [verify_lambda_transform(DENSITY_SETS[2], l, 1.0, z).rel_residual for l in (0.5, 1.5) for z in (2.0, 4.0)]
    elapsed = time.perf_counter() - start
    ok = recip[0] <= 1e-8 and max(recip + lam) <= 1e-6 and elapsed < 30
    report_criterion(5, ok, f"reciprocal worst {max(recip):.2e}, lambda worst {max(lam):.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_06_complete_monotonicity(report_criterion):
    start = time.perf_counter()
    failures = []
    for p in h2_sets():
        report = numeric_cm_check(lambda x: eval_series(p, -x), (0.5, 4.0), 6)
        if not report.satisfied:
            failures.append((p.to_json(), report.first_failure))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    report_criterion(6, ok, f"CM to order 6 on 25 H2 sets, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_07_turan(report_criterion):
    start = time.perf_counter()
    sigma_margins = [
        (turan_in_sigma(p, s, z), p, s, z) for p in h1_sets() for s in (0.5, 1, 2) for z in (0.1, 0.5, 0.9)
    ]
    a_margins = [(turan_in_A(p, A, z), p, A, z) for p in h2_sets() for A in (0.5, 1, 2) for z in (-2, -0.5, 0.5)]
    elapsed = time.perf_counter() - start
    worst_sigma = min(sigma_margins, key=lambda m: m[0])
    worst_a = min(a_margins, key=lambda m: m[0])
    bad_a = [m for m in a_margins if m[0] < -1e-10]
    bad_z = sorted({m[3] for m in bad_a})
    ok = worst_sigma[0] >= -1e-10 and worst_a[0] >= -1e-10 and elapsed < 30
    report_criterion(
        7,
        ok,
        f"sigma-margin min {worst_sigma[0]:.3g}; A-margin min {worst_a[0]:.3g} "
        f"({len(bad_a)}/{len(a_margins)} negative, all at z in {bad_z}); {elapsed:.1f}s",
    )
    assert ok


def test_criterion_08_luke(report_criterion):
    start = time.perf_counter()
    zs = np.geomspace(1e-3, 20.0, 25)
    slacks = []
    for p in luke_sets():
        for z in zs:
            e = luke_bounds(p, z)
            slacks.append((e.slack, p.to_json(), z))
    lam_slacks = []
    for p in luke_sets()[:10]:
        for lam in (1.0, 2.0):
            for z in np.geomspace(1e-2, 20.0, 8):
                lam_slacks.append((luke_bounds_lambda(p, lam, z).slack, p.to_json(), lam, z))
    pfq_slacks = []
    for p in h2_sets()[:10]:
        for z in np.geomspace(1e-2, 20.0, 8):
            e = pfq_luke(p.upper_shifts(), p.lower_shifts(), 1.0, z)
            pfq_slacks.append((e.slack, p.to_json(), z))
    worked = luke_bounds(EXPM1, 1.0)
    triple_err = max(
        abs(worked.lower - math.exp(-0.5)),
        abs(worked.value - (1 - math.exp(-1))),
        abs(worked.upper - (1 - (1 - math.exp(-1)) / 2)),
    )
    elapsed = time.perf_counter() - start
    worst = min(slacks)
    worst_lam = min(lam_slacks)
    worst_pfq = min(pfq_slacks)
    n_bad = sum(1 for s in slacks if s[0] < -1e-10)
    ok = (
        worst[0] >= -1e-10
        and worst_lam[0] >= -1e-10
        and worst_pfq[0] >= -1e-10
        and triple_err <= 5e-11
        and elapsed < 30
    )
    detail = (
        f"envelope min slack {worst[0]:.3g} ({n_bad}/{len(slacks)} violations"
        + (f", worst set {worst[1]} at z={worst[2]:.3g}" if n_bad else "")
        + f"); lambda min {worst_lam[0]:.3g}; pFq min {worst_pfq[0]:.3g}; worked triple err {triple_err:.1e}; {elapsed:.1f}s"
    )
    report_criterion(8, ok, detail)
    assert ok


def _brute_force_zeros(f, df, rect, grid=40):
    """Newton from a grid of starts; distinct roots inside ``rect``."""
    x0, x1, y0, y1 = rect
    roots = []
    for x in np.linspace(x0, x1, grid):
        for y in np.linspace(y0, y1, grid):
            z = complex(x, y)
            for _ in range(60):
                step = f(z) / df(z)
                z -= step
                if abs(step) < 1e-14 or abs(z) > 1e3:
                    break
            if abs(f(z)) < 1e-10 and x0 < z.real < x1 and y0 < z.imag < y1:
                if all(abs(z - r) > 1e-6 for r in roots):
                    roots.append(z)
    return len(roots)


def test_criterion_09_zero_location(report_criterion):
    start = time.perf_counter()
    counts = [zero_count_right_half(p, (0.1, 4.0, -6.0, 6.0)) for p in h1_sets()]
    right = [zero_count_right_half(EXPM1, r) for r in ((0.1, 5, -10, 10), (0.1, 4, -6, 6))]
    f = lambda z: (cmath.exp(z) - 1) / z
    df = lambda z: (cmath.exp(z) * z - cmath.exp(z) + 1) / (z * z)
    left_rects = [(-7, -0.5, -1, 1), (-5, -0.1, -20, 20), (-3, 2, 5, 8)]
    left = [(zero_count_rectangle(EXPM1, r), _brute_force_zeros(f, df, r)) for r in left_rects]
    elapsed = time.perf_counter() - start
    ok = set(counts) == {0} and right == [0, 0] and all(a == b for a, b in left) and elapsed < 60
    report_criterion(
        9,
        ok,
        f"H1 sets: counts {sorted(set(counts))}; control right {right}; control vs brute force {left}; {elapsed:.1f}s",
    )
    assert ok


def _mathieu_specs(count=20, seed=20240604):
    rng = np.random.default_rng(seed)
    specs = []
    while len(specs) < count:
        nu = float(rng.choice([0.5, 1.0, 2.0]))
        mu = float(rng.uniform(1.5, 8.0))
        s = float(rng.uniform(1.05, 6.0))
        beta = (mu - s) / nu
        if beta > 0:
            specs.append((1.0 / nu, beta, mu, nu))
    return specs


def test_criterion_10_mathieu(report_criterion):
    start = time.perf_counter()
    zeta_slack, dig_slack = [], []
    for alpha, beta, mu, nu in _mathieu_specs():
        for r in (0.1, 0.5, 1.0, 2.0, 5.0):
            spec = MathieuSpec(alpha, beta, mu, nu, r)
            total = mathieu_sum(spec)
            b = mathieu_bounds(spec)
            zeta_slack.append(min(total - b.lower, b.upper - total))
            if spec.exponent > 2:
                d = mathieu_bounds_digamma(spec)
                dig_slack.append(min(total - d.lower, d.upper - total))
    collapse = 0.0
    for alpha, beta, mu, nu in _mathieu_specs()[:10]:
        spec = MathieuSpec(alpha, beta, mu, nu, 0.0)
        exact = 2 * riemann_zeta(spec.exponent)
        b = mathieu_bounds(spec)
        collapse = max(collapse, abs(b.lower - exact), abs(b.upper - exact), abs(mathieu_sum(spec) - exact))
    residual = max(
        verify_mathieu_integral_rep(MathieuSpec(*args)).rel_residual
        for args in [(1, 1, 3, 1, 1), (1, 1, 2.5, 1, 0.5), (1, 1, 3, 1, 0), (1, 0.5, 2, 1, 2)]
    )
    elapsed = time.perf_counter() - start
    n_bad = sum(1 for s in zeta_slack if s < -1e-8)
    n_bad_d = sum(1 for s in dig_slack if s < -1e-8)
    ok = (
        min(zeta_slack) >= -1e-8
        and (not dig_slack or min(dig_slack) >= -1e-8)
        and collapse <= 1e-10
        and residual <= 1e-6
        and elapsed < 60
    )
    report_criterion(
        10,
        ok,
        f"zeta bounds min slack {min(zeta_slack):.3g} ({n_bad}/{len(zeta_slack)} violated); "
        f"digamma min slack {min(dig_slack):.3g} ({n_bad_d}/{len(dig_slack)} violated); "
        f"r=0 collapse err {collapse:.1e}; integral residual {residual:.1e}; {elapsed:.1f}s",
    )
    assert ok


EXPM1_JSON = '{"upper":[[1,1]],"lower":[[2,1]]}'
CLI_COMMANDS = [
    ["eval", "--params", EXPM1_JSON, "--z", "1"],
    ["eval", "--params", EXPM1_JSON, "--sweep", "z:lin:-5:5:11", "--format", "json"],
    ["check", "h1", "--params", EXPM1_JSON, "--nmax", "16", "--format", "json"],
    ["check", "cm", "--params", EXPM1_JSON, "--format", "json"],
    ["bounds", "luke", "--params", EXPM1_JSON, "--sweep", "z:lin:0:10:21", "--format", "csv"],
    ["bounds", "lambda", "--params", EXPM1_JSON, "--lam", "2", "--sweep", "z:log:0.01:20:9", "--format", "csv"],
    ["verify", "stieltjes", "--params", EXPM1_JSON, "--sigma", "2", "--z", "0.25", "--format", "json"],
    ["mathieu", "--alpha", "1", "--beta", "1", "--mu", "4", "--nu", "1", "--sweep", "r:lin:0:5:6", "--format", "csv"],
    ["zeros", "--params", EXPM1_JSON, "--rect=0.1,4,-6,6", "--format", "json"],
]


def _cli(argv, threads):
    env = dict(os.environ, FOXWRIGHT_THREADS=threads)
    proc = subprocess.run([sys.executable, "-m", "foxwright", *argv], capture_output=True, env=env, check=False)
    return proc.returncode, proc.stdout, proc.stderr


def test_criterion_11_determinism(report_criterion):
    start = time.perf_counter()
    mismatches = []
    for argv in CLI_COMMANDS:
        first = _cli(argv, "0")
        second = _cli(argv, "0")
        serial = _cli(argv, "1")
        if not (first == second == serial) or not first[1]:
            mismatches.append(argv[:2])
    elapsed = time.perf_counter() - start
    ok = not mismatches
    report_criterion(11, ok, f"{len(CLI_COMMANDS)} CLI commands byte-identical across runs and thread counts; {elapsed:.1f}s")
    assert ok, mismatches
