"""Acceptance suite: fourteen end-to-end criteria with pinned tolerances.

Each test prints one PASS/FAIL line (visible with ``pytest -rA`` or ``-s``)
and then asserts, so a red run still reports every criterion it reached.
"""

import json
import math
import time
import warnings

import numpy as np

from gaussl1 import (
    ApproximationPlan,
    bound_check,
    build,
    eigen_check,
    fit_l1,
    gsa_mc,
    halfspace,
    halfspace_expansion,
    l1_error,
    learn,
    parseval_residual,
    plan,
    truncation_l1_error,
)
from gaussl1.cli import main as cli_main
from gaussl1.concepts import concept_to_dict, noise_distance_check
from gaussl1.hermite import (
    basis_matrix,
    coeff_via_derivatives,
    expectation,
    gauss_hermite_rule,
    hermite_upto,
    multi_indices_upto,
)
from gaussl1.learner import LabeledData, l1_fit_oracle
from gaussl1.mc import derive_seed
from gaussl1.sign_series import (
    christoffel_darboux_residual,
    remainder_grid,
    truncation,
    truncation_eval_direct,
    truncation_eval_integral,
)

SEED = 20260814
PHI0 = 1.0 / math.sqrt(2.0 * math.pi)


def _verdict(num: int, name: str, ok: bool, detail: str = "") -> bool:
    mark = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"acceptance {num:02d} {name}: {mark}{suffix}")
    return ok


def test_criterion_01_eigenrelation():
    t0 = time.monotonic()
    grid = np.linspace(-2.0, 2.0, 9)
    ok = True
    worst = 0.0
    for j, rho in enumerate((0.0, 0.5, 0.9, 1.0)):
        for k in range(11):
            rep = eigen_check(k, rho, grid, 10**6, derive_seed(SEED, 11 * j + k))
            ok = ok and rep.passed
            worst = max(worst, rep.max_abs_deviation)
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 120.0
    assert _verdict(
        1, "smoothing eigenrelation", ok, f"max dev {worst:.2e}, {elapsed:.0f}s"
    )


def test_criterion_02_noise_distance_identity():
    s = 1.0 / math.sqrt(2.0)
    ok = True
    worst = 0.0
    for concept in (halfspace([1.0], 0.0), halfspace([s, s], 0.0)):
        for rho in (0.5, 0.9, 0.99):
            rep = noise_distance_check(concept, rho, 10**6, derive_seed(SEED, 7))
            closed = 2.0 * math.acos(rho) / math.pi
            ok = ok and rep.passed
            ok = ok and abs(rep.lhs.mean - closed) <= 4.0 * rep.lhs.stderr
            ok = ok and abs(rep.rhs.mean - closed) <= 4.0 * rep.rhs.stderr
            worst = max(worst, abs(rep.lhs.mean - rep.rhs.mean))
    assert _verdict(2, "distance = 2 GNS", ok, f"max two-route gap {worst:.2e}")


def test_criterion_03_gns_gsa_inequality():
    ok = True
    for rho in np.linspace(0.0, 1.0, 50):
        lhs = math.acos(rho) / math.pi
        rhs = math.sqrt(math.pi) * math.sqrt(1.0 - rho) * PHI0
        ok = ok and lhs <= rhs + 1e-12
    assert _verdict(3, "GNS <= sqrt(pi) sqrt(delta) GSA", ok, "50 rho values")


def test_criterion_04_gsa_estimator():
    t0 = time.monotonic()
    ok = True
    rels = []
    for i, offset in enumerate((0.0, 1.0)):
        target = math.exp(-0.5 * offset * offset) * PHI0
        est = gsa_mc(halfspace([1.0], offset), [0.02, 0.01], 10**7, derive_seed(SEED, i))
        rel = abs(est.mean - target) / target
        rels.append(rel)
        ok = ok and rel <= 0.05
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 180.0
    assert _verdict(
        4, "GSA shell estimator", ok,
        f"rel err {rels[0]:.3f}/{rels[1]:.3f}, {elapsed:.0f}s",
    )


def test_criterion_05_construction_bound():
    concept = halfspace([1.0], 0.0)
    ok = True
    margins = []
    for i, d in enumerate((5, 10, 20)):
        aplan = ApproximationPlan(epsilon=0.5, gamma=0.4, rho=0.9, degree=d)
        p = build(halfspace_expansion([1.0], 0.0, d), aplan, complete_through=d)
        err = l1_error(concept, p, 10**6, derive_seed(SEED, 20 + i))
        budget = 2.0 * math.acos(0.9) / math.pi + 0.9 ** (d + 1)
        ok = ok and err.mean <= budget + 4.0 * err.stderr
        margins.append(budget - err.mean)
    assert _verdict(
        5, "smoothed truncation bound", ok,
        "margins " + "/".join(f"{m:.3f}" for m in margins),
    )


def test_criterion_06_end_to_end_half():
    t0 = time.monotonic()
    aplan = plan(0.5, PHI0)
    ok = aplan.degree == 44 and aplan.rho == 0.96875
    report = bound_check(halfspace([1.0], 0.0), aplan, seed=SEED)
    ok = ok and report.coeff_method == "exact"
    ok = ok and report.error_method == "quadrature"
    ok = ok and report.measured_l1.mean <= 0.5
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 300.0
    assert _verdict(
        6, "planned accuracy 1/2", ok,
        f"L1 {report.measured_l1.mean:.4f} <= 0.5, {elapsed:.0f}s",
    )


def test_criterion_07_truncation_error_scaling():
    # Known red: the decrease and residual clauses hold, but the measured
    # log-log slope of the L1 truncation error over this degree range is
    # -0.364, outside the pinned window [-0.65, -0.40].  The quadrature is
    # verified to 1e-7 against an independent composite rule and by Monte
    # Carlo; the value matches a sqrt(log d)/sqrt(d) decay (model slope
    # -0.371 on this range), i.e. the log factor in the known log(d)/sqrt(d)
    # envelope is real at these scales.  The window fits the Parseval
    # residual (slope -0.490 on the same degrees), not the L1 error.
    degrees = [11, 21, 41, 81, 161, 321]
    errs = [truncation_l1_error(d) for d in degrees]
    ok = all(b < a for a, b in zip(errs, errs[1:]))
    slope = float(np.polyfit(np.log(degrees), np.log(errs), 1)[0])
    ok = ok and -0.65 <= slope <= -0.40
    residual = parseval_residual(9999)
    ok = ok and residual <= 0.01
    assert _verdict(
        7, "sign truncation decay", ok,
        f"slope {slope:.3f}, residual(9999) {residual:.4f}",
    )


def test_criterion_08_dual_form_identity():
    grid = np.linspace(-3.0, 3.0, 20)
    ok = True
    worst = 0.0
    for d in (11, 101, 501):
        t = truncation(d)
        direct = truncation_eval_direct(t, grid)
        for x, dv in zip(grid, direct):
            gap = abs(truncation_eval_integral(d, float(x), tol=1e-8) - dv)
            worst = max(worst, gap)
            ok = ok and gap <= 1e-6
    assert _verdict(8, "dual-form evaluation", ok, f"max gap {worst:.1e}")


def test_criterion_09_christoffel_darboux():
    ok = True
    worst = 0.0
    for d in range(1, 51):
        for x in (0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0):
            res = christoffel_darboux_residual(d, x)
            worst = max(worst, res)
            ok = ok and res <= 1e-8
    assert _verdict(9, "Christoffel-Darboux residual", ok, f"max {worst:.1e}")


def test_criterion_10_oscillatory_remainder():
    xs = np.linspace(0.0, 1.0, 1001)
    sups = {}
    for d in (201, 2001):
        r, _ = remainder_grid(d, xs)
        sups[d] = float(np.max(np.abs(r)))
    ok = sups[2001] <= 0.5 * sups[201]
    # scaled magnitude |H_d| e^{-t^2/4} d^{1/4}, reconstructed from the
    # remainder and the explicit phase term
    bound = 0.0
    for d in (201, 2001):
        ts = np.linspace(0.0, d ** (1.0 / 6.0), 1501)
        r, _ = remainder_grid(d, ts)
        phase = np.sin((1 - d) * math.pi / 2.0 + math.sqrt(d) * ts)
        scaled = np.abs(r + phase) * (2.0 / math.pi) ** 0.25
        bound = max(bound, float(np.max(scaled)))
        ok = ok and float(np.max(scaled)) <= 2.0
    assert _verdict(
        10, "oscillatory remainder decay", ok,
        f"sup ratio {sups[2001] / sups[201]:.3f}, scaled sup {bound:.3f}",
    )


def test_criterion_11_derivative_coefficients():
    rule = gauss_hermite_rule(60)
    ok = True
    worst = 0.0
    for k in range(9):
        target = math.exp(-0.5 * math.lgamma(k + 1))

        def inner(x, k=k):
            return math.exp(x - 0.5) * float(hermite_upto(k, np.asarray([x]))[k, 0])

        quad = expectation(inner, rule)
        deriv = coeff_via_derivatives(lambda beta, x: math.exp(x - 0.5), (k,), rule)
        worst = max(worst, abs(quad - target), abs(deriv - target), abs(quad - deriv))
        ok = ok and abs(quad - target) <= 1e-8
        ok = ok and abs(deriv - target) <= 1e-8
        ok = ok and abs(quad - deriv) <= 1e-8
    assert _verdict(11, "derivative-coefficient identity", ok, f"max dev {worst:.1e}")


def test_criterion_12_learner():
    t0 = time.monotonic()
    concept = halfspace([1.0], 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # degree cap notice
        noisy = learn(concept, 0.3, PHI0, 0.1, 20_000, 100_000, SEED, degree_cap=30)
        clean = learn(concept, 0.3, PHI0, 0.0, 20_000, 100_000, SEED, degree_cap=30)
    ok = noisy.degree == 30
    ok = ok and noisy.test_error.mean <= 0.1 + 0.3 + 4.0 * noisy.test_error.stderr
    ok = ok and clean.test_error.mean <= 0.1
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 300.0
    assert _verdict(
        12, "agnostic learner", ok,
        f"errors {noisy.test_error.mean:.4f}/{clean.test_error.mean:.4f}, {elapsed:.0f}s",
    )


def test_criterion_13_fit_vs_lp_oracle():
    rng = np.random.default_rng(SEED)
    ok = True
    worst = -1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for trial in range(25):
            dimension = 2 if trial % 3 == 0 else 1
            if dimension == 2:
                degree = 1  # 3 basis functions
                m = int(rng.integers(10, 51))
            else:
                degree = int(rng.integers(1, 5))  # up to 5 basis functions
                m = int(rng.integers(10, 51 if degree <= 2 else 26))
            x = rng.standard_normal((m, dimension))
            y = np.where(rng.random(m) < 0.5, 1.0, -1.0)
            data = LabeledData(x, y)
            A = basis_matrix(x, multi_indices_upto(dimension, degree))
            opt = l1_fit_oracle(A, y)
            gap = fit_l1(data, degree).train_loss - opt
            worst = max(worst, gap)
            ok = ok and -1e-9 <= gap <= 1e-4
    assert _verdict(13, "L1 fit vs LP oracle", ok, f"worst gap {worst:.1e} over 25")


def test_criterion_14_cli_determinism(tmp_path):
    concept_path = tmp_path / "hs.json"
    concept_path.write_text(json.dumps(concept_to_dict(halfspace([1.0], 0.0))))
    cases = [
        ["gns", "--concept", str(concept_path), "--delta", "0.1",
         "--samples", "100000", "--seed", "3"],
        ["gsa", "--concept", str(concept_path), "--deltas", "0.04,0.02",
         "--samples", "100000", "--seed", "3"],
        ["approx", "--concept", str(concept_path), "--epsilon", "0.6",
         "--gamma", "0.3", "--seed", "3"],
        ["learn", "--concept", str(concept_path), "--epsilon", "0.9",
         "--gamma", "0.15", "--eta", "0.05", "--mtrain", "1000",
         "--mtest", "5000", "--seed", "3"],
    ]
    ok = True
    for i, case in enumerate(cases):
        out = tmp_path / f"out{i}.json"
        argv = case + ["--output", str(out)]
        assert cli_main(argv) in (0, 1)
        first = out.read_bytes()
        out.unlink()
        assert cli_main(argv) in (0, 1)
        ok = ok and out.read_bytes() == first
    assert _verdict(14, "stochastic CLI determinism", ok, "gns/gsa/approx/learn")
