"""Acceptance criteria 1-10.

Each test prints one ``criterion N: PASS|FAIL ...`` line and records it for
the terminal summary (see conftest.py). Run alone with

    pytest tests/test_acceptance.py -v
"""

import csv
import io
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from urcov import cli, grid
from urcov.coverage import coverage_exact
from urcov.rate import check_binding, fullcsi_average_rate
from urcov.simulator import SimConfig, correlation_gain, simulate_joint_coverage
from urcov.specfun import ModelParams
from urcov.validation import _FD_EVAL, closed_form_derivative, derivative, ordering_violations


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert ok, line


def sweep_rows(job, spec):
    out = io.StringIO()
    assert job(spec, out) == 0
    body = [line for line in out.getvalue().splitlines() if not line.startswith("#")]
    rows = list(csv.DictReader(body))
    return [{k: (v if k == "binding" else float(v)) for k, v in row.items()} for row in rows]


def test_criterion_1_oracle():
    params = ModelParams(4.0, 1)
    start = time.perf_counter()
    worst = 0.0
    for t in np.geomspace(1e-4, 1e4, 200):
        s = math.sqrt(t)
        oracle = 1.0 / (1.0 + s * (math.pi / 2.0 - math.atan(1.0 / s)))
        worst = max(worst, abs(coverage_exact(params, float(t)) - oracle) / oracle)
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-9 and elapsed < 1.0, f"max rel error {worst:.2e} (<= 1e-9), {elapsed:.3f} s (< 1 s)")


def test_criterion_2_fullcsi():
    start = time.perf_counter()
    r = fullcsi_average_rate(4.0)
    elapsed = time.perf_counter() - start
    ok = 1.48 <= r.exact <= 1.50 and (r.lower, r.upper, r.approx) == (1.0, 2.0, 1.5) and elapsed < 1.0
    report(2, ok, f"exact {r.exact:.6f} in [1.48, 1.50], lower {r.lower}, upper {r.upper}, "
                  f"approx {r.approx}, {elapsed:.3f} s (< 1 s)")


def test_criterion_3_bound_ordering():
    start = time.perf_counter()
    violations = []
    for n in grid.N_VALUES:
        for alpha in grid.ALPHA_VALUES:
            for kind, t, excess in ordering_violations(ModelParams(alpha, n), grid.THRESHOLDS, 1e-12):
                violations.append((kind.value, n, alpha, t, excess))
    elapsed = time.perf_counter() - start
    detail = f"{len(violations)} violations beyond 1e-12 on {len(grid.N_VALUES) * len(grid.ALPHA_VALUES) * 50} " \
             f"points, {elapsed:.2f} s (< 10 s)"
    if violations:
        kinds = sorted({v[0] for v in violations})
        cells = sorted({(v[1], v[2]) for v in violations})
        worst = max(violations, key=lambda v: v[4])
        detail += f"; kinds {kinds} at (n, alpha) {cells}; worst {worst[0]} n={worst[1]} " \
                  f"alpha={worst[2]} t={worst[3]:.3g} by {worst[4]:.2e}"
    report(3, not violations and elapsed < 10.0, detail)


def test_criterion_4_figure_2():
    spec = cli.SweepSpec(ModelParams(4.0, 3), cli.Axis.Threshold, 1e-4, 100.0, 200, cli.Spacing.Log,
                         cli.COVERAGE_KINDS)
    rows = sweep_rows(cli.cmd_coverage_sweep, spec)
    region = [r for r in rows if r["exact"] >= 0.9]
    lbc_tighter = all(abs(r["exact"] - r["LbC"]) < abs(r["exact"] - r["LbB"]) for r in region)
    ubb = [r["UbB"] for r in rows]
    ubb_diverges = ubb[0] > 1.0 and all(a > b for a, b in zip(ubb, ubb[1:]))
    high = [r for r in rows if r["exact"] > 0.95]
    lbx_gap = max(r["exact"] - r["LbX"] for r in high)
    zero = sweep_rows(cli.cmd_coverage_sweep, cli.SweepSpec(
        ModelParams(4.0, 3), cli.Axis.Threshold, 0.0, 1.0, 2, cli.Spacing.Linear, cli.COVERAGE_KINDS))
    ok = lbc_tighter and ubb_diverges and math.isinf(zero[0]["UbB"]) and lbx_gap < 0.01 and len(region) > 10
    report(4, ok, f"LbC tighter than LbB on {len(region)} rows with exact >= 0.9: {lbc_tighter}; "
                  f"UbB {ubb[0]:.3g} at t=1e-4, decreasing, inf at t=0: {ubb_diverges}; "
                  f"max LbX gap where exact > 0.95: {lbx_gap:.2e} (< 0.01)")


def test_criterion_5_figure_3():
    # (a) worst-case gap to the exact rate over eta in [0.3, 0.9], n = 1, alpha = 4,
    # among the bounds that stay below the exact rate.
    spec = cli.SweepSpec(ModelParams(4.0, 1), cli.Axis.Reliability, 0.3, 0.9, 61, cli.Spacing.Linear,
                         (cli.BoundKind.LbC, cli.BoundKind.LbX, cli.BoundKind.LbPlus))
    rows = sweep_rows(cli.cmd_rate_sweep, spec)
    lower_ok = all(r[k] <= r["exact"] for r in rows for k in ("LbC", "LbX", "LbPlus"))
    sup_gap = {k: max(r["exact"] - r[k] for r in rows) for k in ("LbC", "LbX", "LbPlus")}
    a_ok = lower_ok and sup_gap["LbPlus"] < min(sup_gap["LbC"], sup_gap["LbX"])

    # (b) (UbC - LbC) / exact shrinks from eta = 0.9 to 0.999 at every grid point
    b_bad = []
    for n in grid.N_VALUES:
        for alpha in grid.ALPHA_VALUES:
            spec = cli.SweepSpec(ModelParams(alpha, n), cli.Axis.Reliability, 0.9, 0.999, 2,
                                 cli.Spacing.Linear, (cli.BoundKind.LbC, cli.BoundKind.UbC))
            lo, hi = sweep_rows(cli.cmd_rate_sweep, spec)
            gaps = [(r["UbC"] - r["LbC"]) / r["exact"] for r in (lo, hi)]
            if not gaps[1] < gaps[0]:
                b_bad.append((n, alpha, gaps))
    b_ok = not b_bad

    # (c) LbB at n = 1 is far from the exact rate, more so than for larger n
    def lbb_gap(n):
        spec = cli.SweepSpec(ModelParams(4.0, n), cli.Axis.Reliability, 0.3, 0.999, 200,
                             cli.Spacing.Linear, (cli.BoundKind.LbB,))
        return max(abs(r["LbB"] - r["exact"]) / r["exact"] for r in sweep_rows(cli.cmd_rate_sweep, spec))

    gap1 = lbb_gap(1)
    others = {n: lbb_gap(n) for n in (2, 3, 5, 10)}
    c_ok = gap1 >= 0.25 and all(gap1 > g for g in others.values())

    report(5, a_ok and b_ok and c_ok,
           f"(a) sup gap on [0.3, 0.9]: LbPlus {sup_gap['LbPlus']:.4f}, LbC {sup_gap['LbC']:.4f}, "
           f"LbX {sup_gap['LbX']:.4f}: {a_ok}; (b) UbC-LbC gap shrinks at all 20 grid points: {b_ok} {b_bad}; "
           f"(c) LbB max rel gap n=1 {gap1:.3f} (>= 0.25, above n=2,3,5,10: "
           + ", ".join(f"{g:.3f}" for g in others.values()) + f"): {c_ok}")


def test_criterion_6_monte_carlo():
    start = time.perf_counter()
    worst = 0.0
    bad = []
    for n in grid.MC_N_VALUES:
        for alpha in grid.MC_ALPHA_VALUES:
            params = ModelParams(alpha, n)
            config = SimConfig(params, grid.MC_THRESHOLDS, trials=100_000, seed=20170 + 10 * n + int(alpha))
            for est in simulate_joint_coverage(config):
                z = (est.joint_coverage - coverage_exact(params, est.threshold)) / est.std_error
                worst = max(worst, abs(z))
                if abs(z) >= 3.0:
                    bad.append((n, alpha, est.threshold, round(z, 2)))
    elapsed = time.perf_counter() - start
    report(6, not bad and elapsed < 300.0,
           f"18 points at 1e5 trials, max |z| {worst:.2f} (< 3) {bad}, {elapsed:.0f} s (< 300 s single core)")


def test_criterion_7_correlation():
    config = SimConfig(ModelParams(4.0, 3), (1.0,), trials=1_000_000, seed=7)
    (pt,) = correlation_gain(config)
    iid = pt.iid
    n = 3
    m = iid.marginal_coverage
    se_m = math.sqrt(m * (1 - m) / iid.trials_used)
    sigma = math.hypot(iid.std_error, n * m ** (n - 1) * se_m)
    z_iid = (iid.joint_coverage - m**n) / sigma
    ok = pt.z_score > 3.0 and abs(z_iid) < 3.0
    report(7, ok, f"static {pt.static.joint_coverage:.5f} vs iid {iid.joint_coverage:.5f}, z = {pt.z_score:.1f} (> 3); "
                  f"iid joint vs marginal^3 {m ** n:.5f}, z = {z_iid:.2f} (|z| < 3)")


def test_criterion_8_binding():
    misses = [(n, a) for n in range(1, 11) for a in (2.5, 3.0, 4.0) if not check_binding(ModelParams(a, n), 0.29)]
    report(8, not misses, f"binding at eta=0.29 for 30 (n, alpha) pairs; misses {misses}")


def test_criterion_9_derivatives():
    slope_worst = 0.0
    deriv_worst = 0.0
    h = 1e-6
    for n in grid.N_VALUES:
        for alpha in grid.ALPHA_VALUES:
            params = ModelParams(alpha, n)
            slope = (coverage_exact(params, 2 * h) - 1.0) / (2 * h)
            slope_worst = max(slope_worst, abs(slope / (-2.0 * n / (alpha - 2.0)) - 1.0))
            for t in (0.1, 1.0, 10.0):
                fd = derivative(lambda x: coverage_exact(params, x, _FD_EVAL), t, 1e-3 * t)
                deriv_worst = max(deriv_worst, abs(fd / closed_form_derivative(params, t) - 1.0))
    report(9, slope_worst <= 1e-4 and deriv_worst <= 1e-6,
           f"slope at 0 max rel error {slope_worst:.2e} (<= 1e-4), p' max rel error {deriv_worst:.2e} (<= 1e-6) "
           f"over the 20-point (n, alpha) grid")


def test_criterion_10_determinism(tmp_path, threads):
    outputs = []
    for workers in (1, 2):
        threads(workers)
        path = tmp_path / f"simulate_{workers}.csv"
        code = cli.main(["simulate", "--trials", "20000", "--seed", "123", "--mode", "iid",
                         "--output", str(path)])
        assert code == 0
        outputs.append(path.read_bytes())
    report(10, outputs[0] == outputs[1],
           f"simulate CSV at URC_THREADS=1 and 2: {len(outputs[0])} bytes each, identical: {outputs[0] == outputs[1]}")
