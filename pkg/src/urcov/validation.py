"""Self-check suites run by ``urcov validate``.

Each suite returns a :class:`SuiteResult`; a suite passes only when every
check in it holds. Failures carry a short description of the first few
offending points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List

from urcov import grid, specfun
from urcov.coverage import LOWER_BOUNDS, UPPER_BOUNDS, BoundKind, coverage_bound, coverage_exact
from urcov.rate import (
    check_binding,
    fullcsi_average_rate,
    rate_bound,
    rate_max_exact,
)
from urcov.simulator import Mode, SimConfig, simulate_joint_coverage
from urcov.specfun import EvalConfig, ModelParams

__all__ = [
    "SuiteResult",
    "direct_series_denominator",
    "derivative",
    "closed_form_derivative",
    "ordering_violations",
    "run_all",
    "SUITES",
]

ORDERING_SLACK = 1e-12
_FD_EVAL = EvalConfig(rel_tolerance=1e-14)


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, what: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(what)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.name}: {self.checks - len(self.failures)}/{self.checks} checks"
        if self.failures:
            shown = "; ".join(self.failures[:5])
            more = f" (+{len(self.failures) - 5} more)" if len(self.failures) > 5 else ""
            line += f" -- {shown}{more}"
        return line


def _grid_params():
    for n in grid.N_VALUES:
        for alpha in grid.ALPHA_VALUES:
            yield ModelParams(alpha, n)


def direct_series_denominator(params: ModelParams, t: float) -> float:
    """2F1(n, -d; 1 - d; -t) by the untransformed series; only for 0 <= t < 1."""
    if not 0.0 <= t < 1.0:
        raise ValueError("direct series needs 0 <= t < 1")
    d = params.delta
    n = params.n
    terms = [1.0]
    term = 1.0
    k = 0
    while True:
        term *= (n + k) * (k - d) / ((1.0 - d + k) * (k + 1.0)) * (-t)
        k += 1
        terms.append(term)
        if k > n and abs(term) < 1e-18:
            return math.fsum(terms)


def derivative(f: Callable[[float], float], t: float, h: float) -> float:
    """Five-point central difference."""
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12.0 * h)


def closed_form_derivative(params: ModelParams, t: float) -> float:
    """-2 p [1 - (1 + t)^-n p] / (alpha t), the derivative of p_n."""
    p = coverage_exact(params, t, _FD_EVAL)
    return -2.0 * p * (1.0 - (1.0 + t) ** (-params.n) * p) / (params.alpha * t)


def ordering_violations(params: ModelParams, thresholds=grid.THRESHOLDS, slack=ORDERING_SLACK):
    """(kind, t, excess) for every bound on the wrong side of the exact curve."""
    out = []
    for t in thresholds:
        exact = coverage_exact(params, t)
        for kind in LOWER_BOUNDS:
            excess = coverage_bound(params, t, kind) - exact
            if excess > slack:
                out.append((kind, t, excess))
        for kind in UPPER_BOUNDS:
            excess = exact - coverage_bound(params, t, kind)
            if excess > slack:
                out.append((kind, t, excess))
    return out


# ---------------------------------------------------------------------------
# suites

def suite_oracle(quick: bool) -> SuiteResult:
    res = SuiteResult("oracle alpha=4 closed form")
    params = ModelParams(4.0, 1)
    for i in range(200):
        t = 10.0 ** (-4.0 + 8.0 * i / 199)
        s = math.sqrt(t)
        oracle = 1.0 / (1.0 + s * (math.pi / 2.0 - math.atan(1.0 / s)))
        rel = abs(coverage_exact(params, t) - oracle) / oracle
        res.check(rel <= 1e-9, f"t={t:.3g} rel={rel:.2e}")
    return res


def suite_pfaff(quick: bool) -> SuiteResult:
    res = SuiteResult("Pfaff self-consistency")
    for params in _grid_params():
        for i in range(10):
            t = 0.1 * i
            direct = direct_series_denominator(params, t)
            pfaff = specfun.hyp2f1_coverage_denominator(params, t)
            rel = abs(direct - pfaff) / direct
            res.check(rel <= 1e-10, f"n={params.n} a={params.alpha} t={t:.1f} rel={rel:.2e}")
    return res


def suite_g_range(quick: bool) -> SuiteResult:
    res = SuiteResult("G factor range [1, c_n]")
    for params in _grid_params():
        cn = specfun.c_n(params)
        for t in grid.THRESHOLDS:
            g = specfun.pfaff_g_factor(params, t)
            res.check(1.0 - 1e-12 <= g <= cn * (1 + 1e-12), f"n={params.n} a={params.alpha} t={t:.3g} G={g}")
    return res


def suite_cn(quick: bool) -> SuiteResult:
    res = SuiteResult("c_n monotonicity")
    for alpha in grid.ALPHA_VALUES:
        values = [specfun.c_n(ModelParams(alpha, n)) for n in grid.N_VALUES]
        res.check(all(a < b for a, b in zip(values, values[1:])), f"not increasing in n at a={alpha}")
        res.check(min(values) >= 1.0, f"c_n < 1 at a={alpha}")
    for n in grid.N_VALUES:
        values = [specfun.c_n(ModelParams(a, n)) for a in grid.ALPHA_VALUES]
        res.check(all(a > b for a, b in zip(values, values[1:])), f"not decreasing in alpha at n={n}")
    return res


def suite_ordering(quick: bool) -> SuiteResult:
    res = SuiteResult("bound ordering grid")
    for params in _grid_params():
        bad = ordering_violations(params)
        res.checks += len(grid.THRESHOLDS) * (len(LOWER_BOUNDS) + len(UPPER_BOUNDS)) - len(bad)
        for kind, t, excess in bad:
            res.check(False, f"{kind.name} n={params.n} a={params.alpha} t={t:.3g} by {excess:.2e}")
    return res


def suite_derivatives(quick: bool) -> SuiteResult:
    res = SuiteResult("derivative identities")
    for params in _grid_params():
        h = 1e-6
        slope0 = (coverage_exact(params, 2 * h) - 1.0) / (2 * h)
        target = -2.0 * params.n / (params.alpha - 2.0)
        rel = abs(slope0 / target - 1.0)
        res.check(rel <= 1e-4, f"slope at 0 n={params.n} a={params.alpha} rel={rel:.2e}")
        for t in (0.1, 1.0, 10.0):
            fd = derivative(lambda x: coverage_exact(params, x, _FD_EVAL), t, 1e-3 * t)
            cf = closed_form_derivative(params, t)
            rel = abs(fd / cf - 1.0)
            res.check(rel <= 1e-6, f"p' n={params.n} a={params.alpha} t={t} rel={rel:.2e}")
    return res


def suite_rate_bracket(quick: bool) -> SuiteResult:
    res = SuiteResult("rate bracket (LbC, LbX, LbPlus <= exact <= UbC)")
    for params in _grid_params():
        for eta in grid.ETA_VALUES:
            sol = rate_max_exact(params, eta)
            if not sol.binding:
                continue
            tol = 1e-9 * sol.rate_nats
            for kind in (BoundKind.LbC, BoundKind.LbX, BoundKind.LbPlus):
                lb = rate_bound(params, eta, kind)
                res.check(lb <= sol.rate_nats + tol,
                          f"{kind.name} n={params.n} a={params.alpha} eta={eta} by {lb - sol.rate_nats:.2e}")
            ub = rate_bound(params, eta, BoundKind.UbC)
            res.check(sol.rate_nats <= ub + tol, f"UbC n={params.n} a={params.alpha} eta={eta}")
    return res


def suite_rate_convergence(quick: bool) -> SuiteResult:
    res = SuiteResult("rate bounds converge as eta -> 1")
    for params in _grid_params():
        gaps = []
        for eta in (0.9, 0.999):
            exact = rate_max_exact(params, eta).rate_nats
            gaps.append((rate_bound(params, eta, BoundKind.UbC) - rate_bound(params, eta, BoundKind.LbC)) / exact)
        res.check(gaps[1] < gaps[0], f"n={params.n} a={params.alpha} gaps={gaps}")
    return res


def suite_binding(quick: bool) -> SuiteResult:
    res = SuiteResult("binding at eta=0.29 (alpha<=4)")
    for n in range(1, 11):
        for alpha in (2.5, 3.0, 4.0):
            res.check(check_binding(ModelParams(alpha, n), 0.29), f"n={n} a={alpha}")
    return res


def suite_fullcsi(quick: bool) -> SuiteResult:
    res = SuiteResult("full-CSI average rate")
    r = fullcsi_average_rate(4.0)
    res.check(1.48 <= r.exact <= 1.50, f"alpha=4 exact={r.exact:.4f}")
    res.check((r.lower, r.upper, r.approx) == (1.0, 2.0, 1.5), f"alpha=4 closed forms {r}")
    for alpha in grid.ALPHA_VALUES:
        r = fullcsi_average_rate(alpha)
        res.check(r.lower < r.exact < r.upper, f"alpha={alpha} exact={r.exact:.4f}")
    return res


def suite_monte_carlo(quick: bool) -> SuiteResult:
    trials = 20_000 if quick else 100_000
    res = SuiteResult(f"Monte Carlo agreement ({trials} trials)")
    for n in grid.MC_N_VALUES:
        for alpha in grid.MC_ALPHA_VALUES:
            params = ModelParams(alpha, n)
            cfg = SimConfig(params, grid.MC_THRESHOLDS, trials=trials, seed=20170 + 10 * n + int(alpha))
            for est in simulate_joint_coverage(cfg):
                exact = coverage_exact(params, est.threshold)
                z = (est.joint_coverage - exact) / est.std_error
                res.check(abs(z) < 3.0, f"n={n} a={alpha} t={est.threshold} z={z:.2f}")
    # i.i.d. locations: joint coverage factorises
    params = ModelParams(4.0, 3)
    cfg = SimConfig(params, (1.0,), trials=trials, seed=4242, mode=Mode.Iid)
    est = simulate_joint_coverage(cfg)[0]
    target = coverage_exact(ModelParams(4.0, 1), 1.0) ** 3
    z = (est.joint_coverage - target) / est.std_error
    res.check(abs(z) < 3.0, f"iid n=3 a=4 t=1 z={z:.2f}")
    return res


SUITES = (
    suite_oracle,
    suite_pfaff,
    suite_g_range,
    suite_cn,
    suite_ordering,
    suite_derivatives,
    suite_rate_bracket,
    suite_rate_convergence,
    suite_binding,
    suite_fullcsi,
    suite_monte_carlo,
)


def run_all(quick: bool = False, suites=SUITES) -> List[SuiteResult]:
    return [suite(quick) for suite in suites]
