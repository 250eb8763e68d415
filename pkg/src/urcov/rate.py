"""Maximum average rate under an n-successive coverage constraint.

The problem is

    maximise  p_n(t) * log(1 + t)   over t >= 0,   subject to p_n(t) >= eta.

Rates are in nats per channel use (unit bandwidth, unit-time messages, so
numerically the same as nats/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from scipy import integrate

from urcov import specfun
from urcov.coverage import BoundKind, coverage_exact, coverage_inverse
from urcov.errors import ConvergenceError, DomainError, RangeError, UnsupportedKindError
from urcov.specfun import ModelParams

__all__ = [
    "RATE_BOUND_KINDS",
    "RateSolution",
    "FullCsiRate",
    "objective",
    "rate_bound",
    "rate_lbb",
    "unconstrained_optimum",
    "check_binding",
    "rate_max_exact",
    "fullcsi_average_rate",
]

RATE_BOUND_KINDS = (
    BoundKind.LbB,
    BoundKind.LbC,
    BoundKind.UbC,
    BoundKind.LbX,
    BoundKind.LbPlus,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RateSolution:
    eta: float
    t_hat: float
    rate_nats: float
    kind: BoundKind
    binding: bool


class FullCsiRate(NamedTuple):
    exact: float
    lower: float
    upper: float
    approx: float


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise RangeError(f"eta must lie in (0, 1), got {eta!r}")
    return eta


def objective(params: ModelParams, t: float) -> float:
    """Average rate p_n(t) log(1 + t) at a fixed threshold."""
    return coverage_exact(params, t) * math.log1p(t)


def rate_lbb(params: ModelParams, eta: float) -> float:
    # Linearised form (1 - eta)(alpha - 2) / (2n): the LbB threshold itself,
    # with log(1 + t) ~ t and the eta prefactor dropped. An approximation,
    # not a guaranteed lower bound.
    eta = _check_eta(eta)
    return (params.alpha - 2.0) * (1.0 - eta) / (2.0 * params.n)


def rate_bound(params: ModelParams, eta: float, kind: BoundKind) -> float:
    """Closed-form rate obtained from a coverage bound at reliability ``eta``.

    For LbC, UbC, LbX and LbPlus the value is exactly
    ``eta * log1p(coverage_inverse(params, eta, kind))``. LbB uses the
    linearised expression of :func:`rate_lbb`.
    """
    eta = _check_eta(eta)
    a = params.alpha
    n = params.n
    if kind is BoundKind.LbB:
        return rate_lbb(params, eta)
    if kind is BoundKind.LbC:
        return eta * math.log1p((eta ** (-(a / 2.0 - 1.0)) - 1.0) / n)
    if kind is BoundKind.UbC:
        return eta * math.log1p((1.0 - 2.0 / a) * (eta ** (-a / 2.0) - 1.0) / n)
    if kind is BoundKind.LbX:
        return eta * (-(a / 2.0 - 1.0) / n) * math.log(eta)
    if kind is BoundKind.LbPlus:
        cn = specfun.c_n(params)
        return eta * math.log1p(cn ** (-a / 2.0) * (eta ** (-a / 2.0) - 1.0))
    raise UnsupportedKindError(f"no rate formula for {kind.name}")


def _golden_max(f, lo: float, hi: float, tol: float):
    """Maximise a unimodal ``f`` on [lo, hi]; returns (argmax, max)."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    while hi - lo > tol:
        # ties move the bracket left, favouring the smaller argument
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    if f1 >= f2:
        return x1, f1
    return x2, f2


@lru_cache(maxsize=256)
def unconstrained_optimum(params: ModelParams, t_min: float = 1e-6, t_max: float = 1e4):
    """Threshold maximising p_n(t) log(1 + t) with no reliability constraint.

    Golden-section search over log t on [t_min, t_max] down to a bracket of
    1e-8 in log t. Returns ``(t_tilde, rate)``.
    """
    u, value = _golden_max(
        lambda u: objective(params, math.exp(u)), math.log(t_min), math.log(t_max), 1e-8
    )
    return math.exp(u), value


def check_binding(params: ModelParams, eta: float) -> bool:
    """True when the reliability constraint is active at the optimum (t_hat <= t_tilde)."""
    eta = _check_eta(eta)
    t_tilde, _ = unconstrained_optimum(params)
    return coverage_inverse(params, eta, BoundKind.Exact) <= t_tilde


def rate_max_exact(params: ModelParams, eta: float) -> RateSolution:
    eta = _check_eta(eta)
    t_hat = coverage_inverse(params, eta, BoundKind.Exact)
    t_tilde, best = unconstrained_optimum(params)
    if t_hat <= t_tilde:
        return RateSolution(eta, t_hat, eta * math.log1p(t_hat), BoundKind.Exact, True)
    return RateSolution(eta, t_tilde, best, BoundKind.Exact, False)


def fullcsi_average_rate(alpha: float) -> FullCsiRate:
    """E[log(1 + SIR)] for a single reception with rate matched to the SIR.

    ``exact`` integrates p_1(e^x - 1) over x >= 0 with adaptive quadrature.
    ``lower`` and ``upper`` come from integrating the LbC and UbA coverage
    bounds in closed form, and ``approx`` is their midpoint.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 2.0:
        raise DomainError(f"alpha must be finite and > 2, got {alpha!r}")
    params = ModelParams(alpha, 1)
    d = params.delta
    cn = specfun.c_n(params)

    def integrand(x: float) -> float:
        return coverage_exact(params, math.expm1(x))

    # p_1(t) <= t^(-d) / c_1, so beyond this point the integrand is < 1e-12.
    x_end = math.log1p((1e12 / cn) ** (1.0 / d))
    breaks = [b for b in (1.0, 5.0, 10.0, 20.0, 40.0) if b < x_end]
    value, err = integrate.quad(
        integrand, 0.0, x_end, epsabs=1e-6, epsrel=1e-9, limit=200, points=breaks
    )
    if not err <= 1e-6:
        raise ConvergenceError(f"full-CSI rate quadrature error estimate {err:.3g} > 1e-6")
    return FullCsiRate(value, (alpha - 2.0) / 2.0, alpha / 2.0, (alpha - 1.0) / 2.0)
