"""Joint SIR coverage p_n(t) of n successive receptions and its closed-form bounds.

Thresholds are linear-scale SIR values throughout. Bound values are returned
unclamped: the linear lower bound ``LbB`` goes negative for large ``t`` and
the power-law upper bound ``UbB`` exceeds one for small ``t``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from urcov import specfun
from urcov.errors import DomainError, RangeError
from urcov.specfun import DEFAULT_EVAL, EvalConfig, ModelParams

__all__ = [
    "BoundKind",
    "CoverageValue",
    "LOWER_BOUNDS",
    "UPPER_BOUNDS",
    "coverage_exact",
    "coverage_bound",
    "coverage",
    "evaluate",
    "coverage_inverse",
]


class BoundKind(enum.Enum):
    Exact = "exact"
    LbA = "LbA"
    UbA = "UbA"
    LbB = "LbB"
    UbB = "UbB"
    LbC = "LbC"
    UbC = "UbC"
    LbX = "LbX"
    LbPlus = "LbPlus"

    @property
    def is_lower(self) -> bool:
        return self in LOWER_BOUNDS

    @property
    def is_upper(self) -> bool:
        return self in UPPER_BOUNDS

    @classmethod
    def parse(cls, name: str) -> "BoundKind":
        """Case-insensitive lookup; also accepts ``LbX``/``LB_x`` style spellings."""
        key = name.strip().replace("_", "").lower()
        aliases = {"lb+": "lbplus", "lbtimes": "lbx", "lb×": "lbx"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown bound kind {name!r}")


LOWER_BOUNDS = (BoundKind.LbA, BoundKind.LbB, BoundKind.LbC, BoundKind.LbX, BoundKind.LbPlus)
UPPER_BOUNDS = (BoundKind.UbA, BoundKind.UbB, BoundKind.UbC)


@dataclass(frozen=True)
class CoverageValue:
    value: float
    kind: BoundKind
    t: float
    params: ModelParams


def _threshold(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"threshold t must be finite and >= 0, got {t!r}")
    return t


def coverage_exact(params: ModelParams, t: float, cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """p_n(t) = 1 / 2F1(n, -2/alpha; 1 - 2/alpha; -t), in (0, 1]."""
    return 1.0 / specfun.hyp2f1_coverage_denominator(params, t, cfg)


def coverage_bound(params: ModelParams, t: float, kind: BoundKind) -> float:
    t = _threshold(t)
    a = params.alpha
    n = params.n
    if kind is BoundKind.Exact:
        return coverage_exact(params, t)
    if kind is BoundKind.LbA:
        return (1.0 + t) ** (-2.0 / a) / specfun.c_n(params)
    if kind is BoundKind.UbA:
        return (1.0 + t) ** (-2.0 / a)
    if kind is BoundKind.LbB:
        return 1.0 - 2.0 * n * t / (a - 2.0)
    if kind is BoundKind.UbB:
        if t == 0.0:
            raise DomainError("UbB diverges at t = 0")
        return t ** (-2.0 / a) / specfun.c_n(params)
    if kind is BoundKind.LbC:
        return (1.0 + n * t) ** (-2.0 / (a - 2.0))
    if kind is BoundKind.UbC:
        return (1.0 + n * a * t / (a - 2.0)) ** (-2.0 / a)
    if kind is BoundKind.LbX:
        return (1.0 + t) ** (-2.0 * n / (a - 2.0))
    if kind is BoundKind.LbPlus:
        return (1.0 + specfun.c_n(params) ** (a / 2.0) * t) ** (-2.0 / a)
    raise ValueError(f"unknown bound kind {kind!r}")


def coverage(params: ModelParams, t: float, kind: BoundKind = BoundKind.Exact) -> float:
    """Dispatch to :func:`coverage_exact` or :func:`coverage_bound`."""
    if kind is BoundKind.Exact:
        return coverage_exact(params, t)
    return coverage_bound(params, t, kind)


def evaluate(params: ModelParams, t: float, kind: BoundKind = BoundKind.Exact) -> CoverageValue:
    return CoverageValue(coverage(params, t, kind), kind, float(t), params)


def _bisect_exact(params: ModelParams, eta: float, tol: float = 1e-10) -> float:
    hi = 1.0
    while coverage_exact(params, hi) >= eta:
        hi *= 2.0
        if hi > 1e300:
            raise RangeError(f"no threshold reaches coverage {eta}")
    lo = 0.0
    while True:
        mid = 0.5 * (lo + hi)
        p = coverage_exact(params, mid)
        if abs(p - eta) <= tol or mid in (lo, hi):
            return mid
        if p > eta:
            lo = mid
        else:
            hi = mid


def coverage_inverse(params: ModelParams, eta: float, kind: BoundKind = BoundKind.Exact) -> float:
    """Threshold t at which the chosen coverage curve equals ``eta``.

    Bounds are inverted in closed form. The exact curve is inverted by
    bisection (p_n is strictly decreasing) to |p_n(t) - eta| <= 1e-10.
    """
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise RangeError(f"eta must lie in (0, 1), got {eta!r}")
    a = params.alpha
    n = params.n
    if kind is BoundKind.Exact:
        return _bisect_exact(params, eta)
    if kind is BoundKind.LbA:
        cn = specfun.c_n(params)
        if eta >= 1.0 / cn:
            raise RangeError(f"LbA never exceeds 1/c_n = {1.0 / cn:.6g}; eta = {eta} unreachable")
        return (cn * eta) ** (-a / 2.0) - 1.0
    if kind is BoundKind.UbA:
        return eta ** (-a / 2.0) - 1.0
    if kind is BoundKind.LbB:
        return (1.0 - eta) * (a - 2.0) / (2.0 * n)
    if kind is BoundKind.UbB:
        return (specfun.c_n(params) * eta) ** (-a / 2.0)
    if kind is BoundKind.LbC:
        return (eta ** (-(a - 2.0) / 2.0) - 1.0) / n
    if kind is BoundKind.UbC:
        return (eta ** (-a / 2.0) - 1.0) * (a - 2.0) / (n * a)
    if kind is BoundKind.LbX:
        return eta ** (-(a - 2.0) / (2.0 * n)) - 1.0
    if kind is BoundKind.LbPlus:
        return (eta ** (-a / 2.0) - 1.0) / specfun.c_n(params) ** (a / 2.0)
    raise ValueError(f"unknown bound kind {kind!r}")
