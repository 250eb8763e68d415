"""Monte Carlo estimate of n-successive SIR coverage in a Poisson downlink.

Base stations form a homogeneous PPP of density ``bs_density`` on a disc of
radius ``region_radius`` around the typical user at the origin. The user is
served by its nearest BS, every other BS interferes, and all links see
unit-mean Rayleigh (exponential power) fading that is redrawn for every
reception.

Two location models:

* ``Mode.Static`` keeps one network realisation for all n receptions and only
  redraws fading.
* ``Mode.Iid`` redraws the network and the fading for every reception.

Interference from BSs beyond the disc is added as its mean,
2 pi lambda R^(2 - alpha) / (alpha - 2). This removes the truncation bias,
which is not negligible at alpha = 3. Set ``far_field=False`` for the bare
truncated model.

Randomness: trials are grouped in fixed blocks of ``BLOCK_SIZE``. Every block
owns independent Philox streams keyed by (seed, stream tag, mode, block,
reception), so results do not depend on how blocks are spread over workers.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from urcov.specfun import ModelParams

__all__ = [
    "BLOCK_SIZE",
    "Mode",
    "SimConfig",
    "NetworkRealization",
    "SimEstimate",
    "CorrelationPoint",
    "sample_network",
    "simulate_joint_coverage",
    "correlation_gain",
    "resolve_workers",
]

BLOCK_SIZE = 1000
MIN_EXPECTED_BS = 100.0
MIN_TRIALS = 100

_TAG_GEOMETRY = 1
_TAG_FADING = 2
_TAG_RESAMPLE = 3


class Mode(enum.Enum):
    Static = "static"
    Iid = "iid"

    @classmethod
    def parse(cls, name: str) -> "Mode":
        key = name.strip().lower()
        for mode in cls:
            if mode.value == key:
                return mode
        raise ValueError(f"unknown mode {name!r} (expected 'static' or 'iid')")


_MODE_TAG = {Mode.Static: 0, Mode.Iid: 1}


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    thresholds: Sequence[float]
    trials: int
    seed: int = 0
    mode: Mode = Mode.Static
    bs_density: float = 1.0
    region_radius: float = 30.0
    far_field: bool = True

    def __post_init__(self):
        thresholds = tuple(float(t) for t in self.thresholds)
        if not thresholds:
            raise ValueError("at least one threshold is required")
        if any(not math.isfinite(t) or t < 0.0 for t in thresholds):
            raise ValueError(f"thresholds must be finite and >= 0, got {thresholds}")
        object.__setattr__(self, "thresholds", thresholds)
        if int(self.trials) != self.trials or self.trials < MIN_TRIALS:
            raise ValueError(f"trials must be an integer >= {MIN_TRIALS}, got {self.trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.bs_density > 0.0 or not self.region_radius > 0.0:
            raise ValueError("bs_density and region_radius must be positive")
        if self.expected_bs < MIN_EXPECTED_BS:
            raise ValueError(
                f"pi R^2 lambda = {self.expected_bs:.1f} expected BSs; need >= {MIN_EXPECTED_BS:g}"
            )
        if not isinstance(self.mode, Mode):
            object.__setattr__(self, "mode", Mode.parse(str(self.mode)))

    @property
    def expected_bs(self) -> float:
        return math.pi * self.region_radius**2 * self.bs_density

    @property
    def far_field_interference(self) -> float:
        """Mean interference from the PPP outside the disc (unit transmit power)."""
        if not self.far_field:
            return 0.0
        a = self.params.alpha
        return 2.0 * math.pi * self.bs_density * self.region_radius ** (2.0 - a) / (a - 2.0)


@dataclass(frozen=True)
class NetworkRealization:
    serving_distance: float
    interferer_distances: np.ndarray = field(repr=False)
    resamples: int = 0


@dataclass(frozen=True)
class SimEstimate:
    joint_coverage: float
    std_error: float
    marginal_coverage: float
    trials_used: int
    threshold: float


@dataclass(frozen=True)
class CorrelationPoint:
    threshold: float
    static: SimEstimate
    iid: SimEstimate
    gain: float
    z_score: float


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit argument, else ``URC_THREADS``, else CPU count."""
    if workers is None:
        env = os.environ.get("URC_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class _Geometry:
    serving_sq: np.ndarray  # (B,) squared serving distance
    counts: np.ndarray  # (B,) interferers per trial
    interferer_sq: np.ndarray  # flat, grouped by trial, unsorted
    resamples: np.ndarray  # (B,)


@lru_cache(maxsize=4)
def _block_geometry(
    seed: int, mode_tag: int, density: float, radius: float, block: int, reception: int
) -> _Geometry:
    # Nearest BS first: pi*lambda*r1^2 ~ Exp(1); given r1 the remaining BSs are
    # a PPP on the annulus r1 < r <= R. Same law as a PPP on the disc with
    # nearest-BS association, conditioned on at least one BS.
    rng = _stream(seed, _TAG_GEOMETRY, mode_tag, block, reception)
    rate = math.pi * density
    r_sq_max = radius * radius
    serving_sq = rng.standard_exponential(BLOCK_SIZE) / rate
    resamples = np.zeros(BLOCK_SIZE, dtype=np.int64)
    for j in np.flatnonzero(serving_sq > r_sq_max):
        attempt = 0
        while serving_sq[j] > r_sq_max:
            attempt += 1
            sub = _stream(seed, _TAG_RESAMPLE, mode_tag, block, reception, int(j), attempt)
            serving_sq[j] = sub.standard_exponential() / rate
        resamples[j] = attempt
    counts = rng.poisson(rate * (r_sq_max - serving_sq))
    base = np.repeat(serving_sq, counts)
    u = rng.random(base.size)
    interferer_sq = base + (r_sq_max - base) * (1.0 - u)
    return _Geometry(serving_sq, counts, interferer_sq, resamples)


def _geometry(config: SimConfig, block: int, reception: int) -> _Geometry:
    return _block_geometry(
        int(config.seed),
        _MODE_TAG[config.mode],
        float(config.bs_density),
        float(config.region_radius),
        block,
        reception,
    )


def sample_network(config: SimConfig, trial_index: int, reception: int = 0) -> NetworkRealization:
    """Network seen by trial ``trial_index`` (and, in Iid mode, reception ``reception``).

    Identical to the realisation :func:`simulate_joint_coverage` uses for that
    trial. Consecutive indices share a cached block, so sweeping over trials
    is cheap.
    """
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    if config.mode is Mode.Static:
        reception = 0
    block, offset = divmod(int(trial_index), BLOCK_SIZE)
    geo = _geometry(config, block, reception)
    start = int(geo.counts[:offset].sum())
    stop = start + int(geo.counts[offset])
    return NetworkRealization(
        serving_distance=math.sqrt(geo.serving_sq[offset]),
        interferer_distances=np.sort(np.sqrt(geo.interferer_sq[start:stop])),
        resamples=int(geo.resamples[offset]),
    )


def _relative_path_gain(geo: _Geometry, alpha: float) -> np.ndarray:
    # (r / r_j)^alpha for every interferer, in (0, 1]
    serving = np.repeat(geo.serving_sq, geo.counts)
    return (serving / geo.interferer_sq) ** (alpha / 2.0)


def _sum_by_trial(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    sums = np.zeros(counts.size)
    nonempty = counts > 0
    if values.size:
        offsets = np.cumsum(counts) - counts
        sums[nonempty] = np.add.reduceat(values, offsets[nonempty])
    return sums


def _reception_sir(config: SimConfig, geo: _Geometry, gains: np.ndarray, block: int, i: int):
    alpha = config.params.alpha
    rng = _stream(int(config.seed), _TAG_FADING, _MODE_TAG[config.mode], block, i)
    g_serving = rng.standard_exponential(BLOCK_SIZE)
    g_interf = rng.standard_exponential(gains.size)
    # interference normalised by the serving path gain r^-alpha
    interference = _sum_by_trial(g_interf * gains, geo.counts)
    interference += config.far_field_interference * geo.serving_sq ** (alpha / 2.0)
    with np.errstate(divide="ignore"):
        return g_serving / interference


def _run_block(config: SimConfig, block: int):
    used = min(BLOCK_SIZE, config.trials - block * BLOCK_SIZE)
    thresholds = np.asarray(config.thresholds)
    n = config.params.n
    min_sir = None
    first_sir = None
    geo = gains = None
    for i in range(n):
        if config.mode is Mode.Iid or geo is None:
            geo = _geometry(config, block, i if config.mode is Mode.Iid else 0)
            gains = _relative_path_gain(geo, config.params.alpha)
        sir = _reception_sir(config, geo, gains, block, i)[:used]
        if first_sir is None:
            first_sir = sir
            min_sir = sir
        else:
            min_sir = np.minimum(min_sir, sir)
    joint = (min_sir[:, None] >= thresholds[None, :]).sum(axis=0)
    marginal = (first_sir[:, None] >= thresholds[None, :]).sum(axis=0)
    return joint.astype(np.int64), marginal.astype(np.int64)


def _estimate(successes: int, marginal: int, trials: int, threshold: float) -> SimEstimate:
    p = successes / trials
    return SimEstimate(
        joint_coverage=p,
        std_error=math.sqrt(p * (1.0 - p) / trials),
        marginal_coverage=marginal / trials,
        trials_used=trials,
        threshold=threshold,
    )


def simulate_joint_coverage(config: SimConfig, workers: Optional[int] = None) -> list:
    """Estimate p_n(t) for every threshold in ``config`` (common random numbers).

    Returns one :class:`SimEstimate` per threshold, in input order. The result
    is bit-identical for any ``workers`` value.
    """
    n_blocks = -(-config.trials // BLOCK_SIZE)
    workers = min(resolve_workers(workers), n_blocks)
    joint = np.zeros(len(config.thresholds), dtype=np.int64)
    marginal = np.zeros_like(joint)
    if workers == 1:
        results = (_run_block(config, b) for b in range(n_blocks))
        for j, m in results:
            joint += j
            marginal += m
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for j, m in pool.map(lambda b: _run_block(config, b), range(n_blocks)):
                joint += j
                marginal += m
    return [
        _estimate(int(j), int(m), config.trials, t)
        for j, m, t in zip(joint, marginal, config.thresholds)
    ]


def correlation_gain(config: SimConfig, workers: Optional[int] = None) -> list:
    """Static minus i.i.d. joint coverage per threshold, with its z-score.

    ``config.mode`` is ignored; both modes run on their own substreams of
    ``config.seed``.
    """
    static = simulate_joint_coverage(replace(config, mode=Mode.Static), workers)
    iid = simulate_joint_coverage(replace(config, mode=Mode.Iid), workers)
    out = []
    for s, i in zip(static, iid):
        gain = s.joint_coverage - i.joint_coverage
        se = math.hypot(s.std_error, i.std_error)
        if se > 0.0:
            z = gain / se
        else:
            z = 0.0 if gain == 0.0 else math.copysign(math.inf, gain)
        out.append(CorrelationPoint(s.threshold, s, i, gain, z))
    return out
