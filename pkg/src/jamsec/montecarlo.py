"""Simulation oracle for the analytical link metrics.

Per trial the per-antenna SNRs are drawn from the configured fading law,
summed across antennas, and combined into receiver SNR or eavesdropper
SINR exactly as the analytic link model defines them.  Estimators are
plain sample means so the oracle stays trivially auditable.

Reproducibility contract: trials are split into fixed-size shards, and
every (link, antenna, shard) triple owns a dedicated child stream of the
config seed.  Sample arrays are therefore bit-identical for any worker
count, and a worker pool can fill shards in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ParameterError
from .fading import (
    DoubleKappaMuShadowedParams,
    GammaSnrParams,
    RicianShadowedParams,
    SamplerSeed,
    dksm_sample,
    rician_shadowed_sample,
)
from .secrecy import NetworkGeometry

__all__ = [
    "SHARD_SIZE",
    "LinkSpec",
    "SimConfig",
    "Estimate",
    "simulate_receiver_snr",
    "simulate_eve_sinr",
    "estimate_outage",
    "estimate_capacity",
]

SHARD_SIZE = 1_000_000

FadingSpec = Union[DoubleKappaMuShadowedParams, GammaSnrParams, RicianShadowedParams]

# lineage slots for child streams
_LINK_RECEIVER = 0
_LINK_INTERCEPT = 1
_LINK_JAMMER = 2


@dataclass(frozen=True)
class LinkSpec:
    """Per-antenna fading law of one link, with an optional blockage
    mixture (p_los chooses `fading`, otherwise `fading_nlos`)."""

    fading: FadingSpec
    p_los: Optional[float] = None
    fading_nlos: Optional[FadingSpec] = None

    def __post_init__(self):
        if not isinstance(
            self.fading,
            (DoubleKappaMuShadowedParams, GammaSnrParams, RicianShadowedParams),
        ):
            raise ParameterError("unsupported fading spec")
        if (self.p_los is None) != (self.fading_nlos is None):
            raise ParameterError("p_los and fading_nlos must be given together")
        if self.p_los is not None and not (0.0 <= self.p_los <= 1.0):
            raise ParameterError("p_los must lie in [0, 1]")


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: SamplerSeed
    geometry: NetworkGeometry
    receiver_link: Optional[LinkSpec] = None
    eve_intercept_link: Optional[LinkSpec] = None
    jammer_link: Optional[LinkSpec] = None

    def __post_init__(self):
        if not (isinstance(self.trials, (int, np.integer)) and self.trials >= 1):
            raise ParameterError("trials must be a positive integer")
        if not isinstance(self.seed, SamplerSeed):
            raise ParameterError("seed must be a SamplerSeed")


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    trials: int
    half_width: float = field(init=False)

    def __post_init__(self):
        if self.std_error < 0:
            raise ParameterError("std_error must be non-negative")
        if self.trials < 1:
            raise ParameterError("trials must be positive")
        object.__setattr__(self, "half_width", 1.96 * self.std_error)


def _shards(trials: int):
    for k in range(0, (trials + SHARD_SIZE - 1) // SHARD_SIZE):
        lo = k * SHARD_SIZE
        yield k, lo, min(lo + SHARD_SIZE, trials)


def _draw(spec: FadingSpec, seed: SamplerSeed, n: int) -> np.ndarray:
    if isinstance(spec, DoubleKappaMuShadowedParams):
        return dksm_sample(spec, seed, n)
    if isinstance(spec, RicianShadowedParams):
        return rician_shadowed_sample(spec, seed, n)
    return seed.generator().gamma(shape=spec.nu, scale=1.0 / spec.beta, size=n)


def _link_samples(link: LinkSpec, base: SamplerSeed, link_id: int,
                  n_antennas: int, trials: int) -> np.ndarray:
    """Sum of per-antenna draws; blockage state is common to all antennas
    of a link (it blocks the path, not individual elements)."""
    out = np.empty(trials)
    for k, lo, hi in _shards(trials):
        m = hi - lo
        if link.p_los is not None:
            # slot n_antennas is reserved for the blockage coin stream
            coin = base.child(link_id, n_antennas, k).generator()
            los_mask = coin.random(m) < link.p_los
        acc = np.zeros(m)
        for a in range(n_antennas):
            branch = base.child(link_id, a, k)
            if link.p_los is None:
                acc += _draw(link.fading, branch, m)
            else:
                los = _draw(link.fading, branch.child(0), m)
                nlos = _draw(link.fading_nlos, branch.child(1), m)
                acc += np.where(los_mask, los, nlos)
        out[lo:hi] = acc
    return out


def simulate_receiver_snr(cfg: SimConfig) -> np.ndarray:
    """Per-trial receiver SNR: sum of the N per-antenna draws."""
    if cfg.receiver_link is None:
        raise ParameterError("config has no receiver link fading spec")
    return _link_samples(
        cfg.receiver_link, cfg.seed, _LINK_RECEIVER,
        cfg.geometry.n_bs_antennas, cfg.trials,
    )


def simulate_eve_sinr(cfg: SimConfig) -> np.ndarray:
    """Per-trial eavesdropper SINR gamma_I / (1 + gamma_J).

    gamma_J is identically zero when no jammer link is configured, the
    jammer has zero antennas, or its transmit power is zero.
    """
    if cfg.eve_intercept_link is None:
        raise ParameterError("config has no eavesdropper intercept fading spec")
    gamma_i = _link_samples(
        cfg.eve_intercept_link, cfg.seed, _LINK_INTERCEPT,
        cfg.geometry.n_bs_antennas, cfg.trials,
    )
    jam_off = (
        cfg.jammer_link is None
        or cfg.geometry.n_jammer_antennas == 0
        or cfg.geometry.p_j == 0.0
    )
    if jam_off:
        return gamma_i
    gamma_j = _link_samples(
        cfg.jammer_link, cfg.seed, _LINK_JAMMER,
        cfg.geometry.n_jammer_antennas, cfg.trials,
    )
    return gamma_i / (1.0 + gamma_j)


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    n = len(values)
    mean = float(np.mean(values))  # numpy pairwise summation: order-stable
    if n == 1:
        return mean, 0.0
    var = float(np.var(values, ddof=1))
    return mean, math.sqrt(max(var, 0.0) / n)


def estimate_outage(samples: np.ndarray, gamma_th: float) -> Estimate:
    """Outage probability P(sample < gamma_th) with its standard error."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ParameterError("empty sample stream")
    if not (gamma_th > 0):
        raise ParameterError("gamma_th must be positive")
    ind = (samples < gamma_th).astype(float)
    mean, se = _mean_se(ind)
    return Estimate(value=mean, std_error=se, trials=len(ind))


def estimate_capacity(samples: np.ndarray) -> Estimate:
    """Sample mean of log2(1 + sample) with its standard error."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ParameterError("empty sample stream")
    if np.any(samples < 0):
        raise ParameterError("samples must be non-negative")
    vals = np.log2(1.0 + samples)
    mean, se = _mean_se(vals)
    return Estimate(value=mean, std_error=se, trials=len(vals))
