"""Simulation oracles: semi-analytic SER averaging, symbol-level transmission,
and sample moments of the composite gain.

Reproducibility contract: work is split into batches of ``batch_size`` trials;
batch i draws from its own counter-based Philox stream keyed (seed, i), and
partial results are reduced in batch-index order with exact summation.  The
result is therefore bit-identical for any worker count, and the estimate for a
given (seed, batch_size) never depends on how it was scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ggn import _sample_unit
from .ris_channel import RisLink, _sample_z, avg_snr
from .ser import Modulation
from .specfun import generalized_q

_MIN_TRIALS = 1000  # below this an estimate is not worth reporting


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int
    batch_size: int = 1 << 17

    def __post_init__(self):
        if self.trials < _MIN_TRIALS:
            raise ValueError(f"trials must be >= {_MIN_TRIALS} for a reportable estimate, got {self.trials}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class SerEstimate:
    """An SER value with provenance.  ``method`` is one of closed_form,
    asymptotic, semi_analytic_mc, symbol_level_mc."""

    value: float
    std_error: float
    trials: int
    method: str

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"value must be in [0, 1], got {self.value}")
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")


def _batch_rng(seed: int, index: int) -> np.random.Generator:
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _batch_sizes(trials: int, batch_size: int):
    full, rem = divmod(trials, batch_size)
    sizes = [batch_size] * full
    if rem:
        sizes.append(rem)
    return sizes


def _map_batches(fn, seed: int, sizes, threads: int):
    """fn(rng, count) per batch; results returned in batch-index order."""
    if threads <= 1:
        return [fn(_batch_rng(seed, i), nb) for i, nb in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(fn, _batch_rng(seed, i), nb) for i, nb in enumerate(sizes)]
        return [f.result() for f in futs]


def _mean_se(partials, trials: int):
    total = math.fsum(p[0] for p in partials)
    total_sq = math.fsum(p[1] for p in partials)
    mean = total / trials
    var = max(total_sq - trials * mean * mean, 0.0) / max(trials - 1, 1)
    return mean, math.sqrt(var / trials)


def ser_semi_analytic(link: RisLink, mod: Modulation, alpha: float, cfg: McConfig,
                      threads: int = 1) -> SerEstimate:
    """Sample mean of the conditional SER A*Q_alpha(sqrt(B*gamma)) over exact
    channel draws (no density approximation anywhere)."""
    gbar = avg_snr(link)

    def batch(rng, nb):
        z = _sample_z(rng, link.n_elements, nb)
        p = np.clip(mod.A * generalized_q(alpha, np.sqrt(mod.B * gbar) * z), 0.0, 1.0)
        return float(p.sum()), float((p * p).sum())

    partials = _map_batches(batch, cfg.seed, _batch_sizes(cfg.trials, cfg.batch_size), threads)
    mean, se = _mean_se(partials, cfg.trials)
    return SerEstimate(mean, se, cfg.trials, "semi_analytic_mc")


def ser_symbol_level(link: RisLink, mod: Modulation, alpha: float, cfg: McConfig,
                     threads: int = 1) -> SerEstimate:
    """End-to-end transmission: per real dimension the detector sees
    Z*sqrt(B*gamma_bar) + unit-variance GGN and thresholds at zero.

    BPSK uses one dimension, QPSK two independent ones (symbol error when
    either flips).  Per-batch draw order: composite gains, then the in-phase
    noise, then (QPSK) the quadrature noise.  A zero-error outcome reports
    std_error = 1/trials so the 3-sigma band covers the rule-of-three bound
    instead of collapsing to zero.
    """
    if mod.name not in ("bpsk", "qpsk"):
        raise ValueError(f"symbol-level simulation supports bpsk/qpsk only, got {mod.name!r}")
    amp_scale = math.sqrt(mod.B * avg_snr(link))
    two_dim = mod.name == "qpsk"

    def batch(rng, nb):
        amp = amp_scale * _sample_z(rng, link.n_elements, nb)
        err = (amp + _sample_unit(rng, alpha, nb)) <= 0.0
        if two_dim:
            err |= (amp + _sample_unit(rng, alpha, nb)) <= 0.0
        return (int(err.sum()),)

    partials = _map_batches(batch, cfg.seed, _batch_sizes(cfg.trials, cfg.batch_size), threads)
    errors = sum(p[0] for p in partials)
    p_hat = errors / cfg.trials
    if errors == 0:
        se = 1.0 / cfg.trials
    else:
        se = math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
    return SerEstimate(p_hat, se, cfg.trials, "symbol_level_mc")


def moment_estimate(n_elements: int, order: int, cfg: McConfig, threads: int = 1):
    """Sample moment E[Z^order] with its standard error, as (value, std_error)."""
    if order not in (1, 2, 3, 4):
        raise ValueError(f"order must be in 1..4, got {order}")
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")

    def batch(rng, nb):
        zr = _sample_z(rng, n_elements, nb) ** order
        return float(zr.sum()), float((zr * zr).sum())

    partials = _map_batches(batch, cfg.seed, _batch_sizes(cfg.trials, cfg.batch_size), threads)
    return _mean_se(partials, cfg.trials)
