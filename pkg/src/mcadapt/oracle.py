"""Seeded Monte Carlo link simulator used to validate the analytic BEP.

Per trial: draw the transmitted bit, any lognormal interference and/or
ISI history, form the true received concentration, draw the bound count
from the exact binomial law (never its Gaussian approximation, since
checking that approximation is the point), and apply the same threshold
rule the analytics use.

Reproducibility contract: trials are partitioned into fixed blocks of
65536, and block b draws from an independent Philox stream keyed by
split_seed(seed, b).  The estimate is therefore a pure function of
(point, seed, trials); `chunk_size` only sets how many trials a worker
would claim at once (rounded up to whole blocks) and can never change
the result.  PRNG: numpy Philox4x64-10 (counter based).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError, ValidationError
from .numerics import LognormalSpec
from .receptor import BindingStats, MixtureConfig, Receptors, binding_moments
from .detection import optimal_threshold

PRNG_ID = "philox4x64-10"
BLOCK_TRIALS = 1 << 16
_MASK64 = (1 << 64) - 1

#: chunk index reserved for warm-up draws in decision-feedback streams
WARMUP_CHUNK = -1


def split_seed(seed: int, chunk_index: int) -> int:
    """Injective (seed, chunk) -> 128-bit Philox key; chunk -1 is reserved."""
    if chunk_index < WARMUP_CHUNK:
        raise ConfigError("chunk_index >= -1")
    return (seed & _MASK64) + ((chunk_index + 1) << 64)


@dataclass(frozen=True)
class OracleConfig:
    trials: int = 1_000_000
    seed: int = 0
    chunk_size: int = BLOCK_TRIALS
    mode: str = "genie"  # genie | decision_feedback (ISI points only)
    exact_binomial: bool = True

    def __post_init__(self):
        if self.trials < 10_000:
            raise ValidationError("trials >= 1e4 for a meaningful standard error")
        if self.chunk_size < 1:
            raise ValidationError("chunk_size >= 1")
        if self.mode not in ("genie", "decision_feedback"):
            raise ValidationError(f"unknown oracle mode {self.mode!r}")


@dataclass(frozen=True)
class BepEstimate:
    errors: int
    trials: int
    bep_hat: float
    std_error: float


def _estimate(errors: int, trials: int) -> BepEstimate:
    p = errors / trials
    if errors == 0:
        se = 3.0 / trials  # rule-of-three surrogate
    else:
        se = math.sqrt(p * (1.0 - p) / trials)
    return BepEstimate(errors=errors, trials=trials, bep_hat=p, std_error=se)


@dataclass(frozen=True)
class IsiChannelSpec:
    """Resolved discrete-time ISI description for the simulator."""

    tap_gains: Tuple[float, ...]  # h(t_S + k T_S), k = 1..I
    N0: float
    N1: float
    memory: int  # M decoded/true bits available to the threshold

    def __post_init__(self):
        if not (0 <= self.memory <= len(self.tap_gains)):
            raise ConfigError("memory must satisfy 0 <= M <= I")


@dataclass(frozen=True)
class SimPoint:
    """Fully resolved operating point: levels, receptors and threshold.

    `threshold` must be set for non-ISI points; ISI points recompute it
    per interval from the simulated memory.
    """

    c0: float
    c1: float
    receptors: Receptors
    threshold: Optional[float] = None
    p1: float = 0.5
    interference: Optional[LognormalSpec] = None
    isi: Optional[IsiChannelSpec] = None


def _sample_bound_counts(rng, c, receptors: Receptors, exact: bool):
    """Draw n_B for each concentration in c, exactly or Gaussian-sampled."""
    if exact:
        if isinstance(receptors, MixtureConfig):
            n_new = int(round(receptors.alpha * receptors.N_R))
            n_base = receptors.N_R - n_new
            pa = c / (c + receptors.K_D_new)
            pb = c / (c + receptors.K_D_base)
            out = np.zeros(c.shape, dtype=np.int64)
            if n_new:
                out += rng.binomial(n_new, pa)
            if n_base:
                out += rng.binomial(n_base, pb)
            return out
        p = c / (c + receptors.K_D)
        return rng.binomial(receptors.N_R, p)
    mean, var = binding_moments(c, receptors)
    return rng.normal(mean, np.sqrt(var))


def _memory_threshold_table(point: SimPoint) -> np.ndarray:
    """Decision threshold for each of the 2^M memory states.

    State encoding: the bit transmitted k intervals ago sits at bit
    position k-1 (most recent = LSB).
    """
    isi = point.isi
    g = np.asarray(isi.tap_gains)
    m = isi.memory
    states = np.arange(1 << m, dtype=np.int64)
    bits = (states[:, None] >> np.arange(m)) & 1  # column k-1 <-> lag k
    known = np.where(bits == 1, isi.N1, isi.N0) @ g[:m] if m else np.zeros(1)
    tail = (point.p1 * isi.N1 + (1.0 - point.p1) * isi.N0) * g[m:].sum()
    omega_hat = known + tail
    e0, v0 = binding_moments(point.c0 + omega_hat, point.receptors)
    e1, v1 = binding_moments(point.c1 + omega_hat, point.receptors)
    lam = optimal_threshold(BindingStats(e0, v0), BindingStats(e1, v1))
    return np.atleast_1d(lam)


def _block_sizes(trials: int):
    full, rem = divmod(trials, BLOCK_TRIALS)
    sizes = [BLOCK_TRIALS] * full
    if rem:
        sizes.append(rem)
    return sizes


def simulate_bep(point: SimPoint, cfg: OracleConfig) -> BepEstimate:
    """Estimate the BEP of a resolved operating point by simulation."""
    if point.isi is None and point.threshold is None:
        raise ConfigError("non-ISI points need a resolved threshold")
    if cfg.mode == "decision_feedback":
        if point.isi is None:
            raise ConfigError("decision_feedback mode requires an ISI point")
        return _simulate_feedback(point, cfg)
    return _simulate_independent(point, cfg)


def _simulate_independent(point: SimPoint, cfg: OracleConfig) -> BepEstimate:
    """Independent trials; ISI histories (if any) are genie-known."""
    lam_table = _memory_threshold_table(point) if point.isi is not None else None
    errors = 0
    for b, size in enumerate(_block_sizes(cfg.trials)):
        rng = np.random.Generator(np.random.Philox(key=split_seed(cfg.seed, b)))
        bits = rng.random(size) < point.p1
        c = np.where(bits, point.c1, point.c0)
        if point.isi is not None:
            isi = point.isi
            g = np.asarray(isi.tap_gains)
            hist = rng.random((size, g.size)) < point.p1  # column k-1 <-> lag k
            c = c + np.where(hist, isi.N1, isi.N0) @ g
            m = isi.memory
            if m:
                state = hist[:, :m].astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
            else:
                state = np.zeros(size, dtype=np.int64)
            lam = lam_table[state]
        else:
            lam = point.threshold
        if point.interference is not None and not point.interference.is_degenerate:
            c = c + rng.lognormal(point.interference.mu_log, point.interference.sigma_log, size)
        elif point.interference is not None:
            c = c + point.interference.mean
        n_b = _sample_bound_counts(rng, c, point.receptors, cfg.exact_binomial)
        errors += int(np.sum((n_b >= lam) != bits))
    return _estimate(errors, cfg.trials)


def _simulate_feedback(point: SimPoint, cfg: OracleConfig) -> BepEstimate:
    """One long symbol stream; the memory holds the receiver's own decisions.

    The I symbols preceding the stream come from the reserved warm-up
    stream and seed the memory as if they had been decoded correctly.
    """
    isi = point.isi
    g = np.asarray(isi.tap_gains)
    i_len = g.size
    m = isi.memory
    lam_table = _memory_threshold_table(point)

    warm_rng = np.random.Generator(np.random.Philox(key=split_seed(cfg.seed, WARMUP_CHUNK)))
    warmup = warm_rng.random(i_len) < point.p1

    sizes = _block_sizes(cfg.trials)
    rngs = [
        np.random.Generator(np.random.Philox(key=split_seed(cfg.seed, b)))
        for b in range(len(sizes))
    ]
    bits = np.concatenate([r.random(s) < point.p1 for r, s in zip(rngs, sizes)])

    full = np.concatenate([warmup, bits])
    counts = np.where(full, isi.N1, isi.N0)
    # omega[i] = sum_k counts[stream i - k] g[k-1]; correlate puts lag 1 first
    omega = np.correlate(counts, g[::-1], mode="valid")[: cfg.trials]
    c = np.where(bits, point.c1, point.c0) + omega

    n_b = np.concatenate(
        [
            _sample_bound_counts(r, c[o : o + s], point.receptors, cfg.exact_binomial)
            for r, s, o in zip(rngs, sizes, np.cumsum([0] + sizes[:-1]))
        ]
    )

    mask = (1 << m) - 1
    state = 0
    for k in range(1, m + 1):  # memory starts from the (true) warm-up bits
        state |= int(warmup[i_len - k]) << (k - 1)
    errors = 0
    lam_list = lam_table.tolist()
    n_list = n_b.tolist()
    bit_list = bits.tolist()
    for i in range(cfg.trials):
        dec = 1 if n_list[i] >= lam_list[state] else 0
        if dec != bit_list[i]:
            errors += 1
        if m:
            state = ((state << 1) | dec) & mask
    return _estimate(errors, cfg.trials)
