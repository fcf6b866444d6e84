"""Optimal binary threshold on the bound-receptor count and the BEP.

Both hypotheses are modeled as Gaussians N(E_s, Var_s) in the bound
count.  The likelihood-ratio threshold has a closed form whose general
branch divides by Gamma = Var1 - Var0; near Gamma = 0 that is a
removable singularity and the equal-variance limit is used instead.
All functions broadcast elementwise when the statistics hold arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStats
from .numerics import erfc
from .receptor import BindingStats

# |Gamma| below this fraction of the larger variance switches to the
# equal-variance limit; the closed form loses ~|Gamma|^-1 digits there.
GAMMA_DEGENERACY = 1e-9


@dataclass(frozen=True)
class DecisionModel:
    """Per-bit statistics plus the decision threshold (a real count)."""

    stats0: BindingStats
    stats1: BindingStats
    threshold: object


def _check_variances(*stats: BindingStats):
    for s in stats:
        if np.any(np.asarray(s.variance) <= 0.0):
            raise DegenerateStats("variances must be > 0")


def optimal_threshold(stats0: BindingStats, stats1: BindingStats):
    """Threshold minimizing the error probability for equal priors.

    Callers orient the hypotheses so stats1.mean >= stats0.mean.  The
    general branch is the Gamma-form closed solution of the Gaussian
    likelihood equality; for |Gamma| < GAMMA_DEGENERACY * max(Var) the
    equal-variance limit (E0+E1)/2 - Vbar*ln(S1/S0)/(E1-E0) applies,
    which for equal variances is exactly the midpoint.
    """
    _check_variances(stats0, stats1)
    e0 = np.asarray(stats0.mean, dtype=float)
    v0 = np.asarray(stats0.variance, dtype=float)
    e1 = np.asarray(stats1.mean, dtype=float)
    v1 = np.asarray(stats1.variance, dtype=float)
    scalar = e0.ndim == 0 and e1.ndim == 0 and v0.ndim == 0 and v1.ndim == 0

    gamma = v1 - v0
    degenerate = np.abs(gamma) < GAMMA_DEGENERACY * np.maximum(v0, v1)
    s0, s1 = np.sqrt(v0), np.sqrt(v1)
    log_ratio = np.log(s1 / s0)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = (e1 - e0) ** 2 + 2.0 * gamma * log_ratio
        lam_closed = (v1 * e0 - v0 * e1 + s1 * s0 * np.sqrt(inner)) / gamma
        de = np.where(e1 == e0, 1.0, e1 - e0)
        lam_limit = np.where(
            e1 == e0,
            e0,
            0.5 * (e0 + e1) - np.sqrt(v0 * v1) * log_ratio / de,
        )
    out = np.where(degenerate, lam_limit, lam_closed)
    return float(out) if scalar else out


def bep(stats0: BindingStats, stats1: BindingStats, threshold):
    """Bit error probability of a given threshold under equal priors.

    1/4 erfc((lam - E0)/sqrt(2 Var0)) + 1/4 erfc((E1 - lam)/sqrt(2 Var1)).
    """
    _check_variances(stats0, stats1)
    e0 = np.asarray(stats0.mean, dtype=float)
    v0 = np.asarray(stats0.variance, dtype=float)
    e1 = np.asarray(stats1.mean, dtype=float)
    v1 = np.asarray(stats1.variance, dtype=float)
    lam = np.asarray(threshold, dtype=float)
    out = 0.25 * erfc((lam - e0) / np.sqrt(2.0 * v0)) + 0.25 * erfc((e1 - lam) / np.sqrt(2.0 * v1))
    scalar = e0.ndim == 0 and e1.ndim == 0 and lam.ndim == 0
    return float(out) if scalar else np.asarray(out)


def decision_model(stats0: BindingStats, stats1: BindingStats) -> DecisionModel:
    return DecisionModel(stats0, stats1, optimal_threshold(stats0, stats1))


def decide(n_b, threshold):
    """Map a bound count to a bit; ties at the threshold decode as 1."""
    n = np.asarray(n_b)
    out = (n >= np.asarray(threshold)).astype(np.int64)
    return int(out) if n.ndim == 0 and np.ndim(threshold) == 0 else out
