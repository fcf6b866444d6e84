"""Equilibrium ligand-receptor response curves and bound-count statistics.

Receptors are monovalent and independent, so the bound count given a
stationary ligand concentration c is binomial with success probability
p_B(c) = c / (c + K_D).  A two-species mixture keeps the total receptor
count fixed and splits it alpha / (1 - alpha) between a newly expressed
affinity K_D_new and the original K_D_base.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import LognormalSpec, QuadratureConfig, DEFAULT_QUADRATURE, lognormal_expectation


@dataclass(frozen=True)
class ReceptorConfig:
    K_D: float
    N_R: int = 1000

    def __post_init__(self):
        if not self.K_D > 0.0:
            raise ValidationError("K_D > 0")
        if self.N_R < 1:
            raise ValidationError("N_R >= 1")


@dataclass(frozen=True)
class MixtureConfig:
    """Two receptor species; alpha*N_R carry K_D_new, the rest K_D_base."""

    K_D_new: float
    K_D_base: float
    alpha: float = 0.5
    N_R: int = 1000

    def __post_init__(self):
        if not (self.K_D_new > 0.0 and self.K_D_base > 0.0):
            raise ValidationError("both K_D > 0")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValidationError("alpha ∈ [0,1]")
        if self.N_R < 1:
            raise ValidationError("N_R >= 1")


Receptors = Union[ReceptorConfig, MixtureConfig]


@dataclass(frozen=True)
class BindingStats:
    """Mean and variance of the bound-receptor count for one hypothesis.

    Fields may hold floats or equal-shaped numpy arrays; the detection
    formulas broadcast over them.
    """

    mean: object
    variance: object


def bind_prob(c, K_D: float):
    """Equilibrium occupancy c / (c + K_D); scale-invariant in (c, K_D)."""
    if not K_D > 0.0:
        raise DomainError("K_D > 0")
    c_arr = np.asarray(c, dtype=float)
    if np.any(c_arr < 0.0):
        raise DomainError("concentration must be >= 0")
    out = c_arr / (c_arr + K_D)
    return float(out) if c_arr.ndim == 0 else out


def mixture_bind_prob(c, cfg: MixtureConfig):
    """Occupancy of the two-species mixture, Eq.-style alpha-weighted sum."""
    a = cfg.alpha
    return a * bind_prob(c, cfg.K_D_new) + (1.0 - a) * bind_prob(c, cfg.K_D_base)


def occupancy(c, receptors: Receptors):
    """Response curve of either receptor configuration."""
    if isinstance(receptors, MixtureConfig):
        return mixture_bind_prob(c, receptors)
    return bind_prob(c, receptors.K_D)


def binding_moments(c, receptors: Receptors):
    """(mean, variance) of the bound count; vectorized over c.

    The mixture is a sum of two independent binomials of sizes alpha*N_R
    and (1-alpha)*N_R, so means and variances add.
    """
    n = receptors.N_R
    if isinstance(receptors, MixtureConfig):
        pa = bind_prob(c, receptors.K_D_new)
        pb = bind_prob(c, receptors.K_D_base)
        a = receptors.alpha
        mean = n * (a * pa + (1.0 - a) * pb)
        var = n * (a * pa * (1.0 - pa) + (1.0 - a) * pb * (1.0 - pb))
    else:
        p = bind_prob(c, receptors.K_D)
        mean = n * p
        var = n * p * (1.0 - p)
    return mean, var


def binding_stats(c: float, receptors: Receptors) -> BindingStats:
    """Gaussian-approximation statistics of n_B at a fixed concentration."""
    mean, var = binding_moments(c, receptors)
    return BindingStats(mean=mean, variance=var)


def binding_stats_with_interference(
    c_star: float,
    dist: LognormalSpec,
    receptors: Receptors,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> BindingStats:
    """Statistics of n_B when a lognormal interferer adds to c_star.

    Mean via the law of total expectation, variance via the law of total
    variance: E[Var[n_B|c_int]] + Var[E[n_B|c_int]], each integral done
    with `lognormal_expectation`.
    """
    if dist.is_degenerate:
        return binding_stats(c_star + dist.mean, receptors)

    def cond_mean(ci):
        return binding_moments(c_star + ci, receptors)[0]

    def cond_var(ci):
        return binding_moments(c_star + ci, receptors)[1]

    def cond_mean_sq(ci):
        m = binding_moments(c_star + ci, receptors)[0]
        return m * m

    e_mean = lognormal_expectation(cond_mean, dist, cfg)
    e_var = lognormal_expectation(cond_var, dist, cfg)
    e_mean_sq = lognormal_expectation(cond_mean_sq, dist, cfg)
    # max() guards rounding when Var[E[n_B|c_int]] is ~0.
    var_of_mean = max(0.0, e_mean_sq - e_mean * e_mean)
    return BindingStats(mean=e_mean, variance=e_var + var_of_mean)
