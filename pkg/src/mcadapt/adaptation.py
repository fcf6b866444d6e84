"""Receptor set points for the three receiver architectures.

NAR keeps the baseline dissociation constant.  RTAR re-tunes all
receptors; under scaling, shift, ISI and first-moment interference the
optimum has a closed form (geometric mean of the effective levels),
while full interference statistics require a numerical search.  REAR
expresses a second receptor species and always optimizes K_D_new
numerically with the baseline species fixed.

All searches run over log10 K_D in a +-4 decade window around the
baseline with tolerance 1e-6, and every optimizer also evaluates its
feasibility anchors (e.g. K_D_new = K_D_base reproduces the
single-population response exactly), returning whichever candidate
attains the lowest BEP.  That makes 'adaptation never hurts' a
structural guarantee rather than a numerical hope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

from .errors import DomainError, ValidationError
from .numerics import (
    DEFAULT_QUADRATURE,
    LognormalSpec,
    QuadratureConfig,
    minimize_scalar,
)
from .receptor import (
    MixtureConfig,
    ReceptorConfig,
    Receptors,
    binding_stats,
    binding_stats_with_interference,
)
from .detection import bep, optimal_threshold

LOG10_SEARCH_SPAN = 4.0
KD_SEARCH_TOL = 1e-6


@dataclass(frozen=True)
class ReceiverArchitecture:
    """A named architecture with its baseline and current receptor state."""

    kind: str  # NAR | RTAR | REAR
    baseline_K_D: float
    current: Receptors

    def __post_init__(self):
        if self.kind not in ("NAR", "RTAR", "REAR"):
            raise ValidationError(f"unknown architecture kind {self.kind!r}")
        if self.kind == "NAR" and getattr(self.current, "K_D", None) != self.baseline_K_D:
            raise ValidationError("NAR must keep K_D = baseline_K_D")
        if self.kind == "REAR":
            if not isinstance(self.current, MixtureConfig):
                raise ValidationError("REAR requires a MixtureConfig")
            if self.current.K_D_base != self.baseline_K_D:
                raise ValidationError("REAR must keep K_D_base = baseline_K_D")


class KdOptimum(NamedTuple):
    kd: float
    bep: float


def kd_opt_baseline(c0: float, c1: float) -> float:
    """Geometric mean of the two received concentration levels."""
    if not (c0 > 0.0 and c1 > 0.0):
        raise DomainError("concentration levels must be > 0")
    return math.sqrt(c0 * c1)


def kd_opt_scaled(gamma: float, baseline_kd: float) -> float:
    """Optimum under common scaling of both levels: gamma * baseline."""
    if not gamma > 0.0:
        raise DomainError("gamma > 0")
    if not baseline_kd > 0.0:
        raise DomainError("baseline_kd > 0")
    return gamma * baseline_kd


def kd_opt_shift(delta: float, c0_star: float, c1_star: float) -> float:
    """Optimum under a common additive shift of both levels."""
    if delta < 0.0:
        raise DomainError("delta >= 0")
    return kd_opt_baseline(c0_star + delta, c1_star + delta)


def kd_opt_isi(omega0: float, c0_star: float, c1_star: float) -> float:
    """Shift formula with the memoryless ISI estimate as the shift."""
    return kd_opt_shift(omega0, c0_star, c1_star)


def kd_opt_interference_mean(mu: float, c0_star: float, c1_star: float) -> float:
    """Shift formula with the interferer's mean as the shift."""
    return kd_opt_shift(mu, c0_star, c1_star)


def _optimal_bep(stats0, stats1) -> float:
    return bep(stats0, stats1, optimal_threshold(stats0, stats1))


def _search_log_kd(objective, center_kd: float, anchors: Iterable[float]) -> KdOptimum:
    lo = math.log10(center_kd) - LOG10_SEARCH_SPAN
    hi = math.log10(center_kd) + LOG10_SEARCH_SPAN
    x, fx = minimize_scalar(lambda u: objective(10.0**u), lo, hi, tol=KD_SEARCH_TOL)
    best = KdOptimum(10.0**x, fx)
    for kd in anchors:
        f = objective(kd)
        if f < best.bep:
            best = KdOptimum(kd, f)
    return best


def optimize_kd_rtar_full_stats(
    c0_star: float,
    c1_star: float,
    interference: LognormalSpec,
    n_receptors: int,
    baseline_kd: float,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> KdOptimum:
    """argmin over K_D of the BEP under full interference statistics.

    The first-moment set point is an anchor candidate, so the result
    never loses to it.
    """

    def objective(kd: float) -> float:
        rec = ReceptorConfig(kd, n_receptors)
        s0 = binding_stats_with_interference(c0_star, interference, rec, quad)
        s1 = binding_stats_with_interference(c1_star, interference, rec, quad)
        return _optimal_bep(s0, s1)

    anchor = kd_opt_interference_mean(interference.mean, c0_star, c1_star)
    return _search_log_kd(objective, baseline_kd, [anchor])


def optimize_kd_new_rear(
    c0: float,
    c1: float,
    baseline_kd: float,
    n_receptors: int,
    alpha: float = 0.5,
    interference: Optional[LognormalSpec] = None,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
    extra_anchors: Iterable[float] = (),
) -> KdOptimum:
    """argmin over K_D_new of the mixture BEP at the given levels.

    With `interference` set, statistics come from the total-moment
    integrals; otherwise the levels are deterministic.  K_D_new =
    baseline is always a candidate, which reproduces the
    single-population baseline response exactly, so REAR never does
    worse than NAR on the same objective.
    """

    def objective(kd_new: float) -> float:
        mix = MixtureConfig(kd_new, baseline_kd, alpha, n_receptors)
        if interference is not None and not interference.is_degenerate:
            s0 = binding_stats_with_interference(c0, interference, mix, quad)
            s1 = binding_stats_with_interference(c1, interference, mix, quad)
        else:
            shift = interference.mean if interference is not None else 0.0
            s0 = binding_stats(c0 + shift, mix)
            s1 = binding_stats(c1 + shift, mix)
        return _optimal_bep(s0, s1)

    anchors = [baseline_kd, *extra_anchors]
    return _search_log_kd(objective, baseline_kd, anchors)
