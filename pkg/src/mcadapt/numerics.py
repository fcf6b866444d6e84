"""Self-contained numerical kernels.

Three pieces the rest of the package builds on: a complementary error
function accurate to better than 1e-12 relative error over |x| <= 10,
expectations of bounded functions under a moment-matched lognormal
distribution (Gauss-Hermite in the log variable, with adaptive node
doubling), and a bracketed golden-section minimizer with one parabolic
refinement step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidBracket, NonConvergence

SQRT_PI = math.sqrt(math.pi)
SQRT_2 = math.sqrt(2.0)

# Crossover between the series and continued-fraction branches of erfc.
# Below it the all-positive-term series loses < 1e-14 to the 1 - erf
# cancellation (erfc(1.25) ~ 0.077); above it the Lentz recursion needs
# at most ~170 iterations (worst case right at the crossover).
_ERFC_CROSSOVER = 1.25
_SERIES_MAX_TERMS = 64
_CF_MAX_ITER = 300

# Node budget for the adaptive Gauss-Hermite refinement.
_GH_MAX_NODES = 2048


def erfc(x):
    """Complementary error function, 2/sqrt(pi) * int_x^inf exp(-y^2) dy.

    Accepts a scalar or array and vectorizes elementwise.  Uses the
    confluent-hypergeometric series for erf at small arguments
    (Abramowitz & Stegun 7.1.6, all terms positive) and the Legendre
    continued fraction (A&S 7.1.14) evaluated by the modified Lentz
    recursion elsewhere; erfc(-x) = 2 - erfc(x) covers the negative
    axis.  Relative error is below 1e-13 for |x| <= 10 and stays at
    that level until exp(-x*x) underflows (x ~ 26.6), beyond which the
    true value is under 1e-300 and 0.0 is returned.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    a = np.atleast_1d(np.abs(arr))
    out = np.empty_like(a)

    small = a <= _ERFC_CROSSOVER
    if np.any(small):
        out[small] = 1.0 - _erf_series(a[small])
    if np.any(~small):
        out[~small] = _erfc_cf(a[~small])

    neg = np.atleast_1d(arr) < 0.0
    out[neg] = 2.0 - out[neg]
    return float(out[0]) if scalar else out.reshape(arr.shape)


def _erf_series(z: np.ndarray) -> np.ndarray:
    # erf(z) = 2z/sqrt(pi) exp(-z^2) sum_n (2 z^2)^n / (1*3*...*(2n+1))
    z2 = 2.0 * z * z
    term = np.ones_like(z)
    total = np.ones_like(z)
    for n in range(1, _SERIES_MAX_TERMS):
        term = term * z2 / (2 * n + 1)
        total += term
        if np.all(term <= 1e-18 * total):
            break
    return (2.0 / SQRT_PI) * z * np.exp(-z * z) * total


def _erfc_cf(z: np.ndarray) -> np.ndarray:
    # sqrt(pi) exp(z^2) erfc(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    tiny = 1e-300
    f = np.full_like(z, tiny)
    c = f.copy()
    d = np.zeros_like(z)
    converged = np.zeros(z.shape, dtype=bool)
    for j in range(1, _CF_MAX_ITER + 1):
        aj = 1.0 if j == 1 else (j - 1) / 2.0
        d = z + aj * d
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        c = z + aj / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        d = 1.0 / d
        delta = c * d
        f = f * delta
        converged |= np.abs(delta - 1.0) < 1e-17
        if np.all(converged):
            break
    return np.exp(-z * z) * f / SQRT_PI


@dataclass(frozen=True)
class LognormalSpec:
    """Lognormal distribution given by ITS OWN mean and standard deviation.

    The log-space parameters are moment-matched:
    sigma_log^2 = ln(1 + std^2/mean^2) and mu_log = ln(mean) - sigma_log^2/2,
    so the distribution's first two moments equal `mean` and `std_dev`
    exactly.  std_dev = 0 denotes a point mass at `mean`.
    """

    mean: float
    std_dev: float = 0.0

    def __post_init__(self):
        if not (self.mean > 0.0) or not math.isfinite(self.mean):
            raise DomainError(f"lognormal mean must be positive, got {self.mean}")
        if self.std_dev < 0.0 or not math.isfinite(self.std_dev):
            raise DomainError(f"lognormal std_dev must be >= 0, got {self.std_dev}")

    @property
    def sigma_log(self) -> float:
        return math.sqrt(math.log1p((self.std_dev / self.mean) ** 2))

    @property
    def mu_log(self) -> float:
        return math.log(self.mean) - 0.5 * self.sigma_log**2

    @property
    def is_degenerate(self) -> bool:
        return self.std_dev == 0.0


@dataclass(frozen=True)
class QuadratureConfig:
    node_count: int = 64
    relative_tolerance: float = 1e-10

    def __post_init__(self):
        if self.node_count < 8:
            raise DomainError("node_count >= 8")
        if not (0.0 < self.relative_tolerance <= 1e-3):
            raise DomainError("relative_tolerance in (0, 1e-3]")


DEFAULT_QUADRATURE = QuadratureConfig()


@lru_cache(maxsize=32)
def _hermgauss(n: int):
    return np.polynomial.hermite.hermgauss(n)


def _gh_expectation(f, dist: LognormalSpec, n: int) -> float:
    u, w = _hermgauss(n)
    c = np.exp(dist.mu_log + SQRT_2 * dist.sigma_log * u)
    try:
        vals = np.asarray(f(c), dtype=float)
        if vals.shape != c.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([float(f(ci)) for ci in c])
    return float(np.dot(w, vals) / SQRT_PI)


def lognormal_expectation(
    f: Callable[[float], float],
    dist: LognormalSpec,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """E[f(C)] for C ~ lognormal(dist), f bounded and piecewise smooth.

    Substituting c = exp(mu_log + sqrt(2) sigma_log u) turns the integral
    into Gauss-Hermite form; node counts double until two successive
    levels agree within cfg.relative_tolerance.  `f` may be vectorized
    over numpy arrays (preferred) or scalar-only.

    Raises NonConvergence if agreement is not reached within the
    internal node budget.
    """
    if dist.is_degenerate:
        return f(dist.mean)
    n = cfg.node_count
    prev = _gh_expectation(f, dist, n)
    while n < _GH_MAX_NODES:
        n *= 2
        cur = _gh_expectation(f, dist, n)
        if abs(cur - prev) <= cfg.relative_tolerance * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise NonConvergence(
        f"Gauss-Hermite refinement did not reach rtol={cfg.relative_tolerance} "
        f"within {_GH_MAX_NODES} nodes"
    )


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_MINIMIZE_MAX_ITER = 500


def minimize_scalar(
    f: Callable[[float], float],
    bracket_lo: float,
    bracket_hi: float,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Golden-section search with one final parabolic refinement.

    Assumes f is unimodal on [bracket_lo, bracket_hi] (the caller's
    responsibility).  Returns (argmin, min_value) with the argmin located
    to within ~tol relative accuracy.
    """
    if not bracket_lo < bracket_hi:
        raise InvalidBracket(f"need bracket_lo < bracket_hi, got [{bracket_lo}, {bracket_hi}]")

    a, b = float(bracket_lo), float(bracket_hi)
    abs_floor = 1e-12 * max(1.0, abs(a), abs(b))
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    evaluated = [(c, fc), (d, fd)]
    for _ in range(_MINIMIZE_MAX_ITER):
        if b - a <= tol * 0.5 * (abs(c) + abs(d)) + abs_floor:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            evaluated.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            evaluated.append((d, fd))

    # One parabolic step through the midpoint and the two interior points.
    m = 0.5 * (a + b)
    fm = f(m)
    evaluated.append((m, fm))
    x1, x2, x3 = sorted({c, m, d})[:3] if len({c, m, d}) == 3 else (None, None, None)
    if x1 is not None:
        lookup = dict(evaluated)
        f1, f2, f3 = lookup[x1], lookup[x2], lookup[x3]
        num = (x2 - x1) ** 2 * (f2 - f3) - (x2 - x3) ** 2 * (f2 - f1)
        den = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1)
        if den != 0.0:
            v = x2 - 0.5 * num / den
            if math.isfinite(v) and bracket_lo <= v <= bracket_hi:
                evaluated.append((v, f(v)))

    best_x, best_f = min(evaluated, key=lambda t: t[1])
    return best_x, best_f
