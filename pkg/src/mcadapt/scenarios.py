"""Sweep orchestration for the five time-varying studies.

Each run_* function walks a parameter grid, resolves the three receiver
architectures (NAR keeps the baseline K_D, RTAR re-tunes it, REAR
optimizes a second receptor species), computes the analytic BEP, and
optionally attaches a Monte Carlo estimate per row.  Rows come back in
grid order and are byte-reproducible given (spec, params, seed).

Scenario notes:

* scaling - RTAR's set point is gamma * K_D_baseline, and occupancy is
  invariant under scaling both c and K_D by gamma.  RTAR rows are
  therefore evaluated at the baseline operating point, where gamma has
  cancelled algebraically, so the flat-BEP property holds bit for bit
  instead of drowning in threshold round-off.
* enzyme - rows are built by the scaling machinery at
  gamma = exp(-beta t_S), which is the exact correspondence between the
  two studies; the impulse-response route lives in `channel.cir_enzyme`.
* isi - the analytic BEP is genie-aided and averaged over interfering
  bit patterns: exhaustively for I <= 14, otherwise over 4096 histories
  sampled with the run seed.  Response-curve tuning uses the memoryless
  estimate only; thresholds use the per-interval M-bit estimate.  The
  reported threshold/means describe the memoryless operating point.
* interference - first-moment rows pick K_D and threshold from the
  deterministic-shift belief but are scored under the true total-moment
  statistics; full-statistics rows optimize against those statistics
  directly, with the first-moment set points as anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, ValidationError
from .numerics import DEFAULT_QUADRATURE, LognormalSpec, QuadratureConfig
from .channel import ChannelParams, isi_tap_gains, received_concentration
from .receptor import (
    BindingStats,
    MixtureConfig,
    ReceptorConfig,
    Receptors,
    binding_moments,
    binding_stats,
    binding_stats_with_interference,
    occupancy,
)
from .detection import bep, optimal_threshold
from .adaptation import (
    kd_opt_baseline,
    kd_opt_interference_mean,
    kd_opt_isi,
    kd_opt_scaled,
    kd_opt_shift,
    optimize_kd_new_rear,
    optimize_kd_rtar_full_stats,
)
from . import oracle as mc

ARCHITECTURES = ("NAR", "RTAR", "REAR")
KNOWLEDGE_LEVELS = ("first_moment", "full_stats")
SCENARIO_KINDS = ("scaling", "shift", "enzyme", "isi_ts", "isi_memory", "interference", "ratio")

# ISI pattern averaging: exact enumeration up to this memory length,
# seeded sampling beyond it.
EXACT_PATTERN_LIMIT = 14
PATTERN_SAMPLES = 4096
_PATTERN_CHUNK_BASE = 1 << 32  # keeps pattern streams clear of oracle blocks

DEFAULT_GRIDS = {
    "scaling": tuple(np.logspace(-2.0, 2.0, 25)),
    "shift": (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0),
    "enzyme": tuple(np.linspace(0.0, 1.5, 16)),
    "isi_ts": tuple(np.logspace(math.log10(2.0), math.log10(64.0), 11)),
    "isi_memory": tuple(float(m) for m in range(0, 9)),
    "interference": tuple(np.logspace(-1.0, 2.0, 13)),
    "ratio": (5.0, 10.0, 25.0, 50.0, 100.0, 200.0),
}

PARAM_NAMES = {
    "scaling": "gamma",
    "shift": "delta_over_kdstar",
    "enzyme": "beta",
    "isi_ts": "ts_factor",
    "isi_memory": "memory_bits",
    "interference": "mu_over_kdstar",
    "ratio": "n1_over_n0",
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    grid: Tuple[float, ...] = ()
    architectures: Tuple[str, ...] = ARCHITECTURES
    knowledge: Tuple[str, ...] = KNOWLEDGE_LEVELS
    oracle_trials: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValidationError(f"unknown scenario kind {self.kind!r}")
        grid = tuple(float(g) for g in (self.grid or DEFAULT_GRIDS[self.kind]))
        object.__setattr__(self, "grid", grid)
        if not grid:
            raise ValidationError("grid must be non-empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("grid must be strictly increasing")
        for a in self.architectures:
            if a not in ARCHITECTURES:
                raise ValidationError(f"unknown architecture {a!r}")
        for k in self.knowledge:
            if k not in KNOWLEDGE_LEVELS:
                raise ValidationError(f"unknown knowledge level {k!r}")
        if self.oracle_trials != 0 and self.oracle_trials < 10_000:
            raise ValidationError("oracle_trials = 0 (analytic only) or >= 1e4")


@dataclass(frozen=True)
class ReceiverSetup:
    n_receptors: int = 1000
    alpha: float = 0.5

    def __post_init__(self):
        if self.n_receptors < 1:
            raise ValidationError("N_R >= 1")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValidationError("alpha ∈ [0,1]")


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    param_name: str
    param_value: float
    arch: str
    knowledge: str
    kd: float
    kd_new: Optional[float]
    threshold: float
    mean0: float
    var0: float
    mean1: float
    var1: float
    bep_analytic: float
    bep_mc: Optional[float]
    mc_se: Optional[float]
    trials: int


def _baseline(params: ChannelParams):
    """(c0*, c1*, K*_D,opt, t_S) for the enzyme-free isolated-symbol link."""
    base = replace(params, beta=0.0)
    t_s = base.sampling_time()
    c0 = received_concentration(0, base, t_s)
    c1 = received_concentration(1, base, t_s)
    return c0, c1, kd_opt_baseline(c0, c1), t_s


def _scored_row(scenario, pname, value, arch, knowledge, kd, kd_new, stats0, stats1, lam,
                bep_val, sim_point, spec, oracle_cfg) -> SweepRow:
    bep_mc = mc_se = None
    trials = 0
    if spec.oracle_trials > 0 and sim_point is not None:
        cfg = replace(oracle_cfg, trials=spec.oracle_trials)
        est = mc.simulate_bep(sim_point, cfg)
        bep_mc, mc_se, trials = est.bep_hat, est.std_error, est.trials
    return SweepRow(
        scenario=scenario, param_name=pname, param_value=float(value), arch=arch,
        knowledge=knowledge, kd=float(kd),
        kd_new=None if kd_new is None else float(kd_new),
        threshold=float(lam), mean0=float(stats0.mean), var0=float(stats0.variance),
        mean1=float(stats1.mean), var1=float(stats1.variance),
        bep_analytic=float(bep_val), bep_mc=bep_mc, mc_se=mc_se, trials=trials,
    )


def _deterministic_model(c0, c1, receptors: Receptors):
    s0 = binding_stats(c0, receptors)
    s1 = binding_stats(c1, receptors)
    lam = optimal_threshold(s0, s1)
    return s0, s1, lam, bep(s0, s1, lam)


def _scaling_rows_at(scenario, pname, value, gamma, spec, params, setup, oracle_cfg):
    c0s, c1s, kstar, _ = _baseline(params)
    c0, c1 = gamma * c0s, gamma * c1s
    rows = []
    for arch in spec.architectures:
        kd_new = None
        if arch == "NAR":
            rec = ReceptorConfig(kstar, setup.n_receptors)
            s0, s1, lam, b = _deterministic_model(c0, c1, rec)
            kd = kstar
        elif arch == "RTAR":
            kd = kd_opt_scaled(gamma, kstar)
            rec = ReceptorConfig(kd, setup.n_receptors)
            # gamma cancels exactly in c/(c+K_D): evaluate at the baseline
            # point so BEP(gamma) == BEP(1) bit for bit.
            s0, s1, lam, b = _deterministic_model(c0s, c1s, ReceptorConfig(kstar, setup.n_receptors))
        else:
            opt = optimize_kd_new_rear(c0, c1, kstar, setup.n_receptors, setup.alpha)
            kd, kd_new = kstar, opt.kd
            rec = MixtureConfig(opt.kd, kstar, setup.alpha, setup.n_receptors)
            s0, s1, lam, b = _deterministic_model(c0, c1, rec)
        point = mc.SimPoint(c0=c0, c1=c1, receptors=rec, threshold=lam, p1=params.p1)
        rows.append(_scored_row(scenario, pname, value, arch, "", kd, kd_new,
                                s0, s1, lam, b, point, spec, oracle_cfg))
    return rows


def _shift_rows_at(scenario, pname, value, delta, spec, params, setup, oracle_cfg):
    c0s, c1s, kstar, _ = _baseline(params)
    c0, c1 = c0s + delta, c1s + delta
    rows = []
    for arch in spec.architectures:
        kd_new = None
        if arch == "NAR":
            kd = kstar
            rec = ReceptorConfig(kd, setup.n_receptors)
        elif arch == "RTAR":
            kd = kd_opt_shift(delta, c0s, c1s)
            rec = ReceptorConfig(kd, setup.n_receptors)
        else:
            opt = optimize_kd_new_rear(c0, c1, kstar, setup.n_receptors, setup.alpha)
            kd, kd_new = kstar, opt.kd
            rec = MixtureConfig(opt.kd, kstar, setup.alpha, setup.n_receptors)
        s0, s1, lam, b = _deterministic_model(c0, c1, rec)
        point = mc.SimPoint(c0=c0, c1=c1, receptors=rec, threshold=lam, p1=params.p1)
        rows.append(_scored_row(scenario, pname, value, arch, "", kd, kd_new,
                                s0, s1, lam, b, point, spec, oracle_cfg))
    return rows


def run_scaling_sweep(spec: ScenarioSpec, params: ChannelParams,
                      setup: ReceiverSetup = ReceiverSetup(),
                      oracle_cfg: Optional[mc.OracleConfig] = None):
    """BEP of the three architectures when both levels scale by gamma."""
    oracle_cfg = oracle_cfg or mc.OracleConfig()
    rows = []
    for gamma in spec.grid:
        rows += _scaling_rows_at("scaling", PARAM_NAMES["scaling"], gamma, gamma,
                                 spec, params, setup, oracle_cfg)
    return rows


def run_enzyme_sweep(spec: ScenarioSpec, params: ChannelParams,
                     setup: ReceiverSetup = ReceiverSetup(),
                     oracle_cfg: Optional[mc.OracleConfig] = None):
    """Enzymatic degradation: identical to scaling at gamma = exp(-beta t_S)."""
    oracle_cfg = oracle_cfg or mc.OracleConfig()
    _, _, _, t_s = _baseline(params)
    rows = []
    for beta in spec.grid:
        gamma = math.exp(-beta * t_s)
        rows += _scaling_rows_at("enzyme", PARAM_NAMES["enzyme"], beta, gamma,
                                 spec, params, setup, oracle_cfg)
    return rows


def run_shift_sweep(spec: ScenarioSpec, params: ChannelParams,
                    setup: ReceiverSetup = ReceiverSetup(),
                    oracle_cfg: Optional[mc.OracleConfig] = None):
    """Common additive shift of both levels, in multiples of the baseline K_D."""
    oracle_cfg = oracle_cfg or mc.OracleConfig()
    _, _, kstar, _ = _baseline(params)
    rows = []
    for mult in spec.grid:
        rows += _shift_rows_at("shift", PARAM_NAMES["shift"], mult, mult * kstar,
                               spec, params, setup, oracle_cfg)
    return rows


def run_ratio_sweep(spec: ScenarioSpec, params: ChannelParams,
                    setup: ReceiverSetup = ReceiverSetup(),
                    oracle_cfg: Optional[mc.OracleConfig] = None,
                    shift_multiple: float = 2.0):
    """Shift study repeated across N1/N0 ratios at a fixed shift multiple."""
    oracle_cfg = oracle_cfg or mc.OracleConfig()
    rows = []
    for ratio in spec.grid:
        p = replace(params, N0=params.N1 / ratio)
        _, _, kstar, _ = _baseline(p)
        rows += _shift_rows_at("ratio", PARAM_NAMES["ratio"], ratio,
                               shift_multiple * kstar, spec, p, setup, oracle_cfg)
    return rows


def _isi_patterns(params: ChannelParams, seed: int):
    """(pattern matrix, weights); column k-1 holds the bit at lag k.

    Sampled patterns depend only on (seed, I, p1), so every grid point
    and architecture of a sweep averages over the same histories.
    """
    i_len = params.I
    if i_len <= EXACT_PATTERN_LIMIT:
        pats = (np.arange(1 << i_len, dtype=np.int64)[:, None] >> np.arange(i_len)) & 1
        ones = pats.sum(axis=1)
        weights = params.p1**ones * params.p0 ** (i_len - ones)
    else:
        key = mc.split_seed(seed, _PATTERN_CHUNK_BASE)
        rng = np.random.Generator(np.random.Philox(key=key))
        pats = (rng.random((PATTERN_SAMPLES, i_len)) < params.p1).astype(np.int64)
        weights = np.full(len(pats), 1.0 / len(pats))
    return pats, weights


def _isi_point_rows(scenario, pname, value, params, memory, spec, setup, oracle_cfg):
    if not (0 <= memory <= params.I):
        raise ValidationError(f"memory M={memory} must satisfy 0 <= M <= I={params.I}")
    c0s, c1s, kstar, t_s = _baseline(params)
    gains = isi_tap_gains(params, t_s)
    expected_count = params.p0 * params.N0 + params.p1 * params.N1
    omega0 = expected_count * float(gains.sum())

    pats, weights = _isi_patterns(params, oracle_cfg.seed)
    counts = np.where(pats == 1, params.N1, params.N0)
    omega = counts @ gains
    omega_hat = counts[:, :memory] @ gains[:memory] + expected_count * float(gains[memory:].sum())

    rows = []
    for arch in spec.architectures:
        kd_new = None
        if arch == "NAR":
            kd = kstar
            rec = ReceptorConfig(kd, setup.n_receptors)
        elif arch == "RTAR":
            kd = kd_opt_isi(omega0, c0s, c1s)
            rec = ReceptorConfig(kd, setup.n_receptors)
        else:
            opt = optimize_kd_new_rear(c0s + omega0, c1s + omega0, kstar,
                                       setup.n_receptors, setup.alpha)
            kd, kd_new = kstar, opt.kd
            rec = MixtureConfig(opt.kd, kstar, setup.alpha, setup.n_receptors)

        est0 = BindingStats(*binding_moments(c0s + omega_hat, rec))
        est1 = BindingStats(*binding_moments(c1s + omega_hat, rec))
        lam = optimal_threshold(est0, est1)
        true0 = BindingStats(*binding_moments(c0s + omega, rec))
        true1 = BindingStats(*binding_moments(c1s + omega, rec))
        bep_avg = float(np.dot(weights, bep(true0, true1, lam)))

        # CSV columns describe the memoryless (tuning) operating point.
        rep0 = binding_stats(c0s + omega0, rec)
        rep1 = binding_stats(c1s + omega0, rec)
        rep_lam = optimal_threshold(rep0, rep1)

        point = mc.SimPoint(
            c0=c0s, c1=c1s, receptors=rec, threshold=None, p1=params.p1,
            isi=mc.IsiChannelSpec(tuple(gains), params.N0, params.N1, memory),
        )
        rows.append(_scored_row(scenario, pname, value, arch, "", kd, kd_new,
                                rep0, rep1, rep_lam, bep_avg, point, spec, oracle_cfg))
    return rows


def run_isi_sweep(spec: ScenarioSpec, params: ChannelParams,
                  setup: ReceiverSetup = ReceiverSetup(),
                  oracle_cfg: Optional[mc.OracleConfig] = None,
                  memory: int = 2):
    """Genie-aided ISI study versus signaling interval or memory length."""
    oracle_cfg = oracle_cfg or mc.OracleConfig()
    rows = []
    if spec.kind == "isi_ts":
        for ts_factor in spec.grid:
            p = replace(params, Ts_factor=ts_factor)
            rows += _isi_point_rows("isi_ts", PARAM_NAMES["isi_ts"], ts_factor, p,
                                    memory, spec, setup, oracle_cfg)
    elif spec.kind == "isi_memory":
        for m_val in spec.grid:
            m_int = int(m_val)
            if m_int != m_val:
                raise ValidationError("isi_memory grid must hold integers")
            rows += _isi_point_rows("isi_memory", PARAM_NAMES["isi_memory"], m_val, params,
                                    m_int, spec, setup, oracle_cfg)
    else:
        raise ConfigError(f"run_isi_sweep cannot handle kind {spec.kind!r}")
    return rows


def _interference_resolutions(mu, c0s, c1s, kstar, setup, quad, dist):
    """Set points for both knowledge levels; full-stats anchors on first-moment."""
    fm = {
        "NAR": (kstar, None),
        "RTAR": (kd_opt_interference_mean(mu, c0s, c1s), None),
    }
    rear_fm = optimize_kd_new_rear(c0s, c1s, kstar, setup.n_receptors, setup.alpha,
                                   interference=LognormalSpec(mu, 0.0), quad=quad)
    fm["REAR"] = (kstar, rear_fm.kd)
    full = {
        "NAR": (kstar, None),
        "RTAR": (
            optimize_kd_rtar_full_stats(c0s, c1s, dist, setup.n_receptors, kstar, quad).kd,
            None,
        ),
        "REAR": (
            kstar,
            optimize_kd_new_rear(c0s, c1s, kstar, setup.n_receptors, setup.alpha,
                                 interference=dist, quad=quad,
                                 extra_anchors=[rear_fm.kd]).kd,
        ),
    }
    return {"first_moment": fm, "full_stats": full}


def run_interference_sweep(spec: ScenarioSpec, params: ChannelParams,
                           setup: ReceiverSetup = ReceiverSetup(),
                           oracle_cfg: Optional[mc.OracleConfig] = None,
                           quad: QuadratureConfig = DEFAULT_QUADRATURE,
                           std_fraction: float = 0.1):
    """Stochastic lognormal interference with mean in multiples of K*_D.

    Every row is scored under the total-moment statistics; the knowledge
    level decides which statistics pick the set point and threshold.
    """
    oracle_cfg = oracle_cfg or mc.OracleConfig()
    c0s, c1s, kstar, _ = _baseline(params)
    rows = []
    for mult in spec.grid:
        mu = mult * kstar
        dist = LognormalSpec(mu, std_fraction * mu)
        setpoints = _interference_resolutions(mu, c0s, c1s, kstar, setup, quad, dist)
        for knowledge in spec.knowledge:
            for arch in spec.architectures:
                kd, kd_new = setpoints[knowledge][arch]
                if arch == "REAR":
                    rec = MixtureConfig(kd_new, kstar, setup.alpha, setup.n_receptors)
                else:
                    rec = ReceptorConfig(kd, setup.n_receptors)
                true0 = binding_stats_with_interference(c0s, dist, rec, quad)
                true1 = binding_stats_with_interference(c1s, dist, rec, quad)
                if knowledge == "first_moment":
                    bel0 = binding_stats(c0s + mu, rec)
                    bel1 = binding_stats(c1s + mu, rec)
                    lam = optimal_threshold(bel0, bel1)
                else:
                    lam = optimal_threshold(true0, true1)
                b = bep(true0, true1, lam)
                point = mc.SimPoint(c0=c0s, c1=c1s, receptors=rec, threshold=lam,
                                    p1=params.p1, interference=dist)
                rows.append(_scored_row("interference", PARAM_NAMES["interference"], mult,
                                        arch, knowledge, kd, kd_new, true0, true1, lam, b,
                                        point, spec, oracle_cfg))
    return rows


def run_sweep(spec: ScenarioSpec, params: ChannelParams,
              setup: ReceiverSetup = ReceiverSetup(),
              oracle_cfg: Optional[mc.OracleConfig] = None,
              quad: QuadratureConfig = DEFAULT_QUADRATURE,
              memory: int = 2,
              std_fraction: float = 0.1,
              shift_multiple: float = 2.0):
    """Dispatch a ScenarioSpec to its runner."""
    if spec.kind == "scaling":
        return run_scaling_sweep(spec, params, setup, oracle_cfg)
    if spec.kind == "enzyme":
        return run_enzyme_sweep(spec, params, setup, oracle_cfg)
    if spec.kind == "shift":
        return run_shift_sweep(spec, params, setup, oracle_cfg)
    if spec.kind == "ratio":
        return run_ratio_sweep(spec, params, setup, oracle_cfg, shift_multiple)
    if spec.kind in ("isi_ts", "isi_memory"):
        return run_isi_sweep(spec, params, setup, oracle_cfg, memory)
    if spec.kind == "interference":
        return run_interference_sweep(spec, params, setup, oracle_cfg, quad, std_fraction)
    raise ConfigError(f"unknown scenario kind {spec.kind!r}")


@dataclass(frozen=True)
class ResponseCurve:
    concentration: np.ndarray
    occupancy: np.ndarray
    c10: float
    c90: float


def _solve_occupancy(receptors: Receptors, target: float) -> float:
    """Concentration where the (monotone) response equals `target`."""
    kds = ([receptors.K_D_new, receptors.K_D_base]
           if isinstance(receptors, MixtureConfig) else [receptors.K_D])
    lo, hi = min(kds) * 1e-9, max(kds) * 1e9
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if occupancy(mid, receptors) < target:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def export_response_curve(receptors: Receptors, c_grid: Optional[Sequence[float]] = None) -> ResponseCurve:
    """Tabulate the response curve and its 10-90% dynamic range.

    The half-saturation concentration is inserted into the grid so the
    p_B = 0.5 row is always present.  For a single population the range
    endpoints are K_D/9 and 9 K_D; for a mixture they are solved on the
    combined sigmoid.
    """
    if isinstance(receptors, MixtureConfig):
        c10 = _solve_occupancy(receptors, 0.1)
        c50 = _solve_occupancy(receptors, 0.5)
        c90 = _solve_occupancy(receptors, 0.9)
    else:
        c10, c50, c90 = receptors.K_D / 9.0, receptors.K_D, 9.0 * receptors.K_D
    if c_grid is None:
        grid = np.logspace(math.log10(c50) - 4.0, math.log10(c50) + 4.0, 201)
    else:
        grid = np.asarray(c_grid, dtype=float)
    grid = np.unique(np.append(grid, c50))
    return ResponseCurve(concentration=grid, occupancy=occupancy(grid, receptors),
                         c10=c10, c90=c90)
