"""Batch front-end: TOML run configuration -> sweep/validation CSV files.

Config syntax is TOML with the sections below; every key is optional and
defaults to the standard system parameters, but unknown sections or keys
are hard errors.  CSV outputs are locale-independent, carry a metadata
header (config hash, seed, PRNG id, tool version, numpy version) and are
byte-identical across reruns of the same config and seed.

Exit codes: 0 ok, 1 usage/config error, 2 validation failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import math
import sys
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence, Tuple

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DegenerateStats,
    DomainError,
    InvalidBracket,
    NonConvergence,
    ParseError,
    ValidationError,
)
from .channel import ChannelParams
from .numerics import QuadratureConfig, DEFAULT_QUADRATURE
from .receptor import MixtureConfig, ReceptorConfig
from .adaptation import kd_opt_baseline
from .oracle import OracleConfig, PRNG_ID
from .scenarios import (
    KNOWLEDGE_LEVELS,
    ARCHITECTURES,
    SCENARIO_KINDS,
    ReceiverSetup,
    ScenarioSpec,
    SweepRow,
    export_response_curve,
    run_sweep,
    _baseline,
)
from .validation import run_validation

CSV_COLUMNS = (
    "scenario,param_name,param_value,arch,knowledge,KD,KD_new,threshold,"
    "mean0,var0,mean1,var1,bep_analytic,bep_mc,mc_se,trials"
)


@dataclass(frozen=True)
class ChannelSection:
    D_um2_per_s: float = 100.0
    distance_um: float = 50.0
    N1: float = 5e8
    N0_ratio: float = 50.0
    p1: float = 0.5
    c_int_const: float = 0.0


@dataclass(frozen=True)
class ReceptorSection:
    N_R: int = 1000
    alpha: float = 0.5


@dataclass(frozen=True)
class IsiSection:
    I: int = 30
    memory_M: int = 2
    Ts_factor: float = 4.0


@dataclass(frozen=True)
class InterferenceSection:
    mean_over_Kstar: float = 1.0
    std_fraction: float = 0.1


@dataclass(frozen=True)
class ScenarioSection:
    kind: str = "scaling"
    grid: Tuple[float, ...] = ()
    architectures: Tuple[str, ...] = ARCHITECTURES
    knowledge: str = "both"
    shift_multiple: float = 2.0


@dataclass(frozen=True)
class OracleSection:
    trials: int = 0
    seed: int = 0
    mode: str = "genie"
    chunk_size: int = 65536
    exact_binomial: bool = True


@dataclass(frozen=True)
class OutputSection:
    csv_path: str = "sweep.csv"
    svg_path: str = ""
    precision: int = 12


@dataclass(frozen=True)
class RunConfig:
    channel: ChannelSection = ChannelSection()
    receptor: ReceptorSection = ReceptorSection()
    isi: IsiSection = IsiSection()
    interference: InterferenceSection = InterferenceSection()
    scenario: ScenarioSection = ScenarioSection()
    oracle: OracleSection = OracleSection()
    output: OutputSection = OutputSection()

    def channel_params(self) -> ChannelParams:
        ch, isi = self.channel, self.isi
        return ChannelParams(
            D=ch.D_um2_per_s, d=ch.distance_um, N1=ch.N1, N0=ch.N1 / ch.N0_ratio,
            p1=ch.p1, beta=0.0, Ts_factor=isi.Ts_factor, I=isi.I,
            c_int_const=ch.c_int_const,
        )

    def receiver_setup(self) -> ReceiverSetup:
        return ReceiverSetup(n_receptors=self.receptor.N_R, alpha=self.receptor.alpha)

    def oracle_config(self) -> OracleConfig:
        o = self.oracle
        return OracleConfig(trials=max(o.trials, 10_000), seed=o.seed, mode=o.mode,
                            chunk_size=o.chunk_size, exact_binomial=o.exact_binomial)

    def scenario_spec(self) -> ScenarioSpec:
        s = self.scenario
        knowledge = KNOWLEDGE_LEVELS if s.knowledge == "both" else (s.knowledge,)
        return ScenarioSpec(kind=s.kind, grid=s.grid, architectures=s.architectures,
                            knowledge=knowledge, oracle_trials=self.oracle.trials)


_SECTION_TYPES = {
    "channel": ChannelSection,
    "receptor": ReceptorSection,
    "isi": IsiSection,
    "interference": InterferenceSection,
    "scenario": ScenarioSection,
    "oracle": OracleSection,
    "output": OutputSection,
}


def _coerce(section: str, key: str, value, target_type):
    if target_type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f'key "{key}" in [{section}] must be a number')
        return float(value)
    if target_type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f'key "{key}" in [{section}] must be an integer')
        return int(value)
    if target_type is bool:
        if not isinstance(value, bool):
            raise ParseError(f'key "{key}" in [{section}] must be a boolean')
        return value
    if target_type is str:
        if not isinstance(value, str):
            raise ParseError(f'key "{key}" in [{section}] must be a string')
        return value
    # tuples: grid (floats) or architectures (strings)
    if not isinstance(value, list):
        raise ParseError(f'key "{key}" in [{section}] must be an array')
    if key == "architectures":
        return tuple(str(v) for v in value)
    return tuple(float(v) for v in value)


def _validate(cfg: RunConfig) -> RunConfig:
    ch, rec, isi, intf, sc, orc, out = (cfg.channel, cfg.receptor, cfg.isi,
                                        cfg.interference, cfg.scenario, cfg.oracle, cfg.output)
    checks = [
        (ch.D_um2_per_s > 0, "D_um2_per_s > 0"),
        (ch.distance_um > 0, "distance_um > 0"),
        (ch.N1 > 0, "N1 > 0"),
        (ch.N0_ratio > 1, "N0_ratio > 1"),
        (0 < ch.p1 < 1, "p1 ∈ (0,1)"),
        (ch.c_int_const >= 0, "c_int_const >= 0"),
        (rec.N_R >= 1, "N_R >= 1"),
        (0 <= rec.alpha <= 1, "alpha ∈ [0,1]"),
        (isi.I >= 0, "I >= 0"),
        (0 <= isi.memory_M <= isi.I, "memory_M ∈ [0, I]"),
        (isi.Ts_factor > 0, "Ts_factor > 0"),
        (intf.mean_over_Kstar > 0, "mean_over_Kstar > 0"),
        (intf.std_fraction >= 0, "std_fraction >= 0"),
        (sc.kind in SCENARIO_KINDS, f"scenario kind ∈ {SCENARIO_KINDS}"),
        (all(a in ARCHITECTURES for a in sc.architectures), f"architectures ⊆ {ARCHITECTURES}"),
        (sc.knowledge in (*KNOWLEDGE_LEVELS, "both"), "knowledge ∈ {first_moment, full_stats, both}"),
        (sc.shift_multiple >= 0, "shift_multiple >= 0"),
        (orc.trials == 0 or orc.trials >= 10_000, "trials = 0 (analytic only) or >= 1e4"),
        (orc.mode in ("genie", "decision_feedback"), "mode ∈ {genie, decision_feedback}"),
        (orc.chunk_size >= 1, "chunk_size >= 1"),
        (6 <= out.precision <= 17, "precision ∈ [6, 17]"),
    ]
    for ok, inv in checks:
        if not ok:
            raise ValidationError(inv)
    if sc.grid and any(b <= a for a, b in zip(sc.grid, sc.grid[1:])):
        raise ValidationError("scenario grid must be strictly increasing")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration; unknown keys are errors."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}") from exc
    sections = {}
    for name, body in raw.items():
        if name not in _SECTION_TYPES:
            raise ParseError(f'unknown section "{name}"')
        if not isinstance(body, dict):
            raise ParseError(f'section "{name}" must be a table')
        sec_type = _SECTION_TYPES[name]
        known = {f.name: f.type for f in fields(sec_type)}
        defaults = sec_type()
        kwargs = {}
        for key, value in body.items():
            if key not in known:
                raise ParseError(f'unknown key "{key}" in [{name}]')
            kwargs[key] = _coerce(name, key, value, type(getattr(defaults, key)))
        sections[name] = sec_type(**kwargs)
    return _validate(RunConfig(**sections))


def effective_toml(cfg: RunConfig) -> str:
    """Deterministic TOML rendering of the full effective configuration."""
    out = []
    for name, sec_type in _SECTION_TYPES.items():
        section = getattr(cfg, name)
        out.append(f"[{name}]")
        for f in fields(sec_type):
            v = getattr(section, f.name)
            if isinstance(v, bool):
                out.append(f"{f.name} = {str(v).lower()}")
            elif isinstance(v, str):
                out.append(f'{f.name} = "{v}"')
            elif isinstance(v, tuple):
                items = ", ".join(f'"{x}"' if isinstance(x, str) else _fmt_num(x, 17)
                                  for x in v)
                out.append(f"{f.name} = [{items}]")
            else:
                out.append(f"{f.name} = {_fmt_num(v, 17)}")
        out.append("")
    return "\n".join(out)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(effective_toml(cfg).encode()).hexdigest()[:16]


def _fmt_num(x, precision: int) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), f".{precision}g")


def _metadata_lines(cfg: RunConfig, seed: int) -> list:
    return [
        f"# mcadapt={__version__}",
        f"# config_hash={config_hash(cfg)}",
        f"# seed={seed}",
        f"# prng={PRNG_ID}",
        f"# numpy={np.__version__}",
    ]


def write_sweep_csv(stream, rows: Sequence[SweepRow], cfg: RunConfig, seed: int):
    p = cfg.output.precision
    for line in _metadata_lines(cfg, seed):
        stream.write(line + "\n")
    stream.write(CSV_COLUMNS + "\n")
    for r in rows:
        cells = [
            r.scenario, r.param_name, _fmt_num(r.param_value, p), r.arch, r.knowledge,
            _fmt_num(r.kd, p), _fmt_num(r.kd_new, p), _fmt_num(r.threshold, p),
            _fmt_num(r.mean0, p), _fmt_num(r.var0, p), _fmt_num(r.mean1, p),
            _fmt_num(r.var1, p), _fmt_num(r.bep_analytic, p), _fmt_num(r.bep_mc, p),
            _fmt_num(r.mc_se, p), str(r.trials),
        ]
        stream.write(",".join(cells) + "\n")


def _write_svg_sweep(rows: Sequence[SweepRow], path: str, kind: str):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    groups = {}
    for r in rows:
        groups.setdefault((r.arch, r.knowledge), []).append(r)
    for (arch, knowledge), grp in sorted(groups.items()):
        label = arch if not knowledge else f"{arch} ({knowledge})"
        x = [r.param_value for r in grp]
        y = [max(r.bep_analytic, 1e-300) for r in grp]
        ax.plot(x, y, marker="o", ms=3, label=label)
        if any(r.bep_mc is not None for r in grp):
            ax.plot([r.param_value for r in grp if r.bep_mc],
                    [r.bep_mc for r in grp if r.bep_mc], "x", ms=4)
    ax.set_yscale("log")
    if kind in ("scaling", "isi_ts", "interference", "ratio"):
        ax.set_xscale("log")
    ax.set_xlabel(rows[0].param_name if rows else "")
    ax.set_ylabel("BEP")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _load_config(path: Optional[str]) -> RunConfig:
    if not path:
        return _validate(RunConfig())
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _cmd_defaults(args) -> int:
    cfg = _load_config(args.config)
    sys.stdout.write(effective_toml(cfg))
    return 0


def _cmd_response_curve(args) -> int:
    cfg = _load_config(args.config)
    params = cfg.channel_params()
    c0, c1, kstar, _ = _baseline(params)
    kd = args.kd if args.kd is not None else kstar
    if args.kd_new is not None:
        receptors = MixtureConfig(args.kd_new, kd, cfg.receptor.alpha, cfg.receptor.N_R)
    else:
        receptors = ReceptorConfig(kd, cfg.receptor.N_R)
    curve = export_response_curve(receptors)
    path = args.output or cfg.output.csv_path
    p = cfg.output.precision
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in _metadata_lines(cfg, cfg.oracle.seed):
            fh.write(line + "\n")
        fh.write(f"# KD={_fmt_num(kd, p)} KD_new={_fmt_num(args.kd_new, p)} "
                 f"c10={_fmt_num(curve.c10, p)} c90={_fmt_num(curve.c90, p)}\n")
        fh.write("concentration,occupancy\n")
        for c, pb in zip(curve.concentration, curve.occupancy):
            fh.write(f"{_fmt_num(c, p)},{_fmt_num(pb, p)}\n")
    print(f"wrote response curve ({curve.concentration.size} rows) to {path}; "
          f"10-90% range [{_fmt_num(curve.c10, 6)}, {_fmt_num(curve.c90, 6)}]")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    if args.scenario:
        cfg = replace(cfg, scenario=replace(cfg.scenario, kind=args.scenario))
    if args.trials is not None:
        cfg = replace(cfg, oracle=replace(cfg.oracle, trials=args.trials))
    if args.seed is not None:
        cfg = replace(cfg, oracle=replace(cfg.oracle, seed=args.seed))
    cfg = _validate(cfg)
    spec = cfg.scenario_spec()
    rows = run_sweep(
        spec, cfg.channel_params(), cfg.receiver_setup(), cfg.oracle_config(),
        quad=DEFAULT_QUADRATURE, memory=cfg.isi.memory_M,
        std_fraction=cfg.interference.std_fraction,
        shift_multiple=cfg.scenario.shift_multiple,
    )
    path = args.output or cfg.output.csv_path
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_sweep_csv(fh, rows, cfg, cfg.oracle.seed)
    if cfg.output.svg_path:
        _write_svg_sweep(rows, cfg.output.svg_path, spec.kind)
    print(f"wrote {len(rows)} rows to {path} "
          f"(scenario={spec.kind}, seed={cfg.oracle.seed}, hash={config_hash(cfg)})")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load_config(args.config)
    trials = args.trials if args.trials is not None else max(cfg.oracle.trials, 10_000)
    seed = args.seed if args.seed is not None else cfg.oracle.seed
    results = run_validation(trials=trials, seed=seed)
    path = args.output or cfg.output.csv_path
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_sweep_csv(fh, [res.row for res in results], cfg, seed)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.point.label}: analytic={res.row.bep_analytic:.6e} "
              f"mc={res.row.bep_mc:.6e} |z|={res.z_score:.2f}")
        failures += 0 if res.passed else 1
    print(f"validation: {len(results) - failures}/{len(results)} points within 4·SE "
          f"at {trials} trials (seed={seed})")
    return 0 if failures == 0 else 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        raise ParseError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mcadapt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("-c", "--config", help="TOML run configuration")
        p.add_argument("-o", "--output", help="output CSV path (overrides config)")

    p = sub.add_parser("defaults", help="print the effective configuration")
    p.add_argument("-c", "--config")
    p.set_defaults(func=_cmd_defaults)

    p = sub.add_parser("response-curve", help="export occupancy vs concentration")
    add_common(p)
    p.add_argument("--kd", type=float, help="dissociation constant (default: baseline optimum)")
    p.add_argument("--kd-new", type=float, help="second species K_D (mixture curve)")
    p.set_defaults(func=_cmd_response_curve)

    trials_type = lambda s: int(float(s))
    p = sub.add_parser("sweep", help="run a scenario sweep and write CSV")
    add_common(p)
    p.add_argument("--scenario", choices=SCENARIO_KINDS)
    p.add_argument("--trials", type=trials_type, help="Monte Carlo trials per row (0 = analytic only)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="analytic vs Monte Carlo on the built-in matrix")
    add_common(p)
    p.add_argument("--trials", type=trials_type, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (NonConvergence, DomainError, DegenerateStats, InvalidBracket, ConfigError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
