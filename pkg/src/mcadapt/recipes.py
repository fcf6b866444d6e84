"""Reproduction recipes: one run configuration per results figure.

Each recipe names a config file under the repository's recipes/ tree,
the CLI invocation that regenerates the figure's data, and the checks
that the output must satisfy.  `list_recipes` resolves the tree relative
to this source file (editable/source installs) or via the
MCADAPT_RECIPES environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple


@dataclass(frozen=True)
class FigureRecipe:
    figure: str
    config_filename: str
    subcommand: str
    description: str
    checks: Tuple[str, ...]

    def config_path(self, base_dir: Path | None = None) -> Path:
        return recipes_dir(base_dir) / self.config_filename


def recipes_dir(base_dir: Path | None = None) -> Path:
    if base_dir is not None:
        return Path(base_dir)
    env = os.environ.get("MCADAPT_RECIPES")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "recipes"


_RECIPES: Tuple[FigureRecipe, ...] = (
    FigureRecipe(
        "fig3", "fig03_scaling.toml", "sweep",
        "BEP and set points under scaling of the received levels",
        (
            "RTAR analytic BEP is flat across gamma (max-min <= 1e-12 relative)",
            "BEP ordering RTAR <= REAR <= NAR at every gamma",
            "NAR BEP at gamma=100 exceeds its gamma=1 value",
        ),
    ),
    FigureRecipe(
        "fig4", "fig04_shift.toml", "sweep",
        "BEP and set points under a common concentration shift",
        (
            "at shift 20*KD both NAR occupancies exceed 0.9",
            "BEP ordering RTAR <= REAR <= NAR at every shift",
        ),
    ),
    FigureRecipe(
        "fig5", "fig05_ratio.toml", "sweep",
        "Effect of the N1/N0 molecule ratio at a fixed shift",
        ("BEP ordering RTAR <= REAR <= NAR at every ratio",),
    ),
    FigureRecipe(
        "fig6", "fig06_enzyme.toml", "sweep",
        "BEP under enzymatic degradation",
        (
            "rows equal the scaling sweep at gamma = exp(-beta*t_S) within 1e-12",
            "REAR BEP at beta=1.5 is below its maximum over the beta grid",
        ),
    ),
    FigureRecipe(
        "fig7", "fig07_isi_ts.toml", "sweep",
        "ISI study versus signaling interval (genie-aided averaging)",
        ("RTAR BEP <= NAR BEP / 5 at Ts = 4*tPeak",),
    ),
    FigureRecipe(
        "fig8", "fig08_isi_memory.toml", "sweep",
        "ISI study versus receiver memory length",
        ("analytic BEP non-increasing in M for every architecture",),
    ),
    FigureRecipe(
        "fig9", "fig09_response_curves.toml", "response-curve",
        "Adapted response curves under heavy interference",
        ("curve contains the half-saturation row (occupancy 0.5)",),
    ),
    FigureRecipe(
        "fig10", "fig10_interference.toml", "sweep",
        "Stochastic interference with first-moment vs full statistics",
        (
            "full-stats BEP <= first-moment BEP per architecture at every mu",
            "BEP ordering RTAR <= REAR <= NAR at every mu and knowledge level",
        ),
    ),
)


def list_recipes() -> list:
    """All figure recipes, in figure order."""
    return list(_RECIPES)
