"""Registry of published result tables and their reproduction.

Every table binds a preset, the swept quantities and the published values.
``reproduce(table_id)`` evaluates each cell and compares it against the
published number at the tolerance assigned to that table.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .copulas import CopulaSpec
from .cyber import cyber_cdf
from .dynamic import DynamicParams, sfdc, sfdf
from .errors import DomainError
from .joint import JointScenario, joint_failure_prob
from .presets import preset_config
from .safety import LifecyclePhase, phase_params, weibull_cdf

__all__ = ["Cell", "TableReport", "TABLE_IDS", "reproduce", "table_title"]

_PHASES = (("K=0.5", LifecyclePhase.INFANT_MORTALITY), ("K=1", LifecyclePhase.RANDOM_FAILURE), ("K=3", LifecyclePhase.WEAR_OUT))

# Absolute tolerances for the t = 200 joint tables, per lifecycle column.
_JOINT_TOL = {"K=0.5": 3e-3, "K=1": 2e-4, "K=3": 5e-10}
_T_COPULA_TOL = 5e-3
_FRANK_100_TOL = 3e-3
_DYNAMIC_TOL = 5e-3


@dataclass(frozen=True)
class Cell:
    """One published value next to its recomputation."""

    row: str
    column: str
    published: float
    computed: float
    tol: float
    relative: bool = False

    @property
    def delta(self) -> float:
        return abs(self.computed - self.published)

    @property
    def passed(self) -> bool:
        limit = self.tol * abs(self.published) if self.relative else self.tol
        return self.delta <= limit


@dataclass
class TableReport:
    table_id: str
    title: str
    cells: list[Cell]
    notes: list[str] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells) and all(self.checks.values())

    def to_text(self) -> str:
        lines = [f"{self.table_id}: {self.title}", f"{'row':>12} {'column':>10} {'computed':>13} {'published':>13} {'|delta|':>10} {'tol':>8}  ok"]
        for c in self.cells:
            tol = f"{c.tol:.0e}{'r' if c.relative else ''}"
            lines.append(
                f"{c.row:>12} {c.column:>10} {c.computed:13.6g} {c.published:13.6g} {c.delta:10.2e} {tol:>8}  {'PASS' if c.passed else 'FAIL'}"
            )
        for name, ok in self.checks.items():
            lines.append(f"check {name}: {'PASS' if ok else 'FAIL'}")
        lines.extend(f"note: {n}" for n in self.notes)
        n_pass = sum(c.passed for c in self.cells)
        lines.append(f"{n_pass}/{len(self.cells)} cells within tolerance; overall {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "table_id": self.table_id,
            "title": self.title,
            "passed": self.passed,
            "checks": self.checks,
            "notes": self.notes,
            "cells": [
                {
                    "row": c.row,
                    "column": c.column,
                    "computed": c.computed,
                    "published": c.published,
                    "delta": c.delta,
                    "tol": c.tol,
                    "relative": c.relative,
                    "passed": c.passed,
                }
                for c in self.cells
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _scenario(preset: str, phase: LifecyclePhase, copula: Optional[CopulaSpec] = None, t_patch: Optional[float] = None):
    cfg = preset_config(preset)
    scenario = replace(cfg.scenario(), safety=phase_params(phase, cfg.safety.f0_offset))
    if copula is not None:
        scenario = scenario.with_copula(copula)
    if t_patch is not None:
        scenario = scenario.with_patch_time(t_patch)
    return scenario


# Published t = 200 joint tables: dependence value -> (K=0.5, K=1, K=3).
_NORMAL_200 = {
    0.65: (5.430e-2, 1.813e-3, 4.341e-9),
    0.53: (4.995e-2, 1.759e-3, 4.340e-9),
    0.39: (4.399e-2, 1.609e-3, 4.300e-9),
    0.27: (3.850e-2, 1.406e-3, 4.054e-9),
    0.09: (3.005e-2, 1.014e-3, 2.822e-9),
    0.00: (2.586e-2, 8.047e-4, 1.914e-9),
    -0.09: (2.176e-2, 6.035e-4, 1.072e-9),
    -0.27: (1.402e-2, 2.690e-4, 1.518e-10),
    -0.39: (9.395e-3, 1.205e-4, 1.682e-11),
    -0.53: (4.853e-3, 2.902e-5, 2.473e-13),
    -0.65: (1.995e-3, 3.718e-6, 3.810e-16),
}
_T_200 = {
    0.65: (1.326e-1, 8.812e-2, 8.664e-2),
    0.53: (1.210e-1, 8.070e-2, 7.938e-2),
    0.39: (1.077e-1, 7.171e-2, 7.050e-2),
    0.27: (9.640e-2, 6.386e-2, 6.282e-2),
    0.09: (7.979e-2, 5.225e-2, 5.132e-2),
    0.00: (7.169e-2, 4.646e-2, 4.567e-2),
    -0.09: (6.368e-2, 4.079e-2, 4.003e-2),
    -0.27: (4.792e-2, 2.974e-2, 2.920e-2),
    -0.39: (3.768e-2, 2.274e-2, 2.228e-2),
    -0.53: (2.619e-2, 1.506e-2, 1.476e-2),
    -0.65: (1.688e-2, 9.174e-3, 8.927e-3),
}
_GUMBEL_200 = {
    1.0: (2.586e-2, 8.047e-4, 1.914e-9),
    1.2: (3.476e-2, 1.163e-3, 3.022e-9),
    1.5: (4.405e-2, 1.501e-3, 3.880e-9),
    1.8: (4.975e-2, 1.671e-3, 4.186e-9),
    2.0: (5.223e-2, 1.731e-3, 4.266e-9),
    3.0: (5.734e-2, 1.816e-3, 4.339e-9),
    5.0: (5.858e-2, 1.825e-3, 4.341e-9),
}
_FRANK_200 = {
    2.5: (4.181e-2, 1.327e-3, 3.159e-9),
    2.0: (3.899e-2, 1.236e-3, 2.942e-9),
    1.5: (3.592e-2, 1.136e-3, 2.704e-9),
    1.0: (3.266e-2, 1.029e-3, 2.449e-9),
    0.5: (2.928e-2, 9.174e-4, 2.183e-9),
    0.0: (2.586e-2, 8.047e-4, 1.914e-9),
    -0.5: (2.250e-2, 6.941e-4, 1.651e-9),
    -1.0: (1.929e-2, 5.889e-4, 1.400e-9),
    -1.5: (1.631e-2, 4.919e-4, 1.169e-9),
    -2.0: (1.360e-2, 4.049e-4, 9.618e-10),
    -2.5: (1.120e-2, 3.288e-4, 7.808e-10),
}
# ``None`` marks the independence row of the Clayton table.
_CLAYTON_200 = {
    None: (2.586e-2, 8.047e-4, 1.914e-9),
    0.1: (3.146e-2, 1.170e-3, 3.836e-9),
    0.2: (3.627e-2, 1.427e-3, 4.260e-9),
    0.3: (4.033e-2, 1.591e-3, 4.329e-9),
    1.0: (5.459e-2, 1.821e-3, 4.341e-9),
    2.0: (5.824e-2, 1.825e-3, 4.341e-9),
    7.0: (5.865e-2, 1.825e-3, 4.341e-9),
}

_FRANK_100 = {
    0.3: (0.0797, 0.0665, 0.0662),
    0.5: (0.0837, 0.0700, 0.0697),
    1.0: (0.0937, 0.0788, 0.0784),
    1.5: (0.1036, 0.0875, 0.0872),
    2.0: (0.1132, 0.0961, 0.0957),
    2.5: (0.1225, 0.1044, 0.1039),
    0.0: (0.0738, 0.0613, 0.0611),
    -0.5: (0.0643, 0.0530, 0.0528),
    -1.0: (0.0553, 0.0452, 0.0450),
    -1.5: (0.0469, 0.0380, 0.0378),
    -2.0: (0.0394, 0.0316, 0.0314),
    -2.5: (0.0327, 0.0259, 0.0257),
}

# Dynamic tables: dependence value -> (SFPC, SFPF); "Original" row shared.
_DYN_ORIGINAL = (0.2018, 0.3295)
_DYN_TABLES = {
    "dyn-normal": ("normal-dyn", {0.09: (0.2022, 0.3474), 0.27: (0.2029, 0.3835), 0.39: (0.2032, 0.4090)}),
    "dyn-gumbel": ("gumbel-dyn", {1.2: (0.2030, 0.3789), 1.5: (0.2037, 0.4330), 1.8: (0.2038, 0.4731)}),
    "dyn-frank": ("frank-dyn", {0.5: (0.2022, 0.3512), 1.0: (0.2025, 0.3727), 2.0: (0.2029, 0.4140)}),
}

# SFPC at t = 200 by patch time; the K=1 first entry is printed without its
# leading "0." in the source table and is read as 0.201996.
_SFPC_PATCH_TIMES = (12.0, 24.0, 36.0, 48.0)
_SFPC_BY_PATCH = {
    "K=0.5": (0.258895, 0.259527, 0.260209, 0.260365),
    "K=1": (0.201996, 0.202422, 0.202859, 0.202911),
    "K=3": (0.200168, 0.200588, 0.20109, 0.201068),
}

_FAMILY_TABLES = {
    "joint-normal-200": ("normal", "rho", _NORMAL_200, "results200"),
    "joint-t-200": ("student_t", "rho", _T_200, "t-copula"),
    "joint-gumbel-200": ("gumbel", "theta", _GUMBEL_200, "results200"),
    "joint-frank-200": ("frank", "theta", _FRANK_200, "results200"),
    "joint-clayton-200": ("clayton", "theta", _CLAYTON_200, "results200"),
}


def _family_spec(family: str, value: Optional[float]) -> CopulaSpec:
    if value is None:
        return CopulaSpec("independence")
    if family == "normal":
        return CopulaSpec("normal", rho=value)
    if family == "student_t":
        return CopulaSpec("student_t", rho=value, nu=4.0)
    return CopulaSpec(family, theta=value)


def _family_cells(table_id: str, t_patch: float) -> list[Cell]:
    family, pname, values, preset = _FAMILY_TABLES[table_id]
    cells = []
    for col, (label, phase) in enumerate(_PHASES):
        base = _scenario(preset, phase, t_patch=t_patch)
        for value, row in values.items():
            spec = _family_spec(family, value)
            computed = float(joint_failure_prob(200.0, base.with_copula(spec)))
            tol = _T_COPULA_TOL if family == "student_t" else _JOINT_TOL[label]
            row_label = "independent" if value is None else f"{pname}={value:g}"
            cells.append(Cell(row_label, label, row[col], computed, tol))
    return cells


def _fit_score(cells: list[Cell]) -> float:
    return max(c.delta / c.tol for c in cells)


def _family_table(table_id: str) -> TableReport:
    family = _FAMILY_TABLES[table_id][0]
    cells = _family_cells(table_id, 60.0)
    notes = []
    if all(c.passed for c in cells):
        notes.append("patch time 60 reproduces every cell")
    else:
        alt = _family_cells(table_id, 48.0)
        best = 48.0 if _fit_score(alt) < _fit_score(cells) else 60.0
        notes.append(
            f"patch time 60 misses {sum(not c.passed for c in cells)} cells; "
            f"best-fitting patch time in {{48, 60}} is {best:g} "
            f"(worst delta/tol {min(_fit_score(alt), _fit_score(cells)):.3g})"
        )
    if family == "student_t":
        notes.append("t-copula: nu=4, initial safety failure probability 0.1")
    return TableReport(table_id, f"{family} joint failure probability at t=200", cells, notes)


def _frank_100_table() -> TableReport:
    cells = []
    for col, (label, phase) in enumerate(_PHASES):
        base = _scenario("frank-prop1", phase)
        for theta, row in _FRANK_100.items():
            spec = CopulaSpec("frank", theta=theta)
            computed = float(joint_failure_prob(100.0, base.with_copula(spec)))
            cells.append(Cell(f"theta={theta:g}", label, row[col], computed, _FRANK_100_TOL))
    notes = ["frank copula at t=100, example1 cyber preset, initial safety failure probability 0.2"]
    return TableReport("prop1-frank", "joint failure probability at t=100 by theta and K", cells, notes)


def _marginals_table() -> TableReport:
    cells = []
    for label, phase, published in zip(("K=0.5", "K=1", "K=3"), LifecyclePhase, (5.865e-2, 1.825e-3, 4.341e-9)):
        computed = float(weibull_cdf(200.0, phase_params(phase)))
        cells.append(Cell(f"safety {phase.value}", label, published, computed, 1e-3, relative=True))
    for preset, published in (("results200", 0.4410), ("normal-dyn", 0.3295)):
        cfg = preset_config(preset)
        cells.append(Cell(f"cyber {preset}", "F(200)", published, float(cyber_cdf(200.0, cfg.cyber)), 2e-3))
    cfg = preset_config("normal-dyn")
    cells.append(Cell("safety random", "F0=0.2", _DYN_ORIGINAL[0], float(weibull_cdf(200.0, cfg.safety)), _DYNAMIC_TOL))
    return TableReport("marginals-200", "marginal failure probabilities at t=200", cells)


def _dynamic_table(table_id: str) -> TableReport:
    preset, rows = _DYN_TABLES[table_id]
    cfg = preset_config(preset)
    base = cfg.scenario()
    dyn = cfg.dynamic
    family = cfg.copula.family
    cells = [
        Cell("original", "SFPC", _DYN_ORIGINAL[0], float(weibull_cdf(200.0, base.safety)), _DYNAMIC_TOL),
        Cell("original", "SFPF", _DYN_ORIGINAL[1], float(cyber_cdf(200.0, base.cyber)), _DYNAMIC_TOL),
    ]
    pname = cfg.copula.parameter_name
    unit_coupling = []
    for value, (p_sfpc, p_sfpf) in rows.items():
        scenario = base.with_copula(cfg.copula.with_dependence(value))
        cells.append(Cell(f"{pname}={value:g}", "SFPC", p_sfpc, float(sfdc(200.0, scenario, dyn)), _DYNAMIC_TOL))
        cells.append(Cell(f"{pname}={value:g}", "SFPF", p_sfpf, float(sfdf(200.0, scenario, dyn)), _DYNAMIC_TOL))
        unit_coupling.append(f"{value:g}: {float(sfdf(200.0, scenario, replace(dyn, o1=1.0))):.4f}")
    t_cut = "none within horizon" if math.isinf(dyn.t_cut) else f"{dyn.t_cut:g}"
    notes = [
        f"{family} copula, o1={dyn.o1:g}, o2={dyn.o2:g}, omega={dyn.omega:g}, mode={dyn.mode}, t_cut {t_cut}",
        "SFPF with o1=1 instead: " + ", ".join(unit_coupling),
    ]
    return TableReport(table_id, f"{family} SFPC and SFPF at t=200", cells, notes)


def _sfpc_patch_table() -> TableReport:
    cfg = preset_config("normal-dyn")
    dyn = cfg.dynamic
    cells = []
    checks = {}
    for label, phase in _PHASES:
        base = replace(cfg.scenario(), safety=phase_params(phase, cfg.safety.f0_offset))
        computed = [float(sfdc(200.0, base.with_patch_time(tp), dyn)) for tp in _SFPC_PATCH_TIMES]
        for tp, published, value in zip(_SFPC_PATCH_TIMES, _SFPC_BY_PATCH[label], computed):
            cells.append(Cell(f"t_patch={tp:g}", label, published, value, _DYNAMIC_TOL))
        checks[f"increasing in patch time {label}"] = bool(np.all(np.diff(computed) > 0))
    notes = [
        "normal copula rho=0.27, o2=0.5, omega=2, initial safety failure probability 0.2",
        "published K=1, t_patch=12 entry read as 0.201996",
        "published K=3, t_patch=36 entry 0.20109 exceeds its t_patch=48 neighbour; recomputed value is 0.20102",
    ]
    return TableReport("prop4-sfpc", "SFPC at t=200 by patch time and K", cells, notes, checks)


_BUILDERS: dict[str, tuple[str, Callable[[], TableReport]]] = {
    "marginals-200": ("marginal failure probabilities at t=200", _marginals_table),
    "prop1-frank": ("frank joint failure probability at t=100", _frank_100_table),
    **{tid: (f"{spec[0]} joint failure probability at t=200", (lambda tid=tid: _family_table(tid))) for tid, spec in _FAMILY_TABLES.items()},
    **{tid: (f"{tid.split('-')[1]} SFPC and SFPF at t=200", (lambda tid=tid: _dynamic_table(tid))) for tid in _DYN_TABLES},
    "prop4-sfpc": ("SFPC at t=200 by patch time", _sfpc_patch_table),
}

TABLE_IDS = tuple(_BUILDERS)


def table_title(table_id: str) -> str:
    return _BUILDERS[table_id][0]


def reproduce(table_id: str) -> TableReport:
    """Recompute every cell of a registered table."""
    if table_id not in _BUILDERS:
        raise DomainError(f"unknown table {table_id!r}; expected one of {', '.join(TABLE_IDS)}")
    return _BUILDERS[table_id][1]()
