"""Acceptance suite: one test per criterion, each reported as PASS/FAIL in the
terminal summary (see conftest.py)."""

import time

import numpy as np
import pytest

from copula_risk.copulas import FAMILIES, CopulaSpec, copula_cdf, normal_rho_derivative
from copula_risk.cyber import cyber_cdf
from copula_risk.dynamic import sfdc
from copula_risk.joint import joint_failure_prob, sweep_patch_time
from copula_risk.presets import preset_config
from copula_risk.safety import LifecyclePhase, phase_params, weibull_cdf
from copula_risk.tables import reproduce
from copula_risk.verification import McConfig, analytic_joint, closed_form_equivalence, closed_form_fuzz, mc_joint_cdf, run_benchmark

# One representative parameter per family (the t = 200 table midpoints).
REPRESENTATIVE = {
    "normal": CopulaSpec("normal", rho=0.27),
    "student_t": CopulaSpec("student_t", rho=0.27, nu=4.0),
    "gumbel": CopulaSpec("gumbel", theta=1.5),
    "frank": CopulaSpec("frank", theta=1.0),
    "clayton": CopulaSpec("clayton", theta=1.0),
}
# Six increasing dependence values per family for the monotonicity sweep.
DEPENDENCE_LADDERS = {
    "normal": [-0.6, -0.3, 0.0, 0.3, 0.6, 0.9],
    "student_t": [-0.6, -0.3, 0.0, 0.3, 0.6, 0.9],
    "gumbel": [1.0, 1.25, 1.5, 2.0, 3.0, 5.0],
    "frank": [-5.0, -2.0, 0.5, 1.0, 2.0, 5.0],
    "clayton": [0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
}


def detail(record_property, text):
    record_property("detail", text)
    print(text)


def failed_cells(report):
    return [(c.row, c.column, c.computed, c.published) for c in report.cells if not c.passed]


@pytest.mark.criterion(1, "marginal anchors at t=200")
def test_marginal_anchors(record_property):
    start = time.perf_counter()
    safety = [weibull_cdf(200.0, phase_params(p)) for p in LifecyclePhase]
    cyber_60 = cyber_cdf(200.0, preset_config("results200").cyber)
    cyber_48 = cyber_cdf(200.0, preset_config("normal-dyn").cyber)
    elapsed = time.perf_counter() - start
    detail(
        record_property,
        f"safety {safety[0]:.4e}/{safety[1]:.4e}/{safety[2]:.4e}, cyber {cyber_60:.4f}/{cyber_48:.4f}, {elapsed:.3f} s",
    )
    np.testing.assert_allclose(safety, [5.865e-2, 1.825e-3, 4.341e-9], rtol=1e-3)
    assert abs(cyber_60 - 0.4410) <= 2e-3
    assert abs(cyber_48 - 0.3295) <= 2e-3
    assert elapsed < 1.0


@pytest.mark.criterion(2, "independence factorisation")
def test_independence_factorisation(record_property):
    scenario = preset_config("normal-200").scenario().with_copula(CopulaSpec("normal", rho=0.0))
    joint = joint_failure_prob(200.0, scenario)
    product = weibull_cdf(200.0, scenario.safety) * cyber_cdf(200.0, scenario.cyber)
    detail(record_property, f"P_j={joint:.6e}, |P_j - F_f F_c|={abs(joint - product):.1e}")
    # The published value carries four significant digits.
    assert abs(joint - 2.586e-2) <= 5e-6
    assert abs(joint - product) <= 1e-12


@pytest.mark.criterion(3, "Frank table at t=100 (36 cells)")
def test_frank_table(record_property):
    start = time.perf_counter()
    report = reproduce("prop1-frank")
    elapsed = time.perf_counter() - start
    worst = max(c.delta for c in report.cells)
    detail(record_property, f"{len(report.cells)} cells, worst |delta| {worst:.2e}, {elapsed:.2f} s")
    assert len(report.cells) == 36
    assert report.passed, failed_cells(report)
    assert elapsed < 5.0


@pytest.mark.criterion(4, "per-family joint tables at t=200")
def test_family_tables(record_property):
    reports = [reproduce(t) for t in ("joint-normal-200", "joint-gumbel-200", "joint-frank-200", "joint-clayton-200", "joint-t-200")]
    notes = [n for r in reports for n in r.notes if "patch time" in n]
    detail(record_property, "; ".join(f"{r.table_id}: {'PASS' if r.passed else 'FAIL'}" for r in reports) + f"; {notes[0]}")
    for report in reports:
        # Every report states which patch time reproduced it.
        assert any("patch time" in n for n in report.notes)
        assert report.passed, (report.table_id, failed_cells(report))


@pytest.mark.criterion(5, "copula CDF strictly increasing in its dependence parameter")
def test_dependence_monotonicity(record_property):
    grid = (np.arange(20) + 0.5) / 20
    u, v = np.meshgrid(grid, grid)
    violations = {}
    for family, ladder in DEPENDENCE_LADDERS.items():
        base = REPRESENTATIVE[family]
        values = np.array([copula_cdf(base.with_dependence(p), u, v) for p in ladder])
        violations[family] = int(np.count_nonzero(np.diff(values, axis=0) <= 0))
    detail(record_property, f"violations {violations} over 20x20 grid x 6 values")
    assert sum(violations.values()) == 0


@pytest.mark.criterion(6, "joint curves ordered by patch time")
def test_patch_time_ordering(record_property):
    base = preset_config("results200").scenario()
    violations = {}
    ratio = None
    for family, spec in REPRESENTATIVE.items():
        curves = sweep_patch_time(base.with_copula(spec), [24.0, 36.0, 48.0, 60.0])
        values = np.array([c.values for c in curves])
        assert values.shape == (4, 401)
        violations[family] = int(np.count_nonzero(np.diff(values, axis=0) < 0))
        if family == "normal":
            ratio = curves[2].value_at(200.0) / curves[0].value_at(200.0)
    detail(record_property, f"violations {violations}; normal 48/24 ratio at t=200 {ratio:.3f}")
    assert sum(violations.values()) == 0
    assert 1.8 <= ratio <= 2.2


@pytest.mark.criterion(7, "correlation derivative of the normal copula")
def test_normal_rho_derivative(record_property):
    rng = np.random.default_rng(20240607)
    u, v = rng.uniform(0.01, 0.99, (2, 100))
    rho = rng.uniform(-0.9, 0.9, 100)
    h = 1e-5
    fd = np.array(
        [
            (copula_cdf(CopulaSpec("normal", rho=r + h), a, b) - copula_cdf(CopulaSpec("normal", rho=r - h), a, b)) / (2 * h)
            for a, b, r in zip(u, v, rho)
        ]
    )
    worst = float(np.max(np.abs(fd - normal_rho_derivative(u, v, rho))))
    detail(record_property, f"max |finite difference - density| {worst:.2e} over 100 points")
    assert worst <= 1e-5


@pytest.mark.criterion(8, "closed-form cyber CDF equals quadrature")
def test_closed_form_equivalence(record_property):
    cyber = preset_config("example1").cyber.without_cap()
    deviation = closed_form_equivalence(cyber, np.linspace(0.0, 200.0, 2001))
    fuzz = closed_form_fuzz(n_cases=100, seed=0)
    fuzz_max = max(r["max_abs_deviation"] for r in fuzz)
    detail(record_property, f"preset max |delta| {deviation:.1e}; 100-case fuzz max |delta| {fuzz_max:.1e}")
    assert deviation <= 1e-8
    assert len(fuzz) == 100 and fuzz_max <= 1e-7


@pytest.mark.slow
@pytest.mark.criterion(9, "closed form versus quadrature benchmark")
def test_benchmark(record_property):
    report = run_benchmark(preset_config("example1").cyber.without_cap(), seed=0)
    detail(
        record_property,
        f"speed ratio {report.speed_ratio:.1f} (closed {report.mean_time_closed * 1e6:.1f} us, "
        f"quadrature {report.mean_time_quadrature * 1e6:.1f} us), {report.total_runtime:.1f} s",
    )
    assert (report.n_groups, report.points_per_group, report.repetitions) == (10, 100, 100)
    assert report.speed_ratio >= 10
    assert report.total_runtime < 120


@pytest.mark.slow
@pytest.mark.criterion(10, "Monte Carlo oracle, n=1e6, five families")
def test_monte_carlo(record_property):
    times = (50.0, 100.0, 150.0, 200.0)
    base = preset_config("results200").scenario()
    start = time.perf_counter()
    worst = {}
    for family, spec in REPRESENTATIVE.items():
        scenario = base.with_copula(spec)
        curve = mc_joint_cdf(scenario, McConfig(1_000_000, 2024, times))
        z = (curve.values - analytic_joint(scenario, times)) / curve.stderr
        worst[family] = round(float(np.max(np.abs(z))), 2)
    elapsed = time.perf_counter() - start
    detail(record_property, f"max |z| per family {worst}, {elapsed:.1f} s")
    assert max(worst.values()) <= 3.0
    assert elapsed < 120


@pytest.mark.criterion(11, "dynamic model tables and patch-time ordering")
def test_dynamic_tables(record_property):
    reports = [reproduce(t) for t in ("dyn-normal", "dyn-gumbel", "dyn-frank", "prop4-sfpc")]
    worst = max(c.delta for r in reports for c in r.cells)
    detail(record_property, f"worst |delta| {worst:.2e}; ordering checks {all(all(r.checks.values()) for r in reports)}")
    for report in reports[:3]:
        assert any("mode=" in n for n in report.notes)
    assert reports[3].checks and all(reports[3].checks.values())
    for report in reports:
        assert report.passed, (report.table_id, failed_cells(report))


@pytest.mark.criterion(12, "Frechet-Hoeffding bounds and 2-increasing property")
def test_frechet_and_rectangles(record_property):
    rng = np.random.default_rng(12)
    specs = dict(REPRESENTATIVE, independence=CopulaSpec("independence"))
    assert set(specs) == set(FAMILIES)
    counts = {}
    for family, spec in specs.items():
        u1, v1, fu, fv = rng.uniform(0.0, 1.0, (4, 10_000))
        u2 = u1 + fu * (1 - u1)
        v2 = v1 + fv * (1 - v1)
        c11 = copula_cdf(spec, u1, v1)
        bounds = np.count_nonzero((c11 < np.maximum(u1 + v1 - 1, 0.0)) | (c11 > np.minimum(u1, v1)))
        volume = copula_cdf(spec, u2, v2) - copula_cdf(spec, u1, v2) - copula_cdf(spec, u2, v1) + c11
        counts[family] = (int(bounds), int(np.count_nonzero(volume < 0)))
    detail(record_property, f"(bound, rectangle) violations per family {counts}")
    assert all(c == (0, 0) for c in counts.values())


@pytest.mark.criterion(13, "SFDC continuity and parallel continuation after t_cut")
def test_sfdc_continuity(record_property):
    worst_jump = 0.0
    worst_increment = 0.0
    for preset in ("normal-dyn", "gumbel-dyn", "frank-dyn"):
        cfg = preset_config(preset)
        scenario = cfg.scenario()
        for t_cut in (25.0, 60.0, 100.0, 150.0):
            dyn = cfg.dynamic.with_t_cut(t_cut)
            jump = abs(sfdc(t_cut, scenario, dyn) - sfdc(np.nextafter(t_cut, 0.0), scenario, dyn))
            t = np.linspace(t_cut, 200.0, 101)
            increments = np.diff(sfdc(t, scenario, dyn)) - np.diff(weibull_cdf(t, scenario.safety))
            worst_jump = max(worst_jump, jump)
            worst_increment = max(worst_increment, float(np.max(np.abs(increments))))
    detail(record_property, f"max |jump| {worst_jump:.1e}, max increment gap {worst_increment:.1e}")
    assert worst_jump <= 1e-12
    assert worst_increment <= 1e-12
