"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (collected in
the pytest terminal summary) and then asserts at the stated tolerance.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from harmocont.cli import main
from harmocont.config import default_config
from harmocont.experiment import (
    ERROR_TABLE_ROWS,
    TABLE1_RANGES,
    estimate_exponent,
    paper_case,
    run_case,
    run_table,
    synthesize_data,
)
from harmocont.geometry import sample_arc
from harmocont.measure import (
    SlitRectangle,
    case_geometry,
    fit_lower_bound,
    holomorphic_inputs,
    holomorphic_test_suite,
    max_norm_difference,
    solve_measure,
    two_constants_check,
)
from harmocont.potential import assemble, discrete_laplacian_check
from harmocont.solver import TikhonovConfig, alpha_sweep, tikhonov_solve

pytestmark = pytest.mark.acceptance

REPS = 20
# reference err_T values for rows a, c, d, g
REFERENCE = {
    ("parabola", 0.01): (4.8247, 2.0879, 0.9060, 0.3274),
    ("parabola", 0.05): (4.9498, 2.3915, 1.4035, 0.4281),
    ("hyperbola", 0.01): (1.3896, 0.3103, 0.0850, 0.0572),
    ("hyperbola", 0.05): (1.6567, 0.3509, 0.1668, 0.0763),
}
EXAMPLE = SlitRectangle.single(0.0, 1.0, 0.5, 0.2, 0.4)


def report(num, ok, detail):
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _error_table(kind):
    lines, ok = [], True
    for delta in (0.01, 0.05):
        cases = [paper_case(kind, n, delta=delta, seed=0) for n in ERROR_TABLE_ROWS]
        means = [r.err_T_l2 for r in run_table(cases, repetitions=REPS)]
        reference = REFERENCE[(kind, delta)]
        strict = all(b < a for a, b in zip(means, means[1:]))
        ratios = [m / p for m, p in zip(means, reference)]
        banded = all(0.1 <= q <= 10 for q in ratios)
        ok &= strict and banded
        lines.append(
            f"delta={delta:g} means=[{', '.join(f'{m:.4g}' for m in means)}] "
            f"ratio_to_ref=[{', '.join(f'{q:.2f}' for q in ratios)}] strict={strict}"
        )
    return ok, "; ".join(lines)


def test_criterion_1_exact_data_recovery():
    case = paper_case(
        "parabola", "all", delta=0.0, alpha_rule=TikhonovConfig.fixed(1e-10), ranges=[(1, 180)]
    )
    t0 = time.perf_counter()
    res = run_case(case)
    elapsed = time.perf_counter() - t0
    rel = res.err_T / np.linalg.norm(res.f)
    ok = rel <= 1e-3 and elapsed < 1.0
    report(1, ok, f"err_T/|f| = {rel:.3e} (<= 1e-3), runtime {elapsed:.3f} s (< 1 s)")
    assert rel <= 1e-3
    assert elapsed < 1.0


@pytest.mark.parametrize("num,kind", [(2, "parabola"), (3, "hyperbola")])
def test_criteria_2_3_error_table_ordering(num, kind):
    t0 = time.perf_counter()
    ok, detail = _error_table(kind)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    report(num, ok, f"{kind}: {detail}; runtime {elapsed:.2f} s (< 30 s)")
    assert ok


def test_criterion_4_noise_monotonicity():
    failures, details = [], []
    for kind in ("parabola", "hyperbola"):
        for name in TABLE1_RANGES:
            lo, hi = run_table(
                [paper_case(kind, name, delta=d, seed=0) for d in (0.01, 0.05)], repetitions=REPS
            )
            details.append(f"{kind[0]}{name}:{lo.err_T_l2:.3g}->{hi.err_T_l2:.3g}")
            if hi.err_T_l2 < lo.err_T_l2:
                failures.append(f"{kind} {name}")
    ok = not failures
    report(
        4,
        ok,
        f"mean err_T at 1% -> 5% [{' '.join(details)}]"
        + (f"; decreasing for {', '.join(failures)}" if failures else ""),
    )
    assert ok, f"mean err_T at delta=0.05 below delta=0.01 for: {failures}"


def _probes(rng, radius, n, margin):
    out = []
    while len(out) < n:
        p = rng.uniform(-radius, radius, 2)
        if np.hypot(*p) <= radius - margin:
            out.append(p)
    return out


def test_criterion_5_harmonicity_of_reconstructions():
    rng = np.random.default_rng(2024)
    worst, count = 0.0, 0
    for kind in ("parabola", "hyperbola"):
        for name in list(TABLE1_RANGES) + ["g"]:
            for delta in (0.01, 0.05):
                mu = run_case(paper_case(kind, name, delta=delta, seed=0)).mu
                scale = 1e-4 * (1 + np.abs(mu.mu).sum())
                for p in _probes(rng, mu.source.radius, 50, 0.1 * mu.source.radius):
                    worst = max(worst, abs(discrete_laplacian_check(mu, p, 1e-3)) / scale)
                count += 1
    ok = worst <= 1.0
    report(5, ok, f"{count} reconstructions x 50 probes, max |lap|/(1e-4(1+|mu|_1)) = {worst:.3f}")
    assert ok


def _preset_geometries():
    out = []
    for curve in ("parabola", "hyperbola"):
        cfg = default_config(curve)
        x = sample_arc(cfg.curve, cfg.count, cfg.rule).x
        for spec in cfg.cases:
            geom = case_geometry(cfg.curve.x_lo, cfg.curve.x_hi, x, spec.ranges, cfg.measure.h)
            out.append((f"{curve}:{spec.name}", geom, cfg.measure.nx, cfg.measure.ny))
    return out


def test_criterion_6_harmonic_measure():
    checks = {}
    grids = {n: solve_measure(EXAMPLE, n, n) for n in (81, 161)}
    for n, g in grids.items():
        phi = g.phi
        checks[f"bounds{n}"] = bool(phi.min() >= 0 and phi.max() <= 1)
        edges = np.concatenate([phi[0], phi[-1], phi[:, 0], phi[:, -1]])
        checks[f"dirichlet{n}"] = bool(
            np.all(edges == 0) and np.all(phi[g.slit_mask, g.axis_index] == 1)
        )
        checks[f"symmetry{n}"] = bool(np.max(np.abs(phi - phi[:, ::-1])) <= 1e-8)
    diff = max_norm_difference(grids[161], grids[81])
    checks["convergence"] = diff <= 5e-3
    c4 = {}
    for name, geom, nx, ny in _preset_geometries():
        c4[name] = fit_lower_bound(solve_measure(geom, nx, ny)).c4_hat
    c4["example161"] = fit_lower_bound(grids[161]).c4_hat
    checks["c4_positive"] = all(v > 0 for v in c4.values())
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report(
        6,
        ok,
        f"81^2 vs 161^2 max-norm difference {diff:.4f} (<= 5e-3); "
        f"min c4_hat {min(c4.values()):.3g} over {len(c4)} geometries"
        + (f"; failed: {', '.join(failed)}" if failed else ""),
    )
    assert ok, f"failed checks: {failed}"


def test_criterion_7_two_constants():
    cfg = default_config("parabola")
    x = sample_arc(cfg.curve, cfg.count, cfg.rule).x
    geoms = [
        ("example", EXAMPLE, 161, 161),
        ("wide", SlitRectangle.single(0.0, 2.0, 0.3, 0.5, 1.2), 201, 61),
        ("case_e", case_geometry(-0.5, 0.6, x, TABLE1_RANGES["e"], 0.15), 281, 61),
    ]
    violations, total = [], 0
    for gname, geom, nx, ny in geoms:
        grid = solve_measure(geom, nx, ny)
        for fname, func in holomorphic_test_suite().items():
            v, M1, eps = holomorphic_inputs(grid, func)
            rep = two_constants_check(grid, v, M1, eps)
            total += 1
            if not rep.ok:
                violations.append(f"{gname}/{fname}({len(rep.violations)})")
    ok = not violations
    report(7, ok, f"{total} function/geometry pairs, violations: {violations or 'none'}")
    assert ok


def test_criterion_8_tikhonov():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        m, n = rng.integers(1, 61, size=2)
        A = rng.uniform(-1, 1, (m, n))
        f = rng.uniform(-1, 1, m)
        alpha = 10 ** rng.uniform(-6, 2)
        mu = tikhonov_solve(A, f, alpha).mu
        ref = np.linalg.solve(alpha * np.eye(n) + A.T @ A, A.T @ f)
        worst = max(worst, np.linalg.norm(mu - ref) / np.linalg.norm(ref))
    sweep_bad = []
    alphas = np.logspace(-8, 1, 10)
    for curve in ("parabola", "hyperbola"):
        cfg = default_config(curve)
        K = assemble(sample_arc(cfg.curve, cfg.count, cfg.rule), cfg.source)
        for case in cfg.build_cases():
            reps = alpha_sweep(K.restrict(case.controlled_mask), synthesize_data(case), alphas)
            for a, b in zip(reps, reps[1:]):
                if b.residual_norm < a.residual_norm - 1e-10 or b.solution_norm > a.solution_norm + 1e-10:
                    sweep_bad.append(f"{curve}:{case.name}@{case.delta:g}")
                    break
    ok = worst <= 1e-8 and not sweep_bad
    report(
        8,
        ok,
        f"max relative deviation from dense oracle {worst:.2e} (<= 1e-8) over 100 systems; "
        f"alpha-sweep monotonicity violations: {sweep_bad or 'none'}",
    )
    assert ok


def test_criterion_9_stability_exponent():
    parts, ok = [], True
    for kind in ("parabola", "hyperbola"):
        est = estimate_exponent(paper_case(kind, "e", seed=0))
        good = 0 < est.kappa_hat < 1 and est.r_squared >= 0.8
        ok &= good
        parts.append(f"{kind} kappa_hat={est.kappa_hat:.3f} R^2={est.r_squared:.3f}")
    report(9, ok, "; ".join(parts) + " (need 0 < kappa < 1, R^2 >= 0.8)")
    assert ok


def test_criterion_10_determinism(tmp_path):
    mismatched, compared = [], 0
    for preset in ("paper_parabola.cfg", "paper_hyperbola.cfg"):
        dirs = [tmp_path / f"{preset}_{k}" for k in (0, 1)]
        for d in dirs:
            assert main(["run", "--config", preset, "--out", str(d)]) == 0
            assert main(["measure", "--config", preset, "--case", "e", "--out", str(d)]) == 0
        for f in sorted(dirs[0].glob("*.csv")):
            compared += 1
            if f.read_bytes() != (dirs[1] / f.name).read_bytes():
                mismatched.append(f"{preset}/{f.name}")
    ok = not mismatched and compared > 0
    report(10, ok, f"{compared} CSV files compared across reruns, mismatches: {mismatched or 'none'}")
    assert ok
