"""Acceptance criteria. Each test prints one PASS/FAIL line; the lines are
repeated in the terminal summary."""

import time
from functools import lru_cache

import numpy as np
import pytest

from fsidd.harness import oracle
from fsidd.harness.cases import (
    ERROR_KEYS,
    build_mms_problem,
    run_convergence_study,
    run_hemodynamics,
    run_mms,
)
from fsidd.harness.config import RunConfig
from fsidd.harness.verify import VerificationReport, check_mms_identities, check_projections
from fsidd.subdomain import InterfaceData, MaterialParams
from fsidd.timegrid import TraceSeries, make_uniform_grid

SPACE = dict(dt_f=5e-5, dt_s=2.5e-5, T=0.0025, h=0.25)
TOL = 1e-7


def fmt(values):
    return "[" + ", ".join(f"{v:.2f}" for v in values) + "]"


@lru_cache(maxsize=None)
def space_study(element, method):
    cfg = RunConfig(element=element, method=method, alpha_f=1.0, alpha_s=100.0, tol=TOL, **SPACE)
    t0 = time.perf_counter()
    study = run_convergence_study(cfg, "space", 4)
    study["elapsed"] = time.perf_counter() - t0
    return study


def taylor_hood_rates_ok(study):
    r = study["rates"]
    checks = {
        "u_H1": (r["err_u_H1"], 1.8),
        "eta_H1": (r["err_eta_H1"], 1.8),
        "p_L2": (r["err_p_L2"], 1.7),
        "u_L2": (r["err_u_L2"], 2.5),
    }
    ok = all(np.all(v >= lim) for v, lim in checks.values())
    detail = " ".join(f"{k}={fmt(v)}" for k, (v, _) in checks.items())
    return ok, detail


@pytest.mark.slow
def test_criterion_01_taylor_hood_space_rates(record):
    study = space_study("taylor_hood_p2", "sp")
    ok, detail = taylor_hood_rates_ok(study)
    ok = ok and study["elapsed"] <= 600
    assert record(1, ok, f"SP Taylor-Hood rates {detail} ({study['elapsed']:.0f}s, limit 600s)")


@pytest.mark.slow
def test_criterion_02_mini_space_rates(record):
    r = space_study("mini_p1", "sp")["rates"]
    u_h1 = r["err_u_H1"]
    p_l2 = r["err_p_L2"][:2]  # rates between the first three levels
    eta_h1 = r["err_eta_H1"]
    ok = (
        np.all(np.abs(u_h1 - 1.0) <= 0.35)
        and np.all(p_l2 >= 1.6)
        and np.all(np.abs(eta_h1 - 1.0) <= 0.3)
    )
    assert record(2, ok, f"MINI u_H1={fmt(u_h1)} p_L2={fmt(p_l2)} eta_H1={fmt(eta_h1)}")


def relative_field_difference(a, b):
    out = 0.0
    for x, y in ((a.fluid.u, b.fluid.u), (a.fluid.p, b.fluid.p), (a.structure.eta, b.structure.eta)):
        out = max(out, np.linalg.norm(x[-1] - y[-1]) / np.linalg.norm(y[-1]))
    return out


@pytest.mark.slow
def test_criterion_03_robin_space_rates(record):
    ok, detail = taylor_hood_rates_ok(space_study("taylor_hood_p2", "robin_gmres"))
    cfg = RunConfig(h=1 / 16, dt_f=5e-5, dt_s=5e-5, T=0.0025, alpha_f=1, alpha_s=100, tol=TOL)
    sols = {}
    for m in ("sp", "robin_gmres"):
        pb, _ = build_mms_problem(cfg.with_(method=m))
        sols[m] = pb.solve(m, tol=TOL)[0]
    diff = relative_field_difference(sols["robin_gmres"], sols["sp"])
    ok = ok and diff <= 1e-5
    assert record(3, ok, f"Robin(1,100) rates {detail}; Robin vs SP difference {diff:.1e}")


@pytest.mark.slow
def test_criterion_04_time_rates_and_nonconforming(record):
    cfg = RunConfig(h=1 / 32, dt_f=0.2, dt_s=0.2, T=0.2, method="sp", tol=TOL)
    out = run_convergence_study(cfg, "time", 4)
    worst_rate = min(float(np.min(np.abs(g["rates"][k] - 1.0) <= 0.3)) for g in out.values() for k in ERROR_KEYS)
    rate_dev = max(float(np.max(np.abs(g["rates"][k] - 1.0))) for g in out.values() for k in ERROR_KEYS)
    co, fi, nc = (out[k]["reports"] for k in ("coarse", "fine", "nonconforming"))
    fluid_ratio = np.array([[getattr(n, k) / getattr(c, k) for k in ("err_u_L2", "err_u_H1", "err_p_L2")]
                            for n, c in zip(nc, co)])
    fluid_ok = np.all(np.abs(fluid_ratio - 1.0) <= 0.2)
    bracket_ok = True
    for n, c, f in zip(nc, co, fi):
        for k in ("err_eta_L2", "err_eta_H1"):
            lo, hi = sorted((getattr(f, k), getattr(c, k)))
            bracket_ok &= 0.9 * lo <= getattr(n, k) <= 1.1 * hi
    ok = bool(worst_rate) and fluid_ok and bracket_ok
    detail = (
        f"max |rate-1|={rate_dev:.2f}; nonconforming/coarse fluid error ratios "
        f"u_L2={fmt(fluid_ratio[:, 0])} u_H1={fmt(fluid_ratio[:, 1])} p_L2={fmt(fluid_ratio[:, 2])}; "
        f"structure bracketed={bracket_ok}"
    )
    assert record(4, ok, detail)


def test_criterion_05_gmres_iterations_vs_alpha(record):
    counts = []
    for a in (1, 3, 5, 10, 50, 100):
        cfg = RunConfig(h=1 / 16, dt_f=0.025, dt_s=0.0125, T=0.2, alpha_f=1, alpha_s=a)
        pb, _ = build_mms_problem(cfg)
        _, rep = pb.solve_interface("robin_gmres", tol=1e-7)
        assert rep.converged
        counts.append(rep.iterations)
    ok = all(b <= a for a, b in zip(counts, counts[1:])) and counts[-1] <= 0.75 * counts[0]
    assert record(5, ok, f"GMRES iterations for alpha_s=1,3,5,10,50,100: {counts}")


def test_criterion_06_swr_energy_decay(record):
    lines, ok = [], True
    for a in (1.0, 10.0):
        cfg = RunConfig(h=1 / 8, dt_f=0.05, dt_s=0.025, T=0.2, alpha_f=a, alpha_s=a)
        pb, _ = build_mms_problem(cfg)
        z0 = np.random.default_rng(7).standard_normal(pb.robin_size)
        _, rep = pb.swr_solve(tol=TOL, maxit=3000, z0=z0, homogeneous=True)
        B = np.asarray(rep.energies)
        mono = rep.converged and bool(np.all(np.diff(B) <= 0.0))
        zs, rs = pb.swr_solve(tol=TOL, maxit=3000)
        zg, rg = pb.solve_interface("robin_gmres", tol=TOL)
        diff = np.linalg.norm(zs - zg) / np.linalg.norm(zg)
        fields = relative_field_difference(pb.finalize(zs, "robin_swr"), pb.finalize(zg, "robin_gmres"))
        ok &= mono and rs.converged and diff <= 10 * TOL and fields <= 10 * TOL
        lines.append(f"alpha={a:g}: B^k nonincreasing over {rep.iterations} its={mono}, "
                     f"SWR vs GMRES {diff:.1e} (fields {fields:.1e})")
    assert record(6, ok, "; ".join(lines))


def test_criterion_07_dense_operator_oracle(record):
    worst = 0.0
    T = 0.06
    for element in ("taylor_hood_p2", "mini_p1"):
        for h in (0.5, 0.25):
            for mf, ms in ((1, 1), (2, 3), (3, 1)):
                pb, _ = build_mms_problem(RunConfig(h=h, dt_f=T / mf, dt_s=T / ms, T=T, element=element))
                worst = max(
                    worst,
                    oracle.relative_deviation(oracle.probe(pb.apply_sp, pb.sp_size), oracle.dense_sp_operator(pb)),
                    oracle.relative_deviation(oracle.probe(pb.apply_robin, pb.robin_size),
                                              oracle.dense_robin_operator(pb)),
                )
    rng = np.random.default_rng(8)
    lin = 0.0
    for _ in range(5):
        for apply, n in ((pb.apply_sp, pb.sp_size), (pb.apply_robin, pb.robin_size)):
            z1, z2 = rng.standard_normal(n), rng.standard_normal(n)
            a, b = rng.standard_normal(2)
            rhs = a * apply(z1) + b * apply(z2)
            lin = max(lin, np.linalg.norm(apply(a * z1 + b * z2) - rhs) / np.linalg.norm(rhs))
    ok = worst <= 1e-10 and lin <= 1e-11
    assert record(7, ok, f"max relative deviation {worst:.1e}, linearity defect {lin:.1e}")


def test_criterion_08_projection_properties(record):
    rep = VerificationReport()
    check_projections(rep, n_series=100)
    detail = ", ".join(f"{c.name} {c.value:.1e}" for c in rep.checks)
    assert record(8, rep.passed, detail)


def test_criterion_09_discrete_robin_identities(record):
    cfg = RunConfig(h=0.25, dt_f=0.02, dt_s=0.01, T=0.06, alpha_f=3.0, alpha_s=7.0)
    pb, _ = build_mms_problem(cfg)
    rng = np.random.default_rng(9)
    worst = 0.0
    for solver, grid, alpha, sign in ((pb.fluid, pb.grid_f, 3.0, 1.0), (pb.structure, pb.grid_s, 7.0, -1.0)):
        for mode in ("robin", "neumann"):
            d = TraceSeries(grid, rng.standard_normal((grid.n_slabs, solver.n_trace)))
            d.values[:, np.setdiff1d(np.arange(solver.n_trace), pb.I)] = 0.0
            _, vel, sig = solver.sweep(grid, InterfaceData(mode, d))
            a = alpha if mode == "robin" else 0.0
            G = solver.Mg_trace
            keep = solver._alpha_mask  # nodes clamped on both sides carry no Robin term
            for m in range(grid.n_slabs):
                r = sign * (a * keep * vel.values[m] + sig.values[m]) - d.values[m]
                d_m = d.values[m]
                worst = max(worst, np.sqrt((r @ G @ r) / (d_m @ G @ d_m)))
    assert record(9, worst <= 1e-10, f"max relative defect {worst:.1e}")


@lru_cache(maxsize=None)
def hemo_runs():
    t0 = time.perf_counter()
    out = {}
    for hy in (0.1, 0.05, 1 / 30):
        cfg = RunConfig(case="hemo", element="mini_p1", h=hy, hx=0.1, dt_f=2e-4, dt_s=1e-4, T=0.1,
                        method="sp", tol=TOL, maxit=2000)
        out[hy] = run_hemodynamics(cfg)
    return out, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_10_hemodynamics(record):
    runs, elapsed = hemo_runs()
    errs = [runs[h][2].iface_err for h in (0.1, 0.05, 1 / 30)]
    decreasing = errs[0] > errs[1] > errs[2]
    in_range = 2.05e-5 <= errs[0] <= 2.05e-3
    times, disp, _ = runs[0.1]
    wave = float(np.abs(disp[times > 0.025, 2]).max())
    converged = all(r[2].converged for r in runs.values())
    ok = decreasing and in_range and wave > 0 and converged and elapsed <= 1800
    assert record(10, ok, f"interface velocity error {['%.3e' % e for e in errs]}, downstream "
                          f"max |disp| after t=0.025: {wave:.3e} ({elapsed:.0f}s, limit 1800s)")


def test_criterion_11_mms_preconditions(record):
    rep = VerificationReport()
    check_mms_identities(rep, n_points=20)
    detail = ", ".join(f"{c.name} {c.value:.1e}" for c in rep.checks)
    assert record(11, rep.passed, detail)
