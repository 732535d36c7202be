import csv
import math

import numpy as np
import pytest

from fsidd.harness import (
    MmsExact,
    RunConfig,
    build_hemo_problem,
    inlet_stress,
    lame_from_young,
    mms_exact,
    parse_config_text,
    rates,
    run_mms,
    run_verification,
)
from fsidd.harness.cases import monitor_dofs
from fsidd.harness.cli import main
from fsidd.harness.config import load_config

RNG = np.random.default_rng(11)


def test_config_validation():
    RunConfig()
    for bad in (dict(case="x"), dict(method="cg"), dict(element="p3"), dict(h=0.0),
                dict(alpha_s=-1.0), dict(dt_f=0.3, T=1.0), dict(maxit=0)):
        with pytest.raises(ValueError):
            RunConfig(**bad)


def test_config_text(tmp_path):
    text = "# run\nmethod = robin_swr\nh=0.25\nmaxit=7\n\nT=0.01 # end\ndt_f=0.005\ndt_s=0.0025\n"
    vals = parse_config_text(text)
    assert vals == dict(method="robin_swr", h=0.25, maxit=7, T=0.01, dt_f=0.005, dt_s=0.0025)
    p = tmp_path / "c.txt"
    p.write_text(text)
    cfg = load_config(p, h=0.5)
    assert cfg.h == 0.5 and cfg.maxit == 7
    with pytest.raises(ValueError):
        parse_config_text("colour=red")
    with pytest.raises(ValueError):
        parse_config_text("no equals sign")


def test_mms_identities():
    x, y, t = RNG.uniform(0, 1, 50), RNG.uniform(0, 2, 50), RNG.uniform(0, 1, 50)
    e = MmsExact()
    g = e.grad_u(x, y, t)
    assert np.abs(g[:, 0, 0] + g[:, 1, 1]).max() <= 1e-12
    one = np.ones_like(x)
    assert np.abs(e.etadot(x, one, t) - e.u(x, one, t)).max() <= 1e-12
    assert np.allclose(e.u(0.0, 0.0, 0.0), 0.0)
    assert np.allclose(e.sigma_f_n(x, t), -e.sigma_s_n(x, t))
    fields = mms_exact(0.3, x, y)
    assert set(fields) >= {"u", "p", "eta", "etadot", "f_f", "f_s", "sigma_f_n", "sigma_s_n"}


def test_gradients_match_finite_differences():
    e = MmsExact()
    x, y, t = RNG.uniform(0, 1, 20), RNG.uniform(0, 2, 20), RNG.uniform(0, 1, 20)
    d = 1e-6
    for f, grad in ((e.u, e.grad_u), (e.eta, e.grad_eta)):
        fd = np.stack([(f(x + d, y, t) - f(x - d, y, t)) / (2 * d),
                       (f(x, y + d, t) - f(x, y - d, t)) / (2 * d)], axis=-1)
        assert np.abs(fd - grad(x, y, t)).max() < 1e-8


def test_traction_matches_stress_tensor():
    e = MmsExact(nu_f=0.7, nu_s=1.3)
    x, t = RNG.uniform(0, 1, 10), RNG.uniform(0, 1, 10)
    y = np.ones_like(x)
    gu = e.grad_u(x, y, t)
    sig = 0.7 * (gu + np.swapaxes(gu, -1, -2)) - e.p(x, y, t)[:, None, None] * np.eye(2)
    assert np.allclose(sig[..., 1], e.sigma_f_n(x, t), atol=1e-12)


def test_hemo_constants():
    mu, lam = lame_from_young(3e6, 0.3)
    assert lam == pytest.approx(1.7308e6, rel=1e-4)
    assert mu == pytest.approx(1.1538e6, rel=1e-4)
    assert np.allclose(inlet_stress(0.0125), [-2000.0, 0.0])
    assert np.allclose(inlet_stress(0.03), 0.0)


def test_hemo_problem_layout():
    cfg = RunConfig(case="hemo", element="mini_p1", h=0.1, hx=0.1, dt_f=0.02, dt_s=0.01, T=0.04)
    pb = build_hemo_problem(cfg)
    assert pb.fluid.V.mesh.n_vertices == 671
    assert pb.nI == pb.n_trace == 2 * 61
    assert pb.grid_f.n_slabs == 2 and pb.grid_s.n_slabs == 4
    dofs = monitor_dofs(pb.structure.S, (1.5, 3.0, 4.5))
    S = pb.structure.S
    assert np.allclose(S.dof_coords[dofs - S.n_scalar], [[1.5, 1.0], [3.0, 1.0], [4.5, 1.0]])


def test_rates():
    assert np.allclose(rates([1.0, 0.25, 0.0625]), [2.0, 2.0])


def test_mms_robin_error_magnitude():
    rep = run_mms(RunConfig(h=0.125, dt_f=5e-5, dt_s=2.5e-5, method="robin_gmres", alpha_f=1, alpha_s=100))
    assert rep.converged
    assert 1.39e-3 / 3 <= rep.err_eta_H1 <= 1.39e-3 * 3
    for k in ("err_u_L2", "err_u_H1", "err_p_L2", "err_eta_L2", "err_eta_H1", "wall_s", "iface_err"):
        v = getattr(rep, k)
        assert math.isfinite(v) and v >= 0


def test_cli_mms_writes_csv(tmp_path):
    cfg = tmp_path / "run.txt"
    cfg.write_text(f"h=0.5\ndt_f=0.01\ndt_s=0.005\nT=0.02\nmethod=robin_swr\noutput={tmp_path}\n")
    assert main(["mms", "--config", str(cfg), "--alpha-s", "1"]) == 0
    with open(tmp_path / "errors.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["h", "dt_f", "dt_s", "method", "alpha_f", "alpha_s", "err_u_L2", "err_u_H1",
                       "err_p_L2", "err_eta_L2", "err_eta_H1", "iters", "wall_s", "iface_err"]
    assert rows[1][0] == "5.00000e-01" and rows[1][3] == "robin_swr" and rows[1][5] == "1.00000e+00"
    with open(tmp_path / "residuals.csv") as fh:
        res = list(csv.reader(fh))
    assert res[0] == ["run", "iteration", "residual"] and len(res) > 2
    assert (tmp_path / "config.txt").read_text().startswith("case=mms")


def test_cli_hemo_writes_displacement(tmp_path):
    args = ["hemo", "--h", "0.1", "--hx", "0.5", "--T", "0.004", "--dt-f", "0.002",
            "--dt-s", "0.001", "--output", str(tmp_path)]
    assert main(args) == 0
    with open(tmp_path / "displacement.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x1_disp", "x2_disp", "x3_disp"]
    assert len(rows) == 1 + 5


def test_cli_study(tmp_path):
    args = ["study", "--axis", "time", "--levels", "2", "--h", "0.5", "--T", "0.02",
            "--dt-f", "0.01", "--dt-s", "0.01", "--output", str(tmp_path)]
    assert main(args) == 0
    with open(tmp_path / "errors.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 6


def test_verification_passes_and_detects_fault():
    assert run_verification().passed
    rep = run_verification(fault=True)
    names = {c.name for c in rep.failures}
    assert names == {"dense operator equivalence (taylor_hood_p2)", "dense operator equivalence (mini_p1)"}


def test_cli_verify_exit_codes(capsys):
    assert main(["verify"]) == 0
    assert main(["verify", "--inject-fault"]) == 1
    assert "FAIL" in capsys.readouterr().out
