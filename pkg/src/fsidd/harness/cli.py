"""Command-line entry point: ``python -m fsidd {mms,hemo,study,verify}``."""

import argparse
import os
import sys
from dataclasses import fields

from .cases import run_convergence_study, run_hemodynamics, run_mms
from .config import CASES, ELEMENTS, METHODS, RunConfig, load_config
from .report import write_config, write_displacement, write_errors, write_residuals
from .verify import run_verification

HEMO_DEFAULTS = dict(case="hemo", element="mini_p1", h=0.1, hx=0.1, dt_f=2e-4, dt_s=1e-4, T=0.1, maxit=2000)


def _add_config_flags(p):
    p.add_argument("--config", help="key=value file with run parameters")
    for f in fields(RunConfig):
        if f.name == "case":
            continue
        kw = {"type": f.type if f.type in (int, float) else str, "default": None}
        if f.name == "method":
            kw["choices"] = METHODS
        if f.name == "element":
            kw["choices"] = ELEMENTS
        p.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, **kw)


def _config(args, case, defaults=None):
    over = {f.name: getattr(args, f.name, None) for f in fields(RunConfig) if f.name != "case"}
    over = {k: v for k, v in over.items() if v is not None}
    if args.config:
        cfg = load_config(args.config, **over)
        if cfg.case != case and case != "verify":
            cfg = cfg.with_(case=case)
        return cfg
    base = dict(defaults or {})
    base["case"] = case
    base.update(over)
    return RunConfig(**base)


def build_parser():
    parser = argparse.ArgumentParser(prog="fsidd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_config_flags(sub.add_parser("mms", help="manufactured-solution run"))
    _add_config_flags(sub.add_parser("hemo", help="2D hemodynamics channel"))
    st = sub.add_parser("study", help="convergence study on the manufactured case")
    _add_config_flags(st)
    st.add_argument("--axis", choices=("space", "time"), default="space")
    st.add_argument("--levels", type=int, default=3)
    v = sub.add_parser("verify", help="run the self-check suite")
    _add_config_flags(v)
    v.add_argument("--inject-fault", action="store_true",
                   help="perturb one sweep matrix entry; the operator check must then fail")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        rep = run_verification(fault=args.inject_fault)
        for c in rep.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status}  {c.name}: {c.value:.3e} (limit {c.limit:.1e}) {c.detail}".rstrip())
        return 0 if rep.passed else 1

    case = "hemo" if args.command == "hemo" else "mms"
    cfg = _config(args, case, HEMO_DEFAULTS if case == "hemo" else None)
    out = cfg.output
    os.makedirs(out, exist_ok=True)
    write_config(os.path.join(out, "config.txt"), cfg)
    if args.command == "mms":
        reports = [run_mms(cfg)]
    elif args.command == "hemo":
        times, disp, r = run_hemodynamics(cfg)
        write_displacement(os.path.join(out, "displacement.csv"), times, disp)
        reports = [r]
    else:
        res = run_convergence_study(cfg, args.axis, args.levels)
        groups = [res] if args.axis == "space" else list(res.values())
        reports = [r for g in groups for r in g["reports"]]
    write_errors(os.path.join(out, "errors.csv"), reports)
    write_residuals(os.path.join(out, "residuals.csv"), reports)
    for r in reports:
        print(
            f"h={r.h:.4g} dt_f={r.dt_f:.3g} dt_s={r.dt_s:.3g} {r.method}: iters={r.iters} "
            f"u_L2={r.err_u_L2:.3e} u_H1={r.err_u_H1:.3e} p_L2={r.err_p_L2:.3e} "
            f"eta_L2={r.err_eta_L2:.3e} eta_H1={r.err_eta_H1:.3e} iface={r.iface_err:.3e} "
            f"wall={r.wall_s:.2f}s"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
