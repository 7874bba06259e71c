"""Command-line front end.

Subcommands: solve, check, generate, density. Exit codes: 0 success,
1 config/schema violation, 2 solver failure, 3 reality-tolerance violation.
Outputs are deterministic: fixed key order, floats at 12 significant digits,
CSV with LF endings. The PSEUDO_PT_THREADS environment variable caps the
worker count for sweeps.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import (
    assemble,
    density,
    export_density,
    localization_ratio,
    radial_density_peak,
)
from .azimuthal import (
    potential_from_generator,
    single_valuedness_defect,
    solve_phi_numeric,
)
from .config import RunConfig, build_generator_values, config_from_preset, load_config
from .errors import RealityToleranceError, SchemaError, SolverError
from .gridio import complex_record, dump_json, phi_nodes, write_columns_csv, write_phi_grid_csv
from .radial import QuantumNumbers
from .symmetry import ComplexExp, Dirac, GeneratedFrom, PotentialSpec, pt_defect

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_SOLVER = 2
EXIT_REALITY = 3


def _worker_count() -> int:
    env = os.environ.get("PSEUDO_PT_THREADS", "")
    if env.strip():
        try:
            n = int(env)
        except ValueError:
            raise SchemaError(f"PSEUDO_PT_THREADS={env!r} is not an integer")
        if n < 1:
            raise SchemaError("PSEUDO_PT_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def _load(args: argparse.Namespace) -> RunConfig:
    if args.preset and args.config:
        raise SchemaError("use either --config or --preset, not both")
    if args.preset:
        cfg = config_from_preset(args.preset, out_dir=args.out or "out")
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise SchemaError("one of --config or --preset is required")
    if args.out:
        cfg.out_dir = Path(args.out)
    if args.grid_n:
        cfg.solver.phi_grid_n = args.grid_n
        cfg.solver.validate()
    if args.tol:
        cfg.solver.reality_tol = args.tol
        cfg.solver.validate()
    return cfg


def _state_tag(q: QuantumNumbers) -> str:
    return f"nr{q.n_r}_l{q.k_or_l}_m{q.m}"


def _state_record(cfg: RunConfig, q: QuantumNumbers, wf) -> dict:
    rec = {
        "quantum": {"n_r": q.n_r, "k_or_l": q.k_or_l, "m": q.m},
        "kind": "dirac" if isinstance(cfg.kind, Dirac) else "schroedinger",
        "lambda": wf.constants.lam,
        "energy": wf.energy,
        "Lambda": complex_record(wf.constants.Lambda),
        "m_squared": complex_record(wf.constants.m_squared),
        "norm_constant_phi": wf.azimuthal.norm_constant,
        "total_norm": wf.total_norm,
        "provenance_phi": wf.azimuthal.provenance,
        "radial_nodes": wf.radial.n_r,
    }
    if wf.angular.closed_form_params is not None:
        rec["polar_closed_form"] = dict(wf.angular.closed_form_params)
    return rec


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = _load(args)
    channels = sorted(cfg.channels(), key=lambda q: (q.n_r, q.k_or_l, q.m))

    def run(q: QuantumNumbers):
        wf = assemble(
            cfg.spec, cfg.kind, q,
            phi_grid_n=cfg.solver.phi_grid_n,
            theta_grid_n=cfg.solver.theta_grid_n,
            reality_tol=cfg.solver.reality_tol,
        )
        return q, wf

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(run, channels))

    records = [_state_record(cfg, q, wf) for q, wf in results]
    payload = {"schema_version": 1, "states": records}

    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    dump_json(payload, out / "states.json")
    for q, wf in results:
        tag = _state_tag(q)
        write_phi_grid_csv(out / f"phi_{tag}.csv",
                           phi_nodes(wf.azimuthal.n_grid), wf.azimuthal.values)
        write_columns_csv(out / f"theta_{tag}.csv", ["theta", "value"],
                          [wf.angular.theta, wf.angular.values])
        write_columns_csv(out / f"radial_{tag}.csv", ["r", "U"],
                          [wf.radial.r, wf.radial.U])
    if args.json:
        import json

        from .gridio import round12

        print(json.dumps(round12(payload), indent=2))
    else:
        for rec in records:
            q = rec["quantum"]
            print(
                f"state n_r={q['n_r']} k_or_l={q['k_or_l']} m={q['m']}: "
                f"lambda={rec['lambda']:.10g} energy={rec['energy']:.10g}"
            )
        print(f"wrote {len(records)} state(s) to {out}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    cfg = _load(args)
    lines: list[str] = []
    report: dict = {"schema_version": 1}

    eff = None
    from .symmetry import effective_potential, Schroedinger

    kind_for_check = cfg.kind if not isinstance(cfg.kind, Dirac) else cfg.kind
    e_probe = cfg.kind.mass if isinstance(cfg.kind, Dirac) else 0.0
    eff = effective_potential(cfg.spec, kind_for_check, e_probe)

    n = cfg.solver.phi_grid_n
    theta_probe = np.linspace(0.05, math.pi - 0.05, 201)
    r_probe = np.linspace(0.1, 30.0, 200)
    vr = np.asarray(eff.v_r(r_probe), dtype=complex)
    vt = np.asarray(eff.v_theta(theta_probe), dtype=complex)
    radial_im = float(np.max(np.abs(vr.imag)))
    polar_im = float(np.max(np.abs(vt.imag)))
    lines.append(f"sector radial:  max |Im V_eff| = {radial_im:.3e} "
                 f"{'PASS' if radial_im == 0.0 else 'FAIL'} (Hermitian sector)")
    lines.append(f"sector polar:   max |Im V_eff| = {polar_im:.3e} "
                 f"{'PASS' if polar_im == 0.0 else 'FAIL'} (Hermitian sector)")
    report["radial_im"] = radial_im
    report["polar_im"] = polar_im

    v_phi = eff.v_phi(n)
    defect = pt_defect(v_phi)
    scale = max(1.0, float(np.max(np.abs(v_phi))))
    pt_ok = defect < 1e-12 * scale
    lines.append(f"sector azimuthal: reflection-conjugation defect = {defect:.3e} "
                 f"{'PASS' if pt_ok else 'FAIL'} (tol 1e-12)")
    report["azimuthal_pt_defect"] = defect
    report["azimuthal_pt_symmetric"] = bool(pt_ok)

    if isinstance(cfg.spec.azimuthal, ComplexExp):
        a = cfg.spec.azimuthal.a
        sv = []
        for m in sorted(set(abs(mm) for mm in cfg.m)):
            d_i = single_valuedness_defect("I", m, a)
            sv.append({"m": m, "branch": "I", "defect": d_i})
            lines.append(f"single-valuedness I-branch m={m} a={a}: defect = {d_i:.3e} "
                         f"{'PASS' if d_i < 1e-10 else 'FAIL'} (tol 1e-10)")
            if args.k_branch_probe and a > 0.0:
                d_k = single_valuedness_defect("K", m, a)
                sv.append({"m": m, "branch": "K", "defect": d_k})
                lines.append(
                    f"single-valuedness K-branch m={m} a={a}: defect = {d_k:.3e} "
                    "(branch-cut violation magnitude)"
                )
        report["single_valuedness"] = sv

    if pt_ok:
        sols = solve_phi_numeric(v_phi, n_modes=min(7, n // 4),
                                 reality_tol=cfg.solver.reality_tol)
        worst = max(abs(s.m_squared.imag) for s in sols)
        margin = cfg.solver.reality_tol - worst
        lines.append(
            f"reality margin: max |Im m^2| = {worst:.3e} over {len(sols)} modes "
            f"{'PASS' if worst < cfg.solver.reality_tol else 'FAIL'} "
            f"(tol {cfg.solver.reality_tol:.1e})"
        )
        report["reality_max_im"] = worst
        report["reality_margin"] = margin
        report["phi_spectrum"] = [complex_record(s.m_squared) for s in sols]

    if args.json:
        import json

        from .gridio import round12

        print(json.dumps(round12(report), indent=2))
    else:
        for ln in lines:
            print(ln)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    n = args.grid_n or 128
    if args.f_file:
        from .gridio import read_phi_grid_csv, require_uniform_phi

        phi_in, f_values = read_phi_grid_csv(args.f_file)
        try:
            require_uniform_phi(phi_in)
        except ValueError as exc:
            raise SchemaError(f"{args.f_file}: {exc}")
    else:
        if not args.generator:
            raise SchemaError("one of --generator or --f-file is required")
        f_values = build_generator_values(args.generator, args.m, args.omega, n)
    values, excluded = potential_from_generator(f_values, args.m)
    defect = pt_defect(np.where(excluded, 0.0, values), excluded=excluded)

    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    name = args.generator or Path(args.f_file).stem
    csv_path = out / f"potential_{name}_m{args.m}.csv"
    write_phi_grid_csv(csv_path, phi_nodes(len(values)), values, excluded=excluded)

    summary = {
        "generator": name,
        "m": args.m,
        "omega": args.omega,
        "grid_n": len(values),
        "excluded_samples": int(np.count_nonzero(excluded)),
        "pt_defect_off_poles": defect,
        "csv": str(csv_path),
    }
    if args.json:
        import json

        from .gridio import round12

        print(json.dumps(round12(summary), indent=2))
    else:
        print(f"wrote {csv_path} ({summary['excluded_samples']} excluded sample(s))")
        print(f"reflection-conjugation defect off poles: {defect:.3e}")
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if not isinstance(cfg.spec.azimuthal, ComplexExp):
        raise SolverError("the density sweep varies the complex-exponential "
                          "coupling; configure azimuthal type complex-exp")
    try:
        sweep = [float(tok) for tok in args.sweep.split(",") if tok.strip()]
    except ValueError:
        raise SchemaError(f"--sweep {args.sweep!r} is not a comma-separated number list")
    if not sweep:
        raise SchemaError("--sweep must list at least one coupling")
    if sorted(sweep) != sweep or any(a < 0 for a in sweep):
        raise SchemaError("--sweep values must be non-negative and ascending")

    q = next(iter(cfg.channels()))
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)

    def run(a: float):
        swept = PotentialSpec(radial=cfg.spec.radial, polar=cfg.spec.polar,
                              azimuthal=ComplexExp(a=a))
        wf = assemble(swept, cfg.kind, q,
                      phi_grid_n=cfg.solver.phi_grid_n,
                      theta_grid_n=cfg.solver.theta_grid_n,
                      reality_tol=cfg.solver.reality_tol)
        r_peak = radial_density_peak(wf)
        r_axis = np.linspace(0.0, 4.0 * max(r_peak, 1.0), args.n_r_samples + 1)[1:]
        t_axis = np.linspace(0.0, math.pi, args.n_theta_samples + 2)[1:-1]
        p_axis = phi_nodes(args.n_phi_samples)
        grid = density(wf, (r_axis, t_axis, p_axis))
        return a, wf, grid

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(run, sweep))

    ratios = localization_ratio(cfg.spec, cfg.kind, sweep, q,
                                phi_grid_n=cfg.solver.phi_grid_n)
    for (a, wf, grid) in results:
        tag = f"{_state_tag(q)}_a{a:g}"
        export_density(grid, wf, out, tag, extra={"a": a})
    write_columns_csv(out / "localization.csv", ["a", "ratio"],
                      [[a for a, _ in ratios], [r for _, r in ratios]])
    for a, ratio in ratios:
        print(f"a={a:g}: density(0)/density(pi) = {ratio:.6g}")
    print(f"wrote {len(results)} density grid(s) to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pseudopt",
        description="Spherically separable eigenproblems with a non-Hermitian "
                    "azimuthal sector: solve, check symmetries, generate "
                    "potentials, export densities.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=str, help="path to a YAML run config")
        sp.add_argument("--preset", type=str,
                        help="named preset (coulomb-a0, coulomb-a1, coulomb-a2, hartmann)")
        sp.add_argument("--out", type=str, help="output directory")
        sp.add_argument("--grid-n", type=int, help="azimuthal grid size override")
        sp.add_argument("--tol", type=float, help="reality tolerance override")
        sp.add_argument("--json", action="store_true", help="machine-readable stdout")

    ps = sub.add_parser("solve", help="solve the configured eigenproblem chain")
    common(ps)
    ps.set_defaults(func=cmd_solve)

    pc = sub.add_parser("check", help="report symmetry defects and reality margins")
    common(pc)
    pc.add_argument("--k-branch-probe", action="store_true",
                    help="include the second-kind branch-cut violation magnitude")
    pc.set_defaults(func=cmd_check)

    pg = sub.add_parser("generate", help="build a phi potential from a generator")
    pg.add_argument("--generator", type=str,
                    help="named generator: cos, const, bessel-gen")
    pg.add_argument("--f-file", type=str, help="tabulated generator CSV (phi,re,im)")
    pg.add_argument("--m", type=int, required=True, help="magnetic quantum number")
    pg.add_argument("--omega", type=float, default=2.0,
                    help="coupling of the bessel-gen generator")
    pg.add_argument("--grid-n", type=int, help="grid size (default 128)")
    pg.add_argument("--out", type=str, help="output directory")
    pg.add_argument("--json", action="store_true")
    pg.set_defaults(func=cmd_generate)

    pd = sub.add_parser("density", help="density grids over a coupling sweep")
    common(pd)
    pd.add_argument("--sweep", type=str, required=True,
                    help="comma-separated ascending couplings, e.g. 0.5,1,2,4")
    pd.add_argument("--n-r-samples", type=int, default=96)
    pd.add_argument("--n-theta-samples", type=int, default=49)
    pd.add_argument("--n-phi-samples", type=int, default=128)
    pd.set_defaults(func=cmd_density)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except RealityToleranceError as exc:
        print(f"reality-tolerance violation: {exc}", file=sys.stderr)
        return EXIT_REALITY
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except Exception as exc:  # no tracebacks for bad user input
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
