"""Command line entry point: `tripod <subcommand> --config c.json ...`.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure.  Every run emits its data file plus a sidecar manifest.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bands as bands_mod
from . import optical, scatter, tightbinding, wannier
from .eigen import BasisError, EigenError
from .io import RunManifest, write_csv, write_json
from .params import ParamError, load_config, parse_angle
from .bands import SolverError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_CONFIG_ERRORS = (ParamError, BasisError, ValueError)
_NUMERICAL_ERRORS = (EigenError, SolverError, scatter.ScatterError,
                     wannier.WannierError, tightbinding.TightBindingError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripod",
        description="Band structure of the tripod sub-wavelength lattice "
                    "by full diagonalization, dark-state projection and "
                    "transfer-matrix scattering.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: TRIPOD_THREADS or cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", required=True, help="JSON parameter file")
        sp.add_argument("--out", required=True, help="output CSV path")

    sp = sub.add_parser("potentials", help="fields, angles and geometric "
                        "potentials on the x grid")
    add_common(sp)

    sp = sub.add_parser("bands", help="Bloch bands over the extended zone")
    add_common(sp)
    sp.add_argument("--method", choices=("full", "dark"), default="full")
    sp.add_argument("--reorder", action="store_true",
                    help="relabel bands along q by eigenvector-overlap "
                         "continuity instead of sorted real parts")

    sp = sub.add_parser("scatter", help="transfer-matrix dispersion sweep")
    add_common(sp)
    sp.add_argument("--qmax", type=float, default=6.0,
                    help="max momentum Q in units pi/a (default 6)")
    sp.add_argument("--nq", type=int, default=2000,
                    help="number of Q samples (default 2000)")
    sp.add_argument("--amplitudes", choices=("exact", "formula"),
                    default="exact",
                    help="barrier amplitudes: numerically exact or the "
                         "closed-form asymptote")
    sp.add_argument("--gamma0-approx", action="store_true",
                    help="use the shortcut gamma0 = phi(0) - phi(a/2)")

    sp = sub.add_parser("wannier", help="maximally localized Wannier function")
    add_common(sp)
    sp.add_argument("--band", type=int, default=1)
    sp.add_argument("--center", type=int, default=0)
    sp.add_argument("--method", default="auto",
                    choices=("auto", "center", "shifted", "lambda-limit"),
                    help="phase optimization: center (odd bands), shifted "
                         "(even bands), lambda-limit (even bands at large "
                         "alpha); auto switches to lambda-limit beyond "
                         "--lambda-threshold")
    sp.add_argument("--lambda-threshold", default="80deg",
                    help="alpha above which auto uses lambda-limit "
                         "(heuristic, default 80deg)")
    sp.add_argument("--solver", choices=("full", "dark"), default="full")

    sp = sub.add_parser("tb", help="tight-binding hopping sweep")
    add_common(sp)
    sp.add_argument("--band", type=int, default=1)
    sp.add_argument("--sweep", choices=("alpha", "delta"), required=True)
    sp.add_argument("--from", dest="start", required=True,
                    help="sweep start (alpha accepts e.g. 0 or 0deg)")
    sp.add_argument("--to", dest="stop", required=True,
                    help="sweep end (alpha accepts e.g. 90deg)")
    sp.add_argument("--steps", type=int, default=16)
    sp.add_argument("--vmax", type=int, default=8)
    sp.add_argument("--method", choices=("full", "dark"), default="full")

    sp = sub.add_parser("compare", help="cross-validate the three methods")
    add_common(sp)
    sp.add_argument("--bands", type=int, default=4)
    sp.add_argument("--tol-dark", type=float, default=0.05,
                    help="pass threshold for max|E_full - E_dark| on band 1")
    sp.add_argument("--tol-scatter", type=float, default=0.05,
                    help="pass threshold for odd-band scatter deviation")
    return parser


def cmd_potentials(args) -> int:
    p = load_config(args.config)
    xs = np.linspace(-0.5 * p.a, 0.5 * p.a, p.n_x, endpoint=False)
    f = optical.rabi(xs, p)
    ang = optical.angles(xs, p)
    g = optical.geometric_potentials(xs, p)
    v_exact, v_approx = optical.barrier_approx(xs, p)
    manifest = RunManifest("potentials", p)
    rows = zip(xs, f.omega1, f.omega2, f.omega3, ang.theta, ang.phi,
               g.c1, g.c2, g.a_y, g.v_mat[0, 0], g.v_mat[0, 1],
               g.v_mat[1, 1], v_exact, v_approx)
    digest = write_csv(args.out,
                       ["x", "omega1", "omega2", "omega3", "theta", "phi",
                        "c1", "c2", "a_y", "v11", "v12", "v22",
                        "v_exact", "v_approx"], rows)
    manifest.add_output(args.out, digest)
    manifest.write(args.out)
    return EXIT_OK


def cmd_bands(args) -> int:
    p = load_config(args.config)
    solver = bands_mod.full_bands if args.method == "full" else bands_mod.dark_bands
    bs = solver(p, threads=args.threads)
    if args.reorder:
        bs = bands_mod.reorder_by_continuity(bs)
    rows = []
    for iq, q in enumerate(bs.q_grid):
        for s in range(1, bs.n_bands + 1):
            e = bs.energies[iq, s - 1]
            pop = bs.populations[iq, s - 1]
            rows.append((q, s, e.real, e.imag, pop[0], pop[1], pop[2], pop[3]))
    manifest = RunManifest("bands", p, {"method": args.method})
    digest = write_csv(args.out,
                       ["q", "s", "E_re", "E_im",
                        "pop_D1", "pop_D2", "pop_B", "pop_0"], rows)
    manifest.add_output(args.out, digest)
    manifest.write(args.out)
    return EXIT_OK


def cmd_scatter(args) -> int:
    p = load_config(args.config)
    if args.qmax <= 0 or args.nq < 2:
        raise ParamError("qmax must be positive and nq at least 2")
    q_moms = np.linspace(args.qmax * np.pi / args.nq, args.qmax * np.pi,
                         args.nq)
    g0 = (optical.gamma0_shortcut(p) if args.gamma0_approx
          else optical.gamma0(p))
    pts = scatter.dispersion(p, q_moms, gamma0=g0,
                             amplitudes=args.amplitudes)
    rows = zip(pts.q_mom, pts.e, pts.q, pts.branch, pts.lambda_mod)
    manifest = RunManifest("scatter", p, {
        "gamma0": pts.gamma0, "width": pts.width,
        "amplitudes": args.amplitudes,
    })
    digest = write_csv(args.out, ["Q", "E", "q", "branch", "lambda_mod"], rows)
    manifest.add_output(args.out, digest)
    manifest.write(args.out)
    return EXIT_OK


def cmd_wannier(args) -> int:
    p = load_config(args.config)
    threshold = parse_angle(args.lambda_threshold)
    if args.solver == "dark":
        bs = bands_mod.dark_bands(p, threads=args.threads)
        w = wannier.adiabatic_wannier(bs, args.band, args.center)
        comps = np.vstack([w.comps, np.zeros((2, len(w.x_grid)), complex)])
    else:
        bs = bands_mod.full_bands(p, threads=args.threads)
        method = args.method
        if method == "auto":
            method = wannier.auto_method(args.band, p.alpha, threshold)
        w = wannier.build_wannier(bs, args.band, args.center, method=method)
        comps = w.comps
    rows = []
    for i, x in enumerate(w.x_grid):
        rows.append((x,
                     comps[0, i].real, comps[0, i].imag,
                     comps[1, i].real, comps[1, i].imag,
                     comps[2, i].real, comps[2, i].imag,
                     comps[3, i].real, comps[3, i].imag))
    manifest = RunManifest("wannier", p, {
        "band": args.band, "center": args.center, "method": w.method,
        "solver": args.solver,
    })
    digest = write_csv(args.out,
                       ["x", "ReW_D1", "ImW_D1", "ReW_D2", "ImW_D2",
                        "ReW_B", "ImW_B", "ReW_0", "ImW_0"], rows)
    manifest.add_output(args.out, digest)
    manifest.write(args.out)
    return EXIT_OK


def cmd_tb(args) -> int:
    p = load_config(args.config)
    if args.steps < 2:
        raise ParamError("--steps must be at least 2")
    if args.sweep == "alpha":
        start, stop = parse_angle(args.start), parse_angle(args.stop)
        values = np.linspace(start, stop, args.steps)
        table = tightbinding.sweep_alpha(p, values, args.band, args.vmax,
                                         method=args.method)
    else:
        values = np.linspace(float(args.start), float(args.stop), args.steps)
        table = tightbinding.sweep_delta(p, values, args.band, args.vmax,
                                         method=args.method)
    rows = []
    for value, fit in zip(table.values, table.fits):
        for v, j in enumerate(fit.hoppings):
            rows.append((value, fit.band, v, j.real, j.imag, fit.residual))
    manifest = RunManifest("tb", p, {
        "sweep": args.sweep, "band": args.band, "v_max": args.vmax,
        "method": args.method,
    })
    digest = write_csv(args.out, ["param", "s", "v", "J_re", "J_im",
                                  "residual"], rows)
    manifest.add_output(args.out, digest)
    manifest.write(args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    p = load_config(args.config)
    n_bands = max(1, args.bands)
    if p.n_bands < n_bands:
        from dataclasses import replace
        p = replace(p, n_bands=n_bands)
    full = bands_mod.full_bands(p, threads=args.threads)
    dark = bands_mod.dark_bands(p, threads=args.threads)
    g0 = optical.gamma0(p)
    width = optical.barrier_width(p)

    report: dict = {"bands": {}}
    for s in range(1, n_bands + 1):
        dev = np.abs(full.energies.real[:, s - 1] - dark.energies.real[:, s - 1])
        report["bands"][str(s)] = {
            "full_vs_dark_max": float(np.max(dev)),
            "full_vs_dark_mean": float(np.mean(dev)),
        }

    e_max = float(np.max(dark.energies.real[:, :n_bands])) + 1.0
    table = scatter.AmplitudeTable(width, e_max, mode="exact")
    for s in range(1, n_bands + 1, 2):
        devs = []
        for iq, q in enumerate(dark.q_grid):
            e_dark = float(dark.energies.real[iq, s - 1])
            roots = scatter.energies_at_q(p, float(q), e_dark - 1.0,
                                          e_dark + 1.0, gamma0=g0,
                                          width=width, table=table)
            devs.append(float(np.min(np.abs(roots - e_dark)))
                        if roots.size else float("inf"))
        report["bands"][str(s)]["scatter_vs_dark_max"] = max(devs)
        report["bands"][str(s)]["scatter_vs_dark_mean"] = (
            float(np.mean(devs)))

    if p.gamma == 0.0:
        n = len(full.q_grid)
        sym = 0.0
        for j in range(n - 1):
            sym = max(sym, float(np.max(np.abs(
                full.energies[j, :] - full.energies[n - 2 - j, :]))))
        report["time_reversal_max_asymmetry"] = sym

    report["thresholds"] = {"dark": args.tol_dark, "scatter": args.tol_scatter}
    report["pass"] = {
        "full_vs_dark_band1":
            report["bands"]["1"]["full_vs_dark_max"] < args.tol_dark,
        "scatter_odd_bands": all(
            report["bands"][str(s)]["scatter_vs_dark_max"] < args.tol_scatter
            for s in range(1, n_bands + 1, 2)),
    }
    manifest = RunManifest("compare", p)
    digest = write_json(args.out, report)
    manifest.add_output(args.out, digest)
    manifest.write(args.out)
    return EXIT_OK


_COMMANDS = {
    "potentials": cmd_potentials,
    "bands": cmd_bands,
    "scatter": cmd_scatter,
    "wannier": cmd_wannier,
    "tb": cmd_tb,
    "compare": cmd_compare,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.threads is not None:
        import os
        os.environ["TRIPOD_THREADS"] = str(args.threads)
    try:
        return _COMMANDS[args.command](args)
    except _NUMERICAL_ERRORS as exc:
        print(f"tripod: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"tripod: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _CONFIG_ERRORS as exc:
        print(f"tripod: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    raise SystemExit(run())
