"""Command-line front end (``mpi1d``).

Exit status: 0 on success, 2 on invalid input, 3 when a result misses its
acceptance threshold (outputs are still written in that case).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import assembly, imaging, io, spectral
from .config import load_config
from .svgplot import spectrum_svg

EXIT_OK, EXIT_INVALID, EXIT_THRESHOLD = 0, 2, 3


class UsageError(ValueError):
    pass


def build_operator(cfg, which: str, *, path: str = "a", orthonormal: bool = False):
    """Operator described by ``cfg``; ``which`` is ``conv``, ``time`` or ``freq``."""
    sg = cfg.space_grid()
    p = cfg.params
    if which == "conv":
        return assembly.build_s_conv(sg, p, symmetric=orthonormal)
    tg = cfg.time_grid()
    if which == "time":
        op = assembly.build_s_time(cfg.trajectory, tg, sg, p)
    elif which == "freq":
        op = assembly.build_s_freq(cfg.trajectory, tg, sg, cfg.frequencies, p, path=path)
    else:
        raise UsageError(f"unknown operator {which!r}")
    return op.orthonormal() if orthonormal else op


def _parse_range(text: str):
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"--range expects n0:n1, got {text!r}") from None


def _parse_n_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--n-list expects comma-separated integers, got {text!r}") from None


def cmd_operator_build(args) -> int:
    cfg = load_config(args.config)
    op = build_operator(cfg, args.which, path=args.path, orthonormal=args.orthonormal)
    io.write_matrix(args.out, op)
    if args.dump_csv:
        io.write_matrix_csv(args.dump_csv, op)
    print(f"wrote {op.rows}x{op.cols} {op.domain_tag}->{op.codomain_tag} matrix to {args.out}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    op = io.read_matrix(args.inp)
    rep = spectral.singular_values(op, top=args.top)
    io.write_spectrum_csv(args.out, rep)
    print(f"{len(rep)} singular values, sigma_1 = {float(rep.sigmas[0])!r}, "
          f"first untrusted index {rep.floor_index}")
    return EXIT_OK


def cmd_decay_fit(args) -> int:
    rep = io.read_spectrum_csv(args.inp)
    n0, n1 = _parse_range(args.range)
    fit = spectral.fit_decay_rate(rep, n0, n1)
    predicted = spectral.widom_rate(args.beta_a)
    deviation = abs(fit.slope + predicted) / predicted
    if args.out:
        io.write_fit_csv(args.out, fit, predicted)
    ok = deviation <= args.tol
    print(f"slope {fit.slope!r}  predicted {-predicted!r}  deviation {deviation:.4g}  "
          f"tol {args.tol}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_converge(args) -> int:
    cfg = load_config(args.config)
    n_list = _parse_n_list(args.n_list)
    if not n_list:
        raise UsageError("--n-list is empty")
    table = spectral.convergence_study(cfg.trajectory, cfg.params, n_list, args.top,
                                       operator=args.which, oversample=cfg.oversample,
                                       n_jobs=args.jobs)
    rows = []
    for n, rep in zip(table.n_list, table.reports):
        trusted = rep.trusted
        rows.extend((n, i + 1, io.fmt_float(s), "true" if t else "false")
                    for i, (s, t) in enumerate(zip(rep.sigmas, trusted)))
    io.write_rows(args.out, ["n", "index", "sigma", "trusted"], rows)
    devs = table.deviations
    if args.dev_out:
        io.write_rows(args.dev_out, ["n_coarse", "n_fine", "max_rel_deviation"],
                      ((a, b, io.fmt_float(d))
                       for a, b, d in zip(table.n_list[:-1], table.n_list[1:], devs)))
    for a, b, d in zip(table.n_list[:-1], table.n_list[1:], devs):
        print(f"N={a} -> N={b}: max relative deviation {d:.3e}")
    if not devs:
        return EXIT_OK
    monotone = all(d1 < d0 for d0, d1 in zip(devs[:-1], devs[1:]))
    ok = math.isfinite(devs[-1]) and devs[-1] < args.tol and monotone
    print(f"final deviation {devs[-1]:.3e} (tol {args.tol}), "
          f"{'monotone' if monotone else 'not monotone'}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    c = io.read_phantom_csv(args.phantom, cfg.space_grid())
    op = build_operator(cfg, args.which, path=args.path)
    s = imaging.add_noise(imaging.forward(c, op), args.noise, args.seed)
    io.write_signal_csv(args.out, s)
    print(f"wrote {s.samples.size} {s.kind} samples to {args.out}")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = load_config(args.config)
    s = io.read_signal_csv(args.signal)
    op = build_operator(cfg, s.kind, path=args.path)
    grid = cfg.space_grid()
    if args.method == "tsvd":
        k = float(args.param)
        if not k.is_integer():
            raise UsageError(f"tsvd needs an integer rank, got {args.param}")
        c_hat = imaging.reconstruct_tsvd(op, s, int(k), grid=grid)
    else:
        c_hat = imaging.reconstruct_tikhonov(op, s, float(args.param), grid=grid)
    for note in c_hat.notes:
        print(f"note: {note}", file=sys.stderr)
    io.write_phantom_csv(args.out, c_hat)
    print(f"wrote reconstruction on {grid.n_points} points to {args.out}")
    return EXIT_OK


def cmd_plot(args) -> int:
    series = [io.read_spectrum_csv(p).sigmas for p in args.inp]
    labels = args.label or [Path(p).stem for p in args.inp]
    svg = spectrum_svg(series, labels=labels, logy=args.logy, title=args.title)
    Path(args.out).write_text(svg, encoding="utf-8")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    return EXIT_OK if run_selfcheck() else EXIT_THRESHOLD


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpi1d", description="1D MPI forward operator toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    op = sub.add_parser("operator", help="operator assembly")
    op_sub = op.add_subparsers(dest="action", required=True)
    b = op_sub.add_parser("build", help="assemble an operator and write it as MPI1DMAT")
    b.add_argument("--config", required=True)
    b.add_argument("--which", choices=("conv", "time", "freq"), required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--dump-csv", help="also write the dense matrix as CSV")
    b.add_argument("--path", choices=assembly.PATHS, default="a",
                   help="assembly route for the frequency operator")
    b.add_argument("--orthonormal", action="store_true",
                   help="fold the quadrature weights in (L2-operator coordinates)")
    b.set_defaults(func=cmd_operator_build)

    sp = sub.add_parser("spectrum", help="singular values of a stored matrix")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--top", type=int)
    sp.set_defaults(func=cmd_spectrum)

    df = sub.add_parser("decay-fit", help="fit the exponential decay rate of a spectrum")
    df.add_argument("--in", dest="inp", required=True)
    df.add_argument("--range", required=True, help="n0:n1, 1-based and inclusive")
    df.add_argument("--beta-a", type=float, required=True)
    df.add_argument("--tol", type=float, default=0.15)
    df.add_argument("--out", help="write the fit as CSV")
    df.set_defaults(func=cmd_decay_fit)

    cv = sub.add_parser("converge", help="spectra on refining grids")
    cv.add_argument("--config", required=True)
    cv.add_argument("--n-list", required=True)
    cv.add_argument("--top", type=int, required=True)
    cv.add_argument("--out", required=True)
    cv.add_argument("--which", choices=("conv", "time", "freq"), default="conv")
    cv.add_argument("--dev-out", help="write successive deviations as CSV")
    cv.add_argument("--tol", type=float, default=0.01)
    cv.add_argument("--jobs", type=int, default=1)
    cv.set_defaults(func=cmd_converge)

    sm = sub.add_parser("simulate", help="forward-simulate a phantom")
    sm.add_argument("--config", required=True)
    sm.add_argument("--phantom", required=True)
    sm.add_argument("--noise", type=float, default=0.0)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--out", required=True)
    sm.add_argument("--which", choices=("time", "freq"), default="time")
    sm.add_argument("--path", choices=assembly.PATHS, default="a")
    sm.set_defaults(func=cmd_simulate)

    rc = sub.add_parser("reconstruct", help="regularized reconstruction from a signal")
    rc.add_argument("--config", required=True)
    rc.add_argument("--signal", required=True)
    rc.add_argument("--method", choices=("tsvd", "tikhonov"), required=True)
    rc.add_argument("--param", required=True, help="rank k (tsvd) or lambda (tikhonov)")
    rc.add_argument("--out", required=True)
    rc.add_argument("--path", choices=assembly.PATHS, default="a")
    rc.set_defaults(func=cmd_reconstruct)

    pl = sub.add_parser("plot", help="semilog SVG plot of one or more spectra")
    pl.add_argument("--in", dest="inp", nargs="+", required=True)
    pl.add_argument("--out", required=True)
    pl.add_argument("--logy", action=argparse.BooleanOptionalAction, default=True)
    pl.add_argument("--label", action="append")
    pl.add_argument("--title", default="singular values")
    pl.set_defaults(func=cmd_plot)

    sc = sub.add_parser("selfcheck", help="run the invariant suite")
    sc.set_defaults(func=cmd_selfcheck)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
