"""
Command-line front end.

    qsplit ring validate FILE
    qsplit conn build FILE --degree D [--write PATH]
    qsplit split --conn FILE [--prime P] [--order K] [--alpha A --beta B]
    qsplit extend --conn FILE --e0 FILE [--order K]
    qsplit verify (--series NAME | --matrix FILE) [--prime P] [--alpha A --beta B] [--slope S --gamma G]
    qsplit bgamma {cohomology,cup,restrict,tower} --p P --m M ...
    qsplit diag-class --complex FILE --p P --m M [--trials T]
    qsplit reference NAME [--order K]

Exit status: 0 when every check passes, 1 for usage or input errors,
2 for a mathematical verdict failure (obstruction, failed certificate).
"""
from __future__ import annotations

import argparse
import logging
import os
import random
import sys
import time
from importlib import resources
from pathlib import Path
from typing import List, Optional

from . import fileio
from .connection import SeriesMatrix
from .cyclic import (BGammaCochain, bgamma_cohomology, bgamma_cup, bgamma_restrict,
                     cohomologous, inverse_limit_tower, is_cocycle, restrict_on_cohomology,
                     tensor_power_class, theta_square_coefficient)
from .errors import InputError, PreconditionViolated, QsplitError
from .plotting import newton_polygon_figure, save_svg
from .quantum_ring import REFERENCE_NAMES, build_connection, reference_series
from .report import RunReport
from .scalars import PrimeContext, format_scalar, parse_scalar
from .series import DEFAULT_ORDER, check_log_decay, newton_polygon, slope_floor
from .splitting import (block_split, extend_endomorphism, mod_p_reduction_degree, p_integral,
                        verify_divisibility)

log = logging.getLogger("qsplit")

DEFAULT_PRIME = 3
OUT_DIR_ENV = "QSPLIT_OUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def resolve_path(path: str) -> Path:
    """The given path, or else a bundled data file with the same name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("qsplit") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise InputError(f"{path}: no such file")


def _matrix_yaml(m):
    return [[format_scalar(x) for x in row] for row in m]


def _series_entries(E: SeriesMatrix):
    out = {}
    for i in range(E.size):
        for j in range(E.size):
            s = E.entry(i, j)
            if not s.is_zero():
                out[f"{i + 1},{j + 1}"] = s.to_strings()
    return out


def _plot_dir(args) -> Optional[Path]:
    d = getattr(args, "plots", None) or os.environ.get(OUT_DIR_ENV)
    return Path(d) if d else None


def _emit_plots(rep: RunReport, args, series_by_tag, p: int):
    out = _plot_dir(args)
    if out is None:
        return
    digest = rep.digest()[:12]
    for tag, s in series_by_tag.items():
        if s.is_zero():
            continue
        fig = newton_polygon_figure(newton_polygon(s, p), title=f"{tag}, p = {p}")
        path = save_svg(fig, out / f"{digest}-{tag}.svg")
        rep.figures.append(str(path))


# --- subcommands ---------------------------------------------------------------------


def cmd_ring(args, rep: RunReport) -> None:
    path = resolve_path(args.file)
    rep.add_input(path)
    ring = fileio.load_ring(path)
    rep.body["ring"] = {
        "name": ring.name,
        "basis": [f"{lab} (degree {d})" for lab, d in zip(ring.labels, ring.degrees)],
        "dim_C": ring.dim_C,
    }
    rep.verdict("grading", True)
    rep.verdict("unit", True)
    rep.verdict("associativity", True)


def cmd_conn(args, rep: RunReport) -> None:
    path = resolve_path(args.file)
    rep.add_input(path)
    ring = fileio.load_ring(path)
    sl = build_connection(ring, args.degree)
    conn = sl.connection
    conn.truncation = args.order
    rep.body["degree"] = args.degree
    rep.body["order"] = args.order
    rep.body["slice_basis"] = sl.labels
    rep.body["convention"] = conn.describe_convention()
    rep.body["matrices"] = {k: _matrix_yaml(m) for k, m in enumerate(conn.display_matrices())}
    if args.write:
        fileio.write_text(args.write, fileio.dump_connection(conn))
        rep.body["written"] = str(args.write)


def _order(args, conn) -> int:
    if args.order is not None:
        return args.order
    return conn.truncation if conn.truncation is not None else DEFAULT_ORDER


def cmd_split(args, rep: RunReport) -> None:
    path = resolve_path(args.conn)
    rep.add_input(path)
    conn = fileio.load_connection(path)
    K = _order(args, conn)
    ctx = PrimeContext(args.prime)
    rep.body["prime"] = ctx.p
    rep.body["order"] = K
    rep.body["convention"] = conn.describe_convention()
    res = block_split(conn, ctx, order=K)
    ed = res.eigen
    rep.body["spectrum"] = [
        {"eigenvalue": format_scalar(lab), "multiplicity": m}
        for lab, m in zip(res.labels, ed.multiplicities)
    ]
    sign = 1 if conn.convention == "plus" else -1
    rep.body["eigenvalue_differences"] = [
        {"pair": [format_scalar(sign * a), format_scalar(sign * b)], "difference": format_scalar(sign * d),
         "valuation": v, "p_adic_unit": u}
        for a, b, d, v, u in ed.differences
    ]
    rep.body["projectors"] = {format_scalar(lab): _series_entries(E)
                              for lab, E in zip(res.labels, res.projector_series)}
    rep.verdict("splitting_invariants", not res.failures, "; ".join(res.failures))
    integral = all(p_integral(E, ctx) for E in res.projector_series)
    rep.body["p_integral"] = integral
    if args.alpha is not None or args.beta is not None:
        alpha = parse_scalar(args.alpha or "0")
        beta = parse_scalar(args.beta or "0")
        rep.body["alpha"], rep.body["beta"] = format_scalar(alpha), format_scalar(beta)
        worst = None
        for lab, E in zip(res.labels, res.projector_series):
            cert = verify_divisibility(E, ctx, alpha, beta)
            if not cert.passed and worst is None:
                worst = f"eigenvalue {format_scalar(lab)}: {cert.verdict}"
        rep.verdict("divisibility", worst is None, worst or "")
    else:
        rep.verdicts["divisibility"] = "skipped (no --alpha/--beta)"
    _emit_plots(rep, args, {
        f"E{format_scalar(lab)}_{i + 1}{j + 1}": E.entry(i, j)
        for lab, E in zip(res.labels, res.projector_series)
        for i in range(E.size) for j in range(E.size) if E.entry(i, j).order and any(E.entry(i, j)[1:])
    }, ctx.p)


def cmd_extend(args, rep: RunReport) -> None:
    cpath, epath = resolve_path(args.conn), resolve_path(args.e0)
    rep.add_input(cpath)
    rep.add_input(epath)
    conn = fileio.load_connection(cpath)
    E0 = fileio.load_matrix(epath)
    if isinstance(E0, SeriesMatrix):
        E0 = E0.coeff(0)
    K = _order(args, conn)
    rep.body["order"] = K
    rep.body["convention"] = conn.describe_convention()
    E, report = extend_endomorphism(conn, E0, K)
    rep.body["status"] = report.summary()
    rep.body["events"] = [
        {"order": ev.order, "kind": ev.kind, "kernel_dimension": ev.kernel_dim,
         **({"obstruction": _matrix_yaml(ev.obstruction)} if ev.obstruction is not None else {}),
         "kernel_basis": [_matrix_yaml(b) for b in ev.kernel_basis]}
        for ev in report.events
    ]
    rep.body["series"] = _series_entries(E)
    rep.verdict("extension", report.status != "obstructed", report.summary())


def _load_series_for_verify(args, rep):
    if args.series:
        K = args.order if args.order is not None else DEFAULT_ORDER
        return {args.series: reference_series(args.series, K)}
    path = resolve_path(args.matrix)
    rep.add_input(path)
    m = fileio.load_matrix(path)
    if not isinstance(m, SeriesMatrix):
        m = SeriesMatrix.constant(m, 0)
    if args.order is not None:
        m = m.truncate(args.order)
    return {f"E_{i + 1}{j + 1}": m.entry(i, j) for i in range(m.size) for j in range(m.size)}


def cmd_verify(args, rep: RunReport) -> None:
    ctx = PrimeContext(args.prime)
    series = _load_series_for_verify(args, rep)
    alpha = parse_scalar(args.alpha)
    beta = parse_scalar(args.beta)
    rep.body["prime"] = ctx.p
    rep.body["order"] = next(iter(series.values())).order
    rep.body["alpha"], rep.body["beta"] = format_scalar(alpha), format_scalar(beta)
    details = {}
    decay_ok, slope_ok = True, True
    for tag, s in series.items():
        if s.is_zero():
            continue
        cert = check_log_decay(s, ctx, alpha, beta)
        np_rep = newton_polygon(s, ctx)
        entry = {
            "log_decay": cert.verdict,
            "newton_hull": [list(pt) for pt in np_rep.hull],
            "min_slope_tail": None if np_rep.min_slope_tail is None else format_scalar(np_rep.min_slope_tail),
        }
        decay_ok &= cert.passed
        try:
            deg = mod_p_reduction_degree(s, ctx)
            entry["mod_p_degree"] = "exceeds window" if deg is None else deg
        except QsplitError:
            entry["mod_p_degree"] = "not p-integral"
        if args.slope is not None:
            sv = slope_floor(s, ctx, args.k_min, parse_scalar(args.gamma), parse_scalar(args.slope))
            entry["slope_floor"] = sv.verdict
            slope_ok &= sv.passed
        details[tag] = entry
    rep.body["series"] = details
    rep.verdict("log_decay", decay_ok)
    if args.slope is not None:
        rep.verdict("slope_floor", slope_ok)
    _emit_plots(rep, args, series, ctx.p)


def _degrees(spec: str) -> List[int]:
    try:
        if ":" in spec:
            lo, hi = spec.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in spec.split(",")]
    except ValueError:
        raise InputError(f"bad degree range {spec!r}; use LO:HI or a comma list") from None


def cmd_bgamma(args, rep: RunReport) -> None:
    p, m = args.p, args.m
    PrimeContext(p)
    rep.body["p"], rep.body["m"] = p, m
    if args.action == "cohomology":
        mods = bgamma_cohomology(p, m, _degrees(args.degrees))
        rep.body["cohomology"] = {mod.degree: str(mod) for mod in mods}
    elif args.action == "cup":
        a = BGammaCochain.generator(p, m, args.a)
        b = BGammaCochain.generator(p, m, args.b)
        c = bgamma_cup(a, b)
        rep.body["product"] = {deg: x for deg, x in sorted(c.coeffs.items())}
        rep.body["product_mod_p^m"] = {deg: x for deg, x in sorted(c.reduced(p**m).items())}
        rep.body["theta_square_coefficient"] = theta_square_coefficient(p, m)
    elif args.action == "restrict":
        levels = args.levels
        c = bgamma_restrict(BGammaCochain.generator(p, m, args.degree), levels)
        rep.body["target_m"] = m - levels
        rep.body["image_cochain"] = dict(sorted(c.coeffs.items()))
        if args.degree > 0 and args.degree % 2 == 0:
            rep.body["on_cohomology"] = {
                x: restrict_on_cohomology(p, m, args.degree, x, levels) for x in range(p**m)}
            ok = all(v == x % p ** (m - levels) for x, v in rep.body["on_cohomology"].items())
            rep.verdict("quotient_map", ok)
    elif args.action == "tower":
        tower = inverse_limit_tower(p, args.degree, range(1, m + 1))
        rep.body["tower"] = tower.describe()
        rep.verdict("compatible", tower.maps_verified)


def cmd_diag_class(args, rep: RunReport) -> None:
    path = resolve_path(args.complex)
    rep.add_input(path)
    cf = fileio.load_complex(path)
    if cf.cocycle is None:
        raise InputError(f"{path}: complex file has no cocycle entry")
    q, b = cf.cocycle
    p, m = args.p, args.m
    PrimeContext(p)
    rng = random.Random(args.seed)
    TC, base_class = tensor_power_class(cf.base, q, b, p, m)
    V = TC.complex
    rep.body.update({"p": p, "m": m, "cocycle_degree": q, "trials": args.trials, "seed": args.seed,
                     "tensor_dimension": sum(V.dims.values())})
    rep.verdict("equivariant_complex", not V.check())
    rep.verdict("cocycle", is_cocycle(V, base_class))
    failures = 0
    n_beta = cf.base.dim(q - 1)
    for _ in range(args.trials):
        beta = [rng.randint(-4, 4) for _ in range(n_beta)]
        db = cf.base.apply_d(q - 1, beta) if n_beta else [0] * len(b)
        _, other = tensor_power_class(cf.base, q, [x + y for x, y in zip(b, db)], p, m, TC)
        if not cohomologous(V, base_class, other):
            failures += 1
    rep.body["non_cohomologous"] = failures
    rep.verdict("class_invariance", failures == 0, f"{failures} of {args.trials}")


def cmd_reference(args, rep: RunReport) -> None:
    s = reference_series(args.name, args.order)
    rep.body["name"] = args.name
    rep.body["order"] = args.order
    rep.body["coefficients"] = s.to_strings()


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--timing", action="store_true", help="append wall-clock time to the report")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="qsplit", description="Exact splittings of formal connections and p-adic checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ring = sub.add_parser("ring", parents=[common], help="ring file operations")
    ring_sub = ring.add_subparsers(dest="action", required=True, parser_class=_Parser)
    rv = ring_sub.add_parser("validate", parents=[common])
    rv.add_argument("file")
    rv.set_defaults(func=cmd_ring)

    conn = sub.add_parser("conn", parents=[common], help="connection construction")
    conn_sub = conn.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cb = conn_sub.add_parser("build", parents=[common])
    cb.add_argument("file")
    cb.add_argument("--degree", type=int, required=True)
    cb.add_argument("--order", type=int, default=DEFAULT_ORDER, help="truncation stored in the written file")
    cb.add_argument("--write", help="write the connection file here")
    cb.set_defaults(func=cmd_conn)

    sp = sub.add_parser("split", parents=[common], help="eigenvalue splitting of a connection")
    sp.add_argument("--conn", required=True)
    sp.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    sp.add_argument("--order", type=int)
    sp.add_argument("--alpha")
    sp.add_argument("--beta")
    sp.add_argument("--plots", help=f"directory for Newton polygon SVGs (default ${OUT_DIR_ENV})")
    sp.set_defaults(func=cmd_split)

    ex = sub.add_parser("extend", parents=[common], help="extend a constant endomorphism (simple pole)")
    ex.add_argument("--conn", required=True)
    ex.add_argument("--e0", required=True)
    ex.add_argument("--order", type=int)
    ex.set_defaults(func=cmd_extend)

    ve = sub.add_parser("verify", parents=[common], help="p-adic checks on a series or series matrix")
    src = ve.add_mutually_exclusive_group(required=True)
    src.add_argument("--series", choices=REFERENCE_NAMES)
    src.add_argument("--matrix")
    ve.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    ve.add_argument("--order", type=int)
    ve.add_argument("--alpha", default="1")
    ve.add_argument("--beta", default="1")
    ve.add_argument("--slope")
    ve.add_argument("--gamma", default="0")
    ve.add_argument("--k-min", type=int, default=0)
    ve.add_argument("--plots")
    ve.set_defaults(func=cmd_verify)

    bg = sub.add_parser("bgamma", parents=[common], help="cochains of B(Z/p^m)")
    bg_sub = bg.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("cohomology", "cup", "restrict", "tower"):
        b = bg_sub.add_parser(name, parents=[common])
        b.add_argument("--p", type=int, required=True)
        b.add_argument("--m", type=int, required=True)
        b.set_defaults(func=cmd_bgamma)
        if name == "cohomology":
            b.add_argument("--degrees", default="0:8")
        elif name == "cup":
            b.add_argument("--a", type=int, required=True, help="degree of the first generator")
            b.add_argument("--b", type=int, required=True, help="degree of the second generator")
        elif name == "restrict":
            b.add_argument("--degree", type=int, required=True)
            b.add_argument("--levels", type=int, default=1)
        else:
            b.add_argument("--degree", type=int, required=True)

    dc = sub.add_parser("diag-class", parents=[common], help="invariance of tensor-power classes")
    dc.add_argument("--complex", required=True)
    dc.add_argument("--p", type=int, required=True)
    dc.add_argument("--m", type=int, required=True)
    dc.add_argument("--trials", type=int, default=50)
    dc.add_argument("--seed", type=int, default=0)
    dc.set_defaults(func=cmd_diag_class)

    rf = sub.add_parser("reference", parents=[common], help="closed-form example series")
    rf.add_argument("name", choices=REFERENCE_NAMES)
    rf.add_argument("--order", type=int, default=DEFAULT_ORDER)
    rf.set_defaults(func=cmd_reference)
    return parser


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None):
    """Run one command; returns ``(exit code, RunReport or None)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 1, None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=stderr)
    rep = RunReport(command=argv)
    start = time.perf_counter()
    try:
        args.func(args, rep)
    except (InputError, PreconditionViolated, ValueError) as exc:
        print(f"qsplit: error: {exc}", file=stderr)
        return 1, None
    except QsplitError as exc:
        rep.verdict("computation", False, f"{type(exc).__name__}: {exc}")
    if args.timing:
        rep.timing = time.perf_counter() - start
    text = rep.render()
    if args.out:
        fileio.write_text(args.out, text)
    else:
        stdout.write(text)
    return (0 if rep.passed else 2), rep


def main(argv: Optional[List[str]] = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
