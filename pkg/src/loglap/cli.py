"""Command-line surface: constants, kernel diagnostics, pointwise operator
evaluation, energy breakdowns, named verification suites, eigen solves and
mesh/parameter studies, with machine-readable JSON/CSV output.

Exit codes: 0 all assertions passed, 1 an assertion failed (the report is
still written), 2 usage or configuration error.  Given the same flags,
config file and seed, the emitted JSON is byte-identical up to the timestamp
field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import forms, grid, operator
from .eigen import EigenConfig, log_estimate_check, minimize_first, verify_eigen_properties
from .grid import CacheMismatchError, TableSet, build_grid, load_weights, save_weights
from .kernel import KernelSpec, annulus_integral, commutator_residual, kernel_full, kernel_parts
from .specfun import Params, b_sign_threshold, classical_const

VERIFY_SUITES = (
    "form-bounds",
    "poincare",
    "hardy",
    "sobolev",
    "gn",
    "holder",
    "diaz-saa",
    "picone",
    "pohozaev-defect",
)

STUDIES = ("eigen-mesh", "b-curve", "small-s")

TEST_FUNCTIONS = {
    "gaussian": operator.gaussian,
    "bump": operator.bump,
    "odd": operator.odd_gaussian,
    "zero": operator.zero_function,
}


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, default=1, help="space dimension")
    p.add_argument("--s", type=float, default=0.5, help="order in (0, 1)")
    p.add_argument("--p", type=float, default=2.0, help="exponent in (1, inf)")


def _add_domain(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shape", default="interval", choices=("interval", "box", "disc"))
    p.add_argument("--box", default="0,0.3", help="comma-separated shape box values")
    p.add_argument("--h", type=float, default=0.003, help="cell size")


def _add_io(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", default="json", choices=("json", "csv"))
    p.add_argument("--output", default="-", help="output path, '-' for stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker cap (default LOGLAP_THREADS)")
    p.add_argument("--config", default=None, help="JSON file of default option values")
    p.add_argument("--cache", default=None, help="weight-table cache path prefix")
    p.add_argument("--paper-thresholds", action="store_true",
                   help="report the geometric thresholds next to the domain diameter")


def _build_parser() -> tuple:
    ap = argparse.ArgumentParser(prog="loglap", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    children = []

    def add_parser(name, **kw):
        p = sub.add_parser(name, **kw)
        children.append(p)
        return p

    p = add_parser("constants", help="emit every derived constant")
    _add_params(p)
    _add_io(p)

    p = add_parser("kernel", help="tabulate the kernel, its parts and the commutator residual")
    _add_params(p)
    _add_io(p)
    p.add_argument("--r-min", type=float, default=1e-4)
    p.add_argument("--r-max", type=float, default=1e2)
    p.add_argument("--n-r", type=int, default=200)

    p = add_parser("op", help="evaluate the pointwise operators / run order studies")
    _add_params(p)
    _add_io(p)
    p.add_argument("--func", default="gaussian", choices=sorted(TEST_FUNCTIONS))
    p.add_argument("--points", default="0", help="evaluation points, ';' between points, ',' between coords")
    p.add_argument("--which", default="all", choices=("frac", "log", "zero", "all"))
    p.add_argument("--study", default=None, choices=("derivative", "small-s"))
    p.add_argument("--h-list", default="1e-2,5e-3,2.5e-3")
    p.add_argument("--s-list", default="0.2,0.1,0.05,0.02")
    p.add_argument("--quad-tol", type=float, default=1e-6)

    p = add_parser("energy", help="energy breakdown of a sampled grid function")
    _add_params(p)
    _add_domain(p)
    _add_io(p)
    p.add_argument("--source", default="random", choices=("random", "tent", "zero"))

    p = add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", nargs="?", choices=VERIFY_SUITES)
    p.add_argument("--list", action="store_true", help="list the suite names")
    _add_params(p)
    _add_domain(p)
    _add_io(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--q", type=float, default=None, help="Lebesgue exponent for the gn suite")
    p.add_argument("--r-power", type=float, default=None, help="power r for the diaz-saa suite")

    p = add_parser("eigen", help="first-eigenvalue solve plus property verification")
    _add_params(p)
    _add_domain(p)
    _add_io(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--log-estimate", action="store_true",
                   help="also run the interior logarithmic oscillation estimate")

    p = add_parser("study", help="mesh/parameter sweeps emitting CSV")
    p.add_argument("study", choices=STUDIES)
    _add_params(p)
    _add_domain(p)
    _add_io(p)
    p.add_argument("--h-list", default="0.006,0.003,0.0015")
    p.add_argument("--s-list", default="0.2,0.1,0.05,0.02")
    p.add_argument("--func", default="gaussian", choices=sorted(TEST_FUNCTIONS))
    p.add_argument("--points", default="0;0.5;1")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--max-iter", type=int, default=20000)

    return ap, children


def _parse_box(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ValueError(f"invalid --box value {text!r}: {exc}") from None


def _parse_points(text: str, N: int) -> list:
    pts = []
    for chunk in text.split(";"):
        coords = [float(v) for v in chunk.split(",")]
        if len(coords) != N:
            raise ValueError(f"point {chunk!r} has {len(coords)} coordinates, expected {N}")
        pts.append(np.array(coords))
    return pts


def _floats(text: str) -> list:
    return [float(v) for v in text.split(",")]


def _thresholds(params: Params, diam: float | None) -> dict:
    out = {
        "contractive_diam_threshold": params.positivity_threshold,
        "kernel_sign_change_radius": params.sign_change_radius,
        "b_zero_order_threshold": b_sign_threshold(params.N, params.p),
    }
    if diam is not None:
        out["domain_diam"] = diam
    return out


def _emit(payload, args) -> None:
    if args.format == "csv" and isinstance(payload, dict) and "csv_rows" in payload:
        text = _render_csv(payload["csv_header"], payload["csv_rows"])
    elif args.format == "csv":
        raise ValueError("this subcommand only emits CSV for tabular studies; use --format json")
    else:
        body = dict(payload)
        body.pop("csv_header", None)
        body.pop("csv_rows", None)
        body["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
        text = json.dumps(body, sort_keys=True, indent=1, default=_json_default) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def _render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _tables_with_cache(domain, params, args) -> TableSet:
    workers = args.threads
    if args.cache is None:
        return TableSet.assemble(domain, params, n_workers=workers)
    tables = {}
    for part in grid.KERNEL_PARTS:
        path = f"{args.cache}.{part}.bin"
        if os.path.exists(path):
            tables[part] = load_weights(path, domain, params, part)
        else:
            tables[part] = grid.assemble_weights(domain, params, part, n_workers=workers)
            save_weights(tables[part], path)
    return TableSet(domain, params, tables)


# -- subcommand bodies ----------------------------------------------------------


def _cmd_constants(args) -> int:
    params = Params(args.N, args.s, args.p)
    c_np, rho_np = classical_const(args.N, args.p)
    payload = {
        "N": params.N,
        "s": params.s,
        "p": params.p,
        "C": params.C,
        "B": params.B,
        "omega_N": params.omega,
        "C_classical": c_np,
        "rho_classical": rho_np,
        "s0": b_sign_threshold(params.N, params.p),
        "r_star": params.sign_change_radius,
        "contractive_diam_threshold": params.positivity_threshold,
    }
    try:
        payload["p_star"] = params.p_star
    except ValueError:
        payload["p_star"] = None
    if args.paper_thresholds:
        payload["thresholds"] = _thresholds(params, None)
    _emit(payload, args)
    return 0


def _cmd_kernel(args) -> int:
    params = Params(args.N, args.s, args.p)
    spec = KernelSpec(params)
    r = np.logspace(math.log10(args.r_min), math.log10(args.r_max), args.n_r)
    k = kernel_full(spec, r)
    kp, km = kernel_parts(spec, r)
    resid = commutator_residual(spec, r)
    rows = [
        [float(a), float(b), float(c), float(d), float(e)]
        for a, b, c, d, e in zip(r, k, kp, km, resid)
    ]
    payload = {
        "r_star": spec.r_star,
        "annulus_log_tail_from_1": annulus_integral(spec, 1.0, math.inf, "log"),
        "max_abs_commutator_residual": float(np.max(np.abs(resid))),
        "csv_header": ["r", "K_full", "k_plus", "k_minus", "commutator_residual"],
        "csv_rows": rows,
        "rows": rows,
    }
    if args.paper_thresholds:
        payload["thresholds"] = _thresholds(params, None)
    _emit(payload, args)
    return 0


def _cmd_op(args) -> int:
    u = TEST_FUNCTIONS[args.func](args.N)
    pts = _parse_points(args.points, args.N)
    q = operator.QuadratureSpec(target_tol=args.quad_tol)
    payload: dict = {"func": args.func, "p": args.p}
    if args.study == "derivative":
        study = operator.derivative_consistency(
            u, pts[0], args.s, _floats(args.h_list), args.p, q
        )
        payload["derivative_study"] = study.as_dict()
        payload["csv_header"] = ["h", "fd_value", "direct_value", "abs_err"]
        payload["csv_rows"] = [[r.h, r.fd_value, r.direct_value, r.abs_err] for r in study.rows]
    elif args.study == "small-s":
        table = operator.small_s_limit_study(u, pts, _floats(args.s_list), args.p, q)
        payload["small_s_study"] = [{"s": s, "sup_err": e} for s, e in table]
        payload["csv_header"] = ["s", "sup_err"]
        payload["csv_rows"] = [list(row) for row in table]
    else:
        rows = []
        for pt in pts:
            entry = {"x": pt.tolist()}
            if args.which in ("frac", "all"):
                v = operator.eval_frac_plap(u, pt, args.s, args.p, q)
                entry["frac"] = {"value": v.value, "error": v.error}
            if args.which in ("log", "all"):
                v = operator.eval_log_plap(u, pt, args.s, args.p, q)
                entry["log"] = {"value": v.value, "error": v.error}
            if args.which in ("zero", "all"):
                v = operator.eval_log_plap_zero(u, pt, args.p, q)
                entry["zero"] = {"value": v.value, "error": v.error}
            rows.append(entry)
        payload["evaluations"] = rows
    _emit(payload, args)
    return 0


def _cmd_energy(args) -> int:
    params = Params(args.N, args.s, args.p)
    domain = build_grid(args.shape, _parse_box(args.box), args.h)
    tables = _tables_with_cache(domain, params, args)
    source = {"random": ("random", args.seed), "tent": "eigen-initial", "zero": lambda c: 0.0}[
        args.source
    ]
    u = grid.sample_function(domain, source)
    ebd = forms.energy(u, tables)
    payload = {
        "domain": domain.signature(),
        "source": args.source,
        "seed": args.seed,
        "Jplus": ebd.Jplus,
        "Jminus": ebd.Jminus,
        "Js": ebd.Js,
        "total": ebd.total,
        "slog_seminorm_p": ebd.slog_seminorm_p,
        "frac_seminorm_p": ebd.frac_seminorm_p,
    }
    if args.paper_thresholds:
        payload["thresholds"] = _thresholds(params, domain.diam)
    _emit(payload, args)
    return 0


def _cmd_verify(args) -> int:
    if args.list:
        _emit({"suites": list(VERIFY_SUITES)}, args)
        return 0
    if args.suite is None:
        raise ValueError("verify needs a suite name (or --list)")
    params = Params(args.N, args.s, args.p)
    domain = build_grid(args.shape, _parse_box(args.box), args.h)
    tables = _tables_with_cache(domain, params, args)
    n = args.samples

    if args.suite == "form-bounds":
        rep = forms.run_form_bounds_suite(domain, params, n, args.seed, tables)
    elif args.suite == "poincare":
        rep = forms.run_poincare_suite(domain, params, n, args.seed, tables)
    elif args.suite == "hardy":
        rep = forms.run_hardy_suite(domain, params, n, args.seed, tables)
    elif args.suite == "sobolev":
        rep = forms.run_sobolev_gn_suite(domain, params, "sobolev", None, n, args.seed, tables)
    elif args.suite == "gn":
        q = args.q if args.q is not None else 0.5 * (params.p + params.p_star)
        rep = forms.run_sobolev_gn_suite(domain, params, "gn", q, n, args.seed, tables)
    elif args.suite == "holder":
        rep = forms.run_sobolev_gn_suite(domain, params, "holder", None, n, args.seed, tables)
    elif args.suite == "diaz-saa":
        rep = forms.run_diaz_saa_suite(domain, params, min(n, 20), args.r_power, args.seed, tables)
    elif args.suite == "pohozaev-defect":
        rep = forms.run_pohozaev_suite(domain, params, min(n, 20), args.seed, tables)
    elif args.suite == "picone":
        config = EigenConfig(restarts=1, seed=args.seed)
        result = minimize_first(domain, params, config, tables)
        props = verify_eigen_properties(result, tables, seed=args.seed)
        rep = forms.CheckReport(
            check="picone",
            params={"N": params.N, "s": params.s, "p": params.p},
            domain=domain.signature(),
            n_samples=props["picone"]["n_pairs"],
            passed=props["picone"]["holds"],
            worst_margin=props["picone"]["min_margin"],
            details={"lambda": result.lam, "picone": props["picone"]},
        )
    payload = rep.to_dict()
    if args.paper_thresholds:
        payload["thresholds"] = _thresholds(params, domain.diam)
    _emit(payload, args)
    return 0 if rep.passed else 1


def _cmd_eigen(args) -> int:
    params = Params(args.N, args.s, args.p)
    domain = build_grid(args.shape, _parse_box(args.box), args.h)
    tables = _tables_with_cache(domain, params, args)
    config = EigenConfig(
        step=args.step,
        tol=args.tol,
        max_iter=args.max_iter,
        restarts=args.restarts,
        seed=args.seed,
    )
    result = minimize_first(domain, params, config, tables)
    props = verify_eigen_properties(result, tables, seed=args.seed)
    payload = {"result": result.to_dict(), "properties": props}
    if args.log_estimate:
        x0 = grid_center = np.mean(domain.centers, axis=0)
        r = domain.diam / 8.0
        payload["log_estimate"] = log_estimate_check(
            result, grid_center, r, 4.0 * r + 1e-12, 0.5, tables
        )
    if args.paper_thresholds:
        payload["thresholds"] = _thresholds(params, domain.diam)
    _emit(payload, args)
    return 0 if (props["holds"] and result.converged) else 1


def _cmd_study(args) -> int:
    params = Params(args.N, args.s, args.p)
    if args.study == "eigen-mesh":
        rows = []
        prev = None
        for h in _floats(args.h_list):
            domain = build_grid(args.shape, _parse_box(args.box), h)
            tables = TableSet.assemble(domain, params, n_workers=args.threads)
            config = EigenConfig(restarts=args.restarts, max_iter=args.max_iter, seed=args.seed)
            result = minimize_first(domain, params, config, tables)
            delta = math.nan if prev is None else abs(result.lam - prev)
            rows.append([h, domain.n_cells, result.lam, result.residual,
                         result.iterations, delta])
            prev = result.lam
        payload = {
            "csv_header": ["h", "n_cells", "lambda", "residual", "iterations", "abs_delta_lambda"],
            "csv_rows": rows,
            "rows": rows,
        }
    elif args.study == "b-curve":
        rows = []
        for s in _floats(args.s_list):
            prm = Params(args.N, s, args.p)
            rows.append([s, prm.B, prm.C, prm.sign_change_radius])
        payload = {"csv_header": ["s", "B", "C", "r_star"], "csv_rows": rows, "rows": rows}
    else:  # small-s
        u = TEST_FUNCTIONS[args.func](args.N)
        pts = _parse_points(args.points, args.N)
        table = operator.small_s_limit_study(u, pts, _floats(args.s_list), args.p)
        rows = [list(row) for row in table]
        payload = {"csv_header": ["s", "sup_err"], "csv_rows": rows, "rows": rows}
    _emit(payload, args)
    return 0


_COMMANDS = {
    "constants": _cmd_constants,
    "kernel": _cmd_kernel,
    "op": _cmd_op,
    "energy": _cmd_energy,
    "verify": _cmd_verify,
    "eigen": _cmd_eigen,
    "study": _cmd_study,
}


def run(argv=None) -> int:
    ap, children = _build_parser()
    try:
        # config file supplies defaults; explicit flags override them (the
        # defaults must land on the subparsers, which parse last)
        probe = argparse.ArgumentParser(add_help=False)
        probe.add_argument("--config", default=None)
        known, _ = probe.parse_known_args(argv)
        if known.config:
            with open(known.config) as fh:
                defaults = json.load(fh)
            if not isinstance(defaults, dict):
                raise ValueError("config file must hold a JSON object of option values")
            clean = {k.replace("-", "_"): v for k, v in defaults.items()}
            for parser in [ap, *children]:
                parser.set_defaults(**clean)
        args = ap.parse_args(argv)
        if args.threads is None:
            args.threads = grid.default_workers()
        return _COMMANDS[args.command](args)
    except (ValueError, CacheMismatchError, OSError, ArithmeticError) as exc:
        print(f"loglap: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
