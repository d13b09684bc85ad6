"""Command-line front end: deterministic kernel, solver, and geometry runs.

Subcommands: kernel-eval, kernel-verify, solve, mss-lambda0, bootstrap,
blowup.  A JSON config may supply any option (flags override it).  Reports
are pretty-printed JSON with sorted keys; array data goes to CSV.  Exit
codes: 0 success, 2 verification failure, 3 numerical divergence, 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import blowup as bl
from . import geometry as geo
from . import kernels as kr
from . import scaling as sc
from . import solver as sv
from .grids import GridFunction

EXIT_OK = 0
EXIT_VERIFY_FAIL = 2
EXIT_DIVERGED = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _write_json(path: Path, obj: dict) -> None:
    obj = dict(obj)
    obj["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def _load_domain(spec: str | dict) -> geo.Domain:
    if isinstance(spec, dict):
        return geo.domain_from_json(spec)
    p = Path(spec)
    try:
        obj = json.loads(p.read_text()) if p.exists() else json.loads(spec)
    except (json.JSONDecodeError, OSError) as exc:
        raise UsageError(f"cannot parse domain spec {spec!r}: {exc}") from exc
    return geo.domain_from_json(obj)


def _merge_config(args: argparse.Namespace, parser_defaults: dict) -> None:
    """Fill options from --config JSON wherever the flag kept its default."""
    if not getattr(args, "config", None):
        return
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad config file: {exc}") from exc
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) == parser_defaults.get(attr):
            setattr(args, attr, value)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_kernel_eval(args) -> int:
    dom = _load_domain(args.domain)
    kernel = kr.green_for(dom, args.s)
    rng = np.random.default_rng(args.seed)
    n = dom.dim
    P = kr._center_of(dom)
    scale = kr._domain_scale(dom)
    dirs = kr._interior_directions(dom, args.points, rng)
    if isinstance(dom, geo.ExteriorBallK):
        radii = scale * (1.0 + rng.uniform(0.05, 2.0, (2, args.points)))
    elif isinstance(dom, (geo.Ball, geo.BallK, geo.Interval)):
        radii = scale * rng.uniform(0.05, 0.95, (2, args.points))
    else:
        radii = scale * rng.uniform(0.05, 3.0, (2, args.points))
    x = P + radii[0][:, None] * dirs
    y = P + radii[1][:, None] * kr._interior_directions(dom, args.points, rng)
    g = kernel.eval(x, y, validate=False)
    out = _outdir(args)
    header = [f"x{i+1}" for i in range(n)] + [f"y{i+1}" for i in range(n)] + ["G"]
    _write_csv(out / "kernel_values.csv", header,
               np.column_stack([x, y, g]))
    _write_json(out / "report.json",
                {"command": "kernel-eval", "domain": dom.to_json(), "s": args.s,
                 "points": args.points, "seed": args.seed,
                 "min_G": float(np.min(g)), "max_G": float(np.max(g))})
    return EXIT_OK


def _cmd_kernel_verify(args) -> int:
    dom = _load_domain(args.domain)
    kernel = kr.green_for(dom, args.s)
    report = kr.verify_hypotheses(kernel, args.which, samples=args.samples,
                                  seed=args.seed, expect_theta=args.expect_theta,
                                  theta_tol=args.theta_tol)
    out = _outdir(args)
    _write_json(out / "report.json",
                {"command": "kernel-verify", "domain": dom.to_json(),
                 "s": args.s, "samples": args.samples, "seed": args.seed,
                 **report.to_json()})
    print(f"{args.which}: pass={report.passed} min_margin={report.min_margin:.3e}"
          + (f" theta_fit={report.theta_fit:.4f}" if report.theta_fit is not None else ""))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def _cmd_solve(args) -> int:
    dom = _load_domain(args.domain)
    if not isinstance(dom, geo.Ball):
        raise UsageError("solve currently expects a ball domain")
    kernel = kr.green_for(dom, args.s)
    nonlin = sv.PowerNonlinearity(a=args.a, p=args.p, t=args.t,
                                  center=tuple(dom.center))
    radii = np.linspace(0.0, dom.radius, args.nodes)
    initial = sv.torsion_profile(dom, radii)
    initial = initial.with_values(2.0 * initial.values + args.t)
    cfg = sv.SolverConfig(max_iters=args.max_iters, damping=args.damping,
                          residual_tol=args.tol)
    rule = sv.quadrature_for(dom, args.order)
    result = sv.picard_solve(kernel, nonlin, cfg, initial, rule, scheme=args.scheme)
    rho = sv.lower_bound_rho(dom.dim, args.s, args.p, 2.0 * dom.radius) if args.p > 1 else None
    out = _outdir(args)
    rs = np.linalg.norm(result.solution.nodes - dom.center, axis=1)
    _write_csv(out / "solution.csv", ["r", "u"],
               np.column_stack([rs, result.solution.values]))
    _write_json(out / "report.json",
                {"command": "solve", "domain": dom.to_json(),
                 "p": args.p, "a": args.a, "t": args.t, "s": args.s,
                 "rho_bound": rho, **result.report()})
    print(f"solve: converged={result.converged} sup_norm={result.solution.sup_norm:.6f} "
          f"residual={result.residuals[-1]:.3e} iters={result.iterations}")
    if result.diverged:
        return EXIT_DIVERGED
    return EXIT_OK if result.converged else EXIT_VERIFY_FAIL


def _profile_field(name: str, n: int, s: float) -> GridFunction:
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((400, n))
    pts *= (0.05 + 2.5 * rng.random((400, 1))) / np.linalg.norm(pts, axis=1, keepdims=True)
    if name == "gaussian":
        def f(q):
            return np.exp(-np.sum(np.atleast_2d(q) ** 2, axis=1))
    elif name == "invariant":
        expo = (n - 2.0 * s) / 2.0

        def f(q):
            return np.linalg.norm(np.atleast_2d(q), axis=1) ** (-expo)
    else:
        raise UsageError(f"unknown profile {name!r}")
    return GridFunction.from_function(f, pts)


def _cmd_mss_lambda0(args) -> int:
    u = _profile_field(args.profile, args.n, args.s)
    grid = np.linspace(args.grid_start, args.grid_stop, args.grid_num)
    res = sc.find_lambda0(u, np.zeros(args.n), args.s, args.direction, grid)
    out = _outdir(args)
    _write_json(out / "report.json",
                {"command": "mss-lambda0", "profile": args.profile,
                 "n": args.n, "s": args.s, "direction": args.direction,
                 **res.to_json()})
    print(f"lambda0={res.lambda0:.6g} exhausted={res.exhausted}")
    return EXIT_OK


def _cmd_bootstrap(args) -> int:
    params = sc.ExponentParams(args.n, args.s, args.a, args.p)
    run = sc.bootstrap(params, args.mu0, args.direction, args.k)
    out = _outdir(args)
    _write_json(out / "report.json",
                {"command": "bootstrap", "n": args.n, "s": args.s, "a": args.a,
                 "p": args.p, "p_critical": (None if np.isinf(sc.p_critical(args.n, args.s, args.a))
                                             else sc.p_critical(args.n, args.s, args.a)),
                 **run.to_json()})
    print(f"verdict={run.verdict} mu_last={run.sequence[-1]:.6g}")
    return EXIT_OK


def _cmd_blowup(args) -> int:
    dom = _load_domain(args.domain)
    if not isinstance(dom, geo.Polygon2D):
        raise UsageError("blowup expects a polygon2d domain")
    anchor = [float(v) for v in args.anchor.split(",")]
    rhos = [float(v) for v in args.rho.split(",")]
    reports = bl.bcb_check(dom, anchor, rhos, grid_n=args.grid_n, method=args.method)
    out = _outdir(args)
    _write_json(out / "report.json",
                {"command": "blowup", "domain": dom.to_json(), "anchor": anchor,
                 "results": [r.to_json() for r in reports]})
    for r in reports:
        print(f"rho={r.rho:g} hausdorff={r.hausdorff:.6g} angle={r.cone_angle:.6f}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    p = _Parser(prog="conekit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--config", default=None, help="JSON config; flags override")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", default=".", help="output directory")
        q.add_argument("--format", choices=["json", "csv"], default="json")

    q = sub.add_parser("kernel-eval", help="tabulate a Green kernel at random pairs")
    common(q)
    q.add_argument("--domain", required=True)
    q.add_argument("--s", type=float, default=1.0)
    q.add_argument("--points", type=int, default=100)
    q.set_defaults(fn=_cmd_kernel_eval)

    q = sub.add_parser("kernel-verify", help="audit kernel hypotheses")
    common(q)
    q.add_argument("--domain", required=True)
    q.add_argument("--which", required=True,
                   choices=["H1", "H2", "H2t", "H3", "H3t"])
    q.add_argument("--s", type=float, default=1.0)
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--expect-theta", type=float, default=None)
    q.add_argument("--theta-tol", type=float, default=0.05)
    q.set_defaults(fn=_cmd_kernel_verify)

    q = sub.add_parser("solve", help="positive fixed point on a ball")
    common(q)
    q.add_argument("--domain", required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--a", type=float, default=0.0)
    q.add_argument("--t", type=float, default=0.0)
    q.add_argument("--s", type=float, default=1.0)
    q.add_argument("--nodes", type=int, default=65)
    q.add_argument("--order", type=int, default=16)
    q.add_argument("--max-iters", type=int, default=500)
    q.add_argument("--damping", type=float, default=1.0)
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--scheme", choices=["auto", "damped", "normalized"], default="auto")
    q.set_defaults(fn=_cmd_solve)

    q = sub.add_parser("mss-lambda0", help="critical comparison radius sweep")
    common(q)
    q.add_argument("--profile", choices=["gaussian", "invariant"], default="gaussian")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--s", type=float, default=1.0)
    q.add_argument("--direction", choices=["dilate", "shrink"], default="dilate")
    q.add_argument("--grid-start", type=float, default=0.1)
    q.add_argument("--grid-stop", type=float, default=3.0)
    q.add_argument("--grid-num", type=int, default=30)
    q.set_defaults(fn=_cmd_mss_lambda0)

    q = sub.add_parser("bootstrap", help="exponent recurrence classification")
    common(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--s", type=float, required=True)
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--k", type=int, default=50)
    q.add_argument("--mu0", type=float, default=None,
                   help="default -(n-2s)/2")
    q.add_argument("--direction", default=sc.DILATE_OUTWARD,
                   choices=[sc.DILATE_OUTWARD, sc.DILATE_FUNDAMENTAL, sc.SHRINK_INWARD])
    q.set_defaults(fn=_cmd_bootstrap)

    q = sub.add_parser("blowup", help="zoom a polygon toward its limit cone")
    common(q)
    q.add_argument("--domain", required=True)
    q.add_argument("--anchor", required=True, help="x,y boundary point")
    q.add_argument("--rho", required=True, help="comma-separated scales")
    q.add_argument("--grid-n", type=int, default=100)
    q.add_argument("--method", choices=["grid", "exact"], default="grid")
    q.set_defaults(fn=_cmd_blowup)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        defaults = {a.dest: a.default for g in parser._subparsers._group_actions
                    for a in g.choices[args.command]._actions}
        _merge_config(args, defaults)
        if args.command == "bootstrap" and args.mu0 is None:
            args.mu0 = -(args.n - 2.0 * args.s) / 2.0
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
