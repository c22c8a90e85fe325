"""Command-line front end.

Subcommands wrap the library layers one-to-one: ``dimnum`` (dimensional
numbers), ``dioph`` and ``tori`` (dimension formulas over an accumulation
set), ``boxcount`` / ``fullmeasure`` (independent numerical checks) and
``cantor`` (the finite-depth construction and its audit).  Reports go to
--out as JSON plus CSV, with matplotlib figures next to them under --plot.

Exit codes: 0 pass, 1 usage error, 2 computation error, 3 a requested
tolerance check failed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction

from .dimnum import LevelSpec, s0, s0_bruteforce, s0_resonant, s_at
from .dioph import DiophInstance, dim_W, zeta_rows
from .extreal import ext
from .psi import ExponentVector, LimitMode, PsiParseError, parse_psi
from .report import config_echo, save_plot, write_csv, write_json
from .tori import TorusSystem, dim_torus, xi_rows
from .verify import (
    BoxCountConfig,
    FullMeasureConfig,
    boxcount_dimension,
    cover_exponent,
    lemma_full_measure,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2
EXIT_CHECK = 3


class UsageError(ValueError):
    pass


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}: {exc}") from None


def _parse_ext_list(text: str) -> tuple:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(ext(tok))
        except ValueError as exc:
            raise UsageError(f"bad entry {tok!r} in {text!r}: {exc}") from None
    return tuple(out)


def _parse_U(text: str) -> ExponentVector:
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise UsageError(f"accumulation points look like '(2,inf)', got {text!r}")
    return ExponentVector.of(_parse_ext_list(t[1:-1]))


def _families(specs: list[str]):
    try:
        return [parse_psi(s) for s in specs]
    except PsiParseError as exc:
        raise UsageError(str(exc)) from None


def _U_from_psi(specs: list[str], mode: LimitMode, grid: int):
    """Accumulation set from per-coordinate families.

    With any interval hull in play the product grid is a conservative
    superset of the true joint accumulation set; the caller prints the
    caveat.
    """
    fams = _families(specs)
    per_coord = [f.exponent_limit(mode).grid(grid) for f in fams]
    hull = any(f.exponent_limit(mode).interval for f in fams)
    pts = [()]
    for coord in per_coord:
        pts = [prev + (x,) for prev in pts for x in coord]
    return [ExponentVector.of(p) for p in pts], hull


def _out_path(args, name: str) -> str:
    return os.path.join(args.out, name)


def _emit(args, payload: dict) -> None:
    if args.json:
        import json

        print(json.dumps(payload, indent=2, sort_keys=True, default=str))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_dimnum(args) -> int:
    delta = _parse_floats(args.delta)
    u = _parse_floats(args.u)
    v = _parse_ext_list(args.v)
    try:
        spec = LevelSpec.of(delta, u, v)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    levels = sorted({ext(x) for x in u} | set(v))
    rows = []
    for A in levels:
        rows.append({"A": repr(A), "s_at": s_at(spec, A)})
    value = s0(spec)
    oracle = s0_bruteforce(spec)
    payload = {
        "echo": config_echo("dimnum", args._argv, args.seed),
        "levels": rows,
        "s0": value,
        "s0_bruteforce": oracle,
    }
    if args.kappa is not None:
        payload["s0_resonant"] = s0_resonant(spec, args.kappa)
        print(f"s0_resonant(kappa={args.kappa}) = {payload['s0_resonant']:.12g}")
    for row in rows:
        print(f"  s(u,v,A={row['A']}) = {row['s_at']:.12g}")
    print(f"s0 = {value:.12g}   (oracle {oracle:.12g})")
    write_csv(_out_path(args, "dimnum_levels.csv"), rows)
    write_json(_out_path(args, "dimnum_report.json"), payload)
    if args.plot:
        xs = [float(ext(r["A"])) if r["A"] != "inf" else None for r in rows]
        finite = [(x, r["s_at"]) for x, r in zip(xs, rows) if x is not None]

        def draw(ax):
            if finite:
                ax.plot(*zip(*finite), "o-", label="s(u,v,A)")
            ax.axhline(value, color="r", ls="--", label=f"s0 = {value:.4g}")
            ax.set_xlabel("cut level A")
            ax.set_ylabel("s(u, v, A)")
            ax.legend()

        save_plot(_out_path(args, "dimnum_levels.png"), draw, "dimensional number")
    _emit(args, payload)
    return EXIT_OK


def _resolve_U(args, mode: LimitMode):
    caveat = None
    if args.U:
        U = [_parse_U(u) for u in args.U]
        caveat = (
            "accumulation set supplied directly; the non-increasing psi "
            "hypothesis behind the formula is not checkable here"
        )
    elif args.psi:
        U, hull = _U_from_psi(args.psi, mode, args.grid)
        if hull:
            caveat = (
                "interval hull sampled on a product grid: a conservative "
                "superset of the true joint accumulation set"
            )
    else:
        raise UsageError("need --U or --psi")
    return U, caveat


def cmd_dioph(args) -> int:
    U, caveat = _resolve_U(args, LimitMode.LOG_N)
    d = args.d or U[0].d
    inst = DiophInstance(d=d, U=tuple(U))
    value = dim_W(inst)
    rows = zeta_rows(inst)
    if caveat:
        print(f"note: {caveat}")
    print(f"dim W_{d}(Psi) = {value:.12g}  over {len(U)} accumulation point(s)")
    payload = {
        "echo": config_echo("dioph", args._argv, args.seed),
        "dimension": value,
        "caveat": caveat,
        "n_points": len(U),
    }
    write_csv(_out_path(args, "dioph_zeta.csv"), rows)
    write_json(_out_path(args, "dioph_report.json"), payload)
    if args.plot:
        inner = [r["inner_min"] for r in rows]

        def draw(ax):
            ax.plot(range(1, len(inner) + 1), inner, "o")
            ax.axhline(value, color="r", ls="--", label=f"sup = {value:.4g}")
            ax.set_xlabel("accumulation point index")
            ax.set_ylabel("inner min")
            ax.legend()

        save_plot(_out_path(args, "dioph_innermin.png"), draw, "sup-min evaluation")
    _emit(args, payload)
    return _check(args, value)


def cmd_tori(args) -> int:
    beta = _parse_floats(args.beta)
    try:
        sysm = TorusSystem(tuple(beta))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    U, caveat = _resolve_U(args, LimitMode.LINEAR)
    value = dim_torus(sysm, U)
    rows = xi_rows(sysm, U)
    if caveat:
        print(f"note: {caveat}")
    print(f"dim W(T, Psi, z) = {value:.12g}  (beta = {beta})")
    payload = {
        "echo": config_echo("tori", args._argv, args.seed),
        "dimension": value,
        "beta": list(beta),
        "caveat": caveat,
    }
    write_csv(_out_path(args, "tori_xi.csv"), rows)
    write_json(_out_path(args, "tori_report.json"), payload)
    _emit(args, payload)
    return _check(args, value)


def cmd_boxcount(args) -> int:
    fams = _families(args.psi)
    cfg = BoxCountConfig(
        psi=tuple(fams),
        Q0=args.Q0,
        Q=args.Q,
        m_min=args.m_min,
        m_max=args.m_max,
        fit_window=args.fit_window,
        mode=args.mode,
        window_factor=args.window_factor,
        cell_budget=args.cell_budget,
    )
    res = boxcount_dimension(cfg)
    print(f"boxcount[{args.mode}] estimate = {res.estimate:.4f}")
    cov = None
    if args.cover:
        cov = cover_exponent(cfg)
        print(f"cover exponent (heuristic upper-bound indicator) = {cov:.4f}")
    rows = [{"m": m, "N": n} for m, n in res.counts]
    write_csv(_out_path(args, "boxcount_counts.csv"), rows)
    payload = {
        "echo": config_echo("boxcount", args._argv, args.seed),
        "estimate": res.estimate,
        "cover_exponent": cov,
        "mode": args.mode,
        "counts": res.counts,
        "target": args.target,
        "tolerance": args.tol,
        "pass": (
            None
            if args.target is None
            else abs(res.estimate - args.target) <= args.tol
        ),
    }
    write_json(_out_path(args, "boxcount_report.json"), payload)
    if args.plot:

        def draw(ax):
            ms = [m for m, _ in res.counts]
            ys = [math.log2(n) for _, n in res.counts]
            ax.plot(ms, ys, "o", label="log2 N(m)")
            fit = [
                (m, y)
                for m, y in zip(ms, ys)
                if m in set(res.fit_ms)
            ]
            if len(fit) >= 2:
                x0, x1 = fit[0][0], fit[-1][0]
                y0 = fit[0][1]
                ax.plot(
                    [x0, x1],
                    [y0, y0 + res.estimate * (x1 - x0)],
                    "r--",
                    label=f"slope {res.estimate:.3f}",
                )
            ax.set_xlabel("m (grid 2^-m)")
            ax.set_ylabel("log2 N(m)")
            ax.legend()

        save_plot(_out_path(args, "boxcount_fit.png"), draw, "box-count scaling")
    _emit(args, payload)
    rc = _check(args, res.estimate)
    if rc == EXIT_OK and args.cover and args.target is not None and cov is not None:
        if abs(cov - args.target) > args.cover_tol:
            print(
                f"CHECK FAIL: cover exponent {cov:.4f} vs target "
                f"{args.target} +- {args.cover_tol}"
            )
            return EXIT_CHECK
    return rc


def cmd_fullmeasure(args) -> int:
    cfg = FullMeasureConfig(
        d=args.d,
        a=_parse_floats(args.a),
        q_ell=args.q,
        samples=args.samples,
        seed=args.seed,
        variant=args.variant,
        q_window=args.q_window,
    )
    res = lemma_full_measure(cfg)
    print(
        f"hit fraction = {res.fraction:.4f}  "
        f"(99% CI [{res.ci_low:.4f}, {res.ci_high:.4f}], {res.samples} samples)"
    )
    payload = {"echo": config_echo("fullmeasure", args._argv, args.seed)}
    payload.update(res.as_dict())
    payload["pass"] = (
        None if args.min_fraction is None else res.fraction >= args.min_fraction
    )
    write_json(_out_path(args, "fullmeasure_report.json"), payload)
    write_csv(
        _out_path(args, "fullmeasure_result.csv"),
        [res.as_dict()],
    )
    _emit(args, payload)
    if args.min_fraction is not None and res.fraction < args.min_fraction:
        print(f"CHECK FAIL: fraction {res.fraction} < {args.min_fraction}")
        return EXIT_CHECK
    return EXIT_OK


def cmd_cantor(args) -> int:
    from .cantor import build_levels, canonical_grid_system, holder_audit

    try:
        u_vals = _parse_floats(args.u)
        sysm = canonical_grid_system(
            p=len(u_vals),
            u=[Fraction(x).limit_denominator(64) for x in u_vals],
            v_lim=_parse_ext_list(args.v),
        )
    except (ValueError, OverflowError) as exc:
        raise UsageError(str(exc)) from None
    tree = build_levels(sysm, depth=args.depth, eps=args.eps)
    lvl_rows = []
    for rep in tree.reports:
        lvl_rows.append(
            {
                "level": rep.level,
                "G": rep.G,
                "scales": ";".join(map(str, rep.scales)),
                "groups": rep.n_groups,
                "balls": rep.n_balls,
                "mass": rep.mass,
                "eps_required": rep.eps_required,
                "eps_ok": rep.eps_ok,
                "min_packing": rep.min_packing,
                "min_coverage": rep.min_coverage,
            }
        )
        print(
            f"level {rep.level}: balls={rep.n_balls}  mass={rep.mass:.12f}  "
            f"packing>={rep.min_packing:.4f}  eps_req={rep.eps_required:.3f}"
        )
    from .cantor import validate_tree

    counters = validate_tree(tree)
    audit = holder_audit(tree, samples=args.audit_samples, seed=args.seed)
    print(
        f"audit: s0={audit.s0}  fitted slope={audit.fitted_slope:.4f}  "
        f"over 2^-[{audit.band_log2[1]}..{audit.band_log2[0]}]"
    )
    ball_rows = [
        {
            "center": ";".join(f"{c:.10g}" for c in center),
            "radius": radius,
            "weight": weight,
            "key": ";".join(map(str, key)),
            "parent": ";".join(f"{c:.10g}" for c in parent),
        }
        for center, radius, weight, key, parent in tree.iter_balls(
            args.depth, limit=args.dump_limit
        )
    ]
    write_csv(_out_path(args, "cantor_levels.csv"), lvl_rows)
    write_csv(_out_path(args, "cantor_balls.csv"), ball_rows)
    payload = {
        "echo": config_echo("cantor", args._argv, args.seed),
        "levels": lvl_rows,
        "structure_checks": counters,
        "audit": audit.as_dict(),
        "desk_scale_thresholds": {
            "note": "packing/coverage floors and the reported eps are "
            "engineering choices; see README",
        },
    }
    write_json(_out_path(args, "cantor_report.json"), payload)
    if args.plot:
        pts = [
            (center[0], center[1] if len(center) > 1 else 0.0)
            for center, *_rest in tree.iter_balls(min(2, args.depth), limit=4000)
        ]

        def draw(ax):
            if pts:
                ax.plot(*zip(*pts), ".", ms=2)
            ax.set_xlabel("x1")
            ax.set_ylabel("x2")

        save_plot(
            _out_path(args, "cantor_level2.png"), draw, "level-2 ball centers"
        )
    _emit(args, payload)
    if args.min_slope is not None and audit.fitted_slope < args.min_slope:
        print(f"CHECK FAIL: slope {audit.fitted_slope:.4f} < {args.min_slope}")
        return EXIT_CHECK
    return EXIT_OK


def _check(args, value: float) -> int:
    target = getattr(args, "target", None)
    if target is None:
        return EXIT_OK
    tol = getattr(args, "tol", 1e-9)
    if abs(value - target) > tol:
        print(f"CHECK FAIL: {value:.6g} vs target {target} +- {tol}")
        return EXIT_CHECK
    print(f"CHECK PASS: {value:.6g} within {tol} of {target}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sp) -> None:
    sp.add_argument("--out", default="out", help="output directory")
    sp.add_argument("--seed", type=int, default=20240601)
    sp.add_argument("--json", action="store_true", help="print the JSON report")
    sp.add_argument("--plot", action="store_true", help="render figures")
    sp.add_argument("--config", default=None, help="flat key=value config file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="limsupdim",
        description="dimension formulas for limsup sets of rectangles, "
        "with desk-scale verification",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("dimnum", help="dimensional numbers s(u,v,A), s0")
    p.add_argument("--delta", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True, help="comma list; 'inf' allowed")
    p.add_argument("--kappa", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_dimnum)

    p = sub.add_parser("dioph", help="dim W_d(Psi) via the sup-min formula")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--U", action="append", default=[], help="e.g. '(2,inf)'")
    p.add_argument("--psi", action="append", default=[], help="family specs")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--target", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(fn=cmd_dioph)

    p = sub.add_parser("tori", help="shrinking-target dimension for diag tori")
    p.add_argument("--beta", required=True)
    p.add_argument("--U", action="append", default=[])
    p.add_argument("--psi", action="append", default=[])
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--target", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    _add_common(p)
    p.set_defaults(fn=cmd_tori)

    p = sub.add_parser("boxcount", help="dyadic box-count estimate")
    p.add_argument("--psi", action="append", required=True)
    p.add_argument("--Q0", type=int, default=8)
    p.add_argument("--Q", type=int, default=4096)
    p.add_argument("--m-min", dest="m_min", type=int, required=True)
    p.add_argument("--m-max", dest="m_max", type=int, required=True)
    p.add_argument("--fit-window", dest="fit_window", type=int, default=4)
    p.add_argument("--mode", choices=["matched", "fixed"], default="matched")
    p.add_argument("--window-factor", dest="window_factor", type=float, default=2.0)
    p.add_argument("--cell-budget", dest="cell_budget", type=float, default=2e8)
    p.add_argument("--cover", action="store_true", help="also bisect the cover exponent")
    p.add_argument("--target", type=float, default=None)
    p.add_argument("--tol", type=float, default=0.1)
    p.add_argument("--cover-tol", dest="cover_tol", type=float, default=0.05)
    _add_common(p)
    p.set_defaults(fn=cmd_boxcount)

    p = sub.add_parser("fullmeasure", help="Monte-Carlo window coverage")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--variant", choices=["union", "sharp"], default="union")
    p.add_argument(
        "--q-window", dest="q_window", choices=["main", "low"], default="main"
    )
    p.add_argument("--min-fraction", dest="min_fraction", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_fullmeasure)

    p = sub.add_parser("cantor", help="finite-depth construction + audit")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--u", default="1.5,1.5")
    p.add_argument("--v", default="3,4")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--audit-samples", dest="audit_samples", type=int, default=10_000)
    p.add_argument("--dump-limit", dest="dump_limit", type=int, default=1000)
    p.add_argument("--min-slope", dest="min_slope", type=float, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_cantor)

    return ap


def _apply_config_file(argv: list[str]) -> list[str]:
    """Expand --config FILE into flat --key value pairs (flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    extra: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {line!r}")
            key, val = line.split("=", 1)
            extra.extend([f"--{key.strip()}", val.strip()])
    # inject after the subcommand so explicit flags override
    return argv[:1] + extra + argv[1:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
        ap = build_parser()
        args = ap.parse_args(argv)
        args._argv = argv
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse's own usage handling
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # computation failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
