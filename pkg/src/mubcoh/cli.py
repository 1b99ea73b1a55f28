"""Command-line interface.

Exit status: 0 on success, 1 when a sweep (or ``mub verify``) finds a
violation, 2 on usage, parse or input errors.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import _jsonio
from . import bounds as bd
from .errors import MubcohError
from .harness import (
    SweepConfig, compare_bounds, csv_text, dump_counterexamples, run_sweep, summary_json, table1_intervals,
)
from .measures import (
    geometric_coherence_bounds, geometric_coherence_numeric, geometric_coherence_pure, rel_entropy_coherence,
)
from .mub import construct_mub, parse_mub_file, serialize_mub, verify_mub
from .states import DensityMatrix, PureState, parse_state_file, purity, sample_density, sample_pure


class UsageError(Exception):
    pass


def _g12(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _g17(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def render_table(header, rows) -> str:
    cells = [list(map(str, header))] + [[_g12(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_g17(v) for v in r) + "\n")
    return buf.getvalue()


def render_json(header, rows) -> str:
    return _jsonio.dumps([dict(zip(header, (v.item() if isinstance(v, np.generic) else v for v in r))) for r in rows]) + "\n"


def emit(args, header, rows, title: str | None = None) -> None:
    """Human table on stdout, or a machine format to --out (stdout if no --out)."""
    fmt = getattr(args, "format", None)
    out = getattr(args, "out", None)
    if fmt is None and out is not None:
        fmt = "csv"
    if fmt is None:
        if title:
            sys.stdout.write(title + "\n")
        sys.stdout.write(render_table(header, rows))
        return
    text = render_csv(header, rows) if fmt == "csv" else render_json(header, rows)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
        if title:
            sys.stdout.write(title + "\n")
        sys.stdout.write(render_table(header, rows))


# --- argument types --------------------------------------------------------

def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _positive_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {s}")
    return v


def _finite_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {s!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {s}")
    return v


def parse_mrange(s: str) -> list[int]:
    """``"2:10"`` (inclusive), ``"2,3,5"`` or a single integer."""
    try:
        if ":" in s:
            lo, hi = s.split(":", 1)
            vals = list(range(int(lo), int(hi) + 1))
        else:
            vals = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad M range {s!r}; use 'lo:hi' or 'a,b,c'") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"M range {s!r} must be nonempty with every M >= 1")
    return vals


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), help="machine-readable output format")
    p.add_argument("--out", help="write machine-readable output to this path")


# --- subcommands -------------------------------------------------------------

def cmd_mub_gen(args) -> int:
    mubs = construct_mub(args.d)
    if args.M is not None:
        if args.M > len(mubs):
            raise UsageError(f"--M {args.M} exceeds the {len(mubs)} bases available for d={args.d}")
        mubs = mubs.truncated(args.M)
    rep = verify_mub(mubs)
    data = serialize_mub(mubs)
    if args.out:
        Path(args.out).write_bytes(data)
    elif args.format == "json":
        sys.stdout.write(data.decode())
        return 0
    sys.stdout.write(render_table(
        ("label", "d", "M", "orthonormality_dev", "unbiasedness_dev", "passed"),
        [(mubs.label, mubs.dim, len(mubs), rep.max_orthonormality_deviation,
          rep.max_unbiasedness_deviation, rep.passed)],
    ))
    return 0


def cmd_mub_verify(args) -> int:
    mubs = parse_mub_file(Path(args.file).read_bytes(), verify_tol=None)
    rep = verify_mub(mubs, args.tol)
    emit(args, ("label", "d", "M", "orthonormality_dev", "unbiasedness_dev", "passed"),
         [(mubs.label, mubs.dim, len(mubs), rep.max_orthonormality_deviation,
           rep.max_unbiasedness_deviation, rep.passed)])
    return 0 if rep.passed else 1


def _load_state(args):
    if args.state_file:
        return parse_state_file(Path(args.state_file).read_bytes())
    return None


def cmd_coherence(args) -> int:
    if args.basis_file:
        mubs = parse_mub_file(Path(args.basis_file).read_bytes())
    else:
        mubs = construct_mub(args.mub_d)
    if args.M is not None:
        if args.M > len(mubs):
            raise UsageError(f"--M {args.M} exceeds the {len(mubs)} bases available")
        mubs = mubs.truncated(args.M)
    d = mubs.dim
    state = _load_state(args)
    if state is None:
        if args.kind == "pure":
            state = sample_pure(d, args.seed)
        else:
            state = sample_density(d, args.rank or d, args.seed)
    if state.dim != d:
        raise UsageError(f"state dimension {state.dim} does not match basis dimension {d}")

    rows = []
    if args.measure == "c1":
        header = ("basis", "c1")
        rows = [(i, rel_entropy_coherence(b, state)) for i, b in enumerate(mubs)]
    elif args.measure == "cg-pure":
        if isinstance(state, DensityMatrix):
            if abs(purity(state) - 1.0) > 1e-9:
                raise UsageError("cg-pure needs a pure state (purity 1)")
            w, v = np.linalg.eigh(state.matrix)
            state = PureState.normalized(v[:, -1])
        header = ("basis", "cg")
        rows = [(i, geometric_coherence_pure(b, state)) for i, b in enumerate(mubs)]
    elif args.measure == "cg-bounds":
        header = ("basis", "lower", "upper", "raw_lower")
        for i, b in enumerate(mubs):
            g = geometric_coherence_bounds(b, state)
            rows.append((i, g.lower, g.upper, g.raw_lower))
    else:
        header = ("basis", "cg", "converged")
        for i, b in enumerate(mubs):
            r = geometric_coherence_numeric(b, state, starts=args.starts, max_iters=args.max_iters,
                                            tol=args.oracle_tol, seed=args.seed)
            rows.append((i, r.value, r.converged))
    numeric_cols = range(1, len(header) - (1 if args.measure == "cg-numeric" else 0))
    mean = ["mean"] + [float(np.mean([r[c] for r in rows])) for c in numeric_cols]
    if args.measure == "cg-numeric":
        mean.append(all(r[2] for r in rows))
    rows.append(tuple(mean))
    emit(args, header, rows, title=f"measure={args.measure} d={d} M={len(mubs)} purity={_g12(purity(state))}")
    return 0


def cmd_bounds_eval(args) -> int:
    pur = 1.0 if args.purity is None else args.purity
    ent = 0.0 if args.entropy is None else args.entropy
    try:
        bd.MubBoundParams(args.d, args.M, pur, ent)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.bound == "mim6":
        idx = args.indices if args.indices is not None else [0] * args.M
        value = bd.mim6_rhs(bd.mub_povms(args.d, args.M), idx)
    else:
        value = bd.evaluate(args.bound, args.d, args.M, pur, ent)
    header = ("bound", "kind", "d", "M", "purity", "entropy", "rhs")
    rows = [(args.bound, bd.bound_kind(args.bound), args.d, args.M, pur, ent, value)]
    if args.bound == "ic_sum":
        header += ("state_free",)
        rows = [rows[0] + (bd.ic_sum_rhs(args.d, args.M, pur)[1],)]
    emit(args, header, rows)
    return 0


def cmd_sweep(args) -> int:
    cfg = SweepConfig.from_file(args.config)
    if args.out:
        cfg.output = args.out
    if args.format:
        cfg.format = args.format
    if args.summary:
        cfg.summary = args.summary
    if args.threads is not None:
        cfg.threads = args.threads
    result = run_sweep(cfg)
    summary = result.summary()
    if cfg.output:
        text = csv_text(result) if cfg.format == "csv" else summary_json(result)
        Path(cfg.output).write_text(text, encoding="utf-8")
    if cfg.summary:
        Path(cfg.summary).write_text(summary_json(result), encoding="utf-8")
    rows = [(bid, s["count"], s["min_slack"], s["mean_slack"], s["violations"], s["inconclusive"])
            for bid, s in summary["bounds"].items()]
    sys.stdout.write(render_table(("bound", "count", "min_slack", "mean_slack", "violations", "inconclusive"), rows))
    ch = summary["entropy_chain"]
    sys.stdout.write(f"entropy chain: violations={ch['violations']} "
                     f"min_slack=({_g12(ch['min_slack_shannon_vs_collision'])}, "
                     f"{_g12(ch['min_slack_collision_vs_min'])})\n")
    if summary["total_violations"] or ch["violations"]:
        where = cfg.counterexample_dir or (str(Path(cfg.output).parent / "counterexamples") if cfg.output else "counterexamples")
        paths = dump_counterexamples(result, where)
        sys.stderr.write(f"VIOLATION: {summary['total_violations']} bound violations; "
                         f"{len(paths)} counterexample(s) written to {where}\n")
        return 1
    return 0


def cmd_table1(args) -> int:
    rows = [tuple(r) for r in table1_intervals(args.dmax)]
    emit(args, ("M1", "d_low", "d_high"), rows)
    return 0


def cmd_compare(args) -> int:
    rows = [tuple(r) for r in compare_bounds(args.d, args.mrange)]
    header = ("M", "prop1_pure", "pati_mub", "c1_winner", "prop2_pure", "prop2_lp_pure", "cg_winner",
              "prop3", "rmub12", "hinf_winner")
    emit(args, header, rows, title=f"d={args.d}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mubcoh", description="MUB construction, coherence measures and uncertainty bounds")
    sub = p.add_subparsers(dest="command", required=True)

    mub = sub.add_parser("mub", help="construct or verify MUB sets")
    msub = mub.add_subparsers(dest="mub_command", required=True)
    g = msub.add_parser("gen", help="construct d+1 MUBs and write them as JSON")
    g.add_argument("--d", type=_positive_int, required=True)
    g.add_argument("--M", type=_positive_int, help="keep only the first M bases")
    _add_output(g)
    g.set_defaults(func=cmd_mub_gen)
    v = msub.add_parser("verify", help="check orthonormality and unbiasedness of a MUB file")
    v.add_argument("--file", required=True)
    v.add_argument("--tol", type=_positive_float, default=1e-9)
    _add_output(v)
    v.set_defaults(func=cmd_mub_verify)

    c = sub.add_parser("coherence", help="coherence of a state in each basis of a set")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--basis-file")
    src.add_argument("--mub-d", type=_positive_int)
    st = c.add_mutually_exclusive_group(required=True)
    st.add_argument("--state-file")
    st.add_argument("--random", action="store_true", help="sample a random state")
    c.add_argument("--kind", choices=("pure", "density"), default="density", help="random state kind")
    c.add_argument("--rank", type=_positive_int, help="Ginibre rank for random density matrices")
    c.add_argument("--seed", type=_nonneg_int, default=0)
    c.add_argument("--M", type=_positive_int)
    c.add_argument("--measure", choices=("c1", "cg-pure", "cg-bounds", "cg-numeric"), required=True)
    c.add_argument("--starts", type=_positive_int, default=32)
    c.add_argument("--max-iters", type=_positive_int, default=10_000)
    c.add_argument("--oracle-tol", type=_positive_float, default=1e-10)
    _add_output(c)
    c.set_defaults(func=cmd_coherence)

    b = sub.add_parser("bounds", help="evaluate bound right-hand sides")
    bsub = b.add_subparsers(dest="bounds_command", required=True)
    e = bsub.add_parser("eval", help="evaluate one bound")
    e.add_argument("--bound", choices=bd.BOUND_IDS, required=True)
    e.add_argument("--d", type=_positive_int, required=True)
    e.add_argument("--M", type=_positive_int, required=True)
    e.add_argument("--purity", type=_finite_float)
    e.add_argument("--entropy", type=_finite_float)
    e.add_argument("--indices", type=_nonneg_int, nargs="+", help="outcome index per basis (mim6)")
    _add_output(e)
    e.set_defaults(func=cmd_bounds_eval)

    s = sub.add_parser("sweep", help="Monte-Carlo verification sweep from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--out", help="per-trial CSV (or summary JSON with --format json)")
    s.add_argument("--summary", help="write the summary JSON here")
    s.add_argument("--threads", type=_nonneg_int, help="worker threads, 0 = auto (overrides MUBCOH_THREADS)")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("table1", help="dimension intervals where the pure-state C1 bound wins")
    t.add_argument("--dmax", type=_positive_int, required=True)
    _add_output(t)
    t.set_defaults(func=cmd_table1)

    cmp_ = sub.add_parser("compare", help="compare competing lower bounds over a range of M")
    cmp_.add_argument("--d", type=_positive_int, required=True)
    cmp_.add_argument("--mrange", type=parse_mrange, required=True, help="'lo:hi' or 'a,b,c'")
    _add_output(cmp_)
    cmp_.set_defaults(func=cmd_compare)
    return p


def _validate(args) -> None:
    if args.command == "table1" and args.dmax < 2:
        raise UsageError("--dmax must be >= 2")
    if args.command == "compare" and args.d < 2:
        raise UsageError("--d must be >= 2")
    if args.command == "bounds" and args.d < 2:
        raise UsageError("--d must be >= 2")
    if args.command == "coherence":
        if args.state_file and (args.rank is not None or args.kind != "density"):
            raise UsageError("--kind/--rank only apply with --random")
        d = args.mub_d
        if args.rank is not None and d is not None and args.rank > d:
            raise UsageError(f"--rank must be <= d = {d}")
    if args.command == "sweep":
        cfg = Path(args.config)
        if not cfg.is_file():
            raise UsageError(f"config file {cfg} not found")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        return args.func(args)
    except (UsageError, MubcohError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"mubcoh: error: {type(exc).__name__}: {msg}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
