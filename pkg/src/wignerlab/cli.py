"""Command-line entry point.

Subcommands: verify, enumerate, classify, moments, zparts, mc, tail, dilute,
genfun, report. Every emitted file embeds the tool version and a fingerprint
of the resolved parameters; a timestamp is included unless --no-timestamp is
given, so reruns with the same fingerprint are byte-identical.

A config file (--config) holds `key = value` lines mirroring the long flag
names; explicit flags override file values.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import classes as cls
from . import dyck, moments, series
from .laws import make_law
from .mc import EnsembleConfig, sample_stats, tail_curve
from .moments import TruncationSpec
from .suites import run_verify_suites
from .walks import analyze, enumerate_even_walks, is_tree_structure, report_to_dict

GOLDEN_DIR = Path(__file__).parent / "goldens"


#: keys that do not affect the computation and stay out of the fingerprint
_VOLATILE_KEYS = {"out", "func", "config", "no_timestamp", "format", "bless", "golden_dir"}


def fingerprint(params: dict) -> str:
    semantic = {k: v for k, v in params.items() if k not in _VOLATILE_KEYS}
    blob = json.dumps(semantic, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _meta(params: dict, no_timestamp: bool) -> dict:
    meta = {"tool": "wignerlab", "version": __version__, "fingerprint": fingerprint(params)}
    if not no_timestamp:
        meta["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    return meta


def write_rows(path: str | None, rows: list[dict], params: dict, fmt: str, no_timestamp: bool):
    meta = _meta(params, no_timestamp)
    if fmt == "json":
        payload = json.dumps({"_meta": meta, "rows": rows}, indent=2, sort_keys=True, default=str)
        if path:
            Path(path).write_text(payload + "\n")
        else:
            print(payload)
        return
    import io

    buf = io.StringIO()
    for k, v in sorted(meta.items()):
        buf.write(f"# {k}: {v}\n")
    if rows:
        fields = list(rows[0].keys())
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    text = buf.getvalue()
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def write_json(path: str | None, payload: dict, params: dict, no_timestamp: bool):
    payload = {"_meta": _meta(params, no_timestamp), **payload}
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def load_config_tokens(path: str) -> list[str]:
    """Turn `key = value` lines into CLI tokens so flags can override them."""
    tokens = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"config line without '=': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        else:
            tokens.extend([f"--{key}", value])
    return tokens


def build_spec(args) -> moments.MomentSpec:
    law = make_law(args.ensemble, Fraction(args.v), gamma=getattr(args, "gamma", 24.0))
    if getattr(args, "c", None):
        return moments.dilute_spec(law, args.n, int(args.c))
    if getattr(args, "truncate", False):
        trunc = TruncationSpec(law, delta=args.delta, delta0=getattr(args, "delta0", None))
        return moments.truncated_spec(trunc, args.n)
    return moments.wigner_spec(law, args.n)


# ---------------------------------------------------------------------------
# Subcommand handlers. Each returns a process exit code.


def cmd_verify(args) -> int:
    results = run_verify_suites(max_halfsteps=args.max_halfsteps, k0=args.k0)
    failed = False
    for res in results:
        print(res.summary())
        for label, detail in res.failures():
            failed = True
            print(f"    FAILED: {label} {detail}")
    golden_dir = Path(args.golden_dir) if args.golden_dir else GOLDEN_DIR
    gold_ok = check_goldens(golden_dir, bless=args.bless, s_max=min(args.max_halfsteps, 5))
    print(f"[{'PASS' if gold_ok else 'FAIL'}] golden tables ({golden_dir})")
    return 0 if (not failed and gold_ok) else 1


def golden_tables(s_max: int = 5) -> dict[str, list[dict]]:
    walk_rows = []
    for s in range(min(s_max, 5) + 1):
        walks = enumerate_even_walks(s)
        walk_rows.append(
            {
                "s": s,
                "even_walks": len(walks),
                "tree_walks": sum(1 for w in walks if is_tree_structure(w)),
                "loopless": sum(1 for w in walks if all(a != b for a, b in w.steps())),
            }
        )
    return {
        "catalan.csv": [{"k": k, "catalan": dyck.catalan(k)} for k in range(17)],
        "root_degree.csv": [
            {"s": s, "d": d, "count": dyck.count_trees_root_degree(s, d)}
            for s in range(11)
            for d in range(s + 1)
        ],
        "walk_counts.csv": walk_rows,
        "moment_counts.csv": [
            {"s": s, "n2": series.n2_count(s), "n3": series.nm_count(3, s) if s >= 3 else 0}
            for s in range(13)
        ],
        "class_census_s3.csv": cls.census_csv_rows(3),
    }


def _rows_to_csv(rows: list[dict]) -> str:
    import io

    if not rows:
        return "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def check_goldens(golden_dir: Path, bless: bool = False, s_max: int = 5) -> bool:
    tables = golden_tables(s_max)
    golden_dir.mkdir(parents=True, exist_ok=True)
    ok = True
    for name, rows in tables.items():
        text = _rows_to_csv(rows)
        path = golden_dir / name
        if bless or not path.exists():
            path.write_text(text)
            continue
        if path.read_text() != text:
            ok = False
            print(f"    golden mismatch: {name}")
    return ok


def cmd_enumerate(args) -> int:
    params = vars(args).copy()
    if args.dyck is not None:
        paths = dyck.enumerate_dyck(args.dyck)
        rows = [{"index": i, "path": str(p), "max_height": p.max_height} for i, p in enumerate(paths)]
    else:
        walks = enumerate_even_walks(
            args.s, allow_loops=not args.no_loops, ceiling=max(2 * args.s, 12)
        )
        if args.no_self_intersections:
            walks = [w for w in walks if is_tree_structure(w)]
        rows = [{"index": i, "walk": w.to_string()} for i, w in enumerate(walks)]
    print(f"{len(rows)} objects")
    write_rows(args.out, rows, params, args.format, args.no_timestamp)
    return 0


def cmd_classify(args) -> int:
    rows = []
    for s in range(1, args.s + 1):
        rows.extend(cls.census_csv_rows(s, k0=args.k0))
    violations = [
        r for r in rows if r["bound"] != "" and Fraction(r["bound"]) < r["exact"]
    ]
    print(f"{len(rows)} class rows, {len(violations)} bound violations")
    write_rows(args.out, rows, vars(args).copy(), args.format, args.no_timestamp)
    return 0 if not violations else 1


def cmd_moments(args) -> int:
    spec = build_spec(args)
    result = moments.exact_trace_moment(spec, args.s)
    print(f"E Tr A^{2*args.s} = {float(result.total)}  (exact {result.total})")
    write_json(args.out, result.to_dict(), vars(args).copy(), args.no_timestamp)
    return 0


def cmd_zparts(args) -> int:
    spec = build_spec(args)
    result = moments.z_decomposition(spec, args.s, delta=args.delta, c0=args.c0)
    parts = {i: float(v) for i, v in result.z_parts.items()}
    print(
        f"total={float(result.total):.6g} z1 fraction={result.z1_fraction:.4f} "
        f"parts={parts}"
    )
    if args.format == "csv":
        rows = [
            {
                "part": f"Z{i}",
                "value": float(v),
                "value_exact": str(v),
                "fraction": float(v) / float(result.total) if float(result.total) else 0.0,
            }
            for i, v in sorted(result.z_parts.items())
        ]
        rows.append(
            {
                "part": "total",
                "value": float(result.total),
                "value_exact": str(result.total),
                "fraction": 1.0,
            }
        )
        write_rows(args.out, rows, vars(args).copy(), "csv", args.no_timestamp)
    else:
        write_json(args.out, result.to_dict(), vars(args).copy(), args.no_timestamp)
    return 0


def cmd_mc(args) -> int:
    law = make_law(args.ensemble, Fraction(args.v), gamma=args.gamma)
    config = EnsembleConfig(
        n=args.n,
        law=law,
        dilution_c=int(args.c) if args.c else None,
        seed=args.seed,
    )
    s_list = tuple(range(1, args.s + 1))
    stats = sample_stats(config, args.replicates, s_list=s_list)
    summary = {
        "config": config.descriptor(),
        "fingerprint": config.fingerprint(),
        "replicates": stats.replicates,
        "failed_replicates": stats.failed_replicates,
        "lambda_max_mean": float(stats.lambda_max.mean()),
        "traces": {},
    }
    for s in s_list:
        entry = {
            "mean": stats.trace_mean(s),
            "std": stats.trace_std(s),
            "ci": stats.trace_ci(s),
        }
        if 2 * s <= 12 and config.dilution_c is None and config.truncation is None:
            exact = moments.exact_trace_moment(config.moment_spec(), s).total
            entry["exact"] = float(exact)
            entry["z"] = stats.zscore_against(s, float(exact))
        summary["traces"][str(2 * s)] = entry
        print(f"2s={2*s}: mean={entry['mean']:.6g}" + (f" z={entry['z']:+.2f}" if "z" in entry else ""))
    if args.out:
        write_rows(args.out, stats.rows(), vars(args).copy(), args.format, args.no_timestamp)
        summary_path = Path(args.out).with_suffix(".summary.json")
        write_json(str(summary_path), summary, vars(args).copy(), args.no_timestamp)
    else:
        write_json(None, summary, vars(args).copy(), args.no_timestamp)
    return 0


def cmd_tail(args) -> int:
    law = make_law(args.ensemble, Fraction(args.v), gamma=args.gamma)
    config = EnsembleConfig(
        n=args.n,
        law=law,
        dilution_c=int(args.c) if args.c else None,
        seed=args.seed,
    )
    xs = tuple(float(tok) for tok in args.x.split(","))
    curve = tail_curve(
        config, xs, scale=args.scale, replicates=args.replicates, chebyshev_s=args.chebyshev_s
    )
    for row in curve.rows():
        print(
            f"x={row['x']:+.2f} thr={row['threshold']:.4f} "
            f"P={row['probability']:.4f} ci=({row['ci_low']:.4f},{row['ci_high']:.4f})"
        )
    write_rows(args.out, curve.rows(), vars(args).copy(), args.format, args.no_timestamp)
    return 0


def cmd_dilute(args) -> int:
    law = make_law(args.ensemble, Fraction(args.v))
    spec = moments.dilute_spec(law, args.n, int(args.c))
    total = moments.exact_trace_moment(spec, args.s).total
    bound = moments.dilute_lower_bound(law, args.n, int(args.c), args.s)
    ok = total >= bound
    print(
        f"exact dilute moment {float(total):.6g} vs lower bound {float(bound):.6g}: "
        f"{'OK' if ok else 'VIOLATED'}"
    )
    write_json(
        args.out,
        {
            "n": args.n,
            "s": args.s,
            "c": int(args.c),
            "exact": float(total),
            "exact_rational": str(total),
            "lower_bound": float(bound),
            "satisfied": ok,
        },
        vars(args).copy(),
        args.no_timestamp,
    )
    return 0 if ok else 1


def cmd_genfun(args) -> int:
    rows = series.coefficient_table(args.order)
    write_rows(args.out, rows, vars(args).copy(), args.format, args.no_timestamp)
    ids = series.check_catalan_identities(args.order)
    print(f"identities: {ids}")
    return 0 if all(ids.values()) else 1


def cmd_report(args) -> int:
    results = run_verify_suites(max_halfsteps=args.max_halfsteps, k0=args.k0)
    payload = {
        "suites": [
            {
                "name": r.name,
                "passed": r.passed,
                "elapsed_s": round(r.elapsed, 2),
                "checks": [
                    {"label": label, "ok": ok, "detail": detail}
                    for label, ok, detail in r.checks
                ],
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    write_json(args.out, payload, vars(args).copy(), args.no_timestamp)
    for r in results:
        print(r.summary())
    return 0 if payload["all_passed"] else 1


def cmd_analyze(args) -> int:
    from .walks import Walk

    walk = Walk.from_string(args.walk)
    print(json.dumps(report_to_dict(analyze(walk)), sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-stable output")
    p.add_argument("--config", help="key = value file mirroring the flags")


def _ensemble_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensemble", default="rademacher", help="rademacher | gaussian | goe | power-tail | three-point")
    p.add_argument("--v", default="0.5", help="entry standard deviation (rational ok)")
    p.add_argument("--c", default=None, help="dilution concentration")
    p.add_argument("--gamma", type=float, default=24.0, help="power-tail index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wignerlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"wignerlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the exact identity/bound suites and golden tables")
    p.add_argument("--max-halfsteps", type=int, default=5, help="exhaustive walk depth s")
    p.add_argument("--k0", type=int, default=4)
    p.add_argument("--bless", action="store_true", help="regenerate golden tables")
    p.add_argument("--golden-dir", default=None)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="enumerate Dyck paths or even walks")
    p.add_argument("--dyck", type=int, default=None, metavar="K")
    p.add_argument("--walks", action="store_true")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--no-loops", action="store_true")
    p.add_argument("--no-self-intersections", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", help="class census with counting bounds")
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--k0", type=int, default=4)
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("moments", help="exact trace moment by the walk sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--truncate", action="store_true")
    p.add_argument("--delta", type=float, default=0.05)
    _ensemble_flags(p)
    _common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("zparts", help="four-way census decomposition of the walk sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--c0", type=float, default=None)
    _ensemble_flags(p)
    _common(p)
    p.set_defaults(func=cmd_zparts)

    p = sub.add_parser("mc", help="seeded sampling with trace statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, default=4, help="largest half-power")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=20240229)
    _ensemble_flags(p)
    _common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("tail", help="spectral-edge exceedance curve")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", default="-2,-1,0,1,2,4", help="comma-separated grid")
    p.add_argument("--scale", choices=("wigner", "dilute"), default="wigner")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=20240229)
    p.add_argument("--chebyshev-s", type=int, default=None)
    _ensemble_flags(p)
    _common(p)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("dilute", help="exact dilute moment against its lower bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--ensemble", default="gaussian")
    p.add_argument("--v", default="0.5")
    p.add_argument("--c", required=True)
    _common(p)
    p.set_defaults(func=cmd_dilute)

    p = sub.add_parser("genfun", help="exact generating-function coefficient tables")
    p.add_argument("--order", type=int, default=40)
    _common(p)
    p.set_defaults(func=cmd_genfun)

    p = sub.add_parser("report", help="machine-readable verify summary")
    p.add_argument("--max-halfsteps", type=int, default=5)
    p.add_argument("--k0", type=int, default=4)
    _common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("analyze", help="structure report for one walk")
    p.add_argument("walk", help="comma-separated labels, e.g. 1,2,3,2,1")
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # expand --config into tokens placed right after the subcommand, so
    # explicitly given flags (parsed later) override the file values
    if "--config" in argv:
        idx = argv.index("--config")
        if idx + 1 >= len(argv):
            print("error: --config needs a path", file=sys.stderr)
            return 2
        tokens = load_config_tokens(argv[idx + 1])
        rest = argv[:idx] + argv[idx + 2 :]
        argv = rest[:1] + tokens + rest[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
