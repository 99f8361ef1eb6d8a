"""Command-line front end.

Exit status: 0 when nothing was violated, 1 on a violation finding (theorem
violation, invalid 2-space, failed 2-map), 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .formats import (
    ParseError,
    format_model,
    format_space,
    parse_model_text,
    parse_space_text,
    parse_two_map_text,
)
from .harness import (
    SCHEMA_VERSION,
    SweepConfig,
    enumerate_preorders,
    fence_sweep,
    run_sweep,
    up_to_homeomorphism,
)
from .product import HYPOTHESES, TheoremViolation, theorem_verdict
from .space import InputError
from .twospace import PreconditionError, check_two_map, two_product, validate_two_space

WORKERS_ENV = "LOCPROD_WORKERS"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, doc: dict, text: str) -> None:
    if args.format == "structured":
        out = json.dumps(doc, indent=2, ensure_ascii=True) + "\n"
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _text_lines(doc: dict, skip=()) -> str:
    lines = []
    for key, val in doc.items():
        if key in skip:
            continue
        if isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{key}:")
            for k, item in enumerate(val):
                lines.append(f"  [{k}]")
                for ik, iv in item.items():
                    if ik == "file":
                        lines.append("    file:")
                        lines += [f"      {ln}" for ln in iv.splitlines()]
                    else:
                        lines.append(f"    {ik}: {iv}")
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines)


# --- subcommands ----------------------------------------------------------


def cmd_enumerate(args) -> int:
    spaces = enumerate_preorders(args.points)
    labeled = len(spaces)
    if args.up_to_homeomorphism:
        spaces = up_to_homeomorphism(spaces)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "enumerate",
        "points": args.points,
        "labeled_count": labeled,
        "listed_count": len(spaces),
        "up_to_homeomorphism": args.up_to_homeomorphism,
        "spaces": [[list(p) for p in sp.relation()] for sp in spaces],
    }
    text = f"# {len(spaces)} space(s) on {args.points} point(s)\n"
    text += "".join(format_space(f"S{k}", sp) for k, sp in enumerate(spaces))
    _emit(args, doc, text)
    return EXIT_OK


def cmd_analyze(args) -> int:
    doc = parse_space_text(_read(args.file), strict=args.strict_relations)
    c = doc.subset(args.subset)
    violated = False
    try:
        v = theorem_verdict(c, empty_connected=not args.empty_disconnected)
    except TheoremViolation as exc:
        v, violated = exc.payload, True
    cert = v.certificate
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "analyze",
        "subset": [list(p) for p in c.sorted_pairs()],
        "hypotheses": {
            "closed": v.hypotheses.closed,
            "path_connected": v.hypotheses.path_connected,
            "locally_product": v.hypotheses.locally_product,
        },
        "A": list(v.decomposition.a),
        "B": list(v.decomposition.b),
        "exact": v.decomposition.exact,
        "failing_point": list(cert.failing) if cert.failing else None,
        "theorem_violation": violated,
    }
    _emit(args, out, _text_lines(out))
    return EXIT_VIOLATION if violated else EXIT_OK


def _config(args, mode: str, require=None) -> SweepConfig:
    workers = args.workers
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        try:
            workers = int(env) if env else 1
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    if require is None:
        require = _hypothesis_mask(args)
    try:
        return SweepConfig(
            nx=args.nx,
            ny=args.ny,
            require=require,
            mode=mode,
            workers=workers,
            seed=args.seed,
            samples=args.samples,
            limit=args.limit,
            empty_connected=not args.empty_disconnected,
            max_fence=getattr(args, "max_length", 4),
        )
    except InputError as exc:
        raise UsageError(str(exc)) from None


def _hypothesis_mask(args) -> frozenset[str]:
    def names(raw):
        got = [h.strip() for h in raw.split(",") if h.strip()]
        bad = [h for h in got if h not in HYPOTHESES]
        if bad:
            raise UsageError(f"unknown hypothesis {bad[0]!r}; choose from {', '.join(HYPOTHESES)}")
        return set(got)

    if args.require is not None and args.drop is not None:
        raise UsageError("use either --require or --drop, not both")
    if args.require is not None:
        return frozenset(names(args.require))
    if args.drop is not None:
        return frozenset(HYPOTHESES) - names(args.drop)
    return frozenset(HYPOTHESES)


def _run_harness(fn, cfg: SweepConfig, args) -> int:
    try:
        report = fn(cfg)
        code = EXIT_OK
    except TheoremViolation as exc:
        report, code = exc.payload, EXIT_VIOLATION
    doc = report.to_dict(include_timing=args.timing)
    _emit(args, doc, _text_lines(doc))
    return code


def cmd_verify(args) -> int:
    return _run_harness(run_sweep, _config(args, "verify"), args)


def cmd_search(args) -> int:
    return _run_harness(run_sweep, _config(args, "search"), args)


def cmd_fences(args) -> int:
    return _run_harness(fence_sweep, _config(args, "verify"), args)


def _report_doc(kind: str, rep, extra: dict | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    doc.update(extra or {})
    doc.update({"valid": rep.ok, "reason": rep.reason, "where": rep.where or None})
    if rep.strict_ok is not None:
        doc.update(
            {
                "strict_valid": rep.strict_ok,
                "strict_reason": rep.strict_reason,
                "strict_where": rep.strict_where or None,
            }
        )
    return doc


def _report_exit(rep) -> int:
    ok = rep.ok if rep.strict_ok is None else rep.ok and rep.strict_ok
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_check_2space(args) -> int:
    model = parse_model_text(_read(args.file), strict=args.strict_relations)
    rep = validate_two_space(model, strict=args.strict)
    doc = _report_doc("check-2space", rep, {"points": model.base.n, "charts": len(model.charts)})
    _emit(args, doc, _text_lines(doc))
    return _report_exit(rep)


def cmd_check_2map(args) -> int:
    path = Path(args.file)
    m = parse_two_map_text(_read(args.file), path.parent, strict=args.strict_relations)
    rep = check_two_map(m, strict=args.strict)
    doc = _report_doc("check-2map", rep)
    _emit(args, doc, _text_lines(doc))
    return _report_exit(rep)


def cmd_2product(args) -> int:
    w1 = parse_model_text(_read(args.first), strict=args.strict_relations)
    w2 = parse_model_text(_read(args.second), strict=args.strict_relations)
    try:
        prod = two_product(w1, w2)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    rep = validate_two_space(prod)
    text = format_model(prod)
    doc = _report_doc("2product", rep, {"points": prod.base.n, "charts": len(prod.charts), "model": text})
    _emit(args, doc, text)
    return _report_exit(rep)


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument(
        "--strict-relations",
        action="store_true",
        help="reject relations that are not already reflexive-transitively closed",
    )

    sweep = argparse.ArgumentParser(add_help=False)
    sweep.add_argument("--nx", type=int, required=True)
    sweep.add_argument("--ny", type=int, required=True)
    sweep.add_argument("--workers", type=int, default=None, help=f"default: ${WORKERS_ENV} or 1")
    sweep.add_argument("--seed", type=int, default=None, help="sampling seed (4-point spaces)")
    sweep.add_argument("--samples", type=int, default=1000)
    sweep.add_argument("--limit", type=int, default=10, help="offenders kept in the report")
    sweep.add_argument("--require", help="comma-separated hypotheses to require")
    sweep.add_argument("--drop", help="comma-separated hypotheses to drop")
    sweep.add_argument(
        "--empty-disconnected",
        action="store_true",
        help="treat the empty subset as not path-connected",
    )
    sweep.add_argument("--timing", action="store_true", help="include wall-clock time")

    p = argparse.ArgumentParser(prog="locprod", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", parents=[common], help="list all topologies on n points")
    e.add_argument("--points", type=int, required=True)
    e.add_argument("--up-to-homeomorphism", action="store_true")
    e.set_defaults(func=cmd_enumerate)

    a = sub.add_parser("analyze", parents=[common], help="verdict for one subset of X x Y")
    a.add_argument("file")
    a.add_argument("--subset", help="subset name (default: first)")
    a.add_argument("--empty-disconnected", action="store_true")
    a.set_defaults(func=cmd_analyze)

    for name, func, hlp in (
        ("verify", cmd_verify, "sweep all subsets and check the conclusion"),
        ("search", cmd_search, "look for counterexamples under a hypothesis mask"),
        ("fences", cmd_fences, "check mixed pairs along every short fence"),
    ):
        s = sub.add_parser(name, parents=[common, sweep], help=hlp)
        if name == "fences":
            s.add_argument("--max-length", type=int, default=4)
        s.set_defaults(func=func)

    for name, func, hlp in (
        ("check-2space", cmd_check_2space, "validate charts and transitions of a model file"),
        ("check-2map", cmd_check_2map, "check that a map splits in every pair of charts"),
    ):
        c = sub.add_parser(name, parents=[common], help=hlp)
        c.add_argument("file")
        c.add_argument("--strict", action="store_true", help="also require continuous f and g")
        c.set_defaults(func=func)

    t = sub.add_parser("2product", parents=[common], help="2-product of two model files")
    t.add_argument("first")
    t.add_argument("second")
    t.set_defaults(func=cmd_2product)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, ParseError, InputError) as exc:
        print(f"locprod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
