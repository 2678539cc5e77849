"""Command-line interface.

Diagnostics go to stderr in the one-line `<file>:<line>:<col>: <severity>
<RULEID>: <message>` format; artifacts (DSL, DOT, JSON, tables) go to stdout
so the tool composes in pipelines. Exit codes: 0 no errors, 1 validation
errors, 2 usage or I/O or configuration failure. Bundle manifests are
recognized by the `.acb` suffix; anything else is parsed as a case file.

Set AC_UNITS to a `.units` file to extend the built-in unit table.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .analyze import BundleMetrics, CaseMetrics, bundle_metrics, case_metrics, impact
from .diagnostics import Diagnostic, Severity, sorted_diagnostics
from .link import ResolvedBundle, inline_bundle, resolve_links
from .model import AssuranceCase, Bundle, UnknownElementError
from .parser import parse_bundle, parse_case, print_case
from .render import RenderOptions, report_json, to_dot
from .units import BUILTIN_UNITS, UnitError, UnitTable, parse_units_file
from .validate import bundle_match_results, validate_bundle, validate_case


class _Failure(Exception):
    """Infrastructure failure: message to stderr, exit 2."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Failure(f"cannot read {path!r}: {exc}") from exc


def _load_units() -> UnitTable:
    units_path = os.environ.get("AC_UNITS")
    if not units_path:
        return BUILTIN_UNITS
    text = _read_text(units_path)
    try:
        return BUILTIN_UNITS.extended(parse_units_file(text, units_path))
    except UnitError as exc:
        raise _Failure(str(exc)) from exc


def _is_bundle(path: str) -> bool:
    return path.endswith(".acb")


def _load_case(path: str) -> tuple[AssuranceCase | None, list[Diagnostic]]:
    result = parse_case(_read_text(path), path)
    return result.case, result.diagnostics


def _load_bundle(path: str) -> tuple[Bundle | None, list[Diagnostic]]:
    base = Path(path).parent

    def loader(name: str) -> str:
        return (base / name).read_text(encoding="utf-8")

    return parse_bundle(_read_text(path), loader, path)


def _emit(diagnostics: Sequence[Diagnostic]) -> None:
    for diagnostic in sorted_diagnostics(diagnostics):
        print(diagnostic.line(), file=sys.stderr)


def _exit_code(diagnostics: Sequence[Diagnostic], strict: bool = False) -> int:
    if any(d.severity is Severity.ERROR for d in diagnostics):
        return 1
    if strict and any(d.severity is Severity.WARNING for d in diagnostics):
        return 1
    return 0


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _parse_pairs(spec: str, default_case: str | None = None) -> list[tuple[str, str]]:
    pairs = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if "." in item:
            case_id, element_id = item.split(".", 1)
        elif default_case is not None:
            case_id, element_id = default_case, item
        else:
            raise _Failure(f"expected CASE.ID, got {item!r}")
        if not case_id or not element_id:
            raise _Failure(f"expected CASE.ID, got {item!r}")
        pairs.append((case_id, element_id))
    return pairs


def _cmd_validate(args: argparse.Namespace, units: UnitTable) -> int:
    diagnostics: list[Diagnostic] = []
    capabilities = None
    if _is_bundle(args.file):
        bundle, diagnostics = _load_bundle(args.file)
        if bundle is not None:
            for case in bundle.cases():
                diagnostics.extend(validate_case(case, units))
            diagnostics.extend(validate_bundle(bundle, units))
            capabilities = bundle_match_results(bundle, units)
    else:
        case, diagnostics = _load_case(args.file)
        if case is not None:
            diagnostics.extend(validate_case(case, units))
    diagnostics = sorted_diagnostics(diagnostics)
    _emit(diagnostics)
    if args.json:
        sys.stdout.write(report_json(diagnostics=diagnostics, capabilities=capabilities))
    return _exit_code(diagnostics, args.strict)


def _resolve_bundle_file(path: str) -> tuple[ResolvedBundle | None, list[Diagnostic]]:
    bundle, diagnostics = _load_bundle(path)
    if bundle is None:
        return None, diagnostics
    resolved, link_diagnostics = resolve_links(bundle)
    return resolved, sorted_diagnostics([*diagnostics, *link_diagnostics])


def _cmd_link(args: argparse.Namespace, units: UnitTable) -> int:
    resolved, diagnostics = _resolve_bundle_file(args.file)
    _emit(diagnostics)
    if resolved is None:
        return 1
    for source, target in sorted(resolved.resolutions.items()):
        print(f"{source[0]}.{source[1]} -> {target[0]}.{target[1]}")
    return _exit_code(diagnostics)


def _cmd_impact(args: argparse.Namespace, units: UnitTable) -> int:
    resolved, diagnostics = _resolve_bundle_file(args.file)
    _emit(diagnostics)
    if resolved is None:
        return 1
    changed = _parse_pairs(args.changed)
    try:
        report = impact(resolved, changed)
    except UnknownElementError as exc:
        raise _Failure(str(exc)) from exc
    print("changed: " + (", ".join(f"{c}.{e}" for c, e in sorted(report.changed)) or "(none)"))
    print("affected:")
    printed = False
    for case_id in sorted(report.affected):
        ids = report.affected[case_id]
        if ids:
            print(f"  {case_id}: " + ", ".join(sorted(ids)))
            printed = True
    if not printed:
        print("  (none)")
    print("affected cacs: " + (", ".join(sorted(report.affected_cacs)) or "(none)"))
    return _exit_code(diagnostics)


def _cmd_inline(args: argparse.Namespace, units: UnitTable) -> int:
    resolved, diagnostics = _resolve_bundle_file(args.file)
    _emit(diagnostics)
    if resolved is None:
        return 1
    try:
        inlined = inline_bundle(resolved, args.cac)
    except UnknownElementError as exc:
        raise _Failure(str(exc)) from exc
    _write_output(print_case(inlined), args.output)
    return _exit_code(diagnostics)


def _cmd_render(args: argparse.Namespace, units: UnitTable) -> int:
    if _is_bundle(args.file):
        bundle, diagnostics = _load_bundle(args.file)
        if bundle is None:
            _emit(diagnostics)
            return 1
        resolved, link_diagnostics = resolve_links(bundle)
        diagnostics = sorted_diagnostics([*diagnostics, *link_diagnostics])
        _emit(diagnostics)
        subject: AssuranceCase | Bundle | ResolvedBundle = resolved if resolved is not None else bundle
        highlight = frozenset(_parse_pairs(args.highlight)) if args.highlight else frozenset()
    else:
        case, diagnostics = _load_case(args.file)
        _emit(diagnostics)
        if case is None:
            return 1
        subject = case
        highlight = (
            frozenset(_parse_pairs(args.highlight, default_case=case.id))
            if args.highlight
            else frozenset()
        )
    _write_output(to_dot(subject, RenderOptions(highlight=highlight)), args.output)
    return _exit_code(diagnostics)


_TABLE_COLUMNS = (
    ("CASE", lambda m: m.case_id),
    ("KIND", lambda m: m.kind.value),
    ("ELEMS", lambda m: str(m.element_total)),
    ("CLAIM", lambda m: str(m.element_counts["claim"])),
    ("STRAT", lambda m: str(m.element_counts["strategy"])),
    ("CTX", lambda m: str(m.element_counts["context"])),
    ("ASSUM", lambda m: str(m.element_counts["assumption"])),
    ("JUST", lambda m: str(m.element_counts["justification"])),
    ("EVID", lambda m: str(m.element_counts["evidence"])),
    ("SUP", lambda m: str(m.edge_counts["supportedBy"])),
    ("INCTX", lambda m: str(m.edge_counts["inContextOf"])),
    ("DEPTH", lambda m: str(m.depth)),
    ("UNDEV", lambda m: str(m.undeveloped_count)),
    ("COVER", lambda m: f"{m.evidence_coverage:.2f}"),
    ("SAFE", lambda m: str(m.concern_counts["safety"])),
    ("EFFECT", lambda m: str(m.concern_counts["effectiveness"])),
)


def _metrics_table(rows: list[CaseMetrics]) -> str:
    cells = [[header for header, _ in _TABLE_COLUMNS]]
    for row in rows:
        cells.append([extract(row) for _, extract in _TABLE_COLUMNS])
    widths = [max(len(line[i]) for line in cells) for i in range(len(_TABLE_COLUMNS))]
    lines = ["  ".join(value.ljust(width) for value, width in zip(line, widths)).rstrip() for line in cells]
    return "\n".join(lines) + "\n"


def _cmd_metrics(args: argparse.Namespace, units: UnitTable) -> int:
    if _is_bundle(args.file):
        bundle, diagnostics = _load_bundle(args.file)
        _emit(diagnostics)
        if bundle is None:
            return 1
        result: CaseMetrics | BundleMetrics = bundle_metrics(bundle)
    else:
        case, diagnostics = _load_case(args.file)
        _emit(diagnostics)
        if case is None:
            return 1
        result = case_metrics(case)
    if args.json:
        sys.stdout.write(report_json(metrics=result))
    elif isinstance(result, BundleMetrics):
        sys.stdout.write(_metrics_table(list(result.cases)))
        sys.stdout.write(f"cross links: {result.cross_link_count}\n")
    else:
        sys.stdout.write(_metrics_table([result]))
    return _exit_code(diagnostics)


def _cmd_fmt(args: argparse.Namespace, units: UnitTable) -> int:
    source = _read_text(args.file)
    result = parse_case(source, args.file)
    _emit(result.diagnostics)
    if result.case is None:
        return 1
    canonical = print_case(result.case)
    if args.check:
        if source != canonical:
            print(f"{args.file}: not in canonical form", file=sys.stderr)
            return 1
        return _exit_code(result.diagnostics)
    sys.stdout.write(canonical)
    return _exit_code(result.diagnostics)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actool",
        description="Validate, link, and analyze assurance cases written in the .acd DSL.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a case or bundle and run the rule catalog")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="write a JSON report to stdout")
    p.add_argument("--strict", action="store_true", help="treat warnings as errors")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("link", help="resolve away references and print the resolution table")
    p.add_argument("file")
    p.set_defaults(func=_cmd_link)

    p = sub.add_parser("impact", help="report elements affected by changing the given elements")
    p.add_argument("file")
    p.add_argument("--changed", required=True, metavar="CASE.ID[,CASE.ID...]")
    p.set_defaults(func=_cmd_impact)

    p = sub.add_parser("inline", help="inline one clinical case into a monolithic case")
    p.add_argument("file")
    p.add_argument("--cac", required=True, metavar="ID")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=_cmd_inline)

    p = sub.add_parser("render", help="emit a DOT diagram")
    p.add_argument("file")
    p.add_argument("--highlight", metavar="CASE.ID[,CASE.ID...]")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("metrics", help="structural metrics as a table or JSON")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("fmt", help="canonical pretty-print of a case file")
    p.add_argument("file")
    p.add_argument("--check", action="store_true", help="exit 1 when the file is not canonical")
    p.set_defaults(func=_cmd_fmt)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        units = _load_units()
        return args.func(args, units)
    except _Failure as exc:
        print(f"actool: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
