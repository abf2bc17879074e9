"""Command-line front end wiring the five analysis steps together.

Subcommands mirror the pipeline: ``validate`` a model, list its
``interactions``, ``map`` generic failure modes onto them, ``specialise``
the table with a bindings file, ``trace`` propagation pathways,
``mitigations`` to match catalog entries against the table, ``report`` to
render everything, and ``lenses`` to inspect or export catalogs.

Exit codes: 0 success, 1 analysis findings at error severity, 2 usage or
parse failure.  Diagnostics go to standard error; data goes to standard
output unless ``-o`` is given.  There is no hidden state: the same files
and flags always produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .dsl import (
    DslParseError,
    parse_lens_catalog,
    parse_mitigation_catalog,
    parse_model,
    parse_sfm_bindings,
    serialize_lens_catalog,
)
from .interactions import Interaction, extract_interactions, interaction_by_id
from .lenses import CatalogError, LensCatalog, builtin_catalog, merge_catalogs
from .mapping import SpecialisationError, apply_specialisations, map_failure_modes
from .mitigations import Mitigation, builtin_mitigations, suggest_mitigations
from .model import Ooda2Model, Strictness, UnknownIdError, has_errors, validate
from .report import (
    ReportBundle,
    ReportError,
    emit_csv,
    emit_dot,
    emit_json,
    emit_markdown,
)
from .tracing import DEFAULT_MAX_DEPTH, TraceDirection, TracePathway, derive_second_order, trace

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class _CliError(Exception):
    """Internal control flow: abort the subcommand with an exit code."""

    def __init__(self, code: int):
        super().__init__(code)
        self.code = code


def _fail(message: str, code: int = EXIT_FINDINGS) -> None:
    print(f"error: {message}", file=sys.stderr)
    raise _CliError(code)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror or exc}", EXIT_USAGE)


def _parse_file(path: str, parser):
    text = _read(path)
    try:
        return parser(text)
    except DslParseError as exc:
        for diag in exc.diagnostics:
            print(f"{path}:{diag.line}:{diag.column}: error: {diag.message}",
                  file=sys.stderr)
        raise _CliError(EXIT_USAGE) from None


def _lens_catalog(args) -> LensCatalog:
    catalog = (LensCatalog(lenses=[]) if getattr(args, "no_builtin", False)
               else builtin_catalog())
    for path in getattr(args, "lens", None) or []:
        extra = _parse_file(path, parse_lens_catalog)
        try:
            catalog = merge_catalogs(catalog, extra)
        except CatalogError as exc:
            _fail(str(exc))
    return catalog


def _mitigation_catalog(args) -> list[Mitigation]:
    mitigations = list(builtin_mitigations())
    seen = {mit.id for mit in mitigations}
    for path in getattr(args, "mit", None) or []:
        for mit in _parse_file(path, parse_mitigation_catalog):
            if mit.id in seen:
                _fail(f"duplicate mitigation id '{mit.id}' from {path}")
            seen.add(mit.id)
            mitigations.append(mit)
    return mitigations


def _checked_model(args, catalog: LensCatalog,
                   mitigations: list[Mitigation]) -> Ooda2Model:
    """Parse and validate the model; print diagnostics; stop on errors."""
    model = _parse_file(args.model, parse_model)
    strictness = (Strictness.STRICT if getattr(args, "strict", False)
                  else Strictness.LENIENT)
    diagnostics = validate(model, strictness, lens_catalog=catalog,
                           mitigation_catalog=mitigations)
    for diag in diagnostics:
        line = diag.line if diag.line is not None else 0
        print(f"{args.model}:{line}: {diag.severity.value}: {diag.code}: "
              f"{diag.message}", file=sys.stderr)
    if has_errors(diagnostics):
        raise _CliError(EXIT_FINDINGS)
    return model


def _write(args, text: str) -> None:
    output = getattr(args, "output", None)
    if output:
        try:
            with open(output, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as exc:
            _fail(f"cannot write {output}: {exc.strerror or exc}", EXIT_USAGE)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _build_table(args, model: Ooda2Model, interactions: list[Interaction],
                 catalog: LensCatalog):
    table = map_failure_modes(interactions, catalog)
    sfms = []
    if getattr(args, "sfm", None):
        sfms = _parse_file(args.sfm, parse_sfm_bindings)
        try:
            table = apply_specialisations(table, sfms)
        except SpecialisationError as exc:
            _fail(str(exc))
    return table, sfms


def _trace_pathways(args, model: Ooda2Model, interactions: list[Interaction],
                    mitigations: list[Mitigation]) -> list[TracePathway]:
    try:
        interaction = interaction_by_id(interactions, args.interaction)
    except UnknownIdError as exc:
        _fail(str(exc))
    directions = {
        "up": [TraceDirection.UPSTREAM],
        "down": [TraceDirection.DOWNSTREAM],
        "both": [TraceDirection.UPSTREAM, TraceDirection.DOWNSTREAM],
    }[args.direction]
    pathways: list[TracePathway] = []
    for direction in directions:
        try:
            pathways.extend(trace(model, interaction, args.category, direction,
                                  max_depth=args.max_depth,
                                  mitigation_catalog=mitigations))
        except ValueError as exc:
            _fail(str(exc), EXIT_USAGE)
    return pathways


def _pathway_line(pathway: TracePathway) -> str:
    chain = " -> ".join(pathway.node_ids())
    return (f"interaction {pathway.origin.i_id} [{pathway.mode_category}, "
            f"{pathway.direction.value}]: {chain} "
            f"(gain {pathway.total_gain!r}, {pathway.classification.value})")


def _cmd_validate(args) -> int:
    catalog = _lens_catalog(args)
    mitigations = _mitigation_catalog(args)
    model = _parse_file(args.model, parse_model)
    strictness = Strictness.STRICT if args.strict else Strictness.LENIENT
    diagnostics = validate(model, strictness, lens_catalog=catalog,
                           mitigation_catalog=mitigations)
    for diag in diagnostics:
        line = diag.line if diag.line is not None else 0
        print(f"{args.model}:{line}: {diag.severity.value}: {diag.code}: "
              f"{diag.message}", file=sys.stderr)
    return EXIT_FINDINGS if has_errors(diagnostics) else EXIT_OK


def _cmd_interactions(args) -> int:
    catalog = _lens_catalog(args)
    mitigations = _mitigation_catalog(args)
    model = _checked_model(args, catalog, mitigations)
    rows = [
        [interaction.i_id, interaction.name, interaction.machine_stage.display(),
         interaction.human_stage.display(), interaction.direction.display()]
        for interaction in extract_interactions(model)
    ]
    _write(args, _csv_text(
        ["I ID", "Interaction Name", "Machine Stage", "Human Stage", "Direction"],
        rows))
    return EXIT_OK


def _cmd_map(args) -> int:
    catalog = _lens_catalog(args)
    mitigations = _mitigation_catalog(args)
    model = _checked_model(args, catalog, mitigations)
    interactions = extract_interactions(model)
    table, _ = _build_table(args, model, interactions, catalog)
    _write(args, emit_csv(table))
    return EXIT_OK


def _cmd_trace(args) -> int:
    catalog = _lens_catalog(args)
    mitigations = _mitigation_catalog(args)
    model = _checked_model(args, catalog, mitigations)
    interactions = extract_interactions(model)
    pathways = _trace_pathways(args, model, interactions, mitigations)
    if args.format == "text":
        text = "".join(f"{_pathway_line(pathway)}\n" for pathway in pathways)
    elif args.format == "json":
        text = emit_json(ReportBundle(pathways=pathways))
    else:
        try:
            text = emit_dot(model, pathways)
        except ReportError as exc:
            _fail(str(exc))
    _write(args, text)
    return EXIT_OK


def _cmd_mitigations(args) -> int:
    catalog = _lens_catalog(args)
    mitigations = _mitigation_catalog(args)
    model = _checked_model(args, catalog, mitigations)
    interactions = extract_interactions(model)
    table, _ = _build_table(args, model, interactions, catalog)
    rows = [
        [row.i_id, "" if row.sfm_id is None else row.sfm_id,
         row.generic_mode_category, mitigation.id, mitigation.name]
        for row, mitigation in suggest_mitigations(table, mitigations)
    ]
    _write(args, _csv_text(
        ["I ID", "SFM ID", "Category", "Mitigation ID", "Mitigation Name"], rows))
    return EXIT_OK


def _cmd_report(args) -> int:
    catalog = _lens_catalog(args)
    mitigations = _mitigation_catalog(args)
    model = _checked_model(args, catalog, mitigations)
    interactions = extract_interactions(model)
    table, sfms = _build_table(args, model, interactions, catalog)
    pathways: list[TracePathway] = []
    if args.interaction is not None and args.category:
        pathways = _trace_pathways(args, model, interactions, mitigations)
    second_order = []
    if sfms:
        try:
            second_order = derive_second_order(sfms, interactions, catalog)
        except UnknownIdError as exc:
            _fail(str(exc))
    suggestions = suggest_mitigations(table, mitigations)
    bundle = ReportBundle(table=table, pathways=pathways,
                          second_order=second_order, suggestions=suggestions)
    if args.format == "csv":
        text = emit_csv(table)
    elif args.format == "md":
        text = emit_markdown(bundle)
    elif args.format == "json":
        text = emit_json(bundle)
    else:
        if not pathways:
            _fail("--format dot needs --interaction and --category", EXIT_USAGE)
        try:
            text = emit_dot(model, pathways)
        except ReportError as exc:
            _fail(str(exc))
    _write(args, text)
    return EXIT_OK


def _cmd_lenses(args) -> int:
    catalog = _lens_catalog(args)
    if args.export:
        _write(args, serialize_lens_catalog(catalog))
        return EXIT_OK
    lines = [f"{lens.id}: {lens.name} ({len(lens.modes)} modes)"
             for lens in catalog.lenses]
    _write(args, "".join(f"{line}\n" for line in lines))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hatlens",
        description="Left-shift risk analysis for human-autonomy teaming: "
                    "model activity flows, extract cross-boundary interactions, "
                    "map failure modes, trace propagation, report.")
    subparsers = parser.add_subparsers(dest="command", required=True,
                                       metavar="command")

    def model_arg(sub):
        sub.add_argument("model", metavar="model.hat", help="activity model file")

    def catalog_flags(sub):
        sub.add_argument("--lens", action="append", metavar="FILE", default=[],
                         help="extra lens catalog (.lens); repeatable")
        sub.add_argument("--no-builtin", action="store_true",
                         help="start from an empty lens catalog instead of the "
                              "builtin lenses")
        sub.add_argument("--mit", action="append", metavar="FILE", default=[],
                         help="extra mitigation catalog (.mit); repeatable")

    def strict_flag(sub):
        sub.add_argument("--strict", action="store_true",
                         help="treat boundary-crossing edges that do not target "
                              "an Observe action as errors")

    def sfm_flag(sub, required=False):
        sub.add_argument("--sfm", metavar="FILE", required=required,
                         help="specialised failure mode bindings (.sfm)")

    def trace_flags(sub, direction_required):
        sub.add_argument("--interaction", type=int, metavar="I-ID",
                         required=direction_required,
                         help="interaction id to trace from")
        sub.add_argument("--category", metavar="TOKEN",
                         required=direction_required,
                         help="failure mode category driving gain lookups")
        sub.add_argument("--direction", choices=["up", "down", "both"],
                         required=direction_required, default="both",
                         help="trace direction (default: both)")
        sub.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                         metavar="N", help="pathway length cap (default: %(default)s)")

    def output_flag(sub):
        sub.add_argument("-o", "--output", metavar="PATH",
                         help="write data here instead of standard output")

    sub = subparsers.add_parser("validate", help="check a model and print diagnostics")
    model_arg(sub); catalog_flags(sub); strict_flag(sub)
    sub.set_defaults(func=_cmd_validate)

    sub = subparsers.add_parser("interactions",
                                help="list boundary-crossing interactions as CSV")
    model_arg(sub); catalog_flags(sub); strict_flag(sub); output_flag(sub)
    sub.set_defaults(func=_cmd_interactions)

    sub = subparsers.add_parser("map",
                                help="map generic failure modes onto interactions")
    model_arg(sub); catalog_flags(sub); strict_flag(sub); output_flag(sub)
    sub.set_defaults(func=_cmd_map, sfm=None)

    sub = subparsers.add_parser("specialise",
                                help="map failure modes and apply a bindings file")
    model_arg(sub); catalog_flags(sub); strict_flag(sub); sfm_flag(sub, required=True)
    output_flag(sub)
    sub.set_defaults(func=_cmd_map)

    sub = subparsers.add_parser("trace", help="enumerate propagation pathways")
    model_arg(sub); catalog_flags(sub); strict_flag(sub)
    trace_flags(sub, direction_required=True)
    sub.add_argument("--format", choices=["text", "json", "dot"], default="text",
                     help="output format (default: %(default)s)")
    output_flag(sub)
    sub.set_defaults(func=_cmd_trace)

    sub = subparsers.add_parser("mitigations",
                                help="suggest catalog mitigations for table rows")
    model_arg(sub); catalog_flags(sub); strict_flag(sub); sfm_flag(sub)
    output_flag(sub)
    sub.set_defaults(func=_cmd_mitigations)

    sub = subparsers.add_parser("report", help="render the full analysis")
    model_arg(sub); catalog_flags(sub); strict_flag(sub); sfm_flag(sub)
    trace_flags(sub, direction_required=False)
    sub.add_argument("--format", choices=["csv", "md", "json", "dot"],
                     required=True, help="output format")
    output_flag(sub)
    sub.set_defaults(func=_cmd_report)

    sub = subparsers.add_parser("lenses", help="list or export lens catalogs")
    sub.add_argument("--export", action="store_true",
                     help="print the catalog in its file format")
    sub.add_argument("--lens", action="append", metavar="FILE", default=[],
                     help="extra lens catalog (.lens); repeatable")
    sub.add_argument("--no-builtin", action="store_true",
                     help="start from an empty lens catalog")
    output_flag(sub)
    sub.set_defaults(func=_cmd_lenses)

    return parser


def run(argv: list[str] | None = None) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except _CliError as exc:
        return exc.code


def main(argv: list[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
