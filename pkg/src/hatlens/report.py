"""Deterministic emitters for analysis results: CSV, Markdown, JSON, DOT.

Every emitter is a pure function of its arguments; identical input produces
byte-identical output.  CSV carries the failure-mode table alone, Markdown
and JSON carry a full ``ReportBundle``, DOT renders a model with one or
more trace pathways highlighted.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

from .mapping import FailureModeRow, FailureModeTable
from .mitigations import Mitigation
from .model import Ooda2Model
from .tracing import SecondOrderEffect, TraceDirection, TracePathway

CSV_HEADER = ("I ID,SFM ID,Interaction Name,Machine Stage,Human Stage,Direction,"
              "Generic Failure Mode,Specialised Failure Mode")


class ReportError(ValueError):
    """Raised when asked to render mutually inconsistent inputs."""


@dataclass
class ReportBundle:
    """Everything one analysis run produced, ready for rendering."""

    table: FailureModeTable = field(default_factory=lambda: FailureModeTable(rows=[]))
    pathways: list[TracePathway] = field(default_factory=list)
    second_order: list[SecondOrderEffect] = field(default_factory=list)
    suggestions: list[tuple[FailureModeRow, Mitigation]] = field(default_factory=list)


def _row_cells(row: FailureModeRow) -> list[str]:
    return [
        str(row.i_id),
        "" if row.sfm_id is None else str(row.sfm_id),
        row.interaction_name,
        row.machine_stage.display(),
        row.human_stage.display(),
        row.direction.display(),
        row.generic_mode_title,
        "" if row.specialised_text is None else row.specialised_text,
    ]


def emit_csv(table: FailureModeTable) -> str:
    """Failure-mode table as CSV: exact fixed header, LF endings, one
    trailing LF; fields holding commas or quotes are double-quoted."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in table.rows:
        writer.writerow(_row_cells(row))
    return buffer.getvalue()


def _md_cell(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|")


def _pathway_label(pathway: TracePathway) -> str:
    chain = " -> ".join(pathway.node_ids())
    return (f"interaction {pathway.origin.i_id} [{pathway.mode_category}, "
            f"{pathway.direction.value}]: {chain} "
            f"(gain {pathway.total_gain!r}, {pathway.classification.value})")


def _suggestion_label(row: FailureModeRow, mitigation: Mitigation) -> str:
    where = f"I{row.i_id}" if row.sfm_id is None else f"I{row.i_id}/SFM {row.sfm_id}"
    return (f"{where} [{row.generic_mode_category}]: "
            f"{mitigation.id} ({mitigation.name})")


def emit_markdown(bundle: ReportBundle) -> str:
    """Bundle as Markdown: the table as a pipe table, then pathway,
    second-order, and suggestion sections (each lists "(none)" when empty)."""
    header_cells = CSV_HEADER.split(",")
    lines = ["## Failure Modes", ""]
    lines.append("| " + " | ".join(header_cells) + " |")
    lines.append("| " + " | ".join("---" for _ in header_cells) + " |")
    for row in bundle.table.rows:
        lines.append("| " + " | ".join(_md_cell(cell) for cell in _row_cells(row)) + " |")
    lines += ["", "## Pathways", ""]
    if bundle.pathways:
        lines += [f"- {_pathway_label(pathway)}" for pathway in bundle.pathways]
    else:
        lines.append("(none)")
    lines += ["", "## Second-order Effects", ""]
    if bundle.second_order:
        lines += [
            f"- SFM {effect.origin_sfm_id} induces {effect.induced_mode.value}: "
            f"{effect.rationale}"
            for effect in bundle.second_order
        ]
    else:
        lines.append("(none)")
    lines += ["", "## Mitigation Suggestions", ""]
    if bundle.suggestions:
        lines += [f"- {_suggestion_label(row, mit)}" for row, mit in bundle.suggestions]
    else:
        lines.append("(none)")
    return "\n".join(lines) + "\n"


def _pathway_json(pathway: TracePathway) -> dict:
    return {
        "interaction_id": pathway.origin.i_id,
        "category": pathway.mode_category,
        "direction": pathway.direction.value,
        "nodes": list(pathway.node_ids()),
        "step_gains": list(pathway.step_gains),
        "total_gain": pathway.total_gain,
        "classification": pathway.classification.value,
    }


def _effect_json(effect: SecondOrderEffect) -> dict:
    return {
        "sfm_id": effect.origin_sfm_id,
        "induced_mode": effect.induced_mode.value,
        "rationale": effect.rationale,
    }


def emit_json(bundle: ReportBundle) -> str:
    """Bundle as JSON with a fixed key order (schema shipped in docs/)."""
    document = {
        "failure_modes": [
            {
                "i_id": row.i_id,
                "sfm_id": row.sfm_id,
                "interaction_name": row.interaction_name,
                "machine_stage": row.machine_stage.display(),
                "human_stage": row.human_stage.display(),
                "direction": row.direction.display(),
                "generic_failure_mode": row.generic_mode_title,
                "specialised_failure_mode": row.specialised_text,
                "category": row.generic_mode_category,
            }
            for row in bundle.table.rows
        ],
        "pathways": [_pathway_json(pathway) for pathway in bundle.pathways],
        "second_order_effects": [_effect_json(effect) for effect in bundle.second_order],
        "mitigation_suggestions": [
            {
                "i_id": row.i_id,
                "sfm_id": row.sfm_id,
                "category": row.generic_mode_category,
                "mitigation_id": mitigation.id,
                "mitigation_name": mitigation.name,
            }
            for row, mitigation in bundle.suggestions
        ],
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def emit_second_order_json(effects: Sequence[SecondOrderEffect]) -> str:
    """Second-order effects alone, as a JSON array."""
    return json.dumps([_effect_json(effect) for effect in effects],
                      indent=2, ensure_ascii=False) + "\n"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(model: Ooda2Model, pathway: TracePathway | Sequence[TracePathway]) -> str:
    """Model as a DOT digraph, lanes as subgraph clusters, with the given
    pathway's nodes and edges highlighted (penwidth) and each pathway's
    originating interaction edge dashed.  Accepts one pathway or several
    (the highlight is their union); every pathway must belong to the model."""
    pathways = [pathway] if isinstance(pathway, TracePathway) else list(pathway)
    highlight_nodes: set[str] = set()
    highlight_pairs: set[tuple[str, str]] = set()
    dashed_edges: set[str] = set()
    model_pairs = {(edge.from_id, edge.to_id) for edge in model.edges}
    model_edge_ids = {edge.id for edge in model.edges}
    model_nodes = model.nodes_by_id()
    for trail in pathways:
        ids = trail.node_ids()
        for node_id in ids:
            if node_id not in model_nodes:
                raise ReportError(
                    f"pathway node '{node_id}' is not part of model '{model.name}'")
        for first, second in zip(ids, ids[1:]):
            pair = ((first, second) if trail.direction is TraceDirection.DOWNSTREAM
                    else (second, first))
            if pair not in model_pairs:
                raise ReportError(
                    f"pathway step {pair[0]} -> {pair[1]} has no edge in model "
                    f"'{model.name}'")
            highlight_pairs.add(pair)
        if trail.origin.edge.id not in model_edge_ids:
            raise ReportError(
                f"pathway interaction edge '{trail.origin.edge.id}' is not part of "
                f"model '{model.name}'")
        highlight_nodes.update(ids)
        dashed_edges.add(trail.origin.edge.id)

    lines = [f"digraph {_dot_quote(model.name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    for lane in model.lanes:
        lines.append(f"  subgraph {_dot_quote('cluster_' + lane.id)} {{")
        lines.append(f"    label={_dot_quote(lane.display_name)};")
        for node in model.nodes:
            if node.lane_id != lane.id:
                continue
            attrs = [f"label={_dot_quote(node.label)}"]
            if node.id in highlight_nodes:
                attrs.append("penwidth=3")
            lines.append(f"    {_dot_quote(node.id)} [{', '.join(attrs)}];")
        lines.append("  }")
    for edge in model.edges:
        attrs = []
        caption = edge.name if edge.name is not None else (
            f"[{edge.guard}]" if edge.guard is not None else None)
        if caption is not None:
            attrs.append(f"label={_dot_quote(caption)}")
        if edge.id in dashed_edges:
            attrs.append("style=dashed")
        if (edge.from_id, edge.to_id) in highlight_pairs:
            attrs.append("penwidth=3")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_dot_quote(edge.from_id)} -> {_dot_quote(edge.to_id)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"
