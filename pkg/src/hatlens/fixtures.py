"""Bundled worked examples: input files plus golden outputs for tests.

Each fixture is a directory under ``hatlens/fixtures/`` holding a model
(``<name>.hat``), optional lens / binding / mitigation files, and the
golden outputs the current tool must regenerate bit-identically.  The
``atc`` fixture models a landing-sequence decision support scenario; the
``minimal`` fixture is a two-lane toy with one interaction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .dsl import (
    parse_lens_catalog,
    parse_mitigation_catalog,
    parse_model,
    parse_sfm_bindings,
)
from .interactions import extract_interactions, interaction_by_id
from .lenses import LensCatalog, builtin_catalog, merge_catalogs
from .mapping import apply_specialisations, map_failure_modes
from .mitigations import Mitigation, builtin_mitigations
from .model import Ooda2Model
from .report import emit_csv, emit_dot, emit_second_order_json
from .tracing import TraceDirection, derive_second_order, trace

_ROOT = Path(__file__).parent / "fixtures"

_GOLDEN_SUFFIXES = (".csv", ".dot", ".json")


@dataclass(frozen=True)
class GoldenFixture:
    name: str
    root: Path
    model_path: Path
    lens_path: Path | None
    sfm_path: Path | None
    mitigation_path: Path | None
    expected: dict[str, Path]


def available_fixtures() -> list[str]:
    return sorted(entry.name for entry in _ROOT.iterdir() if entry.is_dir())


def load_fixture(name: str) -> GoldenFixture:
    """Locate a bundled fixture and check that every input parses cleanly."""
    root = _ROOT / name
    model_path = root / f"{name}.hat"
    if not model_path.is_file():
        raise FileNotFoundError(f"no fixture named '{name}' under {_ROOT}")

    def optional(suffix: str) -> Path | None:
        path = root / f"{name}{suffix}"
        return path if path.is_file() else None

    fixture = GoldenFixture(
        name=name,
        root=root,
        model_path=model_path,
        lens_path=optional(".lens"),
        sfm_path=optional(".sfm"),
        mitigation_path=optional(".mit"),
        expected={
            path.name: path
            for path in sorted(root.iterdir())
            if path.suffix in _GOLDEN_SUFFIXES
        },
    )
    parse_model(model_path.read_text(encoding="utf-8"))
    if fixture.lens_path is not None:
        parse_lens_catalog(fixture.lens_path.read_text(encoding="utf-8"))
    if fixture.sfm_path is not None:
        parse_sfm_bindings(fixture.sfm_path.read_text(encoding="utf-8"))
    if fixture.mitigation_path is not None:
        parse_mitigation_catalog(fixture.mitigation_path.read_text(encoding="utf-8"))
    for path in fixture.expected.values():
        path.read_text(encoding="utf-8")
    return fixture


def _load_inputs(fixture: GoldenFixture):
    model = parse_model(fixture.model_path.read_text(encoding="utf-8"))
    catalog = builtin_catalog()
    if fixture.lens_path is not None:
        catalog = merge_catalogs(
            catalog, parse_lens_catalog(fixture.lens_path.read_text(encoding="utf-8")))
    sfms = []
    if fixture.sfm_path is not None:
        sfms = parse_sfm_bindings(fixture.sfm_path.read_text(encoding="utf-8"))
    mitigations = list(builtin_mitigations())
    if fixture.mitigation_path is not None:
        mitigations += parse_mitigation_catalog(
            fixture.mitigation_path.read_text(encoding="utf-8"))
    return model, catalog, sfms, mitigations


def _table_csv(model: Ooda2Model, catalog: LensCatalog, sfms,
               mitigations: list[Mitigation]) -> str:
    interactions = extract_interactions(model)
    table = map_failure_modes(interactions, catalog)
    if sfms:
        table = apply_specialisations(table, sfms)
    return emit_csv(table)


def _pathway_sfm4_dot(model: Ooda2Model, catalog: LensCatalog, sfms,
                      mitigations: list[Mitigation]) -> str:
    origin = next(sfm for sfm in sfms if sfm.sfm_id == 4)
    interactions = extract_interactions(model)
    interaction = interaction_by_id(interactions, origin.interaction_id)
    category = catalog.mode_by_id(origin.generic_mode_id).category
    pathways = trace(model, interaction, category, TraceDirection.DOWNSTREAM,
                     mitigation_catalog=mitigations)
    return emit_dot(model, pathways)


def _second_order_json(model: Ooda2Model, catalog: LensCatalog, sfms,
                       mitigations: list[Mitigation]) -> str:
    interactions = extract_interactions(model)
    return emit_second_order_json(derive_second_order(sfms, interactions, catalog))


_RECIPES = {
    "table.csv": _table_csv,
    "pathway_sfm4.dot": _pathway_sfm4_dot,
    "second_order.json": _second_order_json,
}


def regenerate(fixture: GoldenFixture) -> dict[str, str]:
    """Recompute every golden output from the fixture's inputs."""
    model, catalog, sfms, mitigations = _load_inputs(fixture)
    return {
        name: _RECIPES[name](model, catalog, sfms, mitigations)
        for name in fixture.expected
        if name in _RECIPES
    }
