"""Crossing interactions with lens modes into the failure-mode table.

``map_failure_modes`` produces one row per interaction and applicable
non-benign generic mode.  ``apply_specialisations`` then merges in the
analyst's refinements: a generic row that gains one or more specialised
rows is replaced by them, while untouched generic rows stay, so gaps in
the analysis remain visible to reviewers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .interactions import Direction, Interaction
from .lenses import LensCatalog, applicable_modes
from .model import Stage


@dataclass(frozen=True)
class SpecialisedFailureMode:
    sfm_id: int
    interaction_id: int
    generic_mode_id: str
    text: str
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FailureModeRow:
    i_id: int
    sfm_id: int | None
    interaction_name: str
    machine_stage: Stage
    human_stage: Stage
    direction: Direction
    generic_mode_id: str
    generic_mode_title: str
    generic_mode_category: str
    specialised_text: str | None


@dataclass
class FailureModeTable:
    rows: list[FailureModeRow] = field(default_factory=list)


class SpecialisationError(ValueError):
    """A specialisation list cannot be applied to the table."""


def map_failure_modes(interactions: list[Interaction], catalog: LensCatalog) -> FailureModeTable:
    """One unspecialised row per (interaction, applicable non-benign mode)."""
    rows: list[FailureModeRow] = []
    for interaction in interactions:
        for mode in applicable_modes(catalog, interaction):
            if mode.benign:
                continue
            rows.append(FailureModeRow(
                i_id=interaction.i_id,
                sfm_id=None,
                interaction_name=interaction.name,
                machine_stage=interaction.machine_stage,
                human_stage=interaction.human_stage,
                direction=interaction.direction,
                generic_mode_id=mode.id,
                generic_mode_title=mode.title,
                generic_mode_category=mode.category,
                specialised_text=None,
            ))
    return FailureModeTable(rows=rows)


def _check_sfms(table: FailureModeTable, sfms: list[SpecialisedFailureMode]) -> None:
    applied = {row.sfm_id for row in table.rows if row.sfm_id is not None}
    previous: int | None = None
    for sfm in sfms:
        if previous is not None:
            if sfm.sfm_id == previous:
                raise SpecialisationError(f"duplicate sfm id {sfm.sfm_id}")
            if sfm.sfm_id != previous + 1:
                raise SpecialisationError(
                    f"sfm ids must ascend without gaps: {sfm.sfm_id} follows {previous}"
                )
        previous = sfm.sfm_id
        if sfm.sfm_id in applied:
            raise SpecialisationError(f"sfm id {sfm.sfm_id} is already applied to this table")
        interaction_rows = [row for row in table.rows if row.i_id == sfm.interaction_id]
        if not interaction_rows:
            raise SpecialisationError(
                f"sfm {sfm.sfm_id} references unknown interaction {sfm.interaction_id}"
            )
        if not any(row.generic_mode_id == sfm.generic_mode_id for row in interaction_rows):
            if any(row.generic_mode_id == sfm.generic_mode_id for row in table.rows):
                raise SpecialisationError(
                    f"sfm {sfm.sfm_id}: mode '{sfm.generic_mode_id}' is not applicable "
                    f"to interaction {sfm.interaction_id}"
                )
            raise SpecialisationError(
                f"sfm {sfm.sfm_id}: unknown generic mode '{sfm.generic_mode_id}'"
            )


def apply_specialisations(
    table: FailureModeTable, sfms: list[SpecialisedFailureMode]
) -> FailureModeTable:
    """Merge specialisations into the table, returning a new table.

    Within each interaction the result lists specialised rows first
    (ascending sfm id), then the remaining generic rows in catalog order.
    """
    if not sfms:
        return FailureModeTable(rows=list(table.rows))
    _check_sfms(table, sfms)

    pending: dict[tuple[int, str], list[SpecialisedFailureMode]] = {}
    for sfm in sfms:
        pending.setdefault((sfm.interaction_id, sfm.generic_mode_id), []).append(sfm)

    groups: dict[int, list[FailureModeRow]] = {}
    for row in table.rows:
        groups.setdefault(row.i_id, []).append(row)

    new_rows: list[FailureModeRow] = []
    for i_id, rows in groups.items():
        mode_order: list[str] = []
        base: dict[str, FailureModeRow] = {}
        generic: dict[str, FailureModeRow] = {}
        specialised: dict[str, list[FailureModeRow]] = {}
        for row in rows:
            if row.generic_mode_id not in base:
                mode_order.append(row.generic_mode_id)
                base[row.generic_mode_id] = row
            if row.sfm_id is None:
                generic[row.generic_mode_id] = row
            else:
                specialised.setdefault(row.generic_mode_id, []).append(row)
        for mode_id in mode_order:
            for sfm in pending.get((i_id, mode_id), ()):
                specialised.setdefault(mode_id, []).append(replace(
                    base[mode_id], sfm_id=sfm.sfm_id, specialised_text=sfm.text,
                ))
        new_rows.extend(sorted(
            (row for rows_ in specialised.values() for row in rows_),
            key=lambda row: row.sfm_id,
        ))
        new_rows.extend(
            generic[mode_id] for mode_id in mode_order
            if mode_id in generic and mode_id not in specialised
        )
    return FailureModeTable(rows=new_rows)
