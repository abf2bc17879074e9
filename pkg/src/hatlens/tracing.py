"""Failure propagation along the activity graph.

``trace`` enumerates every maximal simple path (no repeated node) from an
interaction endpoint: downstream follows edge direction from the target
node, upstream walks reversed edges from the source node.  Each node after
the starting endpoint contributes one step gain: its ``response``
coefficient for the traced category (1 when unspecified), multiplied by
the damping of any attached mitigation matching the category, and by the
damping of matching mitigations on the edge just traversed.  The pathway
classification compares the product against exactly 1.

The loops are cyclic by design; the simple-path restriction is what makes
enumeration finite.  Consequences of a failure repeating over many loop
cycles are covered qualitatively by ``derive_second_order`` instead: a
machine-to-human failure in a comprehensibility-adjacent category can
push the operator toward ignoring the autonomy (disuse) or accepting its
output without understanding (misuse).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .interactions import Direction, Interaction, interaction_by_id
from .lenses import LensCatalog
from .mapping import SpecialisedFailureMode
from .mitigations import Mitigation, builtin_mitigations
from .model import ActionNode, ActivityEdge, Ooda2Model

DEFAULT_MAX_DEPTH = 16
DEFAULT_SECOND_ORDER_CATEGORIES = ("stability", "timely", "uncertainty")


class TraceDirection(Enum):
    UPSTREAM = "up"
    DOWNSTREAM = "down"


class Classification(Enum):
    MITIGATED = "Mitigated"
    NEUTRAL = "Neutral"
    AMPLIFIED = "Amplified"


def classify(total_gain: float) -> Classification:
    if total_gain < 1:
        return Classification.MITIGATED
    if total_gain > 1:
        return Classification.AMPLIFIED
    return Classification.NEUTRAL


@dataclass(frozen=True, eq=False)
class TracePathway:
    origin: Interaction
    mode_category: str
    direction: TraceDirection
    nodes: tuple[ActionNode, ...]
    step_gains: tuple[float, ...]
    total_gain: float
    classification: Classification

    def node_ids(self) -> tuple[str, ...]:
        return tuple(node.id for node in self.nodes)


def _step_gain(node: ActionNode, arrived_by: ActivityEdge | None, category: str,
               mitigations: dict[str, Mitigation]) -> float:
    behaviour = node.response.get(category)
    gain = behaviour.coefficient if behaviour is not None else 1.0
    attached = list(node.mitigation_ids)
    if arrived_by is not None:
        attached += arrived_by.mitigation_ids
    for mit_id in attached:
        mitigation = mitigations.get(mit_id)
        if mitigation is not None and category in mitigation.categories:
            gain *= mitigation.damping
    return gain


def trace(
    model: Ooda2Model,
    interaction: Interaction,
    mode_category: str,
    direction: TraceDirection,
    max_depth: int = DEFAULT_MAX_DEPTH,
    *,
    mitigation_catalog: list[Mitigation] | None = None,
) -> list[TracePathway]:
    """All maximal simple paths from the interaction endpoint, with gains.

    Paths hold at most ``max_depth`` nodes; a dead-end endpoint yields the
    single one-node pathway with gain 1.  Results are ordered
    lexicographically by node-id sequence.  ``mitigation_catalog`` supplies
    damping values and defaults to the builtins.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    if mitigation_catalog is None:
        mitigation_catalog = builtin_mitigations()
    mitigations = {mit.id: mit for mit in mitigation_catalog}
    nodes = model.nodes_by_id()

    downstream = direction is TraceDirection.DOWNSTREAM
    adjacency: dict[str, list[ActivityEdge]] = {}
    for edge in model.edges:
        adjacency.setdefault(edge.from_id if downstream else edge.to_id, []).append(edge)

    start = interaction.target if downstream else interaction.source
    paths: list[list[tuple[ActionNode, ActivityEdge | None]]] = []

    def extend(path: list[tuple[ActionNode, ActivityEdge | None]], visited: set[str]) -> None:
        tip = path[-1][0]
        steps: list[tuple[ActionNode, ActivityEdge]] = []
        if len(path) < max_depth:
            taken: set[str] = set()
            for edge in adjacency.get(tip.id, ()):
                next_id = edge.to_id if downstream else edge.from_id
                # Parallel edges between one node pair would duplicate the
                # node sequence; only the first-declared edge is followed.
                if next_id in visited or next_id in taken:
                    continue
                taken.add(next_id)
                steps.append((nodes[next_id], edge))
        if not steps:
            paths.append(path)
            return
        for node, edge in steps:
            extend(path + [(node, edge)], visited | {node.id})

    extend([(start, None)], {start.id})
    paths.sort(key=lambda path: tuple(node.id for node, _ in path))

    pathways = []
    for path in paths:
        step_gains = tuple(
            _step_gain(node, edge, mode_category, mitigations) for node, edge in path[1:]
        )
        total_gain = math.prod(step_gains)
        pathways.append(TracePathway(
            origin=interaction,
            mode_category=mode_category,
            direction=direction,
            nodes=tuple(node for node, _ in path),
            step_gains=step_gains,
            total_gain=total_gain,
            classification=classify(total_gain),
        ))
    return pathways


class InducedMode(Enum):
    DISUSE = "Disuse"
    MISUSE = "Misuse"


@dataclass(frozen=True)
class SecondOrderEffect:
    origin_sfm_id: int
    induced_mode: InducedMode
    rationale: str


def derive_second_order(
    sfms: list[SpecialisedFailureMode],
    interactions: list[Interaction],
    catalog: LensCatalog,
    *,
    categories: tuple[str, ...] = DEFAULT_SECOND_ORDER_CATEGORIES,
) -> list[SecondOrderEffect]:
    """Disuse/misuse effects induced by machine-to-human failures.

    Every specialisation bound to a MachineToHuman interaction whose generic
    mode falls in one of the trigger ``categories`` yields exactly two
    effects, in sfm order.
    """
    effects: list[SecondOrderEffect] = []
    for sfm in sfms:
        interaction = interaction_by_id(interactions, sfm.interaction_id)
        if interaction.direction is not Direction.MACHINE_TO_HUMAN:
            continue
        mode = catalog.mode_by_id(sfm.generic_mode_id)
        if mode.category not in categories:
            continue
        effects.append(SecondOrderEffect(
            origin_sfm_id=sfm.sfm_id,
            induced_mode=InducedMode.DISUSE,
            rationale="operator ignores the autonomy",
        ))
        effects.append(SecondOrderEffect(
            origin_sfm_id=sfm.sfm_id,
            induced_mode=InducedMode.MISUSE,
            rationale="operator accepts without understanding",
        ))
    return effects
