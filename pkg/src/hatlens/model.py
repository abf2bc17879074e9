"""Activity-graph data model for two-sided observe-orient-decide-act loops.

A model is a set of swimlanes, one per collaborating subsystem, each tagged
with the side of the human/machine boundary it belongs to.  Lanes hold
stage-tagged action nodes; directed edges wire the nodes into decision
cycles.  Cycles are expected, and edges crossing the human/machine boundary
are the raw material every later analysis step works on.

``validate`` checks referential integrity plus two modelling conventions:

* OBSERVE_TARGET -- a boundary-crossing edge should target an Observe-stage
  node.  Error under Strict, warning under Lenient.
* STAGE_ORDER -- an intra-lane edge should stay on the stage cycle (same
  stage or its cyclic successor).  Guarded edges leaving a Decide node are
  decision branches and exempt.  Always a warning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

DEFAULT_AMPLIFY_COEFFICIENT = 2.0
DEFAULT_DAMPEN_COEFFICIENT = 0.5


class Side(Enum):
    HUMAN = "human"
    MACHINE = "machine"


class LaneKind(Enum):
    OPERATOR = "operator"
    AUTONOMY = "autonomy"
    HMI = "hmi"
    OTHER = "other"


# Kinds pinned to one side of the boundary; "other" may sit on either side.
KIND_SIDES = {
    LaneKind.OPERATOR: Side.HUMAN,
    LaneKind.AUTONOMY: Side.MACHINE,
    LaneKind.HMI: Side.MACHINE,
}


class Stage(Enum):
    OBSERVE = "observe"
    ORIENT = "orient"
    DECIDE = "decide"
    ACT = "act"

    @property
    def successor(self) -> "Stage":
        cycle = (Stage.OBSERVE, Stage.ORIENT, Stage.DECIDE, Stage.ACT)
        return cycle[(cycle.index(self) + 1) % len(cycle)]

    def display(self) -> str:
        return self.value.capitalize()


class GainKind(Enum):
    AMPLIFY = "amplify"
    DAMPEN = "dampen"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class GainBehaviour:
    """How a node transforms a propagating failure mode: a positive gain."""

    kind: GainKind
    coefficient: float

    def __post_init__(self) -> None:
        if self.coefficient <= 0:
            raise ValueError(f"gain coefficient must be positive, got {self.coefficient}")
        if self.kind is GainKind.AMPLIFY and self.coefficient <= 1:
            raise ValueError(f"amplify coefficient must be > 1, got {self.coefficient}")
        if self.kind is GainKind.DAMPEN and self.coefficient >= 1:
            raise ValueError(f"dampen coefficient must be < 1, got {self.coefficient}")
        if self.kind is GainKind.NEUTRAL and self.coefficient != 1:
            raise ValueError(f"neutral coefficient is fixed at 1, got {self.coefficient}")

    @classmethod
    def amplify(cls, coefficient: float = DEFAULT_AMPLIFY_COEFFICIENT) -> "GainBehaviour":
        return cls(GainKind.AMPLIFY, coefficient)

    @classmethod
    def dampen(cls, coefficient: float = DEFAULT_DAMPEN_COEFFICIENT) -> "GainBehaviour":
        return cls(GainKind.DAMPEN, coefficient)

    @classmethod
    def neutral(cls) -> "GainBehaviour":
        return cls(GainKind.NEUTRAL, 1.0)


@dataclass
class Lane:
    id: str
    side: Side
    kind: LaneKind
    display_name: str
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass
class ActionNode:
    id: str
    lane_id: str
    stage: Stage
    label: str
    # Gain applied per mode-category token when a trace passes through.
    response: dict[str, GainBehaviour] = field(default_factory=dict)
    # Category tokens naming upstream failure mechanisms this node can introduce.
    causes: list[str] = field(default_factory=list)
    mitigation_ids: list[str] = field(default_factory=list)
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass
class ActivityEdge:
    # Edge ids are derived (assigned in declaration order), never authored,
    # so they do not participate in equality.
    id: str = field(compare=False)
    from_id: str
    to_id: str
    guard: str | None = None
    name: str | None = None
    mitigation_ids: list[str] = field(default_factory=list)
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass
class Ooda2Model:
    """Two interlocking decision loops: lanes, staged nodes, directed edges."""

    name: str
    lanes: list[Lane] = field(default_factory=list)
    nodes: list[ActionNode] = field(default_factory=list)
    edges: list[ActivityEdge] = field(default_factory=list)
    line: int | None = field(default=None, compare=False, repr=False)

    def lanes_by_id(self) -> dict[str, Lane]:
        return {lane.id: lane for lane in self.lanes}

    def nodes_by_id(self) -> dict[str, ActionNode]:
        return {node.id: node for node in self.nodes}


class UnknownIdError(LookupError):
    """A lookup by id found nothing."""


def node_lookup(model: Ooda2Model, node_id: str) -> ActionNode:
    """Return the node declared with ``node_id`` or raise UnknownIdError."""
    for node in model.nodes:
        if node.id == node_id:
            return node
    raise UnknownIdError(f"model '{model.name}' has no node '{node_id}'")


def lane_lookup(model: Ooda2Model, lane_id: str) -> Lane:
    """Return the lane declared with ``lane_id`` or raise UnknownIdError."""
    for lane in model.lanes:
        if lane.id == lane_id:
            return lane
    raise UnknownIdError(f"model '{model.name}' has no lane '{lane_id}'")


def node_side(model: Ooda2Model, node: ActionNode) -> Side:
    """Side of the boundary the node's lane sits on."""
    return lane_lookup(model, node.lane_id).side


class Strictness(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    line: int | None = None


def _diag(sev: Severity, code: str, message: str, line: int | None) -> Diagnostic:
    return Diagnostic(sev, code, message, line)


def validate(
    model: Ooda2Model,
    strictness: Strictness = Strictness.LENIENT,
    *,
    lens_catalog=None,
    mitigation_catalog=None,
) -> list[Diagnostic]:
    """Check a model and return every diagnostic, deterministically ordered.

    Referential problems (duplicate ids, dangling references, self-loops,
    lane kind on the wrong side, response categories or mitigation ids the
    loaded catalogs do not know) are always errors.  OBSERVE_TARGET is an
    error under Strict and a warning under Lenient; STAGE_ORDER is always a
    warning.  A model with no boundary-crossing edge gets a NO_INTERACTIONS
    warning.  ``lens_catalog`` / ``mitigation_catalog`` default to the
    builtins.
    """
    # Imported here: the catalog modules sit above this one in the package.
    from .lenses import builtin_catalog
    from .mitigations import builtin_mitigations

    if lens_catalog is None:
        lens_catalog = builtin_catalog()
    if mitigation_catalog is None:
        mitigation_catalog = builtin_mitigations()
    known_categories = {mode.category for mode in lens_catalog.modes()}
    known_mitigations = {mit.id for mit in mitigation_catalog}

    diags: list[Diagnostic] = []
    err = Severity.ERROR
    warn = Severity.WARNING

    lanes: dict[str, Lane] = {}
    for lane in model.lanes:
        if lane.id in lanes:
            diags.append(_diag(err, "DUPLICATE_ID", f"duplicate lane id '{lane.id}'", lane.line))
            continue
        lanes[lane.id] = lane
        required = KIND_SIDES.get(lane.kind)
        if required is not None and lane.side is not required:
            diags.append(_diag(
                err, "LANE_KIND",
                f"lane '{lane.id}' kind {lane.kind.value} requires side {required.value}",
                lane.line,
            ))

    nodes: dict[str, ActionNode] = {}
    for node in model.nodes:
        if node.id in nodes:
            diags.append(_diag(err, "DUPLICATE_ID", f"duplicate node id '{node.id}'", node.line))
            continue
        nodes[node.id] = node
        if node.lane_id not in lanes:
            diags.append(_diag(
                err, "UNRESOLVED_REF",
                f"node '{node.id}' references undeclared lane '{node.lane_id}'",
                node.line,
            ))
        for category in node.response:
            if category not in known_categories:
                diags.append(_diag(
                    err, "UNKNOWN_CATEGORY",
                    f"node '{node.id}' response category '{category}' is not in the loaded lens catalog",
                    node.line,
                ))
        for mit_id in node.mitigation_ids:
            if mit_id not in known_mitigations:
                diags.append(_diag(
                    err, "UNKNOWN_MITIGATION",
                    f"node '{node.id}' references unknown mitigation '{mit_id}'",
                    node.line,
                ))

    edge_ids: set[str] = set()
    resolved_edges: list[tuple[ActivityEdge, ActionNode, ActionNode]] = []
    for edge in model.edges:
        if edge.id in edge_ids:
            diags.append(_diag(err, "DUPLICATE_ID", f"duplicate edge id '{edge.id}'", edge.line))
            continue
        edge_ids.add(edge.id)
        ok = True
        for endpoint in (edge.from_id, edge.to_id):
            if endpoint not in nodes:
                diags.append(_diag(
                    err, "UNRESOLVED_REF",
                    f"edge '{edge.id}' references undeclared node '{endpoint}'",
                    edge.line,
                ))
                ok = False
        if ok and edge.from_id == edge.to_id:
            diags.append(_diag(
                err, "SELF_LOOP", f"edge '{edge.id}' loops node '{edge.from_id}' onto itself",
                edge.line,
            ))
            ok = False
        for mit_id in edge.mitigation_ids:
            if mit_id not in known_mitigations:
                diags.append(_diag(
                    err, "UNKNOWN_MITIGATION",
                    f"edge '{edge.id}' references unknown mitigation '{mit_id}'",
                    edge.line,
                ))
        if ok:
            src, tgt = nodes[edge.from_id], nodes[edge.to_id]
            if src.lane_id in lanes and tgt.lane_id in lanes:
                resolved_edges.append((edge, src, tgt))

    crossings = [
        (edge, src, tgt)
        for edge, src, tgt in resolved_edges
        if lanes[src.lane_id].side is not lanes[tgt.lane_id].side
    ]
    if not crossings:
        diags.append(_diag(warn, "NO_INTERACTIONS", "no interactions possible", model.line))

    observe_severity = err if strictness is Strictness.STRICT else warn
    for edge, _src, tgt in crossings:
        if tgt.stage is not Stage.OBSERVE:
            diags.append(_diag(
                observe_severity, "OBSERVE_TARGET",
                f"cross-side edge '{edge.id}' targets {tgt.stage.display()}-stage node "
                f"'{tgt.id}' instead of an Observe-stage node",
                edge.line,
            ))

    for edge, src, tgt in resolved_edges:
        if src.lane_id != tgt.lane_id:
            continue
        if tgt.stage in (src.stage, src.stage.successor):
            continue
        if src.stage is Stage.DECIDE and edge.guard:
            continue  # decision branch
        diags.append(_diag(
            warn, "STAGE_ORDER",
            f"edge '{edge.id}' jumps the stage cycle "
            f"({src.stage.display()} -> {tgt.stage.display()})",
            edge.line,
        ))

    return diags


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
