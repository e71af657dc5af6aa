"""Goal graphs: needs, goals, objectives and requirements linked by derivation."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Mapping

from .common import Violation
from .errors import ModelError, UnknownIdError
from .process import ProcessModel, extract_fragments

NODE_KINDS = ("need", "strategic_goal", "operational_goal", "objective", "requirement", "change_goal")
HORIZONS = ("strategic", "operational", "none")
EDGE_KINDS = ("derives", "supports", "determines", "realized_by")

# position in the need -> goal -> objective -> requirement layering
RANK = {
    "need": 0,
    "strategic_goal": 1,
    "operational_goal": 1,
    "change_goal": 1,
    "objective": 2,
    "requirement": 3,
}

DEFAULT_HORIZON = {
    "need": "strategic",
    "strategic_goal": "strategic",
    "operational_goal": "operational",
    "change_goal": "none",
    "objective": "none",
    "requirement": "none",
}


@dataclass(frozen=True)
class GoalNode:
    id: str
    label: str
    kind: str
    horizon: str = ""

    def __post_init__(self):
        if not self.horizon:
            object.__setattr__(self, "horizon", DEFAULT_HORIZON.get(self.kind, "none"))


@dataclass(frozen=True)
class Stakeholder:
    id: str
    name: str
    role: str = ""


@dataclass(frozen=True)
class Edge:
    src: str
    kind: str
    dst: str


@dataclass(frozen=True)
class GoalGraph:
    id: str
    nodes: tuple = ()
    stakeholders: tuple = ()
    edges: tuple = ()

    def node(self, nid: str) -> GoalNode:
        for n in self.nodes:
            if n.id == nid:
                return n
        raise UnknownIdError("goal node", nid)

    def has_node(self, nid: str) -> bool:
        return any(n.id == nid for n in self.nodes)

    @property
    def realizations(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = defaultdict(list)
        for e in self.edges:
            if e.kind == "realized_by":
                out[e.src].append(e.dst)
        return {k: tuple(v) for k, v in out.items()}


def split_target(target: str) -> tuple[str, str | None]:
    """``"net:PF2"`` -> ``("net", "PF2")``; ``"net"`` -> ``("net", None)``."""
    model, sep, frag = target.partition(":")
    return model, (frag if sep else None)


def validate_goals(g: GoalGraph) -> list[Violation]:
    out: list[Violation] = []
    nodes: dict[str, GoalNode] = {}
    holders: dict[str, Stakeholder] = {}
    for n in g.nodes:
        if n.id in nodes:
            out.append(Violation("DuplicateId", n.id, f"node id {n.id!r} declared twice"))
        nodes.setdefault(n.id, n)
        if n.kind not in RANK:
            out.append(Violation("BadKind", n.id, f"unknown node kind {n.kind!r}"))
        if n.horizon not in HORIZONS:
            out.append(Violation("BadHorizon", n.id, f"unknown horizon {n.horizon!r}"))
        elif n.kind == "need" and n.horizon == "none":
            out.append(Violation("BadHorizon", n.id, "a need must be strategic or operational"))
        elif n.kind == "requirement" and n.horizon != "none":
            out.append(Violation("BadHorizon", n.id, "a requirement carries no horizon"))
    for s in g.stakeholders:
        if s.id in nodes or s.id in holders:
            out.append(Violation("DuplicateId", s.id, f"stakeholder id {s.id!r} already used"))
        holders.setdefault(s.id, s)
        if not s.name.strip():
            out.append(Violation("EmptyName", s.id, "stakeholder name is empty"))

    hier = defaultdict(set)
    derives = defaultdict(set)
    for e in g.edges:
        where = f"{e.src}->{e.dst}"
        if e.kind not in EDGE_KINDS:
            out.append(Violation("BadEdgeKind", where, f"unknown edge kind {e.kind!r}"))
            continue
        if e.kind == "determines":
            if e.src not in holders:
                out.append(Violation("BadDetermines", where,
                                     "determines edges must start at a stakeholder"))
            if e.dst not in nodes:
                out.append(Violation("UnknownNode", where, f"no goal node {e.dst!r}"))
            continue
        missing = [x for x in ((e.src,) if e.kind == "realized_by" else (e.src, e.dst))
                   if x not in nodes]
        for x in missing:
            out.append(Violation("UnknownNode", where, f"no goal node {x!r}"))
        if missing or e.kind == "realized_by":
            continue
        hier[e.src].add(e.dst)
        if e.kind == "derives":
            derives[e.src].add(e.dst)
            a, b = nodes[e.src], nodes[e.dst]
            if a.kind in RANK and b.kind in RANK and RANK[a.kind] > RANK[b.kind]:
                out.append(Violation("LayeringViolation", where,
                                     f"{a.kind} {a.id!r} cannot derive {b.kind} {b.id!r}"))

    for cycle in _cycles(sorted(nodes), hier):
        out.append(Violation("CycleDetected", cycle[0],
                             "derivation cycle through " + ", ".join(cycle)))

    from_objectives = set()
    for n in nodes.values():
        if n.kind == "objective":
            from_objectives |= _reach(n.id, derives)
    for n in g.nodes:
        if n.kind == "requirement" and n.id not in from_objectives:
            out.append(Violation("OrphanRequirement", n.id,
                                 f"requirement {n.id!r} is not derived from any objective"))
    return out


def _reach(root, edges):
    seen = set()
    stack = list(edges[root])
    while stack:
        x = stack.pop()
        if x not in seen:
            seen.add(x)
            stack.extend(edges[x])
    return seen


def _cycles(ids, edges):
    """Strongly connected groups that contain a cycle, each sorted, in id order."""
    reach = {i: _reach(i, edges) for i in ids}
    done = set()
    groups = []
    for i in ids:
        if i in done or i not in reach[i]:
            continue
        group = sorted(j for j in reach[i] if i in reach[j])
        done.update(group)
        groups.append(group)
    return groups


def trace(g: GoalGraph, node_id: str) -> list[list[str]]:
    """All simple derives/supports paths from any need to ``node_id``, sorted by node ids."""
    if not g.has_node(node_id):
        raise UnknownIdError("goal node", node_id)
    preds = defaultdict(set)
    for e in g.edges:
        if e.kind in ("derives", "supports"):
            preds[e.dst].add(e.src)
    kinds = {n.id: n.kind for n in g.nodes}
    paths = []

    def walk(cur, suffix, on_path):
        for p in preds[cur]:
            if p in on_path or p not in kinds:
                continue
            path = [p] + suffix
            if kinds[p] == "need":
                paths.append(path)
            walk(p, path, on_path | {p})

    walk(node_id, [node_id], {node_id})
    return sorted(paths)


def link_realization(g: GoalGraph, goal_id: str, target: str,
                     models: Mapping[str, ProcessModel]) -> GoalGraph:
    """Record that ``target`` (a model id, or ``model:fragment``) realizes ``goal_id``."""
    if not g.has_node(goal_id):
        raise UnknownIdError("goal node", goal_id)
    check_target(target, models)
    edge = Edge(goal_id, "realized_by", target)
    if edge in g.edges:
        return g
    return replace(g, edges=g.edges + (edge,))


def check_target(target: str, models: Mapping[str, ProcessModel]) -> None:
    model_id, frag = split_target(target)
    if model_id not in models:
        raise UnknownIdError("process model", model_id)
    if frag is not None:
        try:
            ids = {f.id for f in extract_fragments(models[model_id])}
        except ModelError:
            ids = set()
        if frag not in ids:
            raise UnknownIdError("fragment", target)
