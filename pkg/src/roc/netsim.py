"""Token game over 1-safe process models: enabling, firing, reachability."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .common import natural_key
from .errors import NotEnabledError, SafetyViolation
from .process import ProcessModel, Transition

DEFAULT_BOUND = 2 ** 16

REACHABLE = "reachable"
UNREACHABLE = "unreachable"
TRUNCATED = "truncated"


def marking(*place_ids) -> frozenset:
    return frozenset(place_ids)


def check_marking(m: ProcessModel, mk) -> frozenset:
    mk = frozenset(mk)
    unknown = mk - {p.id for p in m.places}
    if unknown:
        raise ValueError(f"marking names places not in {m.id!r}: {sorted(unknown)}")
    return mk


def ordered_transitions(m: ProcessModel) -> list[Transition]:
    return sorted(m.transitions, key=lambda t: natural_key(t.id))


def enabled(m: ProcessModel, mk) -> frozenset:
    mk = check_marking(m, mk)
    return frozenset(t.id for t in m.transitions if t.inputs <= mk)


def _successor(t: Transition, mk: frozenset) -> frozenset:
    rest = mk - t.inputs
    clash = rest & t.outputs
    if clash:
        raise SafetyViolation(
            f"firing {t.id!r} would put a second token on {sorted(clash)}")
    return rest | t.outputs


def fire(m: ProcessModel, mk, tid: str) -> frozenset:
    mk = check_marking(m, mk)
    t = m.transition(tid)
    if not t.inputs <= mk:
        raise NotEnabledError(f"transition {tid!r} is not enabled in {sorted(mk)}")
    return _successor(t, mk)


@dataclass(frozen=True)
class Reachability:
    verdict: str
    path: tuple = ()
    explored: int = 0

    @property
    def reachable(self) -> bool:
        return self.verdict == REACHABLE


def reachable(m: ProcessModel, start, goal, bound: int = DEFAULT_BOUND) -> Reachability:
    """Breadth-first search of the marking graph, visiting at most ``bound`` markings.

    Successors are expanded in natural transition-id order, so the first
    path found is the shortest one and, among equally short ones, the
    smallest by transition ids. Firings that break 1-safety are skipped.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    start = check_marking(m, start)
    goal = check_marking(m, goal)
    if start == goal:
        return Reachability(REACHABLE, (), 1)
    order = ordered_transitions(m)
    parent: dict[frozenset, tuple] = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for t in order:
            if not t.inputs <= cur:
                continue
            try:
                nxt = _successor(t, cur)
            except SafetyViolation:
                continue
            if nxt in parent:
                continue
            if len(parent) >= bound:
                return Reachability(TRUNCATED, (), len(parent))
            parent[nxt] = (cur, t.id)
            if nxt == goal:
                return Reachability(REACHABLE, _unwind(parent, nxt), len(parent))
            queue.append(nxt)
    return Reachability(UNREACHABLE, (), len(parent))


def _unwind(parent, node):
    path = []
    while parent[node] is not None:
        node, tid = parent[node]
        path.append(tid)
    return tuple(reversed(path))


def replay(m: ProcessModel, start, path) -> frozenset:
    mk = frozenset(start)
    for tid in path:
        mk = fire(m, mk, tid)
    return mk


@dataclass(frozen=True)
class SoundnessReport:
    exit_reachable: bool
    dead_transitions: frozenset = field(default_factory=frozenset)
    explored_markings: int = 0
    truncated: bool = False
    unsafe_transitions: frozenset = field(default_factory=frozenset)


def soundness_lite(m: ProcessModel, bound: int = DEFAULT_BOUND) -> SoundnessReport:
    """Explore from ``{start}``: is ``{exit}`` reachable, and is any transition never enabled?"""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    start, exit_ = m.start, m.exit
    all_ids = frozenset(t.id for t in m.transitions)
    if start is None or exit_ is None:
        return SoundnessReport(False, all_ids, 0, False)
    target = frozenset([exit_.id])
    order = ordered_transitions(m)
    seen = {frozenset([start.id])}
    queue = deque(seen)
    ever_enabled = set()
    unsafe = set()
    truncated = False
    while queue and not truncated:
        cur = queue.popleft()
        for t in order:
            if not t.inputs <= cur:
                continue
            ever_enabled.add(t.id)
            try:
                nxt = _successor(t, cur)
            except SafetyViolation:
                unsafe.add(t.id)
                continue
            if nxt in seen:
                continue
            if len(seen) >= bound:
                truncated = True
                break
            seen.add(nxt)
            queue.append(nxt)
    return SoundnessReport(
        exit_reachable=target in seen,
        dead_transitions=all_ids - ever_enabled,
        explored_markings=len(seen),
        truncated=truncated,
        unsafe_transitions=frozenset(unsafe),
    )
