"""Deciders for detectability, diagnosability and predictability.

Every decider works on a composition of the plant with copies of itself and
looks for a reachable pattern of paths and cycles whose presence is equivalent
to a violation.  When the property fails, the pattern is returned as a
:class:`Certificate` that :func:`pump_certificate` turns into concrete runs.

Location numbers are 1-based: location ``i`` is observer ``observers[i - 1]``
and entry ``i`` of the composition.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from . import graph
from .composition import (
    Composition,
    centralized_diamond_composition,
    concurrent_composition,
    diamond_composition,
)
from .fsa import (
    DIAMOND,
    Fsa,
    Observer,
    ObserverSet,
    Run,
    current_state_estimate,
    global_observer,
    local_automaton,
    normal_subautomaton,
    project,
)

__all__ = [
    "PROPERTIES",
    "CENTRALIZED",
    "Step",
    "Segment",
    "Lasso",
    "Certificate",
    "Verdict",
    "Evidence",
    "LocationEvidence",
    "verify",
    "verify_strong_detectability",
    "verify_co_detectability",
    "verify_diagnosability",
    "verify_co_diagnosability",
    "verify_predictability",
    "verify_co_predictability",
    "pump_certificate",
    "observers_for",
    "property_composition",
]

PROPERTIES = (
    "strong-detectability",
    "co-detectability",
    "diagnosability",
    "co-diagnosability",
    "predictability",
    "co-predictability",
)
CENTRALIZED = {"strong-detectability", "diagnosability", "predictability"}


@dataclass(frozen=True)
class Step:
    """One composition transition with entries spelled out.

    Events use ``None`` for epsilon and ``"⋄"`` for the kill marker.
    """

    source: tuple[str, ...]
    event: tuple[str | None, ...]
    target: tuple[str, ...]


@dataclass(frozen=True)
class Segment:
    """A stretch of a composition path.

    ``role`` is ``"path"``, ``"cycle"`` (returns to ``start``) or ``"fault"``
    (a single step whose entry-0 event is faulty).  Cycle segments of a
    detectability certificate carry the location they serve.
    """

    role: str
    start: tuple[str, ...]
    steps: tuple[Step, ...] = ()
    location: int | None = None

    @property
    def end(self) -> tuple[str, ...]:
        return self.steps[-1].target if self.steps else self.start


@dataclass(frozen=True)
class Lasso:
    """A run of the plant from ``start`` that ends in a repeatable cycle.

    ``entry`` says whose state the lasso continues: 0 for the plant itself,
    ``i`` for the alternative tracked at location ``i``.
    """

    entry: int
    start: str
    stem: tuple[tuple[str, str, str], ...]
    cycle: tuple[tuple[str, str, str], ...]


@dataclass(frozen=True)
class Certificate:
    property: str
    observers: tuple[str, ...]
    segments: tuple[Segment, ...]
    lassos: tuple[Lasso, ...] = ()
    fault: tuple[str, str, str] | None = None

    def steps(self) -> list[Step]:
        return [s for seg in self.segments for s in seg.steps]


@dataclass(frozen=True)
class Verdict:
    property: str
    holds: bool
    certificate: Certificate | None = None

    def __post_init__(self):
        if self.holds != (self.certificate is None):
            raise ValueError("a certificate accompanies exactly the violated verdicts")


# ---------------------------------------------------------------- helpers


def observers_for(prop: str, fsa: Fsa, observers: ObserverSet | None) -> ObserverSet:
    """The observers a property is judged against; centralized ones use ``label``."""
    if prop in CENTRALIZED:
        return ObserverSet((global_observer(fsa),))
    if observers is None:
        raise ValueError(f"{prop} needs an observer set")
    return observers


def property_composition(prop: str, fsa: Fsa, observers: ObserverSet | None = None) -> Composition:
    """The composition a property's decider searches."""
    if prop == "strong-detectability":
        return centralized_diamond_composition(fsa)
    obs = observers_for(prop, fsa, observers)
    if prop == "co-detectability":
        return diamond_composition(fsa, obs)
    if prop in ("co-diagnosability", "diagnosability"):
        return concurrent_composition(fsa, _normal_locals(fsa, obs))
    if prop in ("co-predictability", "predictability"):
        return concurrent_composition(normal_subautomaton(fsa), _normal_locals(fsa, obs))
    raise ValueError(f"unknown property {prop!r}")


def _steps(comp: Composition, edges: Sequence[tuple[int, int, int]]) -> tuple[Step, ...]:
    return tuple(
        Step(comp.state_names(v), comp.event_names(e), comp.state_names(w)) for v, e, w in edges
    )


def _bfs(comp: Composition, sources: Sequence[int], goal) -> tuple[int, list] | None:
    """Shortest edge path from the first-listed sources to a goal node.

    Returns ``(end, [(v, e, w), ...])``.  Edges are explored in canonical
    order, so the result is the least shortest path in that order.
    """
    parent: dict[int, tuple | None] = {}
    queue = deque()
    for s in sources:
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if goal(v):
            path = []
            u = v
            while parent[u] is not None:
                edge = parent[u]
                path.append(edge)
                u = edge[0]
            return v, path[::-1]
        for e, w in comp.edges[v]:
            if w not in parent:
                parent[w] = (v, e, w)
                queue.append(w)
    return None


def _cycle_from(comp: Composition, u: int, e: int, w: int) -> list:
    """The edge ``u -e-> w`` closed by a shortest path back to ``u``."""
    if w == u:
        return [(u, e, w)]
    found = _bfs(comp, [w], lambda x: x == u)
    assert found is not None, "cycle edge must lie inside a strongly connected component"
    return [(u, e, w)] + found[1]


def _scc(comp: Composition):
    comps = graph.strongly_connected_components(comp.adjacency)
    return comps, graph.component_ids(len(comp.states), comps)


def _fsa_cycle_reach(fsa: Fsa) -> dict[str, bool]:
    """For each state, whether some transition cycle is reachable from it."""
    index = {x: i for i, x in enumerate(fsa.states)}
    adjacency = [[index[y] for _, y in fsa.successors(x)] for x in fsa.states]
    flags = graph.can_reach(adjacency, graph.cyclic_nodes(adjacency))
    return {x: flags[index[x]] for x in fsa.states}


def _lasso(fsa: Fsa, start: str, entry: int) -> Lasso:
    """Shortest stem from ``start`` to a cyclic state, then a shortest cycle there."""
    index = {x: i for i, x in enumerate(fsa.states)}
    succ = [sorted((index[y], t) for t, y in fsa.successors(x)) for x in fsa.states]
    adjacency = [[w for w, _ in s] for s in succ]
    cyclic = graph.cyclic_nodes(adjacency)

    def path_edges(nodes):
        out = []
        for a, b in zip(nodes, nodes[1:]):
            t = min(t for w, t in succ[a] if w == b)
            out.append((fsa.states[a], t, fsa.states[b]))
        return tuple(out)

    nodes = graph.bfs_path(adjacency, [index[start]], lambda v: cyclic[v])
    if nodes is None:
        raise ValueError(f"no cycle reachable from {start!r}")
    ring = graph.shortest_cycle_through(adjacency, nodes[-1])
    return Lasso(entry, start, path_edges(nodes), path_edges(ring))


# ------------------------------------------------------------ detectability


def _positive_masks(comp: Composition, ids: list[int], n_comps: int, observed) -> list[int]:
    """Per SCC, the bit set of locations ``j`` for which the SCC is ``j``-positive.

    ``observed(j, t)`` tells whether location ``j`` sees entry-0 event ``t``.
    """
    L = comp.width - 1
    masks = [0] * n_comps
    alive_sig = [None] * n_comps
    for v, succ in enumerate(comp.edges):
        c = ids[v]
        sig = tuple(comp.is_dead(v, j) for j in range(1, L + 1))
        if alive_sig[c] is None:
            alive_sig[c] = sig
        else:
            assert alive_sig[c] == sig, "liveness must be uniform inside a component"
        for e, w in succ:
            if ids[w] != c:
                continue
            t0 = comp.entry_event(e, 0)
            if t0 is None:
                continue
            for j in range(1, L + 1):
                if not sig[j - 1] and observed(j, t0):
                    masks[c] |= 1 << (j - 1)
    return masks


def _terminal_flags(comp: Composition, fsa: Fsa) -> list[bool]:
    reach_cycle = _fsa_cycle_reach(fsa)
    L = comp.width - 1
    return [
        all(comp.is_dead(v, j) for j in range(1, L + 1)) and reach_cycle[comp.state_names(v)[0]]
        for v in range(len(comp.states))
    ]


def _achievable(comp, sccs, ids, masks, terminal, full):
    """Per SCC, the set of location masks collectable on some path to a terminal."""
    succ_comps = [set() for _ in sccs]
    for v, succ in enumerate(comp.edges):
        for _, w in succ:
            if ids[w] != ids[v]:
                succ_comps[ids[v]].add(ids[w])
    achievable = [frozenset()] * len(sccs)
    # Tarjan emits components in reverse topological order
    for c, members in enumerate(sccs):
        found = set()
        if any(terminal[v] for v in members):
            found.add(0)
        for d in succ_comps[c]:
            found.update(achievable[d])
        achievable[c] = frozenset(m | masks[c] for m in found)
    return achievable


def _detectability_certificate(
    comp: Composition, fsa: Fsa, prop: str, names: tuple[str, ...], observed
) -> Certificate | None:
    L = comp.width - 1
    full = (1 << L) - 1
    sccs, ids = _scc(comp)
    masks = _positive_masks(comp, ids, len(sccs), observed)
    terminal = _terminal_flags(comp, fsa)
    achievable = _achievable(comp, sccs, ids, masks, terminal, full)

    def good(v, B):
        return any(B | m == full for m in achievable[ids[v]])

    start = next((v for v in comp.initial if good(v, masks[ids[v]])), None)
    if start is None:
        return None
    segments = []
    pending: list = []
    cur = start
    covered = 0
    while True:
        c = ids[cur]
        gained = masks[c] & ~covered
        for j in range(1, L + 1):
            if not gained >> (j - 1) & 1:
                continue
            # anchor at the least edge of this component that location j observes
            u, e, w = min(
                (v, e, w)
                for v in sccs[c]
                for e, w in comp.edges[v]
                if ids[w] == c and _sees(comp, observed, j, e)
            )
            pending += _bfs(comp, [cur], lambda x, u=u: x == u)[1]
            segments.append(Segment("path", (), _steps(comp, pending)))
            segments.append(Segment("cycle", (), _steps(comp, _cycle_from(comp, u, e, w)), j))
            pending = []
            cur = u
        covered |= gained
        if covered == full:
            end, extra = _bfs(comp, [cur], lambda x: terminal[x])
            segments.append(Segment("path", (), _steps(comp, pending + extra)))
            break
        B = covered
        cur, extra = _bfs(
            comp,
            [cur],
            lambda x, B=B: (masks[ids[x]] | B) != B and good(x, masks[ids[x]] | B),
        )
        pending += extra
    segments = _merge_paths(segments, comp.state_names(start))
    tail = _lasso(fsa, comp.state_names(end)[0], 0)
    return Certificate(prop, names, tuple(segments), (tail,))


def _sees(comp: Composition, observed, j: int, e: int) -> bool:
    t0 = comp.entry_event(e, 0)
    return t0 is not None and observed(j, t0)


def _merge_paths(segments, start):
    """Give every path segment an explicit, continuous start."""
    out = []
    pos = start
    for seg in segments:
        seg = Segment(seg.role, pos, seg.steps, seg.location)
        out.append(seg)
        pos = seg.end
    return out


def verify_co_detectability(fsa: Fsa, observers: ObserverSet) -> Verdict:
    """Co-detectability: some observer eventually pins down the state on every infinite run."""
    observers.check_against(fsa)
    comp = property_composition("co-detectability", fsa, observers)
    locals_ = comp.components

    def observed(j, t):
        return locals_[j].events[t] is not None

    cert = _detectability_certificate(comp, fsa, "co-detectability", observers.names, observed)
    return Verdict("co-detectability", cert is None, cert)


def verify_strong_detectability(fsa: Fsa) -> Verdict:
    """Strong detectability under the plant's own labeling."""
    comp = property_composition("strong-detectability", fsa)
    sccs, ids = _scc(comp)
    n = len(comp.states)
    # states on a cycle that emits output while the alternative is still alive
    observable_sccs = set()
    for v, succ in enumerate(comp.edges):
        if comp.is_dead(v, 1) or ids[v] in observable_sccs:
            continue
        for e, w in succ:
            t0 = comp.entry_event(e, 0)
            if ids[w] == ids[v] and t0 is not None and fsa.events[t0] is not None:
                observable_sccs.add(ids[v])
                break
    after = graph.reachable(comp.adjacency, [u for c in sorted(observable_sccs) for u in sccs[c]])
    terminal = _terminal_flags(comp, fsa)
    violated = any(after[v] and terminal[v] for v in range(n))
    if not violated:
        return Verdict("strong-detectability", True)

    def observed(j, t):
        return fsa.events[t] is not None

    cert = _detectability_certificate(comp, fsa, "strong-detectability", ("global",), observed)
    assert cert is not None
    return Verdict("strong-detectability", False, cert)


# ------------------------------------------------------------- diagnosability


def _normal_locals(fsa: Fsa, observers: ObserverSet) -> list[Fsa]:
    return [normal_subautomaton(local_automaton(fsa, o)) for o in observers]


def _diagnosability(fsa: Fsa, observers: ObserverSet, prop: str, names) -> Verdict:
    comp = property_composition(prop, fsa, observers)
    sccs, ids = _scc(comp)
    n = len(comp.states)
    # sources of an edge that stays in its SCC and moves the plant
    positive = [
        any(ids[w] == ids[v] and comp.entry_event(e, 0) is not None for e, w in comp.edges[v])
        for v in range(n)
    ]
    leads_to_cycle = graph.can_reach(comp.adjacency, positive)

    def fault_edge(v):
        for e, w in comp.edges[v]:
            t0 = comp.entry_event(e, 0)
            if t0 in fsa.faulty and leads_to_cycle[w]:
                return e, w
        return None

    found = _bfs(comp, comp.initial, lambda v: fault_edge(v) is not None)
    if found is None:
        return Verdict(prop, True)
    v, prefix = found
    e, w = fault_edge(v)
    u, middle = _bfs(comp, [w], lambda x: positive[x])
    ce, cw = min((e2, w2) for e2, w2 in comp.edges[u] if ids[w2] == ids[u] and comp.entry_event(e2, 0) is not None)
    ring = _cycle_from(comp, u, ce, cw)
    start = prefix[0][0] if prefix else v
    segments = _merge_paths(
        [
            Segment("path", (), _steps(comp, prefix)),
            Segment("fault", (), _steps(comp, [(v, e, w)])),
            Segment("path", (), _steps(comp, middle)),
            Segment("cycle", (), _steps(comp, ring)),
        ],
        comp.state_names(start),
    )
    return Verdict(prop, False, Certificate(prop, names, tuple(segments)))


def verify_co_diagnosability(fsa: Fsa, observers: ObserverSet) -> Verdict:
    """Co-diagnosability: after a fault, some observer eventually rules out every fault-free explanation."""
    observers.check_against(fsa)
    return _diagnosability(fsa, observers, "co-diagnosability", observers.names)


def verify_diagnosability(fsa: Fsa) -> Verdict:
    obs = ObserverSet((global_observer(fsa),))
    return _diagnosability(fsa, obs, "diagnosability", obs.names)


# ------------------------------------------------------------- predictability


def _predictability(fsa: Fsa, observers: ObserverSet, prop: str, names) -> Verdict:
    normal = normal_subautomaton(fsa)
    comp = property_composition(prop, fsa, observers)
    L = comp.width - 1
    fault_from: dict[str, tuple[str, str, str]] = {}
    for src, ev, dst in fsa.transitions:
        if ev in fsa.faulty and src not in fault_from:
            fault_from[src] = (src, ev, dst)
    reach_cycle = _fsa_cycle_reach(normal)

    def candidate(v):
        names_ = comp.state_names(v)
        return names_[0] in fault_from and all(reach_cycle[x] for x in names_[1:])

    # breadth-first distances from the initial states, with parent edges
    parent: dict[int, tuple | None] = {}
    dist: dict[int, int] = {}
    queue = deque()
    for s in comp.initial:
        parent[s] = None
        dist[s] = 0
        queue.append(s)
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for e, w in comp.edges[v]:
            if w not in parent:
                parent[w] = (v, e, w)
                dist[w] = dist[v] + 1
                queue.append(w)
    candidates = [v for v in order if candidate(v)]
    if not candidates:
        return Verdict(prop, True)
    lasso_cache: dict[str, Lasso] = {}

    def lasso_len(x):
        if x not in lasso_cache:
            lasso_cache[x] = _lasso(normal, x, 0)
        las = lasso_cache[x]
        return len(las.stem) + len(las.cycle)

    best = min(
        candidates,
        key=lambda v: (sum(lasso_len(x) for x in comp.state_names(v)[1:]), dist[v], v),
    )
    path = []
    u = best
    while parent[u] is not None:
        path.append(parent[u])
        u = parent[u][0]
    path.reverse()
    names_ = comp.state_names(best)
    lassos = tuple(_lasso(normal, names_[i], i) for i in range(1, L + 1))
    cert = Certificate(
        prop,
        names,
        (Segment("path", comp.state_names(u), _steps(comp, path)),),
        lassos,
        fault_from[names_[0]],
    )
    return Verdict(prop, False, cert)


def verify_co_predictability(fsa: Fsa, observers: ObserverSet) -> Verdict:
    """Co-predictability: before any fault, some observer can tell a fault is inevitable."""
    observers.check_against(fsa)
    return _predictability(fsa, observers, "co-predictability", observers.names)


def verify_predictability(fsa: Fsa) -> Verdict:
    obs = ObserverSet((global_observer(fsa),))
    return _predictability(fsa, obs, "predictability", obs.names)


def verify(prop: str, fsa: Fsa, observers: ObserverSet | None = None) -> Verdict:
    """Dispatch on the property name."""
    if prop == "strong-detectability":
        return verify_strong_detectability(fsa)
    if prop == "diagnosability":
        return verify_diagnosability(fsa)
    if prop == "predictability":
        return verify_predictability(fsa)
    if observers is None:
        raise ValueError(f"{prop} needs an observer set")
    if prop == "co-detectability":
        return verify_co_detectability(fsa, observers)
    if prop == "co-diagnosability":
        return verify_co_diagnosability(fsa, observers)
    if prop == "co-predictability":
        return verify_co_predictability(fsa, observers)
    raise ValueError(f"unknown property {prop!r}")


# -------------------------------------------------------------------- pumping


@dataclass(frozen=True)
class LocationEvidence:
    """What observer ``location`` sees and the run it cannot tell apart.

    ``output`` is the observation prefix that fails the observer; ``estimate``
    is its current-state estimate for detectability evidence.  ``alternative``
    is the confusing run, normal for diagnosis and prediction.
    """

    location: int
    observer: str
    output: tuple[str, ...]
    alternative: Run
    estimate: frozenset[str] | None = None


@dataclass(frozen=True)
class Evidence:
    """Concrete runs obtained by repeating each certificate cycle ``k`` times.

    ``run`` is a run of the plant; ``tail``, when present, is a cycle that
    can be repeated forever after ``run``.  ``fault`` marks the faulty
    transition for prediction evidence, which happens right after ``run``.
    """

    property: str
    k: int
    run: Run
    locations: tuple[LocationEvidence, ...]
    tail: Lasso | None = None
    fault: tuple[str, str, str] | None = None


def _entry_run(steps: Sequence[Step], entry: int, start: str) -> list[tuple[str, str]]:
    out = []
    for s in steps:
        t = s.event[entry]
        if t is not None and t != DIAMOND:
            out.append((t, s.target[entry]))
    return out


def _pumped(cert: Certificate, k: int) -> list[Step]:
    steps = []
    for seg in cert.segments:
        reps = k if seg.role == "cycle" else 1
        for _ in range(reps):
            steps.extend(seg.steps)
    return steps


def _observer(fsa: Fsa, observers: ObserverSet, cert: Certificate, loc: int) -> Observer:
    if cert.property in CENTRALIZED:
        return global_observer(fsa)
    return observers[loc - 1]


def pump_certificate(
    cert: Certificate, k: int, fsa: Fsa, observers: ObserverSet | None = None
) -> Evidence:
    """Expand a certificate into violating runs, repeating each cycle ``k`` times.

    With ``k = 0`` the cycles are skipped and only the connecting paths remain.
    """
    if k < 0:
        raise ValueError("pump count must be non-negative")
    obs = observers_for(cert.property, fsa, observers)
    if tuple(obs.names) != tuple(cert.observers):
        raise ValueError("certificate was issued for a different observer set")
    start = cert.segments[0].start
    if cert.property in ("co-detectability", "strong-detectability"):
        return _pump_detectability(cert, k, fsa, obs, start)
    if cert.property in ("co-diagnosability", "diagnosability"):
        steps = _pumped(cert, k)
        run = Run(start[0], tuple(_entry_run(steps, 0, start[0])))
        locs = []
        for i, o in enumerate(obs, start=1):
            alt = Run(start[i], tuple(_entry_run(steps, i, start[i])))
            locs.append(LocationEvidence(i, o.name, project(fsa, run.events, o), alt))
        return Evidence(cert.property, k, run, tuple(locs))
    if cert.property in ("co-predictability", "predictability"):
        steps = _pumped(cert, k)
        run = Run(start[0], tuple(_entry_run(steps, 0, start[0])))
        locs = []
        for las in cert.lassos:
            i = las.entry
            o = obs[i - 1]
            prefix = _entry_run(steps, i, start[i])
            tail = [(t, y) for _, t, y in las.stem] + [(t, y) for _, t, y in las.cycle] * k
            alt = Run(start[i], tuple(prefix + tail))
            locs.append(LocationEvidence(i, o.name, project(fsa, run.events, o), alt))
        return Evidence(cert.property, k, run, tuple(locs), fault=cert.fault)
    raise ValueError(f"unknown certificate property {cert.property!r}")


def _pump_detectability(cert, k, fsa, obs, start) -> Evidence:
    steps = _pumped(cert, k)
    run = Run(start[0], tuple(_entry_run(steps, 0, start[0])))
    locs = []
    served = [seg.location for seg in cert.segments if seg.role == "cycle"]
    for loc in sorted(set(served)):
        o = obs[loc - 1]
        # the alternative at this location is retired at its first kill step
        cut = next(n for n, s in enumerate(steps) if s.event[loc] == DIAMOND)
        before = steps[:cut]
        plant = _entry_run(before, 0, start[0])
        sigma = project(fsa, [t for t, _ in plant], o)
        alt = Run(start[loc], tuple(_entry_run(before, loc, start[loc])))
        estimate = current_state_estimate(fsa, sigma, o)
        locs.append(LocationEvidence(loc, o.name, sigma, alt, estimate))
    return Evidence(cert.property, k, run, tuple(locs), tail=cert.lassos[0])
