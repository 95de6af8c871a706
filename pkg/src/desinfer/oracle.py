"""Brute-force reference implementations used to cross-check the verifiers.

Nothing here reuses the composition builder or the SCC code.  Composition
moves are found by generating every combination of per-entry choices and
keeping those that satisfy the formation rules, reachability is plain
depth-first search, and a state lies on a cycle when it can reach itself.
Everything works on state and event names directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .dfa import Dfa
from .fsa import DIAMOND, Fsa, Observer, ObserverSet
from .verifiers import (
    CENTRALIZED,
    Certificate,
    Lasso,
    Segment,
    Step,
    Verdict,
)

__all__ = [
    "OracleConfig",
    "BudgetExceeded",
    "CheckResult",
    "naive_verify",
    "check_certificate",
    "exhaustive_estimate",
    "brute_force_dfa_intersection",
]


class BudgetExceeded(RuntimeError):
    """The oracle gave up; no verdict is implied."""


@dataclass
class OracleConfig:
    """Limits for the brute-force searches.

    ``path_bound`` caps the depth of any depth-first search; by default it is
    one more than the largest possible number of composition states, which no
    simple path can exceed.  ``budget`` caps the number of candidate moves
    examined.
    """

    path_bound: int | None = None
    budget: int = 5_000_000

    def __post_init__(self):
        if self.path_bound is not None and self.path_bound <= 0:
            raise ValueError("path bound must be positive")
        if self.budget <= 0:
            raise ValueError("budget must be positive")


@dataclass
class _Counter:
    budget: int
    used: int = 0

    def spend(self, n=1):
        self.used += n
        if self.used > self.budget:
            raise BudgetExceeded(f"oracle budget of {self.budget} moves exhausted")


# ------------------------------------------------------------ on-the-fly product


def _labeling(fsa: Fsa, observer: Observer | None) -> dict[str, str | None]:
    if observer is None:
        return {t: lab for t, lab in fsa.events.items()}
    out = {}
    for t, lab in fsa.events.items():
        out[t] = lab if t in observer.observes else None
    return out


class _Product:
    """The composition of a plant with label-matched copies, explored by brute force.

    ``labelings[j]`` is the labeling of copy ``j`` (1-based, index 0 unused).
    Copies may lose faulty transitions (``copy_normal``), the plant too
    (``base_normal``).  ``diamond`` enables the dead marker.
    """

    def __init__(self, fsa, labelings, diamond, base_normal, copy_normal, counter, depth):
        self.fsa = fsa
        self.labelings = labelings
        self.L = len(labelings) - 1
        self.diamond = diamond
        self.counter = counter
        self.depth = depth
        self.base_delta = {t for t in fsa.transitions if not (base_normal and t[1] in fsa.faulty)}
        self.copy_delta = {t for t in fsa.transitions if not (copy_normal and t[1] in fsa.faulty)}
        self._succ: dict = {}

    def delta(self, j):
        return self.base_delta if j == 0 else self.copy_delta

    def options(self, j, x):
        if x == DIAMOND:
            return [(DIAMOND, DIAMOND), (None, DIAMOND)]
        opts = [(None, x)]
        opts += sorted((t, y) for (s, t, y) in self.delta(j) if s == x)
        if self.diamond and j > 0:
            opts.append((DIAMOND, DIAMOND))
        return opts

    def legal(self, v, vec):
        """Formation rules, checked from scratch on one candidate move."""
        L = self.L
        killed = [j for j in range(1, L + 1) if vec[j] == DIAMOND]
        for j in range(1, L + 1):
            if v[j] == DIAMOND and vec[j] != DIAMOND:
                return False
        if killed and not self.diamond:
            return False
        for j in killed:
            if v[j] != DIAMOND and v[j] == v[0]:
                return False
        rest = [j for j in range(1, L + 1) if j not in killed]
        t0 = vec[0]
        if t0 == DIAMOND:
            return False
        idle = t0 is None and all(vec[j] is None for j in rest)
        if idle:
            # a pure retirement is only a move if it retires a live entry
            return any(v[j] != DIAMOND for j in killed)
        seen = {j: (None if t0 is None else self.labelings[j].get(t0)) for j in rest}
        if all(s is None for s in seen.values()):
            movers = [j for j in [0, *rest] if vec[j] is not None]
            return len(movers) == 1 and all(
                vec[j] is None or self.labelings[j][vec[j]] is None for j in rest
            )
        for j in rest:
            if seen[j] is None:
                if vec[j] is not None:
                    return False
            elif vec[j] is None or self.labelings[j][vec[j]] != seen[j]:
                return False
        return True

    def successors(self, v):
        if v in self._succ:
            return self._succ[v]
        out = []
        per_entry = [self.options(j, x) for j, x in enumerate(v)]
        for combo in itertools.product(*per_entry):
            self.counter.spend()
            vec = tuple(t for t, _ in combo)
            w = tuple(y for _, y in combo)
            if self.legal(v, vec):
                out.append((vec, w))
        self._succ[v] = out
        return out

    def initial(self):
        init = sorted(self.fsa.initial)
        return [tuple(p) for p in itertools.product(init, repeat=self.L + 1)]

    def dfs(self, sources, goal):
        """Depth-first search from ``sources``; returns ``(goal_state, moves)`` or None."""
        parent = {}
        stack = []
        for s in reversed(list(sources)):
            if s not in parent:
                parent[s] = None
                stack.append(s)
        while stack:
            v = stack.pop()
            if goal(v):
                moves = []
                u = v
                while parent[u] is not None:
                    prev, vec = parent[u]
                    moves.append((prev, vec, u))
                    u = prev
                if len(moves) >= self.depth:
                    raise BudgetExceeded("path bound exceeded")
                return v, moves[::-1]
            for vec, w in reversed(self.successors(v)):
                if w not in parent:
                    parent[w] = (v, vec)
                    stack.append(w)
        return None

    def reach(self, v):
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for _, w in self.successors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def all_dead(self, v):
        return all(x == DIAMOND for x in v[1:])


def _fsa_reach(delta, x):
    seen = {x}
    stack = [x]
    while stack:
        u = stack.pop()
        for s, _, y in delta:
            if s == u and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _fsa_cycle_path(delta, x):
    """A stem from ``x`` to a state on a cycle and that cycle, found by DFS; or None."""
    for y in sorted(_fsa_reach(delta, x)):
        for s, t, z in sorted(delta):
            if s == y and y in _fsa_reach(delta, z):
                stem = _fsa_path(delta, x, y)
                back = _fsa_path(delta, z, y)
                return stem, [(y, t, z)] + back
    return None


def _fsa_path(delta, x, y):
    if x == y:
        return []
    parent = {x: None}
    stack = [x]
    while stack:
        u = stack.pop()
        for s, t, z in sorted(delta):
            if s == u and z not in parent:
                parent[z] = (s, t, z)
                if z == y:
                    out = []
                    while parent[z] is not None:
                        out.append(parent[z])
                        z = parent[z][0]
                    return out[::-1]
                stack.append(z)
    return None


# ------------------------------------------------------------------- deciders


def _steps(moves):
    return tuple(Step(v, vec, w) for v, vec, w in moves)


def _chain(segments, start):
    out = []
    for role, moves, loc in segments:
        seg = Segment(role, start, _steps(moves), loc)
        out.append(seg)
        start = seg.end
    return tuple(out)


def _detect(fsa, obs, prop, cfg, counter):
    labelings = [None] + [_labeling(fsa, o) for o in obs]
    depth = cfg.path_bound or len(fsa.states) * (len(fsa.states) + 1) ** len(obs) + 1
    prod = _Product(fsa, labelings, True, False, False, counter, depth)
    L = prod.L

    def sees(j, vec):
        t0 = vec[0]
        return t0 is not None and labelings[j][t0] is not None

    cycle_cache = {}

    def positive_cycle(v, j):
        """A cycle through v containing a move that location j observes."""
        key = (v, j)
        if key not in cycle_cache:
            cycle_cache[key] = None
            if v[j] != DIAMOND:
                for u in sorted(prod.reach(v)):
                    for vec, w in prod.successors(u):
                        if sees(j, vec) and v in prod.reach(w):
                            to_u = prod.dfs([v], lambda x, u=u: x == u)[1]
                            back = prod.dfs([w], lambda x: x == v)[1]
                            cycle_cache[key] = to_u + [(u, vec, w)] + back
                            break
                    if cycle_cache[key] is not None:
                        break
        return cycle_cache[key]

    def gain(v):
        return frozenset(j for j in range(1, L + 1) if positive_cycle(v, j) is not None)

    full = frozenset(range(1, L + 1))

    def accepting(node):
        v, B = node
        return B == full and prod.all_dead(v) and _fsa_cycle_path(fsa.transitions, v[0]) is not None

    # depth-first search over (state, served locations)
    init = [(v, gain(v)) for v in prod.initial()]
    parent = {n: None for n in init}
    stack = list(reversed(init))
    hit = None
    while stack:
        node = stack.pop()
        counter.spend()
        if accepting(node):
            hit = node
            break
        v, B = node
        for vec, w in prod.successors(v):
            nxt = (w, B | gain(w))
            if nxt not in parent:
                parent[nxt] = (node, vec)
                stack.append(nxt)
    if hit is None:
        return Verdict(prop, True)
    trail = []
    node = hit
    while parent[node] is not None:
        prev, vec = parent[node]
        trail.append((prev, vec, node))
        node = prev
    trail.reverse()
    segments = []
    pending = []
    served = set()

    def serve(v, B):
        nonlocal pending
        for j in sorted(B - served):
            segments.append(("path", pending, None))
            pending = []
            segments.append(("cycle", positive_cycle(v, j), j))
            served.add(j)

    serve(*trail[0][0] if trail else hit)
    for prev, vec, nxt in trail:
        pending.append((prev[0], vec, nxt[0]))
        serve(*nxt)
    segments.append(("path", pending, None))
    start = (trail[0][0] if trail else hit)[0]
    stem, ring = _fsa_cycle_path(fsa.transitions, hit[0][0])
    cert = Certificate(prop, obs.names, _chain(segments, start), (Lasso(0, hit[0][0], tuple(stem), tuple(ring)),))
    return Verdict(prop, False, cert)


def _diagnose(fsa, obs, prop, cfg, counter):
    labelings = [None] + [_labeling(fsa, o) for o in obs]
    depth = cfg.path_bound or len(fsa.states) ** (len(obs) + 1) + 1
    prod = _Product(fsa, labelings, False, False, True, counter, depth)
    reachable = set()
    for s in prod.initial():
        reachable |= prod.reach(s)
    for v in sorted(reachable):
        for vec, w in prod.successors(v):
            if vec[0] not in fsa.faulty:
                continue
            for u in sorted(prod.reach(w)):
                for vec2, u2 in prod.successors(u):
                    if vec2[0] is not None and u in prod.reach(u2):
                        prefix = prod.dfs(prod.initial(), lambda x: x == v)[1]
                        middle = prod.dfs([w], lambda x: x == u)[1]
                        back = prod.dfs([u2], lambda x: x == u)[1]
                        start = prefix[0][0] if prefix else v
                        segs = [
                            ("path", prefix, None),
                            ("fault", [(v, vec, w)], None),
                            ("path", middle, None),
                            ("cycle", [(u, vec2, u2)] + back, None),
                        ]
                        return Verdict(prop, False, Certificate(prop, obs.names, _chain(segs, start)))
    return Verdict(prop, True)


def _predict(fsa, obs, prop, cfg, counter):
    labelings = [None] + [_labeling(fsa, o) for o in obs]
    depth = cfg.path_bound or len(fsa.states) ** (len(obs) + 1) + 1
    prod = _Product(fsa, labelings, False, True, True, counter, depth)
    normal = {t for t in fsa.transitions if t[1] not in fsa.faulty}
    faults = sorted(t for t in fsa.transitions if t[1] in fsa.faulty)
    reachable = set()
    for s in prod.initial():
        reachable |= prod.reach(s)
    for v in sorted(reachable):
        fault = next((t for t in faults if t[0] == v[0]), None)
        if fault is None:
            continue
        lassos = [_fsa_cycle_path(normal, x) for x in v[1:]]
        if any(las is None for las in lassos):
            continue
        prefix = prod.dfs(prod.initial(), lambda x: x == v)[1]
        start = prefix[0][0] if prefix else v
        cert = Certificate(
            prop,
            obs.names,
            _chain([("path", prefix, None)], start),
            tuple(Lasso(i, v[i], tuple(st), tuple(cy)) for i, (st, cy) in enumerate(lassos, start=1)),
            fault,
        )
        return Verdict(prop, False, cert)
    return Verdict(prop, True)


def naive_verify(
    prop: str, fsa: Fsa, observers: ObserverSet | None = None, cfg: OracleConfig | None = None
) -> Verdict:
    """Decide ``prop`` by exhaustive search; raises :class:`BudgetExceeded` when out of budget."""
    cfg = cfg or OracleConfig()
    counter = _Counter(cfg.budget)
    if prop in CENTRALIZED:
        observers = ObserverSet((Observer("global", frozenset(t for t, l in fsa.events.items() if l is not None)),))
    elif observers is None:
        raise ValueError(f"{prop} needs an observer set")
    if prop in ("co-detectability", "strong-detectability"):
        return _detect(fsa, observers, prop, cfg, counter)
    if prop in ("co-diagnosability", "diagnosability"):
        return _diagnose(fsa, observers, prop, cfg, counter)
    if prop in ("co-predictability", "predictability"):
        return _predict(fsa, observers, prop, cfg, counter)
    raise ValueError(f"unknown property {prop!r}")


# --------------------------------------------------------- certificate check


@dataclass
class CheckResult:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_certificate(cert: Certificate, fsa: Fsa, observers: ObserverSet | None = None) -> CheckResult:
    """Recheck a certificate against the plant alone.

    Every step is validated against the transition relation and the formation
    rules, segments must connect, cycles must close and make progress as the
    property demands, and lassos must be runs ending in a cycle.
    """
    problems: list[str] = []
    prop = cert.property
    if prop in CENTRALIZED:
        obs = ObserverSet((Observer("global", frozenset(t for t, l in fsa.events.items() if l is not None)),))
    else:
        if observers is None:
            return CheckResult(False, [f"{prop} needs an observer set"])
        obs = observers
    if tuple(cert.observers) != tuple(obs.names):
        problems.append(f"certificate observers {cert.observers} do not match {obs.names}")
        return CheckResult(False, problems)
    L = len(obs)
    labelings = [None] + [_labeling(fsa, o) for o in obs]
    detect = prop in ("co-detectability", "strong-detectability")
    diag = prop in ("co-diagnosability", "diagnosability")
    pred = prop in ("co-predictability", "predictability")
    if not (detect or diag or pred):
        return CheckResult(False, [f"unknown property {prop!r}"])
    prod = _Product(fsa, labelings, detect, pred, diag or pred, _Counter(10**9), 10**9)
    normal = {t for t in fsa.transitions if t[1] not in fsa.faulty}

    if not cert.segments:
        return CheckResult(False, ["certificate has no segments"])
    first = cert.segments[0].start
    if len(first) != L + 1 or any(x not in fsa.initial for x in first):
        problems.append(f"path does not start at an initial state: {first}")

    # every step, checked entry by entry and against the formation rules
    position = first
    n = 0
    for k, seg in enumerate(cert.segments):
        if tuple(seg.start) != tuple(position):
            problems.append(f"segment {k} starts at {seg.start}, previous one ends at {position}")
        here = tuple(seg.start)
        for step in seg.steps:
            n += 1
            if tuple(step.source) != here:
                problems.append(f"step {n} leaves {step.source} but the path is at {here}")
            if len(step.event) != L + 1 or len(step.target) != L + 1:
                problems.append(f"step {n} has the wrong width")
                here = tuple(step.target)
                continue
            for j, (x, t, y) in enumerate(zip(step.source, step.event, step.target)):
                if t is None:
                    if x != y:
                        problems.append(f"step {n}: entry {j} moves from {x} to {y} without an event")
                elif t == DIAMOND:
                    if y != DIAMOND:
                        problems.append(f"step {n}: entry {j} is retired but lands on {y}")
                elif (x, t, y) not in prod.delta(j):
                    problems.append(f"step {n}: ({x!r}, {t!r}, {y!r}) is not a transition available to entry {j}")
            if not prod.legal(tuple(step.source), tuple(step.event)):
                problems.append(f"step {n}: event vector {step.event} breaks the formation rules")
            here = tuple(step.target)
        if seg.role == "cycle":
            if not seg.steps:
                problems.append(f"segment {k} is an empty cycle")
            elif here != tuple(seg.start):
                problems.append(f"segment {k} does not close: {seg.start} .. {here}")
        position = here

    roles = [s.role for s in cert.segments]
    if detect:
        cycles = [s for s in cert.segments if s.role == "cycle"]
        locs = [s.location for s in cycles]
        if sorted(locs) != list(range(1, L + 1)):
            problems.append(f"cycle locations {locs} do not cover each of 1..{L} exactly once")
        if any(r not in ("path", "cycle") for r in roles) or roles[-1] != "path":
            problems.append(f"unexpected segment layout {roles}")
        for s in cycles:
            j = s.location
            if j is None or not 1 <= j <= L:
                continue
            if s.start[j] == DIAMOND:
                problems.append(f"cycle for location {j} runs after its alternative was retired")
            if not any(st.event[0] not in (None, DIAMOND) and labelings[j].get(st.event[0]) is not None for st in s.steps):
                problems.append(f"cycle for location {j} shows nothing to observer {obs[j - 1].name}")
        if any(x != DIAMOND for x in position[1:]):
            problems.append(f"final state {position} still tracks live alternatives")
        if len(cert.lassos) != 1 or cert.lassos[0].entry != 0:
            problems.append("expected one plant lasso")
        else:
            _check_lasso(cert.lassos[0], position[0], set(fsa.transitions), problems)
    elif diag:
        if roles != ["path", "fault", "path", "cycle"]:
            problems.append(f"unexpected segment layout {roles}")
        else:
            fault = cert.segments[1]
            if len(fault.steps) != 1 or fault.steps[0].event[0] not in fsa.faulty:
                problems.append("fault segment must be one step whose plant event is faulty")
            if not any(st.event[0] is not None for st in cert.segments[3].steps):
                problems.append("cycle does not move the plant")
    else:
        if roles != ["path"]:
            problems.append(f"unexpected segment layout {roles}")
        f = cert.fault
        if f is None or tuple(f) not in fsa.transitions or f[1] not in fsa.faulty:
            problems.append(f"{f} is not a faulty transition")
        elif f[0] != position[0]:
            problems.append(f"fault {f} does not leave the plant state {position[0]}")
        entries = sorted(las.entry for las in cert.lassos)
        if entries != list(range(1, L + 1)):
            problems.append(f"expected one lasso per location, got entries {entries}")
        for las in cert.lassos:
            if 1 <= las.entry <= L:
                _check_lasso(las, position[las.entry], normal, problems)

    # the alternatives must explain the same observations as the plant
    for j in range(1, L + 1):
        plant, other = [], []
        for step in cert.steps():
            if step.event[j] == DIAMOND:
                break
            if step.event[0] is not None:
                plant.append(labelings[j][step.event[0]])
            if step.event[j] is not None:
                other.append(labelings[j][step.event[j]])
        if [a for a in plant if a] != [a for a in other if a]:
            problems.append(f"location {j} observes different outputs from plant and alternative")
    return CheckResult(not problems, problems)


def _check_lasso(las: Lasso, start: str, delta, problems):
    if las.start != start:
        problems.append(f"lasso for entry {las.entry} starts at {las.start}, expected {start}")
    here = las.start
    for t in list(las.stem) + list(las.cycle):
        t = tuple(t)
        if t[0] != here:
            problems.append(f"lasso for entry {las.entry} jumps from {here} to {t[0]}")
        if t not in delta:
            problems.append(f"lasso for entry {las.entry}: {t} is not an allowed transition")
        here = t[2]
    if not las.cycle:
        problems.append(f"lasso for entry {las.entry} has an empty cycle")
    elif tuple(las.cycle[-1])[2] != tuple(las.cycle[0])[0]:
        problems.append(f"lasso cycle for entry {las.entry} does not close")


# ------------------------------------------------------------------ estimates


def exhaustive_estimate(
    fsa: Fsa, observer: Observer | None, bound: int, budget: int = 1_000_000
) -> dict[tuple[str, ...], frozenset[str]]:
    """Current-state estimates of every output sequence produced by runs of at most ``bound`` events."""
    labels = _labeling(fsa, observer)
    table: dict[tuple[str, ...], set[str]] = {}
    counter = _Counter(budget)
    stack = [(x, (), 0) for x in sorted(fsa.initial)]
    while stack:
        x, out, n = stack.pop()
        counter.spend()
        table.setdefault(out, set()).add(x)
        if n == bound:
            continue
        for s, t, y in fsa.transitions:
            if s == x:
                lab = labels[t]
                stack.append((y, out + ((lab,) if lab is not None else ()), n + 1))
    return {k: frozenset(v) for k, v in table.items()}


def brute_force_dfa_intersection(
    dfas: Sequence[Dfa], bound: int | None = None, budget: int = 2_000_000
) -> tuple[str, ...] | None:
    """A shortest word every DFA accepts, the first in length-lexicographic order.

    Words are enumerated letter by letter.  A prefix is dropped once some DFA
    has no move on it, or once it revisits a tuple of states: a shortest
    common word never does either.  The default bound is enough for
    completeness: an acyclic DFA accepts no word longer than its state count
    minus one, and the tuple rule caps every surviving prefix anyway.
    """
    if not dfas:
        raise ValueError("need at least one DFA")
    alphabet = dfas[0].alphabet
    if any(d.alphabet != alphabet for d in dfas):
        raise ValueError("all DFAs must share one alphabet")
    if bound is None:
        if any(d.acyclic for d in dfas):
            bound = min(len(d.states) for d in dfas if d.acyclic) - 1
        else:
            bound = 1
            for d in dfas:
                bound *= len(d.states)
            bound -= 1
    counter = _Counter(budget)
    start = tuple(d.initial for d in dfas)
    # prefixes of the current length in lexicographic order, with their visited tuples
    layer = [((), start, frozenset([start]))]
    for length in range(bound + 1):
        for word, qs, _ in layer:
            if all(q in d.accepting for q, d in zip(qs, dfas)):
                return word
        if length == bound:
            break
        nxt = []
        for word, qs, visited in layer:
            for a in alphabet:
                counter.spend()
                moved = tuple(d.step(q, a) for q, d in zip(qs, dfas))
                if None in moved or moved in visited:
                    continue
                nxt.append((word + (a,), moved, visited | {moved}))
        if not nxt:
            break
        layer = nxt
    return None
