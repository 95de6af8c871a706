"""Concurrent composition of automata and its dead-marker variant.

``concurrent_composition(S0, [S1, ..., SL])`` tracks one run of ``S0`` together
with one run of every ``Si`` that produces the same output under ``Si``'s own
labeling.  Two kinds of moves exist:

* asynchronous moves: exactly one entry takes an event that no component
  labeling can see (for entry 0, invisible to every ``Si``; for entry ``i``,
  invisible to ``Si``);
* synchronous moves: entry 0 takes an event some ``Si`` can see, and every
  component that sees it answers with an event carrying the same label while
  the others stay put.

``diamond_composition(S, observers)`` runs the same product over the local
automata of ``S`` but lets an entry that currently disagrees with entry 0 be
retired into the absorbing dead marker ``⋄``.  Any subset of the disagreeing
entries may be retired at a given step (dead entries always stay dead), and
the surviving entries continue with a synchronized move or all stand still.

States and event vectors are stored as tuples of integers: position ``i``
holds an index into the sorted states (or events) of component ``i``.  The
dead marker is encoded as the number of states, epsilon as the number of
events and the kill marker as the number of events plus one, so plain tuple
order puts real states and events first.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .fsa import DIAMOND, Fsa, ObserverSet, global_observer, local_automaton

__all__ = [
    "Composition",
    "concurrent_composition",
    "diamond_composition",
    "classify_event_vector",
    "export_dot",
    "composition_to_json",
]

EPSILON_TOKEN = "ε"


class _Component:
    """Index tables for one entry of a composition."""

    def __init__(self, fsa: Fsa):
        self.fsa = fsa
        self.state_names = list(fsa.states)
        self.event_names = list(fsa.events)
        self.state_index = {x: i for i, x in enumerate(self.state_names)}
        self.event_index = {t: i for i, t in enumerate(self.event_names)}
        self.dead = len(self.state_names)
        self.eps = len(self.event_names)
        self.kill = self.eps + 1
        self.labels = [fsa.events[t] for t in self.event_names]
        n = len(self.state_names)
        self.out = [[] for _ in range(n)]
        self.silent = [[] for _ in range(n)]
        self.by_label = [{} for _ in range(n)]
        for src, ev, dst in fsa.transitions:
            x, t, y = self.state_index[src], self.event_index[ev], self.state_index[dst]
            self.out[x].append((t, y))
            lab = self.labels[t]
            if lab is None:
                self.silent[x].append((t, y))
            else:
                self.by_label[x].setdefault(lab, []).append((t, y))


class _Builder:
    def __init__(self, components: Sequence[Fsa], diamond: bool):
        self.comps = [_Component(c) for c in components]
        self.diamond = diamond
        self.L = len(components) - 1
        base = self.comps[0]
        # visibility of each entry-0 event to every component labeling; an
        # event a component does not declare is invisible to it
        self.vis = [
            tuple(c.fsa.events.get(name) for c in self.comps[1:])
            for name in base.event_names
        ]
        self.out0 = [
            [(t, y, self.vis[t]) for t, y in base.out[x]] for x in range(len(base.state_names))
        ]

    def successors(self, v: tuple):
        """Every ``(event_vector, target)`` leaving ``v``.

        Each entry gets a list of ``(event, state)`` choices and the moves are
        their product.  In the dead-marker variant an entry that disagrees
        with entry 0 may also take the kill choice, which covers every retired
        subset at once.
        """
        comps = self.comps
        entries = range(1, self.L + 1)
        stay = []
        for j in entries:
            c = comps[j]
            if v[j] == c.dead:
                stay.append([(c.kill, c.dead)])
            elif self.diamond and v[j] != v[0]:
                stay.append([(c.eps, v[j]), (c.kill, c.dead)])
            else:
                stay.append([(c.eps, v[j])])
        for t0, y0, labs in self.out0[v[0]]:
            choices = []
            for j in entries:
                opts = stay[j - 1]
                lab = labs[j - 1]
                if lab is not None and opts[0][0] != comps[j].kill:
                    match = comps[j].by_label[v[j]].get(lab, [])
                    opts = match + opts[1:]
                choices.append(opts)
            for combo in itertools.product(*choices):
                evs, tgts = zip(*combo)
                yield (t0, *evs), (y0, *tgts)
        eps0 = comps[0].eps
        for j in entries:
            silent = comps[j].silent[v[j]] if v[j] != comps[j].dead else ()
            if not silent:
                continue
            choices = list(stay)
            choices[j - 1] = silent
            for combo in itertools.product(*choices):
                evs, tgts = zip(*combo)
                yield (eps0, *evs), (v[0], *tgts)
        if self.diamond:
            for combo in itertools.product(*stay):
                evs, tgts = zip(*combo)
                if tgts != v[1:]:
                    yield (eps0, *evs), (v[0], *tgts)

    def build(self):
        """Breadth-first exploration; states and event vectors are interned as ints."""
        comps = self.comps
        initial_sets = [sorted(comps[i].state_index[x] for x in c.fsa.initial) for i, c in enumerate(comps)]
        initial = sorted(set(itertools.product(*initial_sets)))
        index = {v: i for i, v in enumerate(initial)}
        order = list(initial)
        events = {}
        edges = []
        pos = 0
        while pos < len(order):
            v = order[pos]
            pos += 1
            succ = []
            for ev, w in self.successors(v):
                wi = index.get(w)
                if wi is None:
                    wi = index[w] = len(order)
                    order.append(w)
                ei = events.get(ev)
                if ei is None:
                    ei = events[ev] = len(events)
                succ.append((ei, wi))
            edges.append(succ)
        return order, len(initial), list(events), edges


@dataclass(frozen=True, eq=False)
class Composition:
    """An accessible product automaton over state and event vectors.

    ``states`` and ``event_vectors`` are sorted; ``edges[v]`` lists
    ``(event_vector_index, target_index)`` pairs sorted by target then event.
    """

    components: tuple[Fsa, ...]
    diamond: bool
    states: tuple[tuple[int, ...], ...]
    initial: tuple[int, ...]
    event_vectors: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[tuple[int, int], ...], ...]

    @cached_property
    def _comps(self):
        return [_Component(c) for c in self.components]

    @property
    def width(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.states)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {v: i for i, v in enumerate(self.states)}

    @cached_property
    def num_transitions(self) -> int:
        return sum(len(e) for e in self.edges)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        return [[w for _, w in succ] for succ in self.edges]

    def is_dead(self, v: int, entry: int) -> bool:
        return self.states[v][entry] == self._comps[entry].dead

    def entry_event(self, e: int, entry: int) -> str | None:
        """Event name of ``entry`` in event vector ``e``; ``None`` for epsilon, ``⋄`` for kill."""
        c = self._comps[entry]
        t = self.event_vectors[e][entry]
        if t == c.eps:
            return None
        if t == c.kill:
            return DIAMOND
        return c.event_names[t]

    def state_names(self, v: int) -> tuple[str, ...]:
        return tuple(
            DIAMOND if x == c.dead else c.state_names[x]
            for c, x in zip(self._comps, self.states[v])
        )

    def event_names(self, e: int) -> tuple[str | None, ...]:
        return tuple(self.entry_event(e, i) for i in range(self.width))

    def encode_state(self, names: Sequence[str]) -> tuple[int, ...]:
        return tuple(
            c.dead if x == DIAMOND else c.state_index[x] for c, x in zip(self._comps, names)
        )

    def encode_event(self, names: Sequence[str | None]) -> tuple[int, ...]:
        out = []
        for c, t in zip(self._comps, names):
            if t is None:
                out.append(c.eps)
            elif t == DIAMOND:
                out.append(c.kill)
            else:
                out.append(c.event_index[t])
        return tuple(out)

    def find_state(self, names: Sequence[str]) -> int | None:
        return self.index.get(self.encode_state(names))

    def transitions(self) -> Iterator[tuple[tuple[str, ...], tuple, tuple[str, ...]]]:
        """All transitions with entries spelled out, in canonical order."""
        for v, succ in enumerate(self.edges):
            src = self.state_names(v)
            for e, w in succ:
                yield src, self.event_names(e), self.state_names(w)

    def has_transition(self, src: Sequence[str], ev: Sequence, dst: Sequence[str]) -> bool:
        v = self.find_state(src)
        w = self.find_state(dst)
        if v is None or w is None:
            return False
        try:
            code = self.encode_event(ev)
        except KeyError:
            return False
        return any(self.event_vectors[e] == code and t == w for e, t in self.edges[v])

    def size_bound(self) -> int:
        bound = len(self.components[0].states)
        for c in self.components[1:]:
            bound *= len(c.states) + (1 if self.diamond else 0)
        return bound


def _finish(components: Sequence[Fsa], diamond: bool) -> Composition:
    order, n_initial, events, edges = _Builder(components, diamond).build()
    ranked = sorted(range(len(order)), key=order.__getitem__)
    new_index = [0] * len(order)
    for new, old in enumerate(ranked):
        new_index[old] = new
    ev_ranked = sorted(range(len(events)), key=events.__getitem__)
    new_ev = [0] * len(events)
    for new, old in enumerate(ev_ranked):
        new_ev[old] = new
    new_edges = [None] * len(order)
    for old, succ in enumerate(edges):
        pairs = sorted({(new_index[w], new_ev[e]) for e, w in succ})
        new_edges[new_index[old]] = tuple((e, w) for w, e in pairs)
    return Composition(
        components=tuple(components),
        diamond=diamond,
        states=tuple(order[i] for i in ranked),
        initial=tuple(sorted(new_index[i] for i in range(n_initial))),
        event_vectors=tuple(events[i] for i in ev_ranked),
        edges=tuple(new_edges),
    )


def concurrent_composition(base: Fsa, components: Sequence[Fsa]) -> Composition:
    """Accessible part of the concurrent composition of ``components`` with respect to ``base``.

    Each component is matched against ``base`` through its own labeling.  An
    event of ``base`` that a component does not declare is invisible to it.
    """
    if not components:
        raise ValueError("at least one component is required")
    return _finish([base, *components], diamond=False)


def diamond_composition(fsa: Fsa, observers: ObserverSet) -> Composition:
    """Dead-marker variant of the composition of ``fsa`` with its local automata."""
    locals_ = [local_automaton(fsa, o) for o in observers]
    return _finish([fsa, *locals_], diamond=True)


def centralized_diamond_composition(fsa: Fsa) -> Composition:
    """The variant of ``fsa`` composed with itself under its own labeling."""
    return _finish([fsa, local_automaton(fsa, global_observer(fsa))], diamond=True)


def classify_event_vector(comp: Composition, src: int, e: int) -> list[str]:
    """Every formation rule that the transition ``src --e-->`` satisfies.

    Returns a subset of ``["async", "sync", "kill"]``.  A well-formed
    composition yields exactly one rule per transition.
    """
    comps = comp._comps
    vec = comp.event_vectors[e]
    state = comp.states[src]
    L = comp.width - 1
    killed = [j for j in range(1, L + 1) if vec[j] == comps[j].kill]
    part = [j for j in range(1, L + 1) if vec[j] != comps[j].kill]

    def label(j, t):
        return None if t == comps[j].eps else comps[j].labels[t]

    t0 = vec[0]
    name0 = None if t0 == comps[0].eps else comps[0].event_names[t0]
    vis = {j: (None if name0 is None else comps[j].fsa.events.get(name0)) for j in part}
    moving = [j for j in [0, *part] if vec[j] != comps[j].eps]
    if any(v is not None for v in vis.values()):
        sub = "sync" if name0 is not None and all(
            (vec[j] == comps[j].eps) if vis[j] is None else label(j, vec[j]) == vis[j]
            for j in part
        ) else None
    elif len(moving) == 1 and all(label(j, vec[j]) is None for j in part):
        sub = "async"
    elif not moving:
        sub = "idle"
    else:
        sub = None

    if not killed:
        return [sub] if sub in ("async", "sync") else []
    retire_ok = all(state[j] == comps[j].dead or state[j] != state[0] for j in killed)
    return ["kill"] if retire_ok and sub is not None else []


def _state_label(names: Sequence[str]) -> str:
    return "|".join(names)


def _event_label(names: Sequence[str | None]) -> str:
    return "|".join(EPSILON_TOKEN if t is None else t for t in names)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(obj: Composition | Fsa, name: str = "G") -> str:
    """Graphviz text for an automaton or a composition, in canonical order.

    Initial nodes are drawn bold; vector entries are joined with ``|`` and the
    dead marker is written as ``⋄``.
    """
    lines = [f"digraph {_dot_quote(name)} {{", "  rankdir=LR;"]
    if isinstance(obj, Fsa):
        ids = {x: f"n{i}" for i, x in enumerate(obj.states)}
        for x in obj.states:
            style = ", style=bold" if x in obj.initial else ""
            lines.append(f"  {ids[x]} [label={_dot_quote(x)}{style}];")
        for src, ev, dst in obj.transitions:
            lab = obj.events[ev]
            text = ev if lab == ev else f"{ev}/{EPSILON_TOKEN if lab is None else lab}"
            lines.append(f"  {ids[src]} -> {ids[dst]} [label={_dot_quote(text)}];")
    else:
        initial = set(obj.initial)
        for v in range(len(obj.states)):
            style = ", style=bold" if v in initial else ""
            lines.append(f"  n{v} [label={_dot_quote(_state_label(obj.state_names(v)))}{style}];")
        for v, succ in enumerate(obj.edges):
            for e, w in succ:
                lines.append(f"  n{v} -> n{w} [label={_dot_quote(_event_label(obj.event_names(e)))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def composition_to_json(comp: Composition) -> str:
    data = {
        "variant": "diamond" if comp.diamond else "plain",
        "states": [list(comp.state_names(v)) for v in range(len(comp.states))],
        "initial": [list(comp.state_names(v)) for v in comp.initial],
        "transitions": [[list(s), list(e), list(d)] for s, e, d in comp.transitions()],
    }
    return json.dumps(data, ensure_ascii=False, indent=2)
