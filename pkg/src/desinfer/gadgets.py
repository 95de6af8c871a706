"""Instance generators with known answers.

Three reductions turn questions with an easy brute-force answer into
verification instances:

* a family of acyclic DFAs becomes a plant that is co-detectable exactly when
  the DFAs have no common word;
* a family of complete DFAs becomes a plant that is co-predictable exactly
  when the DFAs have no common word;
* a directed graph with two marked nodes becomes a plant that is predictable
  exactly when the second node is unreachable from the first.

The module also holds seeded random generators for DFAs, graphs and plants.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dfa import Dfa
from .fsa import Fsa, InvalidInstance, Observer, ObserverSet

__all__ = [
    "ReductionInstance",
    "fresh_name",
    "normalize_acyclic_dfas",
    "normalize_complete_dfas",
    "reduce_to_codetectability",
    "reduce_to_copredictability",
    "reduce_path_to_predictability",
    "random_acyclic_dfa",
    "random_complete_dfa",
    "random_digraph",
    "random_fsa",
    "graph_reaches",
]


@dataclass(frozen=True)
class ReductionInstance:
    """A generated plant plus the answer the reduction guarantees.

    ``expected`` is whether ``property`` holds, or ``None`` when the source
    was too large to settle by brute force.
    """

    fsa: Fsa
    observers: ObserverSet | None
    property: str
    expected: bool | None
    provenance: dict = field(default_factory=dict)

    @property
    def faulty(self) -> frozenset[str]:
        return self.fsa.faulty


def fresh_name(base: str, used: Iterable[str]) -> str:
    """``base`` with primes appended until it avoids every name in ``used``."""
    used = set(used)
    name = base
    while name in used:
        name += "'"
    return name


def _same_alphabet(dfas: Sequence[Dfa]) -> tuple[str, ...]:
    if not dfas:
        raise InvalidInstance(["need at least one DFA"])
    alphabet = dfas[0].alphabet
    for i, d in enumerate(dfas):
        if d.alphabet != alphabet:
            raise InvalidInstance([f"DFA {i} has alphabet {d.alphabet}, expected {alphabet}"])
    return alphabet


# -------------------------------------------------------------- normalization


def _add_end_letter(dfas: Sequence[Dfa], loop_others: bool) -> list[Dfa]:
    alphabet = _same_alphabet(dfas)
    lam = fresh_name("λ", alphabet)
    out = []
    for i, d in enumerate(dfas):
        sink = fresh_name(f"end{i}", d.states)
        trans = dict(d.transitions)
        for q in d.accepting:
            trans[(q, lam)] = sink
        if i == 0:
            accepting = {sink}
        else:
            if loop_others:
                trans[(sink, lam)] = sink
            accepting = set(d.states) | {sink}
        out.append(Dfa([*d.states, sink], [*alphabet, lam], trans, d.initial, accepting))
    return out


def normalize_acyclic_dfas(dfas: Sequence[Dfa]) -> list[Dfa]:
    """Append a fresh end letter so the first DFA has one accepting state and the rest accept everywhere.

    A word ``w`` is accepted by every input iff ``w`` followed by the end
    letter is accepted by every output.  Outputs stay acyclic.
    """
    for i, d in enumerate(dfas):
        if not d.acyclic:
            raise InvalidInstance([f"DFA {i} has a cycle"])
    return _add_end_letter(dfas, loop_others=False)


def normalize_complete_dfas(dfas: Sequence[Dfa]) -> list[Dfa]:
    """Like :func:`normalize_acyclic_dfas` for complete inputs.

    The first output's only accepting state has no outgoing transition; the
    others get an end-letter self-loop on their new state so that no output
    state except that one is a deadlock.
    """
    for i, d in enumerate(dfas):
        if not d.complete:
            raise InvalidInstance([f"DFA {i} is not complete"])
    return _add_end_letter(dfas, loop_others=True)


# ----------------------------------------------------------------- reductions


def _intersection_answer(dfas: Sequence[Dfa], budget: int):
    from .oracle import BudgetExceeded, brute_force_dfa_intersection

    try:
        return brute_force_dfa_intersection(dfas, budget=budget), True
    except BudgetExceeded:
        return None, False


def _branches(dfas: Sequence[Dfa]):
    """Relabeled copies of the DFAs fanned out from a fresh initial state.

    Returns the pieces shared by both DFA reductions: states, events,
    transitions, names for branch states, and the observer event sets.
    """
    alphabet = _same_alphabet(dfas)
    n = len(dfas) - 1
    if n < 1:
        raise InvalidInstance(["need at least two DFAs (one observer per extra DFA)"])
    state_of = {}
    states = []
    for i, d in enumerate(dfas):
        for q in d.states:
            name = f"A{i}.{q}"
            state_of[(i, q)] = name
            states.append(name)
    events: dict[str, str | None] = {}
    letter = {}
    for i in range(len(dfas)):
        for sym in alphabet:
            name = f"{sym}.{i}"
            letter[(i, sym)] = name
            events[name] = sym
    used_events = set(events)
    a = fresh_name("a", used_events | set(alphabet))
    entry_events = []
    for i in range(len(dfas)):
        name = fresh_name(f"a.{i}", used_events | {a})
        entry_events.append(name)
        used_events.add(name)
    events[a] = a
    for name in entry_events:
        events[name] = a
    start = fresh_name("start", states)
    transitions = []
    for i, d in enumerate(dfas):
        transitions.append((start, entry_events[i], state_of[(i, d.initial)]))
        for (q, sym), r in d.transitions.items():
            transitions.append((state_of[(i, q)], letter[(i, sym)], state_of[(i, r)]))
    observers = []
    for i in range(1, n + 1):
        seen = {letter[(0, s)] for s in alphabet} | {letter[(i, s)] for s in alphabet}
        seen |= {a, *entry_events}
        observers.append(Observer(f"O{i}", frozenset(seen)))
    return states, events, transitions, state_of, a, start, ObserverSet(tuple(observers))


def reduce_to_codetectability(dfas: Sequence[Dfa], budget: int = 20_000) -> ReductionInstance:
    """Plant that fails co-detectability exactly when the DFAs share a word.

    Preconditions: every DFA is acyclic, the first has exactly one accepting
    state and the others accept in every state.  The plant has one state
    more than the sources in total, plus three.
    """
    problems = [f"DFA {i} has a cycle" for i, d in enumerate(dfas) if not d.acyclic]
    if dfas and len(dfas[0].accepting) != 1:
        problems.append("the first DFA must have exactly one accepting state")
    for i, d in enumerate(dfas[1:], start=1):
        if set(d.accepting) != set(d.states):
            problems.append(f"DFA {i} must accept in every state")
    if problems:
        raise InvalidInstance(problems)
    states, events, transitions, state_of, a, start, observers = _branches(dfas)
    good = fresh_name("sink1", states + [start])
    bad = fresh_name("sink2", states + [start, good])
    (final,) = dfas[0].accepting
    for q in dfas[0].states:
        transitions.append((state_of[(0, q)], a, good if q == final else bad))
    for i, d in enumerate(dfas[1:], start=1):
        for q in d.states:
            transitions.append((state_of[(i, q)], a, bad))
    transitions += [(good, a, good), (bad, a, bad)]
    fsa = Fsa([start, *states, good, bad], events, [start], transitions)
    word, settled = _intersection_answer(dfas, budget)
    return ReductionInstance(
        fsa,
        observers,
        "co-detectability",
        (word is None) if settled else None,
        {"source": "dfa-intersection", "dfas": len(dfas), "common_word": list(word) if word else word},
    )


def reduce_to_copredictability(dfas: Sequence[Dfa], budget: int = 20_000) -> ReductionInstance:
    """Plant that fails co-predictability exactly when the DFAs share a word.

    Preconditions: the first DFA has exactly one accepting state and that
    state has no outgoing transition; every other DFA accepts in every state
    and has no deadlock.  The plant has two states more than the sources.
    """
    problems = []
    if dfas:
        first = dfas[0]
        if len(first.accepting) != 1:
            problems.append("the first DFA must have exactly one accepting state")
        else:
            (final,) = first.accepting
            if any(q == final for q, _ in first.transitions):
                problems.append("the accepting state of the first DFA must be a deadlock")
    for i, d in enumerate(dfas[1:], start=1):
        if set(d.accepting) != set(d.states):
            problems.append(f"DFA {i} must accept in every state")
        sources = {q for q, _ in d.transitions}
        if sources != set(d.states):
            problems.append(f"DFA {i} has a deadlock state")
    if problems:
        raise InvalidInstance(problems)
    states, events, transitions, state_of, a, start, observers = _branches(dfas)
    sink = fresh_name("sink1", states + [start])
    fault = fresh_name("F", events)
    events[fault] = None
    (final,) = dfas[0].accepting
    transitions.append((state_of[(0, final)], fault, sink))
    transitions.append((sink, a, sink))
    fsa = Fsa([start, *states, sink], events, [start], transitions, faulty={fault})
    word, settled = _intersection_answer(dfas, budget)
    return ReductionInstance(
        fsa,
        observers,
        "co-predictability",
        (word is None) if settled else None,
        {"source": "dfa-intersection", "dfas": len(dfas), "common_word": list(word) if word else word},
    )


def graph_reaches(nodes: Iterable[str], edges: Iterable[tuple[str, str]], s: str, t: str) -> bool:
    """Whether a directed path (possibly empty) leads from ``s`` to ``t``."""
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for u, v in edges:
        succ[u].append(v)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            return True
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def reduce_path_to_predictability(
    nodes: Sequence[str], edges: Sequence[tuple[str, str]], s: str, t: str
) -> ReductionInstance:
    """Plant that fails predictability exactly when ``t`` is reachable from ``s``."""
    nodes = list(nodes)
    problems = [f"node {x!r} is not in the graph" for x in (s, t) if x not in nodes]
    problems += [f"edge {e!r} uses an unknown node" for e in edges if e[0] not in nodes or e[1] not in nodes]
    if problems:
        raise InvalidInstance(problems)
    sink = fresh_name("vf", nodes)
    transitions = []
    for u, v in edges:
        transitions += [(u, "a", v), (u, "a", sink)]
    transitions += [(t, "f", sink), (t, "u", sink), (sink, "a", sink)]
    fsa = Fsa(
        [*nodes, sink],
        {"a": "a", "f": None, "u": None},
        [s],
        transitions,
        faulty={"f"},
    )
    return ReductionInstance(
        fsa,
        None,
        "predictability",
        not graph_reaches(nodes, edges, s, t),
        {"source": "graph-reachability", "s": s, "t": t, "nodes": len(nodes), "edges": len(edges)},
    )


# ---------------------------------------------------------- random generators


def random_acyclic_dfa(
    rng: random.Random, n_states: int, alphabet: Sequence[str], density: float = 0.5, accept: float = 0.5
) -> Dfa:
    """Transitions only go from lower to higher state numbers, so no cycles exist."""
    states = [f"q{i}" for i in range(n_states)]
    trans = {}
    for i in range(n_states - 1):
        for sym in alphabet:
            if rng.random() < density:
                trans[(states[i], sym)] = states[rng.randrange(i + 1, n_states)]
    accepting = [q for q in states if rng.random() < accept]
    return Dfa(states, alphabet, trans, states[0], accepting)


def random_complete_dfa(
    rng: random.Random, n_states: int, alphabet: Sequence[str], accept: float = 0.5
) -> Dfa:
    states = [f"q{i}" for i in range(n_states)]
    trans = {(q, sym): rng.choice(states) for q in states for sym in alphabet}
    accepting = [q for q in states if rng.random() < accept]
    return Dfa(states, alphabet, trans, states[0], accepting)


def random_digraph(rng: random.Random, n_nodes: int, p: float = 0.3):
    nodes = [f"v{i}" for i in range(n_nodes)]
    edges = [(u, v) for u in nodes for v in nodes if rng.random() < p]
    return nodes, edges


def random_fsa(
    rng: random.Random,
    n_states: int,
    n_events: int,
    n_observers: int = 1,
    *,
    n_transitions: int | None = None,
    n_labels: int | None = None,
    p_silent: float = 0.3,
    p_fault: float = 0.25,
    n_initial: int | None = None,
) -> tuple[Fsa, ObserverSet]:
    """A random plant with random local observers.

    Labels come from a pool of ``n_labels`` symbols so distinct events can
    share an output.  Each observer watches a random subset of the
    observable events.
    """
    states = [f"x{i}" for i in range(n_states)]
    names = [f"e{i}" for i in range(n_events)]
    n_labels = n_labels or max(1, n_events - 1)
    pool = [chr(ord("a") + i) for i in range(n_labels)]
    events = {t: (None if rng.random() < p_silent else rng.choice(pool)) for t in names}
    faulty = {t for t in names if rng.random() < p_fault}
    if n_transitions is None:
        n_transitions = rng.randint(n_states, 2 * n_states + 1)
    transitions = {
        (rng.choice(states), rng.choice(names), rng.choice(states)) for _ in range(n_transitions)
    }
    k = n_initial if n_initial is not None else rng.choice([1, 1, 1, 2])
    initial = rng.sample(states, min(k, n_states))
    fsa = Fsa(states, events, initial, transitions, faulty)
    observable = sorted(fsa.observable)
    observers = []
    for i in range(n_observers):
        seen = frozenset(t for t in observable if rng.random() < 0.6)
        observers.append(Observer(f"O{i + 1}", seen))
    return fsa, ObserverSet(tuple(observers))
