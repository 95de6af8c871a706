"""Finite-state automata with partially observed events.

An :class:`Fsa` has states, events carrying an output label (``None`` stands
for the empty output), a set of initial states, a transition relation and an
optional set of faulty events.  Local observers (:class:`Observer`) see the
label of an event only when the event belongs to their observed subset.

All objects are immutable; operations return new automata.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

__all__ = [
    "DIAMOND",
    "InvalidInstance",
    "InstanceWarning",
    "Fsa",
    "Observer",
    "ObserverSet",
    "Run",
    "observer_labels",
    "global_observer",
    "accessible_part",
    "project",
    "local_automaton",
    "normal_subautomaton",
    "current_state_estimate",
    "epsilon_closure",
    "check_assumptions",
    "generates_infinite_runs",
    "validate_instance",
]

#: Reserved token for the dead marker of the extended composition.
DIAMOND = "⋄"

Transition = tuple[str, str, str]


class InvalidInstance(ValueError):
    """Raised when an instance description violates the data model.

    ``problems`` lists every violation found, not just the first one.
    """

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InstanceWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class Fsa:
    """A finite-state automaton ``(X, T, X0, delta, Sigma, label)``.

    ``events`` maps each event name to its output label, ``None`` meaning the
    event is unobservable.  The output alphabet is derived from the labels in
    use.  ``controllable`` is carried along but no algorithm reads it.
    """

    states: Iterable[str]
    events: Mapping[str, str | None]
    initial: Iterable[str]
    transitions: Iterable[Transition]
    faulty: Iterable[str] = field(default_factory=frozenset)
    controllable: Iterable[str] = field(default_factory=frozenset)

    def __post_init__(self):
        states = tuple(self.states)
        events = dict(self.events)
        initial = frozenset(self.initial)
        transitions = tuple(tuple(t) for t in self.transitions)
        faulty = frozenset(self.faulty)
        controllable = frozenset(self.controllable)

        problems = []
        if len(set(states)) != len(states):
            problems.append("duplicate state identifiers")
        state_set = set(states)
        for name in (*state_set, *events):
            if name == DIAMOND:
                problems.append(f"identifier {DIAMOND!r} is reserved")
        for name, label in events.items():
            if label is not None and not isinstance(label, str):
                problems.append(f"event {name!r} has a non-string label")
            if label == "":
                problems.append(f"event {name!r} uses '' as label; use None for epsilon")
        for x in sorted(initial - state_set):
            problems.append(f"initial state {x!r} is not a declared state")
        for t in transitions:
            if len(t) != 3:
                problems.append(f"transition {t!r} is not a (source, event, target) triple")
                continue
            src, ev, dst = t
            if src not in state_set:
                problems.append(f"transition {t!r} references unknown state {src!r}")
            if dst not in state_set:
                problems.append(f"transition {t!r} references unknown state {dst!r}")
            if ev not in events:
                problems.append(f"transition {t!r} references unknown event {ev!r}")
        for t in sorted(faulty - events.keys()):
            problems.append(f"faulty event {t!r} is not a declared event")
        for t in sorted(controllable - events.keys()):
            problems.append(f"controllable event {t!r} is not a declared event")
        if problems:
            raise InvalidInstance(problems)

        object.__setattr__(self, "states", tuple(sorted(state_set)))
        object.__setattr__(
            self, "events", MappingProxyType({t: events[t] for t in sorted(events)})
        )
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "transitions", tuple(sorted(set(transitions))))
        object.__setattr__(self, "faulty", faulty)
        object.__setattr__(self, "controllable", controllable)

    def _key(self):
        return (
            self.states,
            tuple(self.events.items()),
            tuple(sorted(self.initial)),
            self.transitions,
            tuple(sorted(self.faulty)),
            tuple(sorted(self.controllable)),
        )

    def __eq__(self, other):
        if not isinstance(other, Fsa):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"Fsa(states={len(self.states)}, events={len(self.events)}, "
            f"transitions={len(self.transitions)})"
        )

    def label(self, event: str) -> str | None:
        return self.events[event]

    @cached_property
    def observable(self) -> frozenset[str]:
        return frozenset(t for t, lab in self.events.items() if lab is not None)

    @cached_property
    def unobservable(self) -> frozenset[str]:
        return frozenset(t for t, lab in self.events.items() if lab is None)

    @cached_property
    def outputs(self) -> frozenset[str]:
        """The output alphabet: labels that some event actually carries."""
        return frozenset(lab for lab in self.events.values() if lab is not None)

    @cached_property
    def _out(self) -> dict[str, tuple[tuple[str, str], ...]]:
        out: dict[str, list[tuple[str, str]]] = {x: [] for x in self.states}
        for src, ev, dst in self.transitions:
            out[src].append((ev, dst))
        return {x: tuple(v) for x, v in out.items()}

    def successors(self, state: str) -> tuple[tuple[str, str], ...]:
        """Outgoing ``(event, target)`` pairs of ``state``, sorted."""
        return self._out[state]

    def is_deterministic(self) -> bool:
        seen = set()
        for src, ev, _ in self.transitions:
            if (src, ev) in seen:
                return False
            seen.add((src, ev))
        return True

    def replace(self, **changes) -> "Fsa":
        fields = dict(
            states=self.states,
            events=self.events,
            initial=self.initial,
            transitions=self.transitions,
            faulty=self.faulty,
            controllable=self.controllable,
        )
        fields.update(changes)
        return Fsa(**fields)


@dataclass(frozen=True)
class Observer:
    """A local observer: sees ``label(t)`` for ``t`` in ``observes``, nothing otherwise."""

    name: str
    observes: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "observes", frozenset(self.observes))


@dataclass(frozen=True)
class ObserverSet:
    """An ordered collection of ``L >= 1`` local observers.

    Observer ``observers[i]`` sits at location ``i + 1``; location numbers are
    the entry numbers used in compositions, where entry 0 is the plant itself.
    """

    observers: tuple[Observer, ...]

    def __post_init__(self):
        obs = tuple(self.observers)
        if not obs:
            raise InvalidInstance(["an observer set needs at least one observer"])
        names = [o.name for o in obs]
        if len(set(names)) != len(names):
            raise InvalidInstance(["duplicate observer names"])
        object.__setattr__(self, "observers", obs)

    def __len__(self):
        return len(self.observers)

    def __iter__(self):
        return iter(self.observers)

    def __getitem__(self, i):
        return self.observers[i]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.observers)

    def check_against(self, fsa: Fsa) -> None:
        problems = []
        for o in self.observers:
            for t in sorted(o.observes - fsa.events.keys()):
                problems.append(f"observer {o.name!r} lists unknown event {t!r}")
        if problems:
            raise InvalidInstance(problems)
        for o in self.observers:
            blind = sorted(o.observes & fsa.unobservable)
            if blind:
                warnings.warn(
                    f"observer {o.name!r} lists unobservable events {blind}; "
                    "they stay invisible to it",
                    InstanceWarning,
                    stacklevel=2,
                )

    def appended(self, observer: Observer) -> "ObserverSet":
        return ObserverSet(self.observers + (observer,))


def global_observer(fsa: Fsa, name: str = "global") -> Observer:
    """An observer seeing every observable event, so its labeling is ``label``."""
    return Observer(name, fsa.observable)


def observer_labels(fsa: Fsa, observer: Observer | None) -> dict[str, str | None]:
    """The labeling ``O_i`` induced by ``observer`` (or ``label`` itself for ``None``)."""
    if observer is None:
        return dict(fsa.events)
    return {
        t: (lab if t in observer.observes else None) for t, lab in fsa.events.items()
    }


@dataclass(frozen=True)
class Run:
    """A transition sequence ``start -t1-> x1 -t2-> ... -tn-> xn``."""

    start: str
    steps: tuple[tuple[str, str], ...] = ()

    @property
    def events(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.steps)

    @property
    def end(self) -> str:
        return self.steps[-1][1] if self.steps else self.start

    def is_run_of(self, fsa: Fsa) -> bool:
        delta = set(fsa.transitions)
        x = self.start
        if x not in fsa.states:
            return False
        for t, y in self.steps:
            if (x, t, y) not in delta:
                return False
            x = y
        return True


def accessible_part(fsa: Fsa) -> Fsa:
    """Restrict ``fsa`` to the states reachable from its initial states."""
    seen = set(fsa.initial)
    queue = deque(sorted(fsa.initial))
    while queue:
        x = queue.popleft()
        for _, y in fsa.successors(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return fsa.replace(
        states=[x for x in fsa.states if x in seen],
        transitions=[t for t in fsa.transitions if t[0] in seen],
    )


def project(fsa: Fsa, events: Sequence[str], observer: Observer | None = None) -> tuple[str, ...]:
    """Output sequence produced by ``events`` under ``label`` or an observer's labeling.

    Raises ``ValueError`` on an undeclared event.
    """
    out = []
    for t in events:
        try:
            lab = fsa.events[t]
        except KeyError:
            raise ValueError(f"unknown event {t!r}") from None
        if lab is not None and (observer is None or t in observer.observes):
            out.append(lab)
    return tuple(out)


def local_automaton(fsa: Fsa, observer: Observer) -> Fsa:
    """The same automaton relabeled by the observer's local labeling."""
    unknown = observer.observes - fsa.events.keys()
    if unknown:
        raise ValueError(f"observer {observer.name!r} lists unknown events {sorted(unknown)}")
    return fsa.replace(events=observer_labels(fsa, observer))


def normal_subautomaton(fsa: Fsa) -> Fsa:
    """Drop every transition whose event is faulty; states and events are kept."""
    return fsa.replace(transitions=[t for t in fsa.transitions if t[1] not in fsa.faulty])


def epsilon_closure(fsa: Fsa, states: Iterable[str], labels: Mapping[str, str | None]) -> frozenset[str]:
    closure = set(states)
    stack = list(closure)
    while stack:
        x = stack.pop()
        for t, y in fsa.successors(x):
            if labels[t] is None and y not in closure:
                closure.add(y)
                stack.append(y)
    return frozenset(closure)


def current_state_estimate(
    fsa: Fsa, outputs: Sequence[str], observer: Observer | None = None
) -> frozenset[str]:
    """States the system can be in once ``outputs`` has been observed.

    Matching is on labels, never on event identity.  An empty result means the
    output sequence cannot be produced.
    """
    labels = observer_labels(fsa, observer)
    current = epsilon_closure(fsa, fsa.initial, labels)
    for sym in outputs:
        step = {y for x in current for t, y in fsa.successors(x) if labels[t] == sym}
        current = epsilon_closure(fsa, step, labels)
        if not current:
            break
    return current


def _reachable(fsa: Fsa) -> set[str]:
    return set(accessible_part(fsa).states)


def check_assumptions(fsa: Fsa) -> dict[str, bool]:
    """Report deadlock-freeness and promptness of the reachable part.

    Neither property is required by any verifier; this is a diagnostic only.
    """
    from .graph import strongly_connected_components

    reach = _reachable(fsa)
    deadlock_free = all(fsa.successors(x) for x in reach)

    order = sorted(reach)
    index = {x: i for i, x in enumerate(order)}
    adjacency = [[] for _ in order]
    for src, ev, dst in fsa.transitions:
        if src in reach and fsa.events[ev] is None:
            adjacency[index[src]].append(index[dst])
    prompt = True
    for comp in strongly_connected_components(adjacency):
        if len(comp) > 1 or comp[0] in adjacency[comp[0]]:
            prompt = False
            break
    return {"deadlock_free": deadlock_free, "prompt": prompt}


def generates_infinite_runs(fsa: Fsa) -> bool:
    """Whether some reachable state lies on a transition cycle."""
    from .graph import cyclic_nodes

    reach = _reachable(fsa)
    order = sorted(reach)
    index = {x: i for i, x in enumerate(order)}
    adjacency = [[] for _ in order]
    for src, _, dst in fsa.transitions:
        if src in reach:
            adjacency[index[src]].append(index[dst])
    return any(cyclic_nodes(adjacency))


_INSTANCE_FIELDS = {"states", "initial", "events", "transitions", "observers", "faulty", "controllable"}


def validate_instance(raw: Mapping) -> tuple[Fsa, ObserverSet | None]:
    """Build an ``(Fsa, ObserverSet)`` pair from a decoded JSON instance.

    Collects every violation and raises :class:`InvalidInstance` listing them.
    The observer set is ``None`` when the instance declares no observers.
    """
    if not isinstance(raw, Mapping):
        raise InvalidInstance(["instance must be a JSON object"])
    problems = []
    for key in sorted(set(raw) - _INSTANCE_FIELDS):
        problems.append(f"unknown field {key!r}")
    for key in ("states", "initial", "events", "transitions"):
        if key not in raw:
            problems.append(f"missing field {key!r}")
    if problems:
        raise InvalidInstance(problems)

    def str_list(key):
        value = raw.get(key, [])
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            problems.append(f"field {key!r} must be an array of strings")
            return []
        if len(set(value)) != len(value):
            problems.append(f"field {key!r} has duplicate entries")
        return value

    states = str_list("states")
    initial = str_list("initial")
    faulty = str_list("faulty")
    controllable = str_list("controllable")

    events: dict[str, str | None] = {}
    raw_events = raw["events"]
    if not isinstance(raw_events, list):
        problems.append("field 'events' must be an array")
        raw_events = []
    for e in raw_events:
        if not isinstance(e, Mapping) or set(e) - {"name", "label"} or "name" not in e:
            problems.append(f"malformed event entry {e!r}")
            continue
        name, label = e["name"], e.get("label")
        if not isinstance(name, str) or (label is not None and not isinstance(label, str)):
            problems.append(f"malformed event entry {e!r}")
            continue
        if name in events:
            problems.append(f"duplicate event {name!r}")
        events[name] = label

    transitions = []
    raw_trans = raw["transitions"]
    if not isinstance(raw_trans, list):
        problems.append("field 'transitions' must be an array")
        raw_trans = []
    for t in raw_trans:
        if not isinstance(t, list) or len(t) != 3 or not all(isinstance(v, str) for v in t):
            problems.append(f"malformed transition {t!r}")
            continue
        transitions.append(tuple(t))

    observers = []
    raw_obs = raw.get("observers", [])
    if not isinstance(raw_obs, list):
        problems.append("field 'observers' must be an array")
        raw_obs = []
    for o in raw_obs:
        if (
            not isinstance(o, Mapping)
            or set(o) != {"name", "observes"}
            or not isinstance(o["name"], str)
            or not isinstance(o["observes"], list)
        ):
            problems.append(f"malformed observer entry {o!r}")
            continue
        for t in o["observes"]:
            if t not in events:
                problems.append(f"observer {o['name']!r} lists unknown event {t!r}")
        observers.append(Observer(o["name"], frozenset(o["observes"])))

    if problems:
        raise InvalidInstance(problems)
    fsa = Fsa(states, events, initial, transitions, faulty, controllable)
    if not observers:
        return fsa, None
    obs = ObserverSet(tuple(observers))
    obs.check_against(fsa)
    return fsa, obs
