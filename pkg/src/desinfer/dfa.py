"""Deterministic finite automata over finite words."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .fsa import InvalidInstance
from .graph import cyclic_nodes


@dataclass(frozen=True, eq=False)
class Dfa:
    """A DFA ``(Q, Sigma, delta, q0, F)`` with a partial transition map.

    ``acyclic`` and ``complete`` are computed from the structure, so they can
    be trusted by anything that checks them.
    """

    states: Iterable[str]
    alphabet: Iterable[str]
    transitions: Mapping[tuple[str, str], str]
    initial: str
    accepting: Iterable[str]

    def __post_init__(self):
        states = tuple(self.states)
        alphabet = tuple(self.alphabet)
        trans = dict(self.transitions)
        accepting = frozenset(self.accepting)
        problems = []
        if len(set(states)) != len(states):
            problems.append("duplicate states")
        if len(set(alphabet)) != len(alphabet):
            problems.append("duplicate letters")
        if self.initial not in states:
            problems.append(f"initial state {self.initial!r} is not a state")
        for q in sorted(accepting - set(states)):
            problems.append(f"accepting state {q!r} is not a state")
        for (q, a), r in trans.items():
            if q not in states or r not in states:
                problems.append(f"transition {(q, a)!r} -> {r!r} uses an unknown state")
            if a not in alphabet:
                problems.append(f"transition {(q, a)!r} uses an unknown letter")
        if problems:
            raise InvalidInstance(problems)
        object.__setattr__(self, "states", tuple(sorted(states)))
        object.__setattr__(self, "alphabet", tuple(sorted(alphabet)))
        object.__setattr__(self, "transitions", MappingProxyType(dict(sorted(trans.items()))))
        object.__setattr__(self, "accepting", accepting)

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return (
            self.states == other.states
            and self.alphabet == other.alphabet
            and dict(self.transitions) == dict(other.transitions)
            and self.initial == other.initial
            and self.accepting == other.accepting
        )

    def __hash__(self):
        return hash((self.states, self.alphabet, self.initial))

    def step(self, q: str | None, letter: str) -> str | None:
        if q is None:
            return None
        return self.transitions.get((q, letter))

    def accepts(self, word: Sequence[str]) -> bool:
        q = self.initial
        for a in word:
            q = self.step(q, a)
        return q is not None and q in self.accepting

    @cached_property
    def complete(self) -> bool:
        return all((q, a) in self.transitions for q in self.states for a in self.alphabet)

    @cached_property
    def acyclic(self) -> bool:
        index = {q: i for i, q in enumerate(self.states)}
        adjacency = [[] for _ in self.states]
        for (q, _), r in self.transitions.items():
            adjacency[index[q]].append(index[r])
        return not any(cyclic_nodes(adjacency))

    def with_alphabet(self, alphabet: Iterable[str]) -> "Dfa":
        return Dfa(self.states, alphabet, self.transitions, self.initial, self.accepting)
