"""Hypothesis strategies for small plants and observer sets."""
from hypothesis import strategies as st

from desinfer.fsa import Fsa, Observer, ObserverSet


@st.composite
def plants(draw, max_states=5, max_events=5, max_observers=2, min_observers=1, labels="abc"):
    n = draw(st.integers(1, max_states))
    m = draw(st.integers(1, max_events))
    states = [f"x{i}" for i in range(n)]
    names = [f"e{i}" for i in range(m)]
    events = {t: draw(st.sampled_from([None, *labels])) for t in names}
    triples = st.tuples(st.sampled_from(states), st.sampled_from(names), st.sampled_from(states))
    transitions = draw(st.lists(triples, max_size=2 * n + 2, unique=True))
    initial = draw(st.lists(st.sampled_from(states), min_size=1, max_size=2, unique=True))
    faulty = draw(st.lists(st.sampled_from(names), max_size=2, unique=True))
    fsa = Fsa(states, events, initial, transitions, faulty)
    observable = sorted(fsa.observable)
    k = draw(st.integers(min_observers, max_observers))
    observers = []
    for i in range(k):
        seen = draw(st.lists(st.sampled_from(observable), unique=True)) if observable else []
        observers.append(Observer(f"O{i + 1}", frozenset(seen)))
    return fsa, ObserverSet(tuple(observers))


def event_words(fsa, max_size=6):
    return st.lists(st.sampled_from(sorted(fsa.events)), max_size=max_size)
