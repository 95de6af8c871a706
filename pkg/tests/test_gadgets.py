import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desinfer.dfa import Dfa
from desinfer.fsa import InvalidInstance, check_assumptions
from desinfer.gadgets import (
    fresh_name,
    graph_reaches,
    normalize_acyclic_dfas,
    normalize_complete_dfas,
    random_acyclic_dfa,
    random_complete_dfa,
    random_digraph,
    random_fsa,
    reduce_path_to_predictability,
    reduce_to_codetectability,
    reduce_to_copredictability,
)
from desinfer.oracle import brute_force_dfa_intersection, naive_verify
from desinfer.verifiers import verify

BIN = ["0", "1"]


def words(alphabet, max_len):
    out = [()]
    for n in range(1, max_len + 1):
        out += [w + (a,) for w in out if len(w) == n - 1 for a in alphabet]
    return out


def acyclic_family(rng):
    if rng.random() < 0.5:
        return [random_acyclic_dfa(rng, rng.randint(1, 3), BIN) for _ in range(2)]
    return [random_acyclic_dfa(rng, rng.randint(1, 2), BIN) for _ in range(3)]


def complete_family(rng):
    if rng.random() < 0.5:
        return [random_complete_dfa(rng, rng.randint(1, 3), BIN) for _ in range(2)]
    return [random_complete_dfa(rng, rng.randint(1, 2), BIN) for _ in range(3)]


def is_deterministic(fsa):
    seen = set()
    for x, t, _ in fsa.transitions:
        if (x, t) in seen:
            return False
        seen.add((x, t))
    return True


# -------------------------------------------------------------- normalization


def test_fresh_name_avoids_collisions():
    assert fresh_name("λ", ["0", "1"]) == "λ"
    assert fresh_name("λ", ["λ", "λ'"]) == "λ''"


def test_normalize_acyclic_example():
    d0 = Dfa(["q0", "q1"], BIN, {("q0", "1"): "q1"}, "q0", ["q0", "q1"])
    d1 = Dfa(["p0"], BIN, {}, "p0", [])
    n0, n1 = normalize_acyclic_dfas([d0, d1])
    assert n0.alphabet == ("0", "1", "λ") and n0.acyclic and n1.acyclic
    assert len(n0.accepting) == 1 and set(n1.accepting) == set(n1.states)
    assert n0.accepts(["1", "λ"]) and n0.accepts(["λ"]) and not n0.accepts(["1"])
    assert n1.step("p0", "λ") is None


def test_normalize_complete_example():
    d = Dfa(["q"], BIN, {("q", "0"): "q", ("q", "1"): "q"}, "q", ["q"])
    n0, n1 = normalize_complete_dfas([d, d])
    (final,) = n0.accepting
    assert all(q != final for q, _ in n0.transitions)
    assert {q for q, _ in n1.transitions} == set(n1.states)


def test_normalization_preconditions():
    cyc = Dfa(["q"], BIN, {("q", "0"): "q"}, "q", ["q"])
    with pytest.raises(InvalidInstance):
        normalize_acyclic_dfas([cyc, cyc])
    partial = Dfa(["q"], BIN, {}, "q", ["q"])
    with pytest.raises(InvalidInstance):
        normalize_complete_dfas([partial, partial])
    with pytest.raises(InvalidInstance):
        normalize_acyclic_dfas([partial, Dfa(["r"], ["a"], {}, "r", [])])


@pytest.mark.parametrize("seed", range(60))
def test_normalization_preserves_common_words(seed):
    rng = random.Random(seed)
    acyclic = seed % 2 == 0
    dfas = acyclic_family(rng) if acyclic else complete_family(rng)
    norm = normalize_acyclic_dfas(dfas) if acyclic else normalize_complete_dfas(dfas)
    lam = norm[0].alphabet[-1]
    # a shortest common word of the inputs is shorter than the product of their sizes
    for w in words(BIN, 8):
        before = all(d.accepts(w) for d in dfas)
        assert before == all(d.accepts(w + (lam,)) for d in norm)
    if acyclic:
        assert (brute_force_dfa_intersection(dfas) is None) == (brute_force_dfa_intersection(norm) is None)


# ----------------------------------------------------------------- reductions


@pytest.mark.parametrize("seed", range(60))
def test_codetectability_reduction_matches_brute_force(seed):
    rng = random.Random(seed)
    dfas = acyclic_family(rng)
    inst = reduce_to_codetectability(normalize_acyclic_dfas(dfas))
    truth = brute_force_dfa_intersection(dfas) is None
    assert inst.expected is truth
    assert verify("co-detectability", inst.fsa, inst.observers).holds is truth
    assert len(inst.fsa.states) == sum(len(d.states) for d in normalize_acyclic_dfas(dfas)) + 3
    assert len(inst.fsa.initial) == 1 and is_deterministic(inst.fsa)


@pytest.mark.parametrize("seed", range(60))
def test_copredictability_reduction_matches_brute_force(seed):
    rng = random.Random(seed)
    dfas = complete_family(rng)
    norm = normalize_complete_dfas(dfas)
    inst = reduce_to_copredictability(norm)
    truth = brute_force_dfa_intersection(dfas) is None
    assert inst.expected is truth
    assert verify("co-predictability", inst.fsa, inst.observers).holds is truth
    assert len(inst.fsa.states) == sum(len(d.states) for d in norm) + 2
    assert len(inst.fsa.initial) == 1 and is_deterministic(inst.fsa)
    assert check_assumptions(inst.fsa)["deadlock_free"]


@pytest.mark.parametrize("seed", range(10))
def test_small_reductions_agree_with_the_oracle(seed):
    rng = random.Random(seed)
    dfas = [random_acyclic_dfa(rng, rng.randint(1, 2), BIN) for _ in range(2)]
    inst = reduce_to_codetectability(normalize_acyclic_dfas(dfas))
    assert naive_verify(inst.property, inst.fsa, inst.observers).holds is inst.expected


def test_reduction_preconditions():
    d = Dfa(["q0", "q1"], BIN, {("q0", "0"): "q1"}, "q0", ["q1"])
    with pytest.raises(InvalidInstance):
        reduce_to_codetectability([d])  # one DFA leaves no observer
    with pytest.raises(InvalidInstance):
        reduce_to_codetectability([d, d])  # second DFA must accept everywhere
    with pytest.raises(InvalidInstance):
        reduce_to_copredictability([d, d])
    two = Dfa(["q0", "q1"], BIN, {}, "q0", ["q0", "q1"])
    with pytest.raises(InvalidInstance):
        reduce_to_codetectability([two, Dfa(["p"], BIN, {}, "p", ["p"])])


def test_path_reduction_examples():
    same = reduce_path_to_predictability(["s"], [], "s", "s")
    assert same.expected is False and verify("predictability", same.fsa).holds is False
    apart = reduce_path_to_predictability(["s", "t"], [], "s", "t")
    assert apart.expected is True and verify("predictability", apart.fsa).holds is True
    linked = reduce_path_to_predictability(["s", "m", "t"], [("s", "m"), ("m", "t")], "s", "t")
    assert verify("predictability", linked.fsa).holds is False
    with pytest.raises(InvalidInstance):
        reduce_path_to_predictability(["s"], [], "s", "t")


@pytest.mark.parametrize("seed", range(60))
def test_path_reduction_matches_reachability(seed):
    rng = random.Random(seed)
    nodes, edges = random_digraph(rng, rng.randint(1, 6))
    s, t = nodes[0], nodes[-1]
    inst = reduce_path_to_predictability(nodes, edges, s, t)
    assert inst.expected is (not graph_reaches(nodes, edges, s, t))
    assert verify("predictability", inst.fsa).holds is inst.expected


def test_reductions_are_deterministic():
    rng = random.Random(3)
    dfas = normalize_acyclic_dfas(acyclic_family(rng))
    assert reduce_to_codetectability(dfas) == reduce_to_codetectability(dfas)


# ---------------------------------------------------------- random generators


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_generators_are_seeded(seed):
    a = random_fsa(random.Random(seed), 5, 4, 2)
    b = random_fsa(random.Random(seed), 5, 4, 2)
    assert a == b
    assert random_acyclic_dfa(random.Random(seed), 4, BIN).acyclic
    assert random_complete_dfa(random.Random(seed), 3, BIN).complete
