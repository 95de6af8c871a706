"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS or FAIL line that is repeated in the terminal
summary of the run.
"""
import random
import time
import warnings
from dataclasses import replace

import pytest

from desinfer.composition import concurrent_composition, diamond_composition, centralized_diamond_composition
from desinfer.fsa import DIAMOND, InstanceWarning, ObserverSet, global_observer, local_automaton
from desinfer.gadgets import (
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
from desinfer.oracle import brute_force_dfa_intersection, check_certificate, naive_verify
from desinfer.verifiers import (
    PROPERTIES,
    Step,
    property_composition,
    verify,
    verify_co_detectability,
    verify_co_diagnosability,
    verify_co_predictability,
    verify_diagnosability,
    verify_predictability,
    verify_strong_detectability,
)

from fixtures import (
    example1,
    fault_example,
    fault_or_silent,
    faultless_branch,
    silent_branch,
    silent_two_start,
)
from invariants import corruptions, embeds, matching_run_tuples, structural_problems, walk_projections_agree

BIN = ["0", "1"]


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InstanceWarning)
        yield


def timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


def random_instances(seed, count, max_states, max_events, max_observers):
    rng = random.Random(seed)
    for _ in range(count):
        yield random_fsa(
            rng, rng.randint(1, max_states), rng.randint(1, max_events), rng.randint(1, max_observers)
        )


def test_example1_not_co_detectable(criterion):
    with criterion(1, "example 1 is not co-detectable, expected path reproduced") as info:
        fsa, obs = example1()
        v, secs = timed(verify_co_detectability, fsa, obs)
        assert v.holds is False
        cert = v.certificate
        steps = [(s.source, s.event, s.target) for s in cert.steps()]
        assert (("x1", "x1", "x1"), ("b", "b", "b"), ("x1", "x1", "x1")) in steps
        assert {s.location for s in cert.segments if s.role == "cycle"} == {1, 2}
        assert cert.segments[-1].end == ("x3", DIAMOND, DIAMOND)
        assert steps[-2:] == [
            (("x1", "x1", "x1"), ("c", "c", None), ("x3", "x4", "x1")),
            (("x3", "x4", "x1"), ("d", DIAMOND, DIAMOND), ("x3", DIAMOND, DIAMOND)),
        ]
        assert check_certificate(cert, fsa, obs)
        assert secs < 1.0
        info["seconds"] = f"{secs:.3f}"


def test_fault_example_not_co_diagnosable(criterion):
    with criterion(2, "fault example is not co-diagnosable, fault then positive cycle") as info:
        fsa, obs = fault_example()
        v, secs = timed(verify_co_diagnosability, fsa, obs)
        assert v.holds is False
        cert = v.certificate
        assert [s.role for s in cert.segments] == ["path", "fault", "path", "cycle"]
        fault = cert.segments[1].steps[0]
        assert fault.event == ("f", None, None) and fault.target[0] == "x5"
        cycle = cert.segments[3].steps
        assert cycle and cycle[0].source == cycle[-1].target and cycle[0].event[0] == "u"
        assert check_certificate(cert, fsa, obs)
        # the expected path exists step by step and is itself a valid certificate
        shown = [
            (("x0", "x0", "x0"), ("a", "a", None), ("x1", "x2", "x0")),
            (("x1", "x2", "x0"), (None, None, "a"), ("x1", "x2", "x2")),
            (("x1", "x2", "x2"), ("b", None, "b"), ("x3", "x2", "x4")),
            (("x3", "x2", "x4"), (None, "b", None), ("x3", "x4", "x4")),
            (("x3", "x4", "x4"), ("f", None, None), ("x5", "x4", "x4")),
            (("x5", "x4", "x4"), ("u", None, None), ("x5", "x4", "x4")),
        ]
        comp = property_composition("co-diagnosability", fsa, obs)
        assert all(comp.has_transition(*s) for s in shown)
        as_steps = [Step(*s) for s in shown]
        path, fseg, mid, cyc = cert.segments
        shown_cert = replace(
            cert,
            segments=(
                replace(path, start=shown[0][0], steps=tuple(as_steps[:4])),
                replace(fseg, start=shown[4][0], steps=(as_steps[4],)),
                replace(mid, start=shown[4][2], steps=()),
                replace(cyc, start=shown[5][0], steps=(as_steps[5],)),
            ),
        )
        assert check_certificate(shown_cert, fsa, obs)
        assert secs < 1.0
        info["seconds"] = f"{secs:.3f}"


def test_fault_example_not_co_predictable(criterion):
    with criterion(3, "fault example is not co-predictable via (x3,x4,x4)") as info:
        fsa, obs = fault_example()
        v, secs = timed(verify_co_predictability, fsa, obs)
        assert v.holds is False
        cert = v.certificate
        assert cert.segments[-1].end == ("x3", "x4", "x4")
        assert cert.fault == ("x3", "f", "x5")
        assert all(all(t == "u" for _, t, _ in las.cycle) for las in cert.lassos)
        assert check_certificate(cert, fsa, obs)
        assert secs < 1.0
        info["seconds"] = f"{secs:.3f}"


def test_assumption_counterexamples(criterion):
    with criterion(4, "eight assumption counterexample verdicts") as info:
        cases = [
            (silent_two_start(), verify_diagnosability, True),
            (silent_two_start(loop=True), verify_diagnosability, False),
            (silent_branch(), verify_diagnosability, True),
            (silent_branch(fault_loop=True), verify_diagnosability, False),
            (fault_or_silent(), verify_predictability, True),
            (fault_or_silent(loops=True), verify_predictability, False),
            (faultless_branch(), verify_predictability, True),
            (faultless_branch(fault_loop=True), verify_predictability, False),
        ]
        got = [fn(fsa).holds for fsa, fn, _ in cases]
        assert got == [want for _, _, want in cases]
        info["verdicts"] = len(got)


def test_specialization_identities(criterion):
    with criterion(5, "co-X with one full observer equals centralized X") as info:
        pairs = [
            (verify_co_detectability, verify_strong_detectability),
            (verify_co_diagnosability, verify_diagnosability),
            (verify_co_predictability, verify_predictability),
        ]
        count = disagreements = 0
        for fsa, _ in random_instances(5, 500, 6, 5, 1):
            full = ObserverSet((global_observer(fsa, "O1"),))
            for co, central in pairs:
                disagreements += co(fsa, full).holds != central(fsa).holds
            count += 1
        assert count >= 500 and disagreements == 0
        info["instances"] = count


def test_oracle_equivalence(criterion):
    with criterion(6, "all six verifiers agree with the exhaustive oracle") as info:
        start = time.perf_counter()
        count = disagreements = violated = 0
        for fsa, obs in random_instances(6, 500, 5, 5, 2):
            for prop in PROPERTIES:
                fast = verify(prop, fsa, obs).holds
                disagreements += fast != naive_verify(prop, fsa, obs).holds
                violated += not fast
            count += 1
        secs = time.perf_counter() - start
        assert count >= 500 and disagreements == 0 and secs < 300
        info.update(instances=count, violations=violated, seconds=f"{secs:.1f}")


def small_family(rng, make):
    if rng.random() < 0.5:
        return [make(rng, rng.randint(1, 3), BIN) for _ in range(2)]
    return [make(rng, rng.randint(1, 2), BIN) for _ in range(3)]


def test_reduction_ground_truth(criterion):
    with criterion(7, "reduction verdicts match brute-force ground truth") as info:
        rng = random.Random(7)
        trials = 200
        disagreements = 0
        counts = {"codet": [0, 0], "copred": [0, 0], "path": [0, 0]}  # [holds, violated]
        for _ in range(trials):
            dfas = small_family(rng, random_acyclic_dfa)
            truth = brute_force_dfa_intersection(dfas) is None
            inst = reduce_to_codetectability(normalize_acyclic_dfas(dfas))
            disagreements += verify(inst.property, inst.fsa, inst.observers).holds != truth
            counts["codet"][not truth] += 1

            dfas = small_family(rng, random_complete_dfa)
            truth = brute_force_dfa_intersection(dfas) is None
            inst = reduce_to_copredictability(normalize_complete_dfas(dfas))
            disagreements += verify(inst.property, inst.fsa, inst.observers).holds != truth
            counts["copred"][not truth] += 1

            nodes, edges = random_digraph(rng, rng.randint(1, 6))
            s, t = rng.choice(nodes), rng.choice(nodes)
            truth = not graph_reaches(nodes, edges, s, t)
            inst = reduce_path_to_predictability(nodes, edges, s, t)
            disagreements += verify(inst.property, inst.fsa).holds != truth
            counts["path"][not truth] += 1
        assert disagreements == 0
        # both answers occur for every reduction, so neither side is vacuous
        assert all(h and v for h, v in counts.values())
        info.update(trials_per_reduction=trials, **{k: f"{h}/{v}" for k, (h, v) in counts.items()})


def test_structural_invariants(criterion):
    from conftest import checked

    with criterion(8, "structural invariants on every composition") as info:
        rng = random.Random(8)
        built = embedded = 0
        for fsa, obs in random_instances(8, 150, 4, 4, 2):
            locals_ = [local_automaton(fsa, o) for o in obs]
            comps = [
                diamond_composition(fsa, obs),
                concurrent_composition(fsa, locals_),
                centralized_diamond_composition(fsa),
            ]
            for comp in comps:
                assert structural_problems(comp) == []
                assert len(comp.states) <= comp.size_bound()
                assert walk_projections_agree(comp, rng)
                built += 1
            for comp in comps[:2]:
                for runs in matching_run_tuples(comp, max_len=3, limit=10):
                    assert embeds(comp, runs)
                    embedded += 1
        info.update(swept=built, embedded_tuples=embedded, checked_during_suite=checked["compositions"])


def test_certificate_soundness(criterion):
    with criterion(9, "certificates check and single-edge corruptions are rejected") as info:
        certs = corrupted = 0
        instances = [example1(), fault_example(), *random_instances(9, 300, 5, 5, 2)]
        for fsa, obs in instances:
            for prop in PROPERTIES:
                for v in (verify(prop, fsa, obs), naive_verify(prop, fsa, obs)):
                    if v.holds:
                        continue
                    assert check_certificate(v.certificate, fsa, obs)
                    certs += 1
                    for bad in corruptions(v.certificate, fsa):
                        assert not check_certificate(bad, fsa, obs)
                        corrupted += 1
        assert certs and corrupted
        info.update(certificates=certs, corruptions=corrupted)


def test_scaling(criterion):
    with criterion(10, "scaling on 200-state and 30-state L=3 instances") as info:
        central = 0.0
        for seed in range(5):
            fsa, _ = random_fsa(random.Random(seed), 200, 8, 1, n_transitions=600, n_initial=10)
            for fn in (verify_strong_detectability, verify_predictability):
                _, secs = timed(fn, fsa)
                assert secs < 10, (seed, fn.__name__, secs)
                central = max(central, secs)
        co = 0.0
        # seeds include the slowest co-detectability cases seen for this size
        for seed in (0, 2, 9, 14):
            fsa, obs = random_fsa(random.Random(seed), 30, 6, 3)
            for fn in (verify_co_detectability, verify_co_diagnosability, verify_co_predictability):
                _, secs = timed(fn, fsa, obs)
                assert secs < 60, (seed, fn.__name__, secs)
                co = max(co, secs)
        info.update(max_centralized_seconds=f"{central:.2f}", max_co_seconds=f"{co:.2f}")
