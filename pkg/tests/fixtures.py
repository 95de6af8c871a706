"""Worked examples used across the test suite."""
from desinfer.fsa import Fsa, Observer, ObserverSet


def example1():
    """Five-state plant where two observers each miss one event."""
    fsa = Fsa(
        ["x0", "x1", "x2", "x3", "x4"],
        {t: t for t in "abcd"},
        ["x0"],
        [
            ("x0", "a", "x1"), ("x0", "a", "x2"), ("x1", "c", "x3"), ("x1", "c", "x4"),
            ("x1", "b", "x1"), ("x2", "b", "x2"), ("x3", "d", "x3"), ("x4", "d", "x4"),
        ],
    )
    obs = ObserverSet((Observer("O1", {"a", "b", "c"}), Observer("O2", {"a", "b", "d"})))
    return fsa, obs


def fault_example():
    """Six-state plant with one unobservable fault and silent self-loops."""
    fsa = Fsa(
        ["x0", "x1", "x2", "x3", "x4", "x5"],
        {"a": "a", "b": "b", "f": None, "u": None},
        ["x0"],
        [
            ("x0", "a", "x1"), ("x0", "a", "x2"), ("x1", "b", "x3"), ("x2", "b", "x4"),
            ("x3", "f", "x5"), ("x5", "u", "x5"), ("x4", "u", "x4"),
        ],
        faulty={"f"},
    )
    obs = ObserverSet((Observer("O1", {"a"}), Observer("O2", {"b"})))
    return fsa, obs


def silent_two_start(loop=False):
    """Two initial states, a silent fault and a silent move into one deadlock state."""
    trans = [("x0", "f", "x2"), ("x1", "u", "x2")]
    if loop:
        trans.append(("x2", "u", "x2"))
    return Fsa(["x0", "x1", "x2"], {"f": None, "u": None}, ["x0", "x1"], trans, faulty={"f"})


def silent_branch(fault_loop=False):
    """Fault into a deadlock on one branch, a silent loop on the other."""
    trans = [("x0", "f", "x1"), ("x0", "u", "x2"), ("x2", "u", "x2")]
    if fault_loop:
        trans.append(("x1", "f", "x1"))
    return Fsa(["x0", "x1", "x2"], {"f": None, "u": None}, ["x0"], trans, faulty={"f"})


def fault_or_silent(loops=False):
    """Fault or silent move out of the initial state, both into deadlocks."""
    trans = [("x0", "f", "x1"), ("x0", "u", "x2")]
    if loops:
        trans += [("x1", "u", "x1"), ("x2", "u", "x2")]
    return Fsa(["x0", "x1", "x2"], {"f": None, "u": None}, ["x0"], trans, faulty={"f"})


def faultless_branch(fault_loop=False):
    """No faults, one deadlock branch; optionally a faulty loop on it."""
    trans = [("x0", "u", "x1"), ("x0", "u", "x2"), ("x2", "u", "x2")]
    faulty = set()
    events = {"u": None}
    if fault_loop:
        trans.append(("x1", "f", "x1"))
        faulty = {"f"}
        events["f"] = None
    return Fsa(["x0", "x1", "x2"], events, ["x0"], trans, faulty=faulty)
