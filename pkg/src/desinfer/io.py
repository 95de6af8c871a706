"""JSON formats for instances, DFA families, graphs, certificates and reports.

Every writer emits keys in sorted order with a fixed indent so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Mapping, Sequence

from .dfa import Dfa
from .fsa import Fsa, InvalidInstance, ObserverSet, Run, validate_instance
from .verifiers import Certificate, Evidence, Lasso, Segment, Step, Verdict

__all__ = [
    "dumps",
    "read_json",
    "load_instance",
    "instance_to_dict",
    "instance_digest",
    "dfa_to_dict",
    "dfa_from_dict",
    "load_dfas",
    "graph_from_dict",
    "certificate_to_dict",
    "certificate_from_dict",
    "evidence_to_dict",
    "verdict_to_dict",
]


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def read_json(path: str | Path):
    """Decode a UTF-8 JSON file, turning any failure into :class:`InvalidInstance`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InvalidInstance([f"cannot read {path}: {exc}"]) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance([f"{path} is not valid JSON: {exc}"]) from exc


def load_instance(path: str | Path) -> tuple[Fsa, ObserverSet | None]:
    return validate_instance(read_json(path))


def instance_to_dict(fsa: Fsa, observers: ObserverSet | None = None) -> dict:
    data = {
        "states": list(fsa.states),
        "initial": sorted(fsa.initial),
        "events": [{"name": t, "label": fsa.events[t]} for t in fsa.events],
        "transitions": [list(tr) for tr in fsa.transitions],
    }
    if fsa.faulty:
        data["faulty"] = sorted(fsa.faulty)
    if fsa.controllable:
        data["controllable"] = sorted(fsa.controllable)
    if observers is not None:
        data["observers"] = [{"name": o.name, "observes": sorted(o.observes)} for o in observers]
    return data


def instance_digest(fsa: Fsa, observers: ObserverSet | None = None) -> str:
    """SHA-256 of the canonical serialization, independent of input formatting."""
    text = json.dumps(instance_to_dict(fsa, observers), sort_keys=True, ensure_ascii=False)
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


# ----------------------------------------------------------- DFAs and graphs


def dfa_to_dict(d: Dfa) -> dict:
    return {
        "states": list(d.states),
        "alphabet": list(d.alphabet),
        "transitions": [[q, a, r] for (q, a), r in d.transitions.items()],
        "initial": d.initial,
        "accepting": sorted(d.accepting),
    }


def dfa_from_dict(raw) -> Dfa:
    fields = {"states", "alphabet", "transitions", "initial", "accepting"}
    if not isinstance(raw, Mapping):
        raise InvalidInstance(["a DFA must be a JSON object"])
    problems = [f"unknown DFA field {k!r}" for k in sorted(set(raw) - fields)]
    problems += [f"missing DFA field {k!r}" for k in sorted(fields - set(raw))]
    if problems:
        raise InvalidInstance(problems)
    trans = {}
    for t in raw["transitions"]:
        if not isinstance(t, list) or len(t) != 3 or not all(isinstance(v, str) for v in t):
            raise InvalidInstance([f"malformed DFA transition {t!r}"])
        q, a, r = t
        if (q, a) in trans:
            raise InvalidInstance([f"DFA transition {(q, a)!r} is not deterministic"])
        trans[(q, a)] = r
    return Dfa(raw["states"], raw["alphabet"], trans, raw["initial"], raw["accepting"])


def load_dfas(paths: Sequence[str | Path]) -> list[Dfa]:
    """Each file holds one DFA object or an array of them; results are concatenated."""
    out = []
    for p in paths:
        raw = read_json(p)
        for item in raw if isinstance(raw, list) else [raw]:
            out.append(dfa_from_dict(item))
    return out


def graph_from_dict(raw) -> tuple[list[str], list[tuple[str, str]], str, str]:
    """A reachability query ``{"nodes", "edges", "source", "target"}``."""
    fields = {"nodes", "edges", "source", "target"}
    if not isinstance(raw, Mapping) or set(raw) != fields:
        raise InvalidInstance([f"a graph needs exactly the fields {sorted(fields)}"])
    edges = []
    for e in raw["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise InvalidInstance([f"malformed edge {e!r}"])
        edges.append((e[0], e[1]))
    return list(raw["nodes"]), edges, raw["source"], raw["target"]


# -------------------------------------------------------------- certificates


def _step_to_list(s: Step) -> list:
    return [list(s.source), list(s.event), list(s.target)]


def _lasso_to_dict(las: Lasso) -> dict:
    return {
        "entry": las.entry,
        "start": las.start,
        "stem": [list(t) for t in las.stem],
        "cycle": [list(t) for t in las.cycle],
    }


def certificate_to_dict(cert: Certificate) -> dict:
    """Segments list their steps as ``[source, event, target]`` vector triples.

    Event vectors use ``null`` for epsilon and ``"⋄"`` for the kill marker.
    """
    return {
        "property": cert.property,
        "observers": list(cert.observers),
        "segments": [
            {
                "role": seg.role,
                "location": seg.location,
                "start": list(seg.start),
                "steps": [_step_to_list(s) for s in seg.steps],
            }
            for seg in cert.segments
        ],
        "lassos": [_lasso_to_dict(las) for las in cert.lassos],
        "fault": list(cert.fault) if cert.fault else None,
    }


def certificate_from_dict(raw: Mapping) -> Certificate:
    try:
        segments = tuple(
            Segment(
                seg["role"],
                tuple(seg["start"]),
                tuple(Step(tuple(a), tuple(b), tuple(c)) for a, b, c in seg["steps"]),
                seg.get("location"),
            )
            for seg in raw["segments"]
        )
        lassos = tuple(
            Lasso(
                las["entry"],
                las["start"],
                tuple(tuple(t) for t in las["stem"]),
                tuple(tuple(t) for t in las["cycle"]),
            )
            for las in raw.get("lassos", [])
        )
        fault = tuple(raw["fault"]) if raw.get("fault") else None
        return Certificate(raw["property"], tuple(raw["observers"]), segments, lassos, fault)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance([f"malformed certificate: {exc!r}"]) from exc


def _run_to_dict(run: Run) -> dict:
    return {"start": run.start, "steps": [list(s) for s in run.steps]}


def evidence_to_dict(ev: Evidence) -> dict:
    return {
        "property": ev.property,
        "pump": ev.k,
        "run": _run_to_dict(ev.run),
        "locations": [
            {
                "location": loc.location,
                "observer": loc.observer,
                "output": list(loc.output),
                "alternative": _run_to_dict(loc.alternative),
                "estimate": sorted(loc.estimate) if loc.estimate is not None else None,
            }
            for loc in ev.locations
        ],
        "tail": _lasso_to_dict(ev.tail) if ev.tail else None,
        "fault": list(ev.fault) if ev.fault else None,
    }


def verdict_to_dict(v: Verdict) -> dict:
    return {
        "property": v.property,
        "holds": v.holds,
        "certificate": certificate_to_dict(v.certificate) if v.certificate else None,
    }

