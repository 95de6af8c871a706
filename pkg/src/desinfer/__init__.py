"""Decide detectability, diagnosability and predictability of finite-state automata.

Each property is decided by searching a composition of the plant with copies
of itself.  Violations come with certificates that can be checked
independently and pumped into concrete runs.
"""

__version__ = "0.1.0"

from .composition import (  # noqa: E402
    Composition,
    concurrent_composition,
    diamond_composition,
    export_dot,
)
from .dfa import Dfa  # noqa: E402
from .fsa import (  # noqa: E402
    DIAMOND,
    Fsa,
    InvalidInstance,
    Observer,
    ObserverSet,
    Run,
    current_state_estimate,
    validate_instance,
)
from .oracle import check_certificate, naive_verify  # noqa: E402
from .verifiers import PROPERTIES, Certificate, Verdict, pump_certificate, verify  # noqa: E402

__all__ = [
    "__version__",
    "Composition",
    "concurrent_composition",
    "diamond_composition",
    "export_dot",
    "Dfa",
    "DIAMOND",
    "Fsa",
    "InvalidInstance",
    "Observer",
    "ObserverSet",
    "Run",
    "current_state_estimate",
    "validate_instance",
    "check_certificate",
    "naive_verify",
    "PROPERTIES",
    "Certificate",
    "Verdict",
    "pump_certificate",
    "verify",
]
