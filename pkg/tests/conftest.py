"""Every composition built while the suite runs is checked for structural invariants.

Large compositions (scaling runs) are skipped to keep the suite fast; the
count of checked compositions is printed at the end of the session, followed
by one line per acceptance criterion.
"""
import contextlib
from pathlib import Path

import pytest

from desinfer import composition

from invariants import structural_problems

CHECK_LIMIT = 3000  # transitions
checked = {"compositions": 0, "skipped": 0}
acceptance_lines = []
_original_finish = composition._finish


def _checked_finish(components, diamond):
    comp = _original_finish(components, diamond)
    if comp.num_transitions <= CHECK_LIMIT:
        problems = structural_problems(comp)
        assert not problems, problems[:5]
        checked["compositions"] += 1
    else:
        checked["skipped"] += 1
    return comp


@pytest.fixture(autouse=True, scope="session")
def _check_every_composition():
    composition._finish = _checked_finish
    yield
    composition._finish = _original_finish


@pytest.fixture
def data_dir():
    return Path(__file__).parent / "data"


@pytest.fixture
def criterion():
    """Context manager recording PASS or FAIL for one acceptance criterion."""

    @contextlib.contextmanager
    def record(number, title):
        detail = {}
        try:
            yield detail
        except BaseException as exc:
            line = f"criterion {number:2d} FAIL  {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
            acceptance_lines.append(line)
            print(line)
            raise
        extra = ", ".join(f"{k}={v}" for k, v in detail.items())
        line = f"criterion {number:2d} PASS  {title}" + (f" ({extra})" if extra else "")
        acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"structural invariants checked on {checked['compositions']} compositions "
        f"({checked['skipped']} above {CHECK_LIMIT} transitions skipped)"
    )
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_lines):
            terminalreporter.write_line(line)
