import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_NOTES: dict[str, list[str]] = {}
_OUTCOMES: dict[str, list[bool]] = {}


def _criterion(item_name: str):
    if item_name.startswith("test_criterion_"):
        return item_name.split("_")[2]
    return None


@pytest.fixture
def record(request):
    """Attach a short note to the criterion line printed at the end."""
    c = _criterion(request.node.originalname)
    return lambda note: _NOTES.setdefault(c, []).append(note)


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1].split("[")[0]
    c = _criterion(name)
    if c is None or (report.when != "call" and report.passed):
        return
    _OUTCOMES.setdefault(c, []).append(report.passed and not report.skipped)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(_OUTCOMES, key=int):
        ok = all(_OUTCOMES[c])
        note = "; ".join(_NOTES.get(c, []))
        terminalreporter.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}  {note}".rstrip())
