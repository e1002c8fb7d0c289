"""Shared fixtures plus the per-criterion summary printed after each run."""

import re

import pytest

# one-line measurement details keyed by criterion number; the acceptance
# tests fill this in before asserting so failed runs still show the numbers
ACCEPTANCE_DETAILS: dict[int, str] = {}

_CRITERION = re.compile(r"test_criterion_(\d+)")


@pytest.fixture
def record(request):
    """Stash a measurement line for the acceptance summary."""
    num = int(_CRITERION.search(request.node.name).group(1))

    def _record(detail: str) -> None:
        ACCEPTANCE_DETAILS[num] = detail

    return _record


@pytest.fixture(scope="session")
def cached_profile():
    """Session-cached spectrum profiles (computed on first use)."""
    import _cachelib

    return _cachelib.load_or_compute


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes: dict[int, str] = {}
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(status, []):
            if "test_acceptance" not in rep.nodeid:
                continue
            m = _CRITERION.search(rep.nodeid)
            if m is None:
                continue
            num = int(m.group(1))
            if label == "FAIL" or num not in outcomes:
                outcomes[num] = label
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(outcomes):
        detail = ACCEPTANCE_DETAILS.get(num, "")
        suffix = f"  {detail}" if detail else ""
        terminalreporter.write_line(f"criterion {num}: {outcomes[num]}{suffix}")
