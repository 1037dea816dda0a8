import pytest
from hypothesis import settings

from nl2promql.catalog import CatalogStore
from nl2promql.config import load_bundled_catalog
from nl2promql.pipeline import SmartDiscoveryService

settings.register_profile("suite", deadline=None, max_examples=75)
settings.load_profile("suite")

# Populated by the acceptance tests; one entry per criterion.
_ACCEPTANCE_RESULTS: dict[int, tuple[bool, str, str]] = {}


class AcceptanceRecorder:
    def record(self, number: int, title: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE_RESULTS[number] = (passed, title, detail)


@pytest.fixture
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_RESULTS):
        passed, title, detail = _ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] criterion {number}: {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def bundled_catalog():
    return load_bundled_catalog()


@pytest.fixture
def bundled_service(bundled_catalog):
    return SmartDiscoveryService(CatalogStore(bundled_catalog))
