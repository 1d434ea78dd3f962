import pytest

from twinprice.channel import ChannelParams
from twinprice.game import MspConfig, VmuProfile


@pytest.fixture
def ch():
    return ChannelParams()


@pytest.fixture
def two_vmus():
    # Convergence / cost-sweep scenario: 200 MB and 100 MB twins.
    return [VmuProfile(5.0, 2.0), VmuProfile(5.0, 1.0)]


@pytest.fixture
def msp():
    return MspConfig(cost=5.0, max_bandwidth=0.5, max_price=50.0)


# Acceptance summary: one line per criterion, printed at the end of the run.
_CRITERIA: dict[int, tuple[bool, str]] = {}


class _Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = self.detail if ok else f"{self.detail} {exc_type.__name__}: {exc}".strip()
        _CRITERIA[self.number] = (ok, f"{self.title}: {detail}")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, text = _CRITERIA[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {text}")
