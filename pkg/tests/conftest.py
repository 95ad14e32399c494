import pytest

from globalgates.builtins import chain_scheme
from globalgates.geometry import Domain, TranslationLattice
from globalgates.schemes import Scheme

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def chain():
    return chain_scheme()


@pytest.fixture
def five():
    """Smallest chain with a 2-addressable point: D = [0, 4], P = {3}, R = (0, 1)."""
    return Scheme(TranslationLattice(1), Domain.interval(0, 4), ((3,),), ((0,), (1,)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
