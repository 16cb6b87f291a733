import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from mlab.catalog import load_catalog  # noqa: E402
from mlab.groups import build_group_from_perms, permutation_from_cycles  # noqa: E402

_CRITERIA: dict[int, tuple[str, str, str]] = {}


@pytest.fixture(scope="session")
def catalog_defs():
    return load_catalog()


@pytest.fixture(scope="session")
def catalog(catalog_defs):
    """Bundled catalog groups by name, in file order."""
    return {d.name: d.build() for d in catalog_defs}


@pytest.fixture(scope="session")
def S3():
    return build_group_from_perms([permutation_from_cycles([(1, 2)], 3), permutation_from_cycles([(1, 2, 3)])], "S3")


@pytest.fixture(scope="session")
def S4():
    return build_group_from_perms([permutation_from_cycles([(1, 2)], 4), permutation_from_cycles([(1, 2, 3, 4)])], "S4")


@pytest.fixture(scope="session")
def D4():
    return build_group_from_perms([permutation_from_cycles([(1, 2, 3, 4)]), permutation_from_cycles([(1, 3)], 4)], "D4")


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str = ""):
        _CRITERIA[number] = (title, "PASS" if ok else "FAIL", detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {title}" + (f"  ({detail})" if detail else ""))
