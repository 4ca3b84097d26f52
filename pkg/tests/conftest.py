import os
import sys
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from daeindex.sysparse import load_system, load_system_file  # noqa: E402

GOLDEN = sorted(
    p.name[:-5] for p in resources.files("daeindex").joinpath("golden").iterdir() if p.name.endswith(".json")
)


def golden_path(name):
    return str(resources.files("daeindex").joinpath("golden", name + ".json"))


def golden(name):
    return load_system_file(golden_path(name))


def system(u, g, x=(), f=(), field="Q"):
    return load_system(
        {"format_version": 1, "field": field, "x": list(x), "u": list(u), "f": list(f), "g": list(g)}
    )


def chain(m):
    return golden(f"chain{m}")


@pytest.fixture
def pendulum():
    return golden("pendulum")


# ----------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion, from the real outcomes

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when != "call" and not report.failed:
        return
    num = int(report.nodeid.split("test_criterion_")[1][:2])
    ok = _criteria.get(num, True) and not report.failed
    _criteria[num] = ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if _criteria[num] else 'FAIL'}")
