import os
from functools import lru_cache

import pytest

from downset_rays.engine import EngineConfig, initial_triplet, run
from downset_rays.polycone import InequalitySystem
from downset_rays.poset import Poset
from downset_rays.sac import PartySystem, build_sac_system

SLOW = os.environ.get("DOWNSET_RAYS_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="set DOWNSET_RAYS_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@lru_cache(maxsize=None)
def sac(n: int, mode: str = "genuine"):
    return build_sac_system(PartySystem(n), mode)


@lru_cache(maxsize=None)
def sac_run(n: int, **cfg):
    b = sac(n)
    init = initial_triplet(b.group, b.initial_down, b.initial_excluded)
    return run(init, b.system, b.poset, EngineConfig(**cfg), b.group)


def square_cone():
    # E0 = z - x, E1 = z - y, E2 = z + x, E3 = z + y; E2 sits below E1
    sys = InequalitySystem(3, [(-1, 0, 1), (0, -1, 1), (1, 0, 1), (0, 1, 1)])
    return sys, Poset(4, [(2, 1)])


_CRITERIA: dict[int, list] = {}


def pytest_runtest_logreport(report):
    item_marks = getattr(report, "criterion", None)
    if item_marks is None:
        return
    number, title = item_marks
    entry = _CRITERIA.setdefault(number, [title, "pass", ""])
    if report.skipped:
        entry[1] = "skip"
        entry[2] = report.longrepr[2] if isinstance(report.longrepr, tuple) else ""
    elif report.failed:
        entry[1] = "FAIL"
        msg = str(report.longrepr.reprcrash.message) if hasattr(report.longrepr, "reprcrash") else ""
        entry[2] = msg.splitlines()[0] if msg else ""


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, note = _CRITERIA[number]
        line = f"criterion {number}: {status.upper():4}  {title}"
        if note and status != "pass":
            line += f"  ({note[:160]})"
        terminalreporter.write_line(line)
