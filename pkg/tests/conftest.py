from __future__ import annotations

import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `oracles`

FIXTURES = Path(__file__).parent.parent / "fixtures"
RJ = FIXTURES / "rotational_joint"
LANDER = FIXTURES / "lunar_lander"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def rj_dir() -> Path:
    return RJ


@pytest.fixture(scope="session")
def lander_dir() -> Path:
    return LANDER


def pytest_runtest_logreport(report):
    """Print one pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    m = re.search(r"criterion_0*(\d+)", report.nodeid)
    if m:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\n[criterion {m.group(1)}] {status} — {name}", flush=True)
