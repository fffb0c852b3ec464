"""Shared fixtures: seeded problem suites and (expensive) solved fixtures."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from corona_lab.corona_disk import build_smooth_solution
from corona_lab.problems import gen_random_problem
from corona_lab.wirtinger import DiskGrid

settings.register_profile(
    "default", max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# (n, delta_target, degree, seed): n in {1,2,3}, degree <= 4, delta >= 0.3
SUITE = [
    (1, 0.3, 4, 1),
    (1, 0.5, 2, 2),
    (1, 0.7, 0, 3),
    (2, 0.3, 4, 4),
    (2, 0.4, 3, 5),
    (2, 0.5, 4, 6),
    (2, 0.3, 4, 7),
    (3, 0.3, 4, 8),
    (3, 0.35, 2, 9),
    (3, 0.4, 4, 10),
]

# the n = 2 end-to-end fixture
DISK_FIXTURE = (2, 0.3, 4, 7)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def default_grid():
    return DiskGrid(64, 256, 0.995)


@pytest.fixture(scope="session")
def suite_smooth(default_grid):
    """Problems and smooth solutions of the seeded suite."""
    out = []
    for n, d, deg, seed in SUITE:
        p = gen_random_problem(n, d, deg, seed)
        out.append((seed, p, build_smooth_solution(p, default_grid)))
    return out


@pytest.fixture(scope="session")
def disk_fixture():
    return gen_random_problem(*DISK_FIXTURE)


# --- acceptance verdicts: one line per criterion, repeated in the terminal summary ---

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict(capsys):
    """``verdict(k, title, ok, detail)`` prints and records a PASS/FAIL line."""

    def emit(k: int, title: str, ok: bool, detail: str) -> bool:
        line = f"CRITERION {k:>2}: {'PASS' if ok else 'FAIL'} - {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
