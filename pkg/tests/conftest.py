import numpy as np
import pytest

from sigmakneser.group import GroupSet, make_group


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


def random_subset(group, rng, p=0.5, nonempty=True):
    bits = rng.random(group.order) < p
    if nonempty and not bits.any():
        bits[rng.integers(group.order)] = True
    return GroupSet(group, bits)


SMALL_SHAPES = [(2,), (5,), (8,), (2, 2), (2, 3), (2, 4), (3, 3), (2, 2, 2), (12,), (2, 6), (4, 4)]


def small_groups():
    return [make_group(f) for f in SMALL_SHAPES]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line, flush=True)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
