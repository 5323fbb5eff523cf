import re

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[str, str] = {}


def _order(label: str):
    digits = re.match(r"\d+", label).group()
    return int(digits), label[len(digits):]


@pytest.fixture
def acceptance_report():
    """Record the PASS/FAIL line of one acceptance criterion."""

    def record(label, passed: bool, detail: str) -> bool:
        label = str(label)
        ACCEPTANCE_LINES[label] = f"#{label:<3} {'PASS' if passed else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[label])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for label in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(ACCEPTANCE_LINES[label])
