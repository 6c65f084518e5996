"""The eleven acceptance criteria at their stated tolerances (seed 42).

Each criterion prints one PASS/FAIL line; the lines are repeated in the
terminal summary so they show up without ``-s``.
"""

import pytest

from valgram.checks import CRITERIA
from valgram.cli import main

SEED = 42
RUNTIME_LIMITS = {1: 5.0, 2: 60.0, 8: 120.0}
LINES: list[str] = []


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    res = CRITERIA[number - 1](SEED)
    line = res.line()
    LINES.append(line)
    print(line)
    assert res.number == number
    assert res.passed, f"{line}\n{res.detail}"
    if number in RUNTIME_LIMITS:
        assert res.seconds < RUNTIME_LIMITS[number]


def test_cli_check_exits_zero(capsys):
    code = main(["check", "--seed", str(SEED)])
    capsys.readouterr()
    assert code == 0
