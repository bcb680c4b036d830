"""Numbered acceptance criteria.

Each criterion prints one PASS/FAIL line; ``conftest.py`` repeats the
lines in the terminal summary so they show without ``-s``.
"""

import pytest

from vexpdo.acceptance import CRITERIA, format_result, run_one

RESULT_LINES = []


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number:02d}" for c in CRITERIA])
def test_criterion(criterion):
    res = run_one(criterion)
    line = format_result(res)
    RESULT_LINES.append(line)
    print(line)
    assert res.passed, res.detail
