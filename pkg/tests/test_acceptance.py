"""Acceptance grid: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for just the twelve lines.
"""

import sys

import pytest

from functorlab.acceptance import criteria, run_criterion

RESULTS: list = []


@pytest.mark.parametrize("number", sorted(criteria()))
def test_criterion(number):
    res = run_criterion(number, seed=0)
    RESULTS.append(res)
    print(res.line())
    assert res.passed, res.detail


if __name__ == "__main__":
    failed = 0
    for n in sorted(criteria()):
        res = run_criterion(n, seed=0)
        print(res.line(), flush=True)
        failed += not res.passed
    sys.exit(1 if failed else 0)
