"""Acceptance suite: one test per criterion, each at its frozen tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the one-line
pass/fail summary per criterion (also available via the CLI:
``spinmultipoles selftest``).
"""

import time

import pytest

from spinmultipoles.acceptance import CRITERIA, CriterionResult, format_line


@pytest.mark.parametrize(
    "number,name,func", CRITERIA, ids=[f"{n:02d}_{name.replace(' ', '_')}" for n, name, _ in CRITERIA]
)
def test_criterion(number, name, func):
    t0 = time.perf_counter()
    passed, details = func()
    result = CriterionResult(number, name, passed, details, time.perf_counter() - t0)
    print(format_line(result))
    assert passed, f"criterion {number} ({name}): {details}"
