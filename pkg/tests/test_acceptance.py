"""Acceptance gate: every headline criterion at its stated tolerance.

Each test prints one pass/fail line; ``qcforge sweep`` runs the same
criteria from the command line.
"""

import pytest

from qcforge.acceptance import CRITERIA


@pytest.mark.parametrize("number,title,fn", CRITERIA,
                         ids=[f"criterion_{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    ok, detail = fn()
    print(f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    assert ok, f"criterion {number} failed: {detail}"
