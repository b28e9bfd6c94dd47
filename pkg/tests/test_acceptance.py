"""The acceptance criteria at their stated tolerances, one line per criterion."""

import pytest

from lametrans.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, record_property):
    res = run_criterion(number)
    record_property("acceptance", res.line())
    print("\n" + res.line())
    assert res.passed, res.line()
