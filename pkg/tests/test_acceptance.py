"""The acceptance gate: every quantitative claim, at full desk scale.

Runs the whole checklist once (module-scoped; expect ~10-15 minutes) and
then asserts each criterion separately so the report shows one pass/fail
line per claim. Criterion 11 is a known, documented failure: the stated
observable pair is odd x even under the parity involution
(x, y) -> (1 - x, 1 - y) that commutes with the map, so its correlation
is identically zero and no decay slope exists to fit. The suite reports
the supplementary odd-odd pair alongside it; see README.md. The check is
left honestly red rather than weakened to pass.

Profile can be overridden for a quick look (LTMLAB_ACCEPTANCE_PROFILE=smoke),
but the shipping default is the full desk scale.
"""

import os

import pytest

from ltmlab.acceptance import CRITERIA, format_line, run_suite

PROFILE = os.environ.get("LTMLAB_ACCEPTANCE_PROFILE", "desk")


@pytest.fixture(scope="module")
def suite():
    results = run_suite(PROFILE, seed=0)
    print()
    for r in results:
        print(format_line(r))
    return {r.index: r for r in results}


@pytest.mark.parametrize(
    "index", [i for i, _ in CRITERIA], ids=[f"{i:02d}-{n}" for i, n in CRITERIA]
)
def test_criterion(suite, index):
    r = suite[index]
    assert r.passed, format_line(r)
