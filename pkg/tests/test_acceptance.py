"""Acceptance criteria, one test each.

Every test prints a PASS/FAIL line with the measured time and budget, then
asserts that the property held exactly and within its budget.  Run directly
(`python3 tests/test_acceptance.py`) for just the summary lines.
"""

import sys

import pytest

from cobweave.suite import CRITERIA

SEED = 7


def line(r) -> str:
    verdict = "PASS" if r.passed else "FAIL"
    why = "" if r.passed else ("  (inexact)" if not r.exact else "  (over budget)")
    return (f"{verdict} criterion {r.number}: {r.title}  "
            f"[{r.seconds:.2f}s / {r.budget:g}s]{why}")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    r = CRITERIA[number](SEED)
    with capsys.disabled():
        print("\n" + line(r))
    assert r.exact, r.details
    assert r.within_budget, f"took {r.seconds:.2f}s, budget {r.budget:g}s"


if __name__ == "__main__":
    results = [CRITERIA[n](SEED) for n in sorted(CRITERIA)]
    for r in results:
        print(line(r))
    sys.exit(0 if all(r.passed for r in results) else 1)
