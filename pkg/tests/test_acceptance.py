"""One test per acceptance criterion, at the stated tolerances and time budgets.

Each run prints a ``[PASS]``/``[FAIL]`` line; the lines are also collected
into the terminal summary.  Run this file directly for the lines alone.
"""

import pytest

import conftest
from aheinstein.verification import ACCEPTANCE, run_acceptance


@pytest.mark.parametrize("number,name,budget,check", ACCEPTANCE,
                         ids=[f"{n:02d}-{name}" for n, name, _, _ in ACCEPTANCE])
def test_criterion(number, name, budget, check):
    (result,) = run_acceptance([number])
    line = result.line()
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, result.detail
    assert result.within_budget, f"{result.seconds:.1f}s over the {budget}s budget"


if __name__ == "__main__":
    for result in run_acceptance():
        print(result.line())
