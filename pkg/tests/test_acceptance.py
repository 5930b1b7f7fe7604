"""Every acceptance criterion at its pinned tolerance, one line each."""

import pytest

from rabi2 import acceptance

_elapsed: list[float] = []


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion, acceptance_lines):
    result = criterion()
    _elapsed.append(result.seconds)
    line = result.line()
    acceptance_lines.append(line)
    print(line)
    assert result.passed, line


def test_suite_runtime(acceptance_lines):
    total = sum(_elapsed)
    passed = len(_elapsed) == len(acceptance.CRITERIA) and total <= acceptance.SUITE_SECONDS
    line = acceptance.CriterionResult(0, "suite runtime", passed,
                                      f"{total:.1f}s over {len(_elapsed)} criteria "
                                      f"(limit {acceptance.SUITE_SECONDS:g}s)", total).line()
    acceptance_lines.append(line)
    print(line)
    assert passed, line


def test_result_line_format():
    ok = acceptance.CriterionResult(3, "title", True, "detail", 1.25).line()
    bad = acceptance.CriterionResult(10, "title", False, "detail").line()
    assert ok == "[PASS] criterion  3: title -- detail (1.2s)"
    assert bad.startswith("[FAIL] criterion 10: title")
