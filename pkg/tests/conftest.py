"""Shared fixtures and the acceptance summary printed after the run."""

import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}

TITLES = {
    1: "focus-value table",
    2: "codim-2 Hopf locus",
    3: "amplitude prediction and simulation",
    4: "resultant elimination",
    5: "Bogdanov-Takens simplest normal form",
    6: "parametric normal form substitution",
    7: "normal-form Hopf cross-check",
    8: "Melnikov coefficients and sphere atlas",
    9: "homoclinic shooting",
    10: "portrait labels",
    11: "property suites",
}


@pytest.fixture
def record():
    """Store the outcome of one acceptance criterion, then assert it."""

    def _record(number: int, checks: dict):
        failed = [name for name, ok in checks.items() if not ok]
        detail = "all checks passed" if not failed else "failed: " + "; ".join(failed)
        ACCEPTANCE[number] = (not failed, detail)
        assert not failed, detail

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(TITLES):
        if i in ACCEPTANCE:
            ok, detail = ACCEPTANCE[i]
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {i:2d}. {TITLES[i]}: {detail}")
        else:
            terminalreporter.write_line(f"[----] {i:2d}. {TITLES[i]}: not run")
