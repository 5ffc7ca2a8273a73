"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly for a plain report:  python3 tests/test_acceptance.py
"""
import json
import subprocess
import sys
import time

import pytest

from spinfiber import selftest

WHOLE_SUITE_BUDGET_S = 60.0


def _report(line, capsys, lead=""):
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print(lead + line)


def _run(criterion, capsys=None):
    res = criterion()
    _report(res.line(), capsys, lead="\n")
    for c in res.checks:
        _report(f"    {c.name}: {c.value:.3e} ({'<=' if c.kind == 'max' else '>='} {c.bound:g})", capsys)
    return res


@pytest.mark.parametrize("criterion", selftest.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    res = _run(criterion, capsys)
    failed = [c.name for c in res.checks if not c.passed]
    assert res.passed, f"{res.key} failed checks: {failed}"


def test_whole_suite_budget(capsys):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "spinfiber", "selftest"], capture_output=True, text=True)
    wall = time.perf_counter() - t0
    ok = proc.returncode == 0 and wall < WHOLE_SUITE_BUDGET_S
    _report(f"[{'PASS' if ok else 'FAIL'}] C9 whole-suite budget: selftest took {wall:.1f} s "
            f"(< {WHOLE_SUITE_BUDGET_S:g} s), exit {proc.returncode}", capsys, lead="\n")
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["status"] == "pass"
    assert wall < WHOLE_SUITE_BUDGET_S


if __name__ == "__main__":
    results = [_run(c) for c in selftest.CRITERIA]
    sys.exit(0 if all(r.passed for r in results) else 1)
