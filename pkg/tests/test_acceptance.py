"""Acceptance gate: run the full verification battery and assert every check.

Each criterion prints one PASS/FAIL line directly to the terminal (outside
pytest's capture) and then asserts, so a failing criterion is both visible
in the run log and red in the test report.  Tolerances and runtime limits
are pinned here and must not be loosened to make a run green.
"""

import pytest

from torusword.battery import run_battery

_REPORT = None


def report():
    global _REPORT
    if _REPORT is None:
        _REPORT = run_battery(seed=0)
    return _REPORT


CRITERIA = [
    # (number, check name, runtime limit in seconds or None)
    (1, "sturmian-complexity", 5.0),
    (2, "kbonacci-complexity", 60.0),
    (3, "hexagon-complexity", 120.0),
    (4, "lower-bound", None),
    (5, "piece-count", None),
    (6, "increments", None),
    (7, "graph-example", None),
    (8, "cycle-roundtrip", 10.0),
    (9, "flow-conservation", None),
    (10, "measure-identities", None),
    (11, "euler-characteristic", None),
    (12, "spectral", None),
    (13, "fractal-boundedness", None),
]


def _check(name):
    for c in report().checks:
        if c.name == name:
            return c
    raise AssertionError(f"battery produced no check named {name!r}")


@pytest.mark.parametrize("number,name,limit", CRITERIA, ids=[c[1] for c in CRITERIA])
def test_criterion(number, name, limit, capsys):
    result = _check(name)
    status = "PASS" if result.passed else "FAIL"
    with capsys.disabled():
        print(f"acceptance criterion {number:2d} [{name}] ({result.runtime:.2f}s): {status}")
    assert result.passed, f"criterion {number} failed: {result.claim}\n{result.to_dict()}"
    if limit is not None:
        assert result.runtime < limit, (
            f"criterion {number} exceeded its runtime limit: {result.runtime}s >= {limit}s"
        )


def test_criterion_details_pinned():
    """Cross-checks of specific numbers inside the battery results."""
    c = _check("sturmian-complexity")
    assert c.computed == [n + 1 for n in range(1, 51)]

    c = _check("kbonacci-complexity")
    for j, ps in c.computed.items():
        k = int(j) - 1
        assert ps == [k * n + 1 for n in range(1, len(ps) + 1)]

    c = _check("hexagon-complexity")
    assert len(c.computed) >= 2
    for ps in c.computed.values():
        assert ps == [n * n + n + 1 for n in range(1, 13)]

    c = _check("graph-example")
    assert c.passed

    c = _check("spectral")
    assert c.details["lambda2"] == pytest.approx((1 + 5**0.5) / 2, abs=1e-10)
    x = c.details["lambda3"]
    assert abs(x**3 - x**2 - x - 1) < 1e-9


def test_exit_status_contract():
    """The battery's aggregate verdict is the CLI's exit-code source."""
    assert report().all_passed
