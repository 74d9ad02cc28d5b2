"""Smoke test for the cqt Python extension.

Build and install first, e.g.
    pip install --no-build-isolation ./crates/py
or copy target/release/libcqt.so next to this file as cqt.so.
"""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import cqt


def close(a, b, tol=1e-10):
    assert abs(a - b) <= tol, (a, b)


def main():
    names = cqt.builtin_names()
    assert "eq23" in names and len(names) >= 12

    eq23 = cqt.Scenario.builtin("eq23")
    fam = eq23.family("main")
    report = fam.check()
    assert not report.consistent
    assert [(i, j) for i, j, _ in report.violating_pairs] == [(1, 3), (2, 4)]
    for _, _, overlap in report.violating_pairs:
        close(abs(overlap), 0.25)
    try:
        fam.probability(1)
    except cqt.InconsistentFamilyError:
        pass
    else:
        raise AssertionError("probability on an inconsistent family")

    coarse = fam.coarse_grained(2)
    assert coarse.histories() == ["x1+ 1", "x1- 1"]
    for k in (1, 2):
        close(coarse.probability(k), 0.5)

    fixed = cqt.Scenario.builtin("eq23-field-fix").family("main")
    assert [round(fixed.probability(k), 12) for k in range(1, 5)] == [0.0, 1.0, 0.0, 0.0]
    close(fixed.query("x1+"), 1.0)
    assert fixed.query("y1+") is None

    cat = cqt.Scenario.builtin("cat-analogue")
    try:
        cat.family("z-framework").refine(cat.family("x-framework"))
    except cqt.IncompatibleError as e:
        assert "commute" in str(e) or "z1+" in str(e), e
    else:
        raise AssertionError("refined incompatible frameworks")

    data = json.loads(cqt.Scenario.builtin("eq27-split").report())
    assert all(f["consistent"] for f in data["families"])

    text = cqt.Scenario.builtin("eq28-sixteen").render()
    again = cqt.Scenario.from_text(text)
    assert again.render() == text
    try:
        cqt.Scenario.from_text("scenario x\n[system]\nspins 3\n")
    except cqt.ScenarioError:
        pass
    else:
        raise AssertionError("bad scenario accepted")

    close(cqt.born_probability([1, 0], math.pi / 2, 0.0, "+"), 0.5)
    close(cqt.singlet_correlation(0.0, 0.0, 1.0, 0.0), -math.cos(1.0))
    close(abs(cqt.chsh()), 2 * math.sqrt(2), 1e-9)
    assert cqt.lhv_bound() == 2.0
    print("python smoke test passed")


if __name__ == "__main__":
    main()
