"""Smoke test for the torus_mm extension module.

Build and run from the repository root:

    cargo build --release -p torus-mm-py --features extension-module
    python3 python/smoke_test.py
"""

import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def import_module():
    # cargo names the library libtorus_mm_py.so; python wants torus_mm.so
    lib = os.path.join(ROOT, "target", "release", "libtorus_mm_py.so")
    if not os.path.exists(lib):
        sys.exit(f"missing {lib}; build it with cargo first")
    d = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(d, "torus_mm.so"))
    sys.path.insert(0, d)
    import torus_mm

    return torus_mm


def main():
    tm = import_module()
    S = tm.Slope.parse

    assert tm.farey_distance(S("0/1"), S("2/5")) == 2
    assert [str(s) for s in tm.farey_geodesic(S("1/0"), S("2/5"))][0] == "1/0"
    assert tm.Slope(2, 4) == tm.Slope(1, 2)
    assert S("7/3").cf() == "[2;3]"

    assert tm.annular_distance(S("0/1"), S("1/0"), S("1/7")) == 8
    coeffs = tm.annular_coefficients_between("1/0", "7/3")
    assert [(str(a), v) for a, v in coeffs] == [("2/1", 2), ("5/2", 1), ("3/1", 1)]

    m1, m2 = tm.Marking.parse("0/1|1/0"), tm.Marking.parse("0/1|1/5")
    assert tm.marking_distance(m1, m2) == 5
    assert tm.marking_distance_bfs(m1, m2) == 5
    try:
        tm.Marking.parse("0/1|5/1")
        raise AssertionError("invalid marking accepted")
    except ValueError:
        pass

    h = tm.hierarchy_path(tm.Marking.parse("0/1|1/0"), tm.Marking.parse("2/5|1/3"))
    passed, checks = h.check()
    assert passed, checks
    assert len(h) == len(h.steps) - 1
    total, terms = tm.distance_formula_terms(m1, m2, 5)
    assert total == 6 and terms[0][0] == "S"

    pa = tm.PseudoAnosov([1], 2)
    assert pa.trace == "6"
    assert pa.matrix == (("5", "2"), ("2", "1"))
    assert abs(pa.translation_length - 2 * math.acosh(3)) < 1e-12
    assert tm.PseudoAnosov([1, 2, 3], 2).cf_ok

    assert tm.necklace_classes(2, 2) == [([1, 1], 1), ([1, 2], 2), ([2, 2], 1)]
    assert len(tm.necklace_classes(3, 2)) == 4
    try:
        tm.necklace_classes(12, 9, budget=100)
        raise AssertionError("budget not enforced")
    except tm.BudgetError:
        pass
    est, lb, limit = tm.growth(8, 10, 2, 1.0, budget=0)
    assert est >= lb and abs(limit - math.log(8)) < 1e-12

    c = tm.Constants.load()
    assert c.get("c2") >= 1 and "M1" in c.keys()
    print("smoke test passed")


if __name__ == "__main__":
    main()
