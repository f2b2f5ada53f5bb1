"""Smoke test for the paroper extension. Run after `maturin develop` or installing the wheel."""

import json
from fractions import Fraction
from pathlib import Path

import paroper

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    curve = paroper.Curve(0, [5, 5, 5])
    assert curve.labels == ["x1", "x2", "x3"]

    e = curve.gunning()
    assert (e.rank, e.degree) == (2, -3)
    assert e.weights["x1"] == [Fraction(3, 5), Fraction(2, 5)]
    assert e.par_deg() == 0

    s4 = e.sym(4)
    assert s4.weights["x2"] == [Fraction(k, 5) for k in (4, 3, 2, 1, 0)]
    assert s4.det().par_deg() == 0
    assert (e * e.dual()).rank == 4
    assert e.det().is_trivial()

    orb = e.to_orbifold()
    assert orb["round_trip"], orb

    rep = curve.oracle(seed=42, count=200)
    assert rep["passed"] == 200, rep

    assert len(curve.filtration(3)["rows"]) == 3
    assert curve.jets(2)["rank"] == 3
    assert curve.oper_bundle(3).det().is_trivial()

    try:
        paroper.Curve(0, [5])
    except paroper.ParoperError as exc:
        assert "genus-0" in str(exc)
    else:
        raise AssertionError("expected ParoperError")

    system = paroper.FuchsianSystem.from_json((DATA / "rank2_system.json").read_text())
    atlas = system.atlas(tol=1e-9)
    assert atlas["product_defect"] < 1e-7, atlas
    assert system.irreducibility()["pass"]

    op = paroper.Operator.from_json(json.loads((DATA / "riemann_model.json").read_text()))
    assert op.exponents("0") == [Fraction(2, 5), Fraction(3, 5)]
    assert op.exponents("inf") == [Fraction(-3, 5), Fraction(-2, 5)]
    model = paroper.Curve.from_json((DATA / "p1_three_points.json").read_text())
    assert model.oper_check(2, op)["pass"]

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
