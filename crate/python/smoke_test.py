"""Smoke test for the gkmod extension.

Build and install first:

    pip install -e crates/py --no-build-isolation
"""

import json
import pathlib

import gkmod

ROOT = pathlib.Path(__file__).resolve().parent.parent


def test_rings():
    z = gkmod.Ring("Z")
    assert not z.is_field
    assert gkmod.Ring("Q").is_field
    assert gkmod.Ring("Z[1/2]").is_unit("2")
    assert not z.is_unit("2")


def test_smith_form():
    assert gkmod.smith_divisors([["2", "4"], ["6", "8"]]) == ["2", "4"]
    assert gkmod.smith_divisors([["2", "4"], ["6", "8"]], ring="Q") == ["1", "1"]


def test_pbw():
    # e f = f e + h, and the PBW order is (e, h, f)
    terms = dict((tuple(m), c) for m, c in gkmod.straighten("sl2", ["f", "e"]))
    assert terms == {(1, 0, 1): "1", (0, 1, 0): "-1"}


def test_modules():
    v = gkmod.Module.weyl("Z", 3)
    assert v.dim == 4
    assert v.validate()
    assert [w[0] for w in v.weights] == [3, 1, -1, -3]
    assert v.hom_rank(v) == 1
    assert v.dual().dim == 4
    assert v.tensor(gkmod.Module.weyl("Z", 1)).dim == 8


def test_cohomology():
    t = gkmod.Module.trivial(gkmod.Pair("lie-sl2", "Z"), 1)
    ranks = t.cohomology()
    assert ranks == [(1, []), (0, []), (0, ["2", "2"]), (1, [])]
    assert [r for r, _ in t.base_change("Q").cohomology()] == [1, 0, 0, 1]


def test_borel_weil():
    for lam in range(4):
        w = gkmod.Module.borel_character("Z", lam)
        assert gkmod.induce("borel-weil", w, -12, 6, 12).dim == lam + 1
        cert = gkmod.compare_iota("borel-weil", w, "Q", -12, 6, 12)
        assert cert.tag == "ThmC" and cert.iso and cert.claimed
    assert gkmod.induce("borel-weil", gkmod.Module.borel_character("Z", -1), -12, 6, 12).dim == 0


def test_hom_base_change():
    x = gkmod.Module.weyl("Z", 2)
    cert = gkmod.hom_base_change(x, x, "Z[i]")
    assert cert.tag == "VariantG1" and cert.iso


def test_scenarios():
    text = (ROOT / "crates/cli/scenarios/ce-torsion.gk").read_text()
    gkmod.validate(text)
    code, out = gkmod.run(text, format="json")
    assert code == 0
    assert all(t["status"] == "ok" for t in json.loads(out)["tasks"])
    try:
        gkmod.validate("{ not json")
    except gkmod.GkException as e:
        assert "exit code 2" in str(e)
    else:
        raise AssertionError("malformed scenario accepted")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"{name}: ok")
