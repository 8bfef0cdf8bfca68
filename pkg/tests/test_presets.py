import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahgeom.curvatures import CurvatureReport
from ahgeom.errors import StructuralError
from ahgeom.presets import (
    TAGS,
    Expectation,
    J_from_pairs,
    catalog,
    change_basis,
    dumps,
    get_preset,
    preset_names,
    structure_from_dict,
    structure_to_dict,
)
from ahgeom.verifier import einstein_residuals


def test_catalog_names():
    assert preset_names() == ["a36_a1", "a41", "a48", "a410", "abelian_flat"]
    assert [p.name for p in catalog()] == preset_names()


def test_unknown_preset():
    with pytest.raises(StructuralError):
        get_preset("a99")


@pytest.mark.parametrize("tag", TAGS)
def test_expectations_hold(preset, tag):
    failed = [r for r in preset.check(tags=(tag,)) if not r.passed]
    assert not failed, [(r.observable, r.error) for r in failed]


def test_every_expectation_has_a_known_tag():
    for p in catalog():
        assert p.expectations
        assert {e.tag for e in p.expectations} <= set(TAGS)


def test_expectation_validation():
    with pytest.raises(StructuralError):
        Expectation("theta", {}, "GUESS")
    with pytest.raises(StructuralError):
        Expectation("no_such_thing", 0.0, "PAPER")


def test_a36_headline_numbers():
    p = get_preset("a36_a1")
    S = p.structure()
    s = math.sqrt(5) - 1
    assert np.allclose(S.theta, [0, 0, 0, 1 / s])
    rep = CurvatureReport(S)
    assert rep.scalars.s_H == pytest.approx(1 / s)
    assert einstein_residuals(S).second_chern_einstein


def test_J_from_pairs():
    J = J_from_pairs(4, [(1, 3), (2, 4)])
    assert np.allclose(J @ np.eye(4)[0], np.eye(4)[2])
    assert np.allclose(J @ J, -np.eye(4))
    with pytest.raises(StructuralError):
        J_from_pairs(4, [(1, 3)])


def test_structure_dict_round_trip(preset):
    S = preset.structure()
    T = structure_from_dict(json.loads(dumps(structure_to_dict(S))))
    assert np.array_equal(T.algebra.c, S.algebra.c)
    assert np.array_equal(T.g, S.g) and np.array_equal(T.J, S.J)


def test_dumps_is_byte_stable(preset):
    text = dumps(preset.to_dict())
    assert dumps(json.loads(text)) == text


def test_dumps_formats():
    assert dumps({"x": 0.1, "y": 1.0, "z": 0, "w": [True, None]}) == (
        '{\n  "x": 0.10000000000000001,\n  "y": 1.0,\n  "z": 0,\n  "w": [true, null]\n}\n'
    )
    with pytest.raises(StructuralError):
        dumps({"x": float("nan")})


def test_almost_abelian_description():
    S = structure_from_dict({"almost_abelian": {"a": 0, "b": [-1, 0], "v": [1, 0], "A": [[0, 0], [0, 0]]}})
    assert S.dim == 4 and S.algebra.c[3, 0, 0] == 0


@pytest.mark.parametrize("doc", [[], {"algebra": {"dim": 2, "brackets": []}}, {"metric": [[1]]},
                                 {"algebra": {"dim": 2, "brackets": []}, "J": "x"}])
def test_malformed_descriptions(doc):
    with pytest.raises(StructuralError):
        structure_from_dict(doc)


@given(st.integers(0, 10_000))
def test_change_basis_preserves_scalars(seed):
    rng = np.random.default_rng(seed)
    S = get_preset("a41").structure()
    C = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
    if abs(np.linalg.det(C)) < 0.1:
        return
    a = CurvatureReport(S).scalars
    b = CurvatureReport(change_basis(S, C)).scalars
    for k, v in a.as_dict().items():
        assert b.as_dict()[k] == pytest.approx(v, abs=1e-8)
