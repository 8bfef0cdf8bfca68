import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahgeom import algebra
from ahgeom.algebra import (
    CO,
    CONTRA,
    InvariantTensor,
    LieAlgebra,
    alternate,
    basis_form,
    exterior_derivative,
    form_coefficients,
    form_from_coefficients,
    interior,
    lie_derivative,
    validate_algebra,
    wedge,
)
from ahgeom.errors import StructuralError
from ahgeom.presets import catalog

A36 = LieAlgebra.from_brackets(4, {(1, 3): {2: -1.0}, (2, 3): {1: 1.0}})


def random_form(rng, dim, k):
    return alternate(rng.standard_normal((dim,) * k))


def test_d_on_one_forms_is_minus_dual_bracket():
    """de^k(X, Y) = -e^k([X, Y]): frozen values for the rotation algebra."""
    assert form_coefficients(exterior_derivative(A36, np.eye(4)[1]), 1e-14) == {"13": 1.0}
    assert form_coefficients(exterior_derivative(A36, np.eye(4)[0]), 1e-14) == {"23": -1.0}
    assert np.allclose(exterior_derivative(A36, np.eye(4)[2]), 0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_d_squared_vanishes_on_presets(k, rng):
    for p in catalog():
        L = p.algebra()
        alpha = random_form(rng, 4, k)
        assert np.max(np.abs(exterior_derivative(L, exterior_derivative(L, alpha)))) < 1e-12


def test_leibniz_rule(rng):
    L = catalog()[3].algebra()
    a, b = random_form(rng, 4, 1), random_form(rng, 4, 2)
    lhs = exterior_derivative(L, wedge(a, b))
    rhs = wedge(exterior_derivative(L, a), b) - wedge(a, exterior_derivative(L, b))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_wedge_determinant_convention():
    w = wedge(np.eye(4)[0], np.eye(4)[2])
    assert w[0, 2] == pytest.approx(1.0) and w[2, 0] == pytest.approx(-1.0)
    assert form_coefficients(basis_form(4, 1, 2, 3)) == {"123": 1.0}


@given(st.integers(0, 2**32 - 1))
def test_wedge_graded_commutative(seed):
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, 4, 1), random_form(rng, 4, 2)
    assert np.allclose(wedge(a, b), wedge(b, a))
    c = random_form(rng, 4, 1)
    assert np.allclose(wedge(a, c), -wedge(c, a))


def test_coefficients_round_trip(rng):
    alpha = random_form(rng, 4, 2)
    assert np.allclose(form_from_coefficients(4, form_coefficients(alpha)), alpha)


def test_interior_of_basis_form():
    assert np.allclose(interior(np.eye(4)[0], basis_form(4, 1, 3)), np.eye(4)[2])


def test_jacobi_and_traces_of_presets():
    for p in catalog():
        diag = validate_algebra(p.algebra())
        assert diag.is_lie_algebra
        assert diag.solvable


def test_nilpotency_hint():
    heis = LieAlgebra.from_brackets(4, {(1, 2): {3: 1.0}})
    assert validate_algebra(heis).nilpotent
    assert not validate_algebra(A36).nilpotent


def test_bad_jacobi_detected():
    bad = LieAlgebra.from_brackets(3, {(1, 2): {1: 1.0}, (2, 3): {2: 1.0}, (1, 3): {2: 1.0}})
    assert not validate_algebra(bad).is_lie_algebra


def test_json_round_trip():
    text = json.dumps(A36.to_dict())
    again = LieAlgebra.from_json(text)
    assert np.array_equal(again.c, A36.c)


@pytest.mark.parametrize(
    "doc",
    ['{"dim": 4, "brackets": [{"i": 1, "j": 9, "out": {"2": 1}}]}', '{"brackets": []}', "not json"],
)
def test_malformed_algebra_json(doc):
    with pytest.raises(StructuralError):
        LieAlgebra.from_json(doc)


def test_structure_constants_shape_checked():
    with pytest.raises(StructuralError):
        LieAlgebra(np.zeros((3, 3, 2)))


def test_lie_derivative_of_vector_is_bracket(rng):
    X, Y = rng.standard_normal(4), rng.standard_normal(4)
    out = lie_derivative(A36, X, InvariantTensor.vector(Y))
    assert np.allclose(out.components, A36.bracket(X, Y))


def test_cartan_formula_on_two_forms(rng):
    """L_X alpha = i_X d alpha + d i_X alpha for left-invariant data."""
    L = catalog()[2].algebra()
    X, alpha = rng.standard_normal(4), random_form(rng, 4, 2)
    lhs = lie_derivative(L, X, alpha)
    rhs = interior(X, exterior_derivative(L, alpha)) + exterior_derivative(L, interior(X, alpha))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_lie_derivative_variance(rng):
    X = rng.standard_normal(4)
    E = rng.standard_normal((4, 4))
    ad = A36.ad(X)
    out = lie_derivative(A36, X, E, (CONTRA, CO))
    assert np.allclose(out, ad @ E - E @ ad)


def test_d_normalization_knob_scales_d(monkeypatch):
    base = exterior_derivative(A36, np.eye(4)[1])
    monkeypatch.setattr(algebra, "D_NORMALIZATION", 0.5)
    assert np.allclose(exterior_derivative(A36, np.eye(4)[1]), 0.5 * base)
