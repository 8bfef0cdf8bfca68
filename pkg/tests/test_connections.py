import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahgeom.almost_abelian import AlmostAbelianData, realize
from ahgeom.connections import (
    chern_connection,
    chern_residuals,
    covariant_derivative,
    curvature_apply,
    is_valid,
    levi_civita,
    weyl_connection,
    weyl_residuals,
)
from ahgeom.errors import ConventionError
from ahgeom.presets import catalog, get_preset, perturb

PRESETS = [p.name for p in catalog()]


def perturbed(name, seed):
    return perturb(get_preset(name).structure(), np.random.default_rng(seed))


def solve_connection(S, kind):
    """Christoffel symbols from the defining linear conditions, by least squares.

    Chern: metric, J-parallel, torsion J-anti-invariant.
    Weyl:  torsion-free, D g = theta (x) g.
    """
    m = S.dim
    rows, rhs = [], []

    def add(fn, target):
        basis = np.eye(m ** 3).reshape(-1, m, m, m)
        rows.append(np.stack([fn(G).ravel() for G in basis], axis=1))
        rhs.append(np.ravel(target))

    c = S.algebra.c

    def torsion(G):
        return G - np.transpose(G, (1, 0, 2))

    def metric(G):
        return -np.einsum("ijk,kl->ijl", G, S.g) - np.einsum("ilk,jk->ijl", G, S.g)

    if kind == "chern":
        add(metric, np.zeros((m, m, m)))
        # [nabla_i, J] with nabla_i[k, j] = Gamma^k_ij
        add(lambda G: np.einsum("ijk,jl->ikl", G, S.J) - np.einsum("km,ilm->ikl", S.J, G),
            np.zeros((m, m, m)))

        def t11(G):
            T = torsion(G)
            return T + np.einsum("ai,bj,abk->ijk", S.J, S.J, T)

        Tc = -c
        add(t11, -(Tc + np.einsum("ai,bj,abk->ijk", S.J, S.J, Tc)))
    else:
        add(torsion, c)
        add(metric, np.einsum("i,jl->ijl", S.theta, S.g))
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    assert np.linalg.matrix_rank(A) == m ** 3
    return sol.reshape(m, m, m)


@given(st.sampled_from(PRESETS), st.integers(0, 10_000))
def test_levi_civita_is_metric_and_torsion_free(name, seed):
    S = perturbed(name, seed)
    assert is_valid(levi_civita(S), tol=1e-10)


@pytest.mark.parametrize("name", PRESETS)
def test_chern_matches_linear_characterization(name):
    S = perturbed(name, 11)
    assert np.allclose(chern_connection(S).gamma, solve_connection(S, "chern"), atol=1e-9)


@pytest.mark.parametrize("name", PRESETS)
def test_weyl_matches_linear_characterization(name):
    S = perturbed(name, 12)
    assert np.allclose(weyl_connection(S).gamma, solve_connection(S, "weyl"), atol=1e-9)


@given(st.sampled_from(PRESETS), st.integers(0, 10_000))
def test_postconditions_hold(name, seed):
    S = perturbed(name, seed)
    assert max(chern_residuals(chern_connection(S)).values()) < 1e-10
    assert max(weyl_residuals(weyl_connection(S)).values()) < 1e-10


@given(st.sampled_from(PRESETS), st.integers(0, 10_000))
def test_curvature_symmetries(name, seed):
    S = perturbed(name, seed)
    for conn in (levi_civita(S), chern_connection(S)):
        R = conn.curvature
        assert np.allclose(R, -np.transpose(R, (1, 0, 2, 3)), atol=1e-10)
        low = np.einsum("ijkl,km->ijml", R, S.g)
        assert np.allclose(low, -np.transpose(low, (0, 1, 3, 2)), atol=1e-10)
    R = levi_civita(S).curvature
    bianchi = R + np.transpose(R, (1, 3, 2, 0)) + np.transpose(R, (3, 0, 2, 1))
    assert np.allclose(bianchi, 0, atol=1e-10)


def test_flat_connections_on_abelian():
    S = get_preset("abelian_flat").structure()
    for conn in (levi_civita(S), chern_connection(S), weyl_connection(S)):
        assert np.allclose(conn.gamma, 0)
        assert np.allclose(conn.curvature, 0)


def test_curvature_sign_convention(a36):
    """R_{X,Y} = nabla_[X,Y] - [nabla_X, nabla_Y]."""
    D = levi_civita(a36)
    e = np.eye(4)
    X, Y, Z = e[0], e[2], e[1]
    expected = (D.along(a36.algebra.bracket(X, Y)) - (D.along(X) @ D.along(Y) - D.along(Y) @ D.along(X))) @ Z
    assert np.allclose(curvature_apply(D.curvature, X, Y, Z), expected)


def test_covariant_derivative_of_metric_vanishes(a36):
    assert np.allclose(covariant_derivative(levi_civita(a36), a36.g), 0, atol=1e-12)


def test_strict_mode_rejects_a_failed_postcondition():
    """The Chern formula used here is specific to real dimension four."""
    rng = np.random.default_rng(5)
    d = AlmostAbelianData(0.3, rng.standard_normal(4), rng.standard_normal(4), rng.standard_normal((4, 4)))
    S = realize(d)
    with pytest.raises(ConventionError) as info:
        chern_connection(S)
    assert "J" in info.value.residuals
    loose = chern_connection(realize(d), strict=False)
    assert loose.kind == "chern"
