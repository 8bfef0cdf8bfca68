import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahgeom import algebra
from ahgeom.errors import StructuralError
from ahgeom.presets import catalog, get_preset, perturb
from ahgeom.structure import AlmostHermitianStructure, build_structure
from ahgeom.verifier import (
    CATALOG,
    FLAG_NAMES,
    IDENTITY_IDS,
    condition_flags,
    einstein_residuals,
    onorm,
    run_identity_suite,
)

PRESETS = [p.name for p in catalog()]


def perturbed(name, seed):
    return perturb(get_preset(name).structure(), np.random.default_rng(seed))


@pytest.fixture
def flipped_F(monkeypatch):
    """Mutation: the fundamental form with the opposite sign, F = -g(J., .)."""
    monkeypatch.setattr(AlmostHermitianStructure, "F", property(lambda self: -(self.J.T @ self.g)))


def test_suite_passes_on_presets(preset):
    report = run_identity_suite(preset.structure())
    assert report.passed, [(r.id, r.residual) for r in report.failures]
    assert report.exit_code == 0


@given(st.sampled_from(PRESETS), st.integers(0, 100_000))
def test_suite_passes_on_perturbations(name, seed):
    report = run_identity_suite(perturbed(name, seed))
    assert report.passed, [(r.id, r.residual) for r in report.failures]


def test_every_identity_is_evaluated_somewhere():
    """No identity is vacuous: each one runs unskipped on at least one preset."""
    ran = set()
    for p in catalog():
        ran |= {r.id for r in run_identity_suite(p.structure()).results if not r.skipped}
    assert ran == set(IDENTITY_IDS)


def test_conditional_identity_reports_its_reason():
    res = run_identity_suite(get_preset("a41").structure(), ["I-M"]).results[0]
    assert res.skipped and res.passed
    assert res.hypotheses["lee_killing"] is False
    assert "lee_killing" in res.reason


def test_relations_with_nonzero_lee_form_hold_on_a36():
    res = run_identity_suite(get_preset("a36_a1").structure(), ["I-O", "I-N", "killing", "E-W"])
    assert all(not r.skipped and r.passed for r in res.results)


def test_unknown_identity_id():
    with pytest.raises(StructuralError):
        run_identity_suite(get_preset("a41").structure(), ["I-Z"])


def test_catalog_ids_unique():
    assert len(IDENTITY_IDS) == len(set(IDENTITY_IDS)) == len(CATALOG)


def test_flipped_fundamental_form_is_detected(flipped_F):
    report = run_identity_suite(get_preset("a36_a1").structure())
    assert "I-A" in {r.id for r in report.failures}
    assert report.exit_code == 1


def test_halved_differential_is_detected(monkeypatch):
    monkeypatch.setattr(algebra, "D_NORMALIZATION", 0.5)
    report = run_identity_suite(get_preset("a36_a1").structure())
    assert "I-A" in {r.id for r in report.failures}


def test_flags_of_a36():
    flags = condition_flags(get_preset("a36_a1").structure()).values()
    assert set(flags) == set(FLAG_NAMES)
    for name in ("lcs", "gauduchon", "lee_parallel", "lee_killing", "sym_j_minus_vanishes", "n_theta_vanishes"):
        assert flags[name], name
    assert not flags["integrable"] and not flags["almost_kaehler"]


def test_flags_of_a410():
    flags = condition_flags(get_preset("a410").structure()).values()
    assert not flags["lcs"] and not flags["n_theta_vanishes"] and not flags["j_invariant_rho_chern"]


@pytest.mark.parametrize("name", ["a36_a1", "a41", "a48", "a410", "abelian_flat"])
def test_presets_are_second_chern_einstein(name):
    assert einstein_residuals(get_preset(name).structure()).second_chern_einstein


@given(st.floats(0.05, 20.0))
def test_einstein_residuals_are_scale_invariant(c):
    S = perturbed("a410", 1)
    T = build_structure(S.algebra, c * S.g, S.J)
    a, b = einstein_residuals(S), einstein_residuals(T)
    assert b.second_chern_residual == pytest.approx(a.second_chern_residual, rel=1e-7)
    assert b.bismut_residual == pytest.approx(a.bismut_residual, rel=1e-7)


def test_metric_perturbation_breaks_second_chern_einstein():
    S = get_preset("a36_a1").structure()
    g = np.array(S.g)
    g[0, 0] += 0.1
    J = np.array(S.J)
    lam = np.sqrt(g[0, 0] / g[2, 2])
    J[2, 0], J[0, 2] = lam, -1 / lam
    assert einstein_residuals(build_structure(S.algebra, g, J)).second_chern_residual > 1e-3


def test_einstein_weyl_gate():
    rep = einstein_residuals(get_preset("a41").structure())
    assert rep.weyl_residual is None and "sym_j_minus_vanishes" in rep.weyl_skip_reason
    rep = einstein_residuals(get_preset("a36_a1").structure())
    # hypotheses hold, so the J-anti-invariant criterion must agree with Ric^W - s^W/4 g directly
    assert rep.weyl_residual is not None
    assert rep.weyl_residual == pytest.approx(rep.einstein_weyl_direct_residual, rel=1e-9)
    assert rep.einstein_weyl is False


def test_onorm_is_frame_independent(rng):
    S = get_preset("a36_a1").structure()
    alpha = rng.standard_normal((4, 4))
    alpha = alpha - alpha.T
    from ahgeom.structure import tensor_inner

    assert onorm(S, alpha) ** 2 == pytest.approx(tensor_inner(S, alpha, alpha))


@pytest.mark.parametrize("entry", [2, 3])
@pytest.mark.parametrize("delta", [0.1, -0.1])
def test_a36_stays_second_chern_einstein_under_e3_e4_rescaling(entry, delta):
    """Bumping g33 or g44 only rescales e3 or the central e4, which keeps the Einstein condition."""
    S = get_preset("a36_a1").structure()
    g = np.array(S.g)
    g[entry, entry] += delta
    partner = entry - 2
    J = np.array(S.J)
    lam = np.sqrt(g[partner, partner] / g[entry, entry])
    J[entry, partner], J[partner, entry] = lam, -1 / lam
    assert einstein_residuals(build_structure(S.algebra, g, J)).second_chern_residual <= 1e-9
