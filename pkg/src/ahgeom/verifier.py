"""Condition flags, Einstein-type residuals and the curvature identity catalog.

Norms are Frobenius norms of components in a g-orthonormal frame, so they do not
depend on the basis the structure was entered in.  Identity residuals are relative:
``|lhs - sum(rhs)| / scale`` where ``scale`` is the largest norm among the terms,
floored by the natural size of the algebra (``|c|`` for connection-level identities,
``|c|^2`` for curvature-level ones) so that identities between vanishing quantities
do not divide round-off by round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import CO, CONTRA, EPS_ABS, EPS_REL, lie_derivative, validate_algebra, wedge
from .connections import chern_residuals, covariant_derivative, weyl_residuals
from .curvatures import CurvatureReport, gauduchon_ricci
from .errors import StructuralError
from .structure import (
    AlmostHermitianStructure,
    form_inner,
    j_anti_invariant_part,
    j_invariant_part,
    lee_form_codifferential,
    symmetric_part,
)


def onorm(S: AlmostHermitianStructure, T, variance: Sequence[str] | None = None) -> float:
    """Frobenius norm of ``T`` after moving every slot to the adapted orthonormal frame."""
    T = np.asarray(T, dtype=float)
    if T.ndim == 0:
        return abs(float(T))
    var = tuple(variance) if variance is not None else (CO,) * T.ndim
    P = S.frame
    Pinv = np.linalg.inv(P)
    for s, kind in enumerate(var):
        M = P.T if kind == CO else Pinv
        T = np.moveaxis(np.tensordot(M, T, axes=(1, s)), 0, s)
    return float(np.linalg.norm(T))


def algebra_scale(S: AlmostHermitianStructure) -> float:
    """Orthonormal-frame size of the structure constants (an inverse length)."""
    return onorm(S, S.algebra.c, (CO, CO, CONTRA))


# ---------------------------------------------------------------- condition flags

FLAG_NAMES = (
    "lcs", "gauduchon", "almost_kaehler", "integrable", "lee_parallel", "lee_killing",
    "sym_j_minus_vanishes", "n_theta_vanishes", "j_invariant_rho_chern", "j_invariant_rwf",
)


@dataclass(frozen=True)
class Flag:
    value: bool
    residual: float


@dataclass(frozen=True)
class ConditionFlags:
    lcs: Flag
    gauduchon: Flag
    almost_kaehler: Flag
    integrable: Flag
    lee_parallel: Flag
    lee_killing: Flag
    sym_j_minus_vanishes: Flag
    n_theta_vanishes: Flag
    j_invariant_rho_chern: Flag
    j_invariant_rwf: Flag
    tolerance: float = EPS_ABS

    def as_dict(self) -> dict[str, dict]:
        return {name: {"value": getattr(self, name).value, "residual": getattr(self, name).residual}
                for name in FLAG_NAMES}

    def values(self) -> dict[str, bool]:
        return {name: getattr(self, name).value for name in FLAG_NAMES}


def condition_flags(S: AlmostHermitianStructure, tol: float = EPS_ABS,
                    report: CurvatureReport | None = None) -> ConditionFlags:
    rep = report if report is not None else CurvatureReport(S, strict=False)
    from .algebra import exterior_derivative

    Dt = rep.D_theta
    Dt_sym = symmetric_part(Dt)
    residuals = {
        "lcs": onorm(S, rep.d_theta),
        "gauduchon": abs(rep.delta_theta),
        "almost_kaehler": onorm(S, exterior_derivative(S.algebra, S.F)),
        "integrable": S.nijenhuis.norm_sq,
        "lee_parallel": onorm(S, Dt),
        "lee_killing": onorm(S, Dt_sym),
        "sym_j_minus_vanishes": onorm(S, j_anti_invariant_part(S, Dt_sym)),
        "n_theta_vanishes": onorm(S, rep.n_theta),
        "j_invariant_rho_chern": onorm(S, j_anti_invariant_part(S, rep.rho_chern)),
        "j_invariant_rwf": onorm(S, j_anti_invariant_part(S, rep.rwf)),
    }
    return ConditionFlags(**{k: Flag(v <= tol, float(v)) for k, v in residuals.items()}, tolerance=tol)


# ---------------------------------------------------------------- Einstein-type residuals

@dataclass(frozen=True)
class EinsteinReport:
    """Normalized residuals of the three Einstein-type conditions.

    Residuals are divided by ``|F|`` and by the curvature scale ``|c|^2`` of the algebra,
    which makes them invariant under constant rescaling of the metric.
    """

    second_chern_residual: float
    second_chern_lambda: float
    bismut_residual: float
    bismut_lambda: float
    weyl_residual: float | None
    weyl_skip_reason: str | None
    einstein_weyl_direct_residual: float
    tolerance: float = EPS_ABS

    @property
    def second_chern_einstein(self) -> bool:
        return self.second_chern_residual <= self.tolerance

    @property
    def bismut_einstein(self) -> bool:
        return self.bismut_residual <= self.tolerance

    @property
    def einstein_weyl(self) -> bool | None:
        return None if self.weyl_residual is None else self.weyl_residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "second_chern": {"residual": self.second_chern_residual, "lambda": self.second_chern_lambda,
                             "holds": self.second_chern_einstein},
            "bismut": {"residual": self.bismut_residual, "lambda": self.bismut_lambda,
                       "holds": self.bismut_einstein},
            "weyl": {"residual": self.weyl_residual, "holds": self.einstein_weyl,
                     "skipped": self.weyl_residual is None, "reason": self.weyl_skip_reason,
                     "direct_residual": self.einstein_weyl_direct_residual},
        }


def _curvature_normalizer(S: AlmostHermitianStructure) -> float:
    k = algebra_scale(S) ** 2
    return onorm(S, S.F) * (k if k > 0 else 1.0)


def second_chern_residual(S: AlmostHermitianStructure, report: CurvatureReport | None = None) -> float:
    rep = report if report is not None else CurvatureReport(S, strict=False)
    diff = rep.r_second_chern - rep.scalars.s_H / 4.0 * S.F
    return onorm(S, diff) / _curvature_normalizer(S)


def einstein_residuals(S: AlmostHermitianStructure, tol: float = EPS_ABS,
                       report: CurvatureReport | None = None,
                       flags: ConditionFlags | None = None) -> EinsteinReport:
    rep = report if report is not None else CurvatureReport(S, strict=False)
    flags = flags if flags is not None else condition_flags(S, tol, rep)
    norm = _curvature_normalizer(S)
    s = rep.scalars

    sce = second_chern_residual(S, rep)

    ricB = j_invariant_part(S, rep.ric_bismut)
    lam = form_inner(S, ricB, S.F) / form_inner(S, S.F, S.F)
    bis = onorm(S, ricB - lam * S.F) / norm

    theta_theta = np.outer(rep.theta, rep.theta)
    missing = [name for name, ok in (("second_chern_einstein", sce <= tol),
                                     ("gauduchon", flags.gauduchon.value),
                                     ("sym_j_minus_vanishes", flags.sym_j_minus_vanishes.value)) if not ok]
    if missing:
        weyl, reason = None, "hypotheses not met: " + ", ".join(missing)
    else:
        ew = j_anti_invariant_part(S, rep.ric_riemann) + 0.5 * j_anti_invariant_part(S, theta_theta)
        weyl, reason = onorm(S, ew) / norm, None
    direct = onorm(S, rep.ric_weyl - s.s_W_trace / 4.0 * S.g) / norm
    return EinsteinReport(sce, s.s_H / 4.0, bis, lam, weyl, reason, direct, tol)


# ---------------------------------------------------------------- identity catalog

# Each identity yields groups (lhs, [rhs terms], variance[, [covariant reference tensors]]).


@dataclass(frozen=True)
class IdentityResult:
    id: str
    residual: float | None
    skipped: bool
    passed: bool
    hypotheses: dict[str, bool] = field(default_factory=dict)
    reason: str | None = None

    def as_dict(self) -> dict:
        return {"id": self.id, "residual": self.residual, "skipped": self.skipped,
                "passed": self.passed, "hypotheses": dict(self.hypotheses), "reason": self.reason}


@dataclass(frozen=True)
class SuiteReport:
    results: tuple[IdentityResult, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    @property
    def failures(self) -> list[IdentityResult]:
        return [r for r in self.results if not r.passed]

    def by_id(self) -> dict[str, IdentityResult]:
        return {r.id: r for r in self.results}

    def as_dict(self) -> dict:
        return {"passed": self.passed, "tolerance": self.tolerance,
                "identities": [r.as_dict() for r in self.results]}


class _Context:
    """Lazily shared quantities for one structure."""

    def __init__(self, S: AlmostHermitianStructure, tol: float):
        self.S = S
        self.rep = CurvatureReport(S, strict=False)
        self.flags = condition_flags(S, EPS_ABS, self.rep)
        self.einstein = einstein_residuals(S, EPS_ABS, self.rep, self.flags)
        self.unimodular = validate_algebra(S.algebra).unimodular
        self.scale1 = algebra_scale(S)
        self.tol = tol
        self._cache: dict[str, object] = {}

    def memo(self, key: str, fn: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def weyl_DJ(self) -> np.ndarray:
        return self.memo("weyl_DJ", self.rep.weyl.J_derivative)

    @property
    def weyl_second(self) -> np.ndarray:
        """``Q[i, j] = D^W_i(D^W_j J) - D^W_j(D^W_i J) - D^W_{[e_i, e_j]} J``."""
        def build():
            G = self.rep.weyl.matrices
            DJ = self.weyl_DJ
            first = np.einsum("ika,jal->ijkl", G, DJ) - np.einsum("jka,ial->ijkl", DJ, G)
            return first - np.transpose(first, (1, 0, 2, 3)) - np.einsum("ijm,mkl->ijkl", self.S.algebra.c, DJ)
        return self.memo("weyl_second", build)

    @property
    def theta_sharp(self) -> np.ndarray:
        return self.rep.theta_sharp

    @property
    def lie_J(self) -> tuple[np.ndarray, np.ndarray]:
        """``(L_{theta#} J, L_{J theta#} J)`` as endomorphism tables."""
        def build():
            L, J = self.S.algebra, self.S.J
            return (lie_derivative(L, self.theta_sharp, J, (CONTRA, CO)),
                    lie_derivative(L, J @ self.theta_sharp, J, (CONTRA, CO)))
        return self.memo("lie_J", build)

    @property
    def theta_theta(self) -> np.ndarray:
        return np.outer(self.rep.theta, self.rep.theta)


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    level: int
    build: Callable[[_Context], list]
    hypotheses: tuple[str, ...] = ()
    description: str = ""


V2 = (CO, CO)
VR = (CO, CO, CONTRA, CO)
SCALAR = ()


def _id_A(c: _Context):
    r, S = c.rep, c.S
    return [(r.r_second_chern, [j_invariant_part(S, r.rwf),
                                0.5 * (r.delta_theta + r.theta_norm_sq) * S.F,
                                -0.25 * r.N_norm_sq * S.F], V2)]


def _id_B(c: _Context):
    r, S = c.rep, c.S
    return [(j_invariant_part(S, r.rwf) @ S.J,
             [symmetric_part(r.rho_star), j_invariant_part(S, symmetric_part(r.D_theta)),
              -0.25 * r.theta_norm_sq * S.g, 0.5 * j_invariant_part(S, c.theta_theta)], V2)]


def _id_C(c: _Context):
    r, S = c.rep, c.S
    return [(r.r_second_chern @ S.J,
             [j_invariant_part(S, r.ric_riemann), 0.25 * r.N_norm_sq * S.g,
              j_invariant_part(S, symmetric_part(r.D_theta)), 0.5 * j_invariant_part(S, c.theta_theta)], V2)]


def _id_D(c: _Context):
    r, S = c.rep, c.S
    DJ = c.weyl_DJ
    comm = np.einsum("ika,jal->ijkl", DJ, DJ) - np.einsum("jka,ial->ijkl", DJ, DJ)
    return [(r.R_chern,
             [r.R_weyl,
              -0.5 * np.einsum("ij,kl->ijkl", r.dJ_theta, S.J),
              -0.5 * np.einsum("ij,kl->ijkl", r.d_theta, np.eye(S.dim)),
              -0.5 * np.einsum("ijka,al->ijkl", c.weyl_second, S.J),
              0.25 * comm], VR)]


def _id_weyl_anti(c: _Context):
    R, J = c.rep.R_weyl, c.S.J
    anti = 0.5 * (R + np.einsum("ka,ijab,bl->ijkl", J, R, J))
    # the anticommuting part acts as 1/2 Q(X, Y) J, matching the four-slot relation
    return [(anti, [0.5 * np.einsum("ijka,al->ijkl", c.weyl_second, J)], VR)]


def _id_weyl_metric(c: _Context):
    S, R = c.S, c.rep.R_weyl
    low = np.einsum("ijkl,kw->ijlw", R, S.g)
    return [(low + np.transpose(low, (0, 1, 3, 2)), [np.einsum("ij,zw->ijzw", c.rep.d_theta, S.g)], (CO,) * 4)]


def _id_int_weyl(c: _Context):
    S = c.S
    lhs = np.einsum("zkx,km,my->zxy", c.weyl_DJ, S.g, S.J)
    rhs = -2.0 * np.einsum("xyk,kz->zxy", S.nijenhuis.N, S.g)
    return [(lhs, [rhs], (CO,) * 3)]


def _id_cycle_n(c: _Context):
    S = c.S
    low = np.einsum("xyk,kz->xyz", S.nijenhuis.N, S.g)
    total = low + np.transpose(low, (1, 2, 0)) + np.transpose(low, (2, 0, 1))
    return [(total, [], (CO,) * 3, [low])]


def _id_chern_weyl_bridge(c: _Context):
    r, S = c.rep, c.S
    theta = r.theta
    eye = np.eye(S.dim)
    # gamma[i, j, k]: e_k component of nabla_i e_j - D^W_i e_j
    t1 = 0.5 * np.einsum("i,kj->ijk", theta, eye)
    t2 = -0.5 * np.einsum("i,kj->ijk", theta @ S.J, S.J)
    t3 = 0.5 * np.einsum("ika,aj->ijk", c.weyl_DJ, S.J)
    return [(r.chern.gamma - r.weyl.gamma, [t1, t2, t3], (CO, CO, CONTRA))]


def _id_E(c: _Context):
    r, S = c.rep, c.S
    sc = r.scalars
    return [(symmetric_part(r.rho_star),
             [j_invariant_part(S, r.ric_riemann), (sc.s_star - sc.s_g) / 4.0 * S.g], V2)]


def _id_diff_sca(c: _Context):
    r = c.rep
    sc = r.scalars
    return [(np.array(sc.s_star - sc.s_g),
             [np.array(-2.0 * r.delta_theta), np.array(-r.theta_norm_sq), np.array(2.0 * r.N_norm_sq)], SCALAR)]


def _id_F(c: _Context):
    r, S = c.rep, c.S
    return [(r.rho_chern,
             [r.rwf, -r.dJ_theta, -S.J.T @ j_anti_invariant_part(S, r.d_theta), -r.nijenhuis_factor], V2)]


def _id_G(c: _Context):
    r, S = c.rep, c.S
    k = 0.25 * (2.0 * r.delta_theta + 2.0 * r.theta_norm_sq - r.N_norm_sq)
    return [(r.r_second_chern, [j_invariant_part(S, r.ric_bismut), k * S.F, r.nijenhuis_factor], V2)]


def _id_H(c: _Context):
    r, S = c.rep, c.S
    DN = covariant_derivative(r.levi_civita, S.nijenhuis.N, (CO, CO, CONTRA))
    trace = -np.einsum("axya->xy", DN)
    # both right-hand terms are evaluated on (JX, Y)
    return [(j_anti_invariant_part(S, r.rwf), [S.J.T @ trace, 1.5 * S.J.T @ r.n_theta], V2)]


def _id_I(c: _Context):
    r, S = c.rep, c.S
    LJ, _ = c.lie_J
    return [(r.dJ_theta,
             [-r.theta_norm_sq * S.F, wedge(r.theta, r.J_theta),
              2.0 * S.J.T @ symmetric_part(r.D_theta), LJ.T @ S.g], V2)]


def _id_J(c: _Context):
    r, S = c.rep, c.S
    _, LJJ = c.lie_J
    DJt = covariant_derivative(r.levi_civita, r.J_theta)
    return [(r.d_theta, [-2.0 * S.J.T @ symmetric_part(DJt), -LJJ.T @ S.g], V2)]


def _id_K(c: _Context):
    S = c.S
    LJ, LJJ = c.lie_J
    rhs = 4.0 * np.einsum("i,ijk->kj", c.theta_sharp, S.nijenhuis.N)
    return [(LJJ - S.J @ LJ, [rhs], (CONTRA, CO))]


def _id_L(c: _Context):
    r = c.rep
    sc = r.scalars
    return [(np.array(sc.s_W_trace),
             [np.array(sc.s_g), np.array(-3.0 * r.delta_theta), np.array(-1.5 * r.theta_norm_sq)], SCALAR)]


def _id_weyl_tilde(c: _Context):
    r = c.rep
    return [(r.ric_weyl_tilde, [r.ric_weyl, r.d_theta], V2)]


def _id_ricci_chern_bismut(c: _Context):
    r, S = c.rep, c.S
    return [(r.ric_bismut, [gauduchon_ricci(S, -1.0)], V2),
            (r.rho_chern, [gauduchon_ricci(S, 1.0)], V2)]


def _id_lee_routes(c: _Context):
    return [(c.rep.theta, [lee_form_codifferential(c.S)], (CO,))]


def _id_M(c: _Context):
    r, S = c.rep, c.S
    ts = c.theta_sharp
    low = np.einsum("yzk,kx->xyz", S.nijenhuis.N, S.g)  # low[x] = N_{e_x}
    gdn = np.array([form_inner(S, r.d_theta, low[x]) for x in range(S.dim)])
    return [(ts @ r.rho_star, [-0.5 * ts @ j_anti_invariant_part(S, r.d_theta), gdn], (CO,))]


def _id_N(c: _Context):
    r, S = c.rep, c.S
    return [(j_invariant_part(S, r.ric_riemann),
             [r.scalars.s_H / 4.0 * S.g, -0.25 * r.N_norm_sq * S.g, -0.5 * j_invariant_part(S, c.theta_theta)], V2)]


def _id_O(c: _Context):
    r = c.rep
    sc = r.scalars
    return [(np.array(sc.s_H), [np.array(2.0 * r.theta_norm_sq), np.array(-r.N_norm_sq)], SCALAR),
            (np.array(sc.s_W_trace), [np.array(-2.0 * r.N_norm_sq)], SCALAR),
            (np.array(sc.s_star), [np.array(0.5 * r.theta_norm_sq)], SCALAR)]


def _id_killing(c: _Context):
    return [(symmetric_part(c.rep.D_theta), [], V2, [c.rep.D_theta, c.theta_theta])]


def _id_ew(c: _Context):
    r, S = c.rep, c.S
    return [(r.ric_weyl, [r.scalars.s_W_trace / 4.0 * S.g, j_anti_invariant_part(S, r.ric_riemann),
                          0.5 * j_anti_invariant_part(S, c.theta_theta)], V2)]


def _id_chern_post(c: _Context):
    res = chern_residuals(c.rep.chern)
    return [(np.array(max(res.values())), [], SCALAR, [np.array(np.max(np.abs(c.rep.chern.gamma)))])]


def _id_weyl_post(c: _Context):
    res = weyl_residuals(c.rep.weyl)
    return [(np.array(max(res.values())), [], SCALAR, [np.array(np.max(np.abs(c.rep.weyl.gamma)))])]


def _id_closed(c: _Context):
    from .algebra import exterior_derivative

    L = c.S.algebra
    return [(exterior_derivative(L, c.rep.rho_chern), [], (CO,) * 3, [c.rep.rho_chern]),
            (exterior_derivative(L, c.rep.ric_bismut), [], (CO,) * 3, [c.rep.ric_bismut])]


def _id_symmetries(c: _Context):
    r, S = c.rep, c.S
    return [(r.r_second_chern, [j_invariant_part(S, r.r_second_chern)], V2),
            (r.rho_star, [S.J.T @ r.rho_star.T @ S.J], V2),
            (r.ric_weyl, [r.ric_weyl.T], V2)]


_SCE_HYPS = ("second_chern_einstein", "gauduchon", "sym_j_minus_vanishes", "unimodular")

CATALOG: tuple[IdentitySpec, ...] = (
    IdentitySpec("I-A", 2, _id_A, description="second Chern-Ricci form through the Weyl curvature form"),
    IdentitySpec("I-B", 2, _id_B, description="J-invariant Weyl curvature form against the star-Ricci tensor"),
    IdentitySpec("I-C", 2, _id_C, description="second Chern-Ricci form against the Riemannian Ricci tensor"),
    IdentitySpec("I-D", 2, _id_D, description="four-slot Chern/Weyl curvature relation"),
    IdentitySpec("I-E", 2, _id_E, description="star-Ricci minus Ricci is a multiple of g"),
    IdentitySpec("I-F", 2, _id_F, description="first Chern-Ricci form through the Weyl curvature form"),
    IdentitySpec("I-G", 2, _id_G, description="second Chern-Ricci form through the Bismut-Ricci form"),
    IdentitySpec("I-H", 2, _id_H, description="J-anti-invariant Weyl curvature form via the Nijenhuis tensor"),
    IdentitySpec("I-I", 2, _id_I, description="expansion of dJ theta"),
    IdentitySpec("I-J", 2, _id_J, description="expansion of d theta"),
    IdentitySpec("I-K", 2, _id_K, description="Lie derivatives of J along theta# and J theta#"),
    IdentitySpec("I-L", 2, _id_L, description="conformal scalar curvature, trace route"),
    IdentitySpec("I-M", 2, _id_M, ("lee_killing", "gauduchon"),
                 "star-Ricci along theta# for Killing theta#"),
    IdentitySpec("I-N", 2, _id_N, _SCE_HYPS, "J-invariant Ricci tensor of a second-Chern-Einstein structure"),
    IdentitySpec("I-O", 2, _id_O, _SCE_HYPS + ("lcs", "lee_nonzero"), "scalar relations with nonzero Lee form"),
    IdentitySpec("killing", 2, _id_killing, _SCE_HYPS, "theta# is Killing"),
    IdentitySpec("E-W", 2, _id_ew, _SCE_HYPS, "Weyl-Ricci tensor splitting"),
    IdentitySpec("int_weyl", 1, _id_int_weyl, description="Weyl derivative of J through N"),
    IdentitySpec("cycle_n", 1, _id_cycle_n, description="cyclic sum of the lowered Nijenhuis tensor"),
    IdentitySpec("chern_weyl_bridge", 1, _id_chern_weyl_bridge, description="Chern minus Weyl connection"),
    IdentitySpec("weyl_anti", 2, _id_weyl_anti, description="J-anticommuting part of the Weyl curvature"),
    IdentitySpec("weyl_metric", 2, _id_weyl_metric, description="symmetric part of the lowered Weyl curvature"),
    IdentitySpec("weyl_tilde", 2, _id_weyl_tilde, description="antisymmetric part of the second Weyl-Ricci tensor"),
    IdentitySpec("conformal_sca", 2, _id_L, description="conformal scalar curvature"),
    IdentitySpec("diff_ricci", 2, _id_E, description="star-Ricci minus Ricci"),
    IdentitySpec("diff_sca", 2, _id_diff_sca, description="star-scalar minus scalar curvature"),
    IdentitySpec("ricci_chern_bismut", 2, _id_ricci_chern_bismut,
                 description="Bismut and Chern Ricci forms against the Lie-group trace formula"),
    IdentitySpec("lee_routes", 1, _id_lee_routes, description="Lee form from dF and from J delta F"),
    IdentitySpec("ricci_closed", 2, _id_closed, description="first Chern and Bismut Ricci forms are closed"),
    IdentitySpec("ricci_symmetries", 2, _id_symmetries, description="symmetries of r, rho*, Ric^W"),
    IdentitySpec("chern_postconditions", 1, _id_chern_post, description="Chern connection is Hermitian"),
    IdentitySpec("weyl_postconditions", 1, _id_weyl_post, description="Weyl connection is torsion free"),
)

IDENTITY_IDS = tuple(spec.id for spec in CATALOG)
_BY_ID = {spec.id: spec for spec in CATALOG}


def _hypothesis_values(c: _Context, names: Iterable[str]) -> dict[str, bool]:
    vals = {}
    flags = c.flags.values()
    for name in names:
        if name in flags:
            vals[name] = flags[name]
        elif name == "second_chern_einstein":
            vals[name] = c.einstein.second_chern_einstein
        elif name == "unimodular":
            vals[name] = c.unimodular
        elif name == "lee_nonzero":
            vals[name] = onorm(c.S, c.rep.theta) > EPS_ABS
        else:
            raise StructuralError(f"unknown hypothesis {name!r}")
    return vals


def _relative_residual(c: _Context, level: int, groups: list) -> float:
    worst = 0.0
    floor = c.scale1 ** level
    for group in groups:
        lhs, rhs, var = group[:3]
        refs = group[3] if len(group) > 3 else []
        lhs = np.asarray(lhs, dtype=float)
        total = np.array(lhs, copy=True)
        scale = max([onorm(c.S, lhs, var)] + [onorm(c.S, ref) for ref in refs])
        for t in rhs:
            t = np.asarray(t, dtype=float)
            total = total - t
            scale = max(scale, onorm(c.S, t, var))
        scale = max(scale, floor)
        diff = onorm(c.S, total, var)
        worst = max(worst, diff / scale if scale > 0 else diff)
    return worst


def evaluate_identity(c: _Context, spec: IdentitySpec) -> IdentityResult:
    hyps = _hypothesis_values(c, spec.hypotheses)
    if not all(hyps.values()):
        missing = ", ".join(k for k, v in hyps.items() if not v)
        return IdentityResult(spec.id, None, True, True, hyps, f"hypotheses not met: {missing}")
    try:
        res = _relative_residual(c, spec.level, spec.build(c))
    except (FloatingPointError, np.linalg.LinAlgError) as exc:  # pragma: no cover - defensive
        return IdentityResult(spec.id, float("inf"), False, False, hyps, f"evaluation failed: {exc}")
    ok = bool(np.isfinite(res) and res <= c.tol)
    return IdentityResult(spec.id, float(res), False, ok, hyps, None)


def run_identity_suite(S: AlmostHermitianStructure, selection: Sequence[str] | None = None,
                       tolerance: float = EPS_REL) -> SuiteReport:
    """Evaluate the selected identities (all by default); unknown ids raise ``StructuralError``."""
    ids = list(selection) if selection else list(IDENTITY_IDS)
    unknown = [i for i in ids if i not in _BY_ID]
    if unknown:
        raise StructuralError(f"unknown identity id(s): {', '.join(unknown)}")
    c = _Context(S, tolerance)
    return SuiteReport(tuple(evaluate_identity(c, _BY_ID[i]) for i in ids), tolerance)
