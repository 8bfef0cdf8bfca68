"""Ricci-type forms and scalar curvatures of a left-invariant almost-Hermitian structure.

Traces over a J-adapted orthonormal frame are written as contractions with
``g^{-1}`` (for ``sum_i T(f_i, f_i)``) and ``K = g^{-1} J^T`` (for ``sum_i T(f_i, J f_i)``),
which are frame-independent; ``frame_trace`` does the explicit sum for spot checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import exterior_derivative, wedge
from .connections import chern_connection, covariant_derivative, levi_civita, weyl_connection
from .structure import (
    AlmostHermitianStructure,
    codifferential,
    form_J,
    form_inner,
    j_anti_invariant_part,
    j_invariant_part,
    n_theta,
    symmetric_part,
)


def _K(S: AlmostHermitianStructure) -> np.ndarray:
    return S.ginv @ S.J.T


def frame_trace(S: AlmostHermitianStructure, psi, twisted: bool = False) -> float:
    """``sum_i psi(f_i, f_i)`` (or ``psi(f_i, J f_i)``) over the adapted frame."""
    P = S.frame
    Q = S.J @ P if twisted else P
    return float(sum(P[:, i] @ psi @ Q[:, i] for i in range(S.dim)))


def ricci_form_first(S: AlmostHermitianStructure, R: np.ndarray) -> np.ndarray:
    """``(X, Y) -> 1/2 sum_i g(R_{X,Y} f_i, J f_i)``."""
    P = S.g @ S.J @ S.ginv
    return 0.5 * np.einsum("ijmk,mk->ij", R, P)


def ricci_form_second(S: AlmostHermitianStructure, R: np.ndarray) -> np.ndarray:
    """``R(F)(X, Y) = 1/2 sum_i g(R_{f_i, J f_i} X, Y)``."""
    return 0.5 * np.einsum("ab,abkx,ky->xy", _K(S), R, S.g)


def ricci_contracted(S: AlmostHermitianStructure, R: np.ndarray) -> np.ndarray:
    """``(X, Y) -> sum_i g(R_{f_i, X} f_i, Y)``."""
    return np.einsum("ab,axkb,ky->xy", S.ginv, R, S.g)


def ricci_tilde(S: AlmostHermitianStructure, R: np.ndarray) -> np.ndarray:
    """``(X, Y) -> sum_i g(R_{X, f_i} Y, f_i)``."""
    return np.einsum("ab,xaky,kb->xy", S.ginv, R, S.g)


def nijenhuis_factor(S: AlmostHermitianStructure) -> np.ndarray:
    """``1/2 sum_{i,j} N(f_i, f_j)^flat ^ (J N(f_i, f_j))^flat``."""
    N = S.nijenhuis.N
    u = np.einsum("abk,kx->abx", N, S.g)
    w = np.einsum("abk,mk,mx->abx", N, S.J, S.g)
    t = np.einsum("ac,bd,abx,cdy->xy", S.ginv, S.ginv, u, w)
    return 0.5 * (t - t.T)


def gauduchon_ricci(S: AlmostHermitianStructure, t: float) -> np.ndarray:
    """First Ricci form of the canonical connection with parameter ``t`` by the Lie-group trace formula

    ``Ric^(t)(X,Y) = -1/2 { tr(ad_[X,Y] J) - t tr ad_{J[X,Y]} + (t-1) <F, d [X,Y]^flat> }``.
    """
    L = S.algebra
    c = L.c
    tr_adJ = np.einsum("mjk,jk->m", c, S.J)             # tr(ad_{e_m} J)
    tr_ad = np.einsum("mjj->m", c)                      # tr ad_{e_m}
    d_flat = np.array([form_inner(S, S.F, exterior_derivative(L, S.g[:, m])) for m in range(S.dim)])
    per_m = tr_adJ - t * (S.J.T @ tr_ad) + (t - 1.0) * d_flat
    return -0.5 * np.einsum("ijm,m->ij", c, per_m)


@dataclass(frozen=True, eq=False)
class Scalars:
    s_H: float
    s_g: float
    s_W: float
    s_star: float
    s_W_trace: float

    def as_dict(self) -> dict[str, float]:
        return {"s_H": self.s_H, "s_g": self.s_g, "s_W": self.s_W, "s_star": self.s_star}


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    """Every Ricci-type tensor and scalar of one structure, computed on demand."""

    S: AlmostHermitianStructure = field(repr=False)
    strict: bool = True

    # -- building blocks
    @cached_property
    def levi_civita(self):
        return levi_civita(self.S)

    @cached_property
    def chern(self):
        return chern_connection(self.S, strict=self.strict)

    @cached_property
    def weyl(self):
        return weyl_connection(self.S, strict=self.strict)

    @cached_property
    def R_chern(self) -> np.ndarray:
        return self.chern.curvature

    @cached_property
    def R_weyl(self) -> np.ndarray:
        return self.weyl.curvature

    @cached_property
    def R_riemann(self) -> np.ndarray:
        return self.levi_civita.curvature

    @property
    def theta(self) -> np.ndarray:
        return self.S.theta

    @cached_property
    def theta_sharp(self) -> np.ndarray:
        return self.S.sharp(self.theta)

    @cached_property
    def J_theta(self) -> np.ndarray:
        return form_J(self.S, self.theta)

    @cached_property
    def d_theta(self) -> np.ndarray:
        return exterior_derivative(self.S.algebra, self.theta)

    @cached_property
    def dJ_theta(self) -> np.ndarray:
        return exterior_derivative(self.S.algebra, self.J_theta)

    @cached_property
    def delta_theta(self) -> float:
        return float(codifferential(self.S, self.theta))

    @cached_property
    def theta_norm_sq(self) -> float:
        return float(self.theta @ self.theta_sharp)

    @property
    def N_norm_sq(self) -> float:
        return self.S.nijenhuis.norm_sq

    @cached_property
    def D_theta(self) -> np.ndarray:
        """``(X, Y) -> (D^g_X theta)(Y)``."""
        return covariant_derivative(self.levi_civita, self.theta)

    @cached_property
    def theta_theta_Jplus(self) -> np.ndarray:
        return j_invariant_part(self.S, np.outer(self.theta, self.theta))

    @cached_property
    def n_theta(self) -> np.ndarray:
        return n_theta(self.S)

    # -- Ricci-type forms
    @cached_property
    def rho_chern(self) -> np.ndarray:
        return ricci_form_first(self.S, self.R_chern)

    @cached_property
    def r_second_chern(self) -> np.ndarray:
        return ricci_form_second(self.S, self.R_chern)

    @cached_property
    def ric_bismut(self) -> np.ndarray:
        return self.rho_chern + self.dJ_theta

    @cached_property
    def rwf(self) -> np.ndarray:
        return ricci_form_second(self.S, self.R_weyl)

    @cached_property
    def ric_weyl(self) -> np.ndarray:
        return ricci_contracted(self.S, self.R_weyl)

    @cached_property
    def ric_weyl_tilde(self) -> np.ndarray:
        return ricci_tilde(self.S, self.R_weyl)

    @cached_property
    def ric_riemann(self) -> np.ndarray:
        return ricci_contracted(self.S, self.R_riemann)

    @cached_property
    def rho_star(self) -> np.ndarray:
        """``rho*(X, Y) = R^g(F)(X, JY)``."""
        return ricci_form_second(self.S, self.R_riemann) @ self.S.J

    @cached_property
    def nijenhuis_factor(self) -> np.ndarray:
        return nijenhuis_factor(self.S)

    # -- scalars
    @cached_property
    def scalars(self) -> Scalars:
        S = self.S
        K = _K(S)
        s_H = float(np.sum(K * self.r_second_chern))
        s_g = float(np.sum(S.ginv * self.ric_riemann))
        s_star = float(np.sum(S.ginv * self.rho_star))
        s_W = s_g - 3.0 * self.delta_theta - 1.5 * self.theta_norm_sq
        s_W_trace = float(np.sum(S.ginv * self.ric_weyl))
        return Scalars(s_H, s_g, s_W, s_star, s_W_trace)

    def as_dict(self) -> dict[str, np.ndarray | float]:
        sc = self.scalars
        return {
            "rho_chern": self.rho_chern,
            "r_second_chern": self.r_second_chern,
            "ric_bismut": self.ric_bismut,
            "rwf": self.rwf,
            "ric_weyl": self.ric_weyl,
            "ric_weyl_tilde": self.ric_weyl_tilde,
            "ric_riemann": self.ric_riemann,
            "rho_star": self.rho_star,
            "nijenhuis_factor": self.nijenhuis_factor,
            **sc.as_dict(),
        }


def curvature_report(S: AlmostHermitianStructure) -> CurvatureReport:
    cached = S.__dict__.get("_report")
    if cached is None:
        cached = CurvatureReport(S)
        S.__dict__["_report"] = cached
    return cached


# thin functional surface, one per quantity

def first_chern_ricci(S: AlmostHermitianStructure) -> np.ndarray:
    return curvature_report(S).rho_chern


def second_chern_ricci(S: AlmostHermitianStructure) -> np.ndarray:
    return curvature_report(S).r_second_chern


def bismut_ricci(S: AlmostHermitianStructure) -> np.ndarray:
    """``Ric^B = rho^nabla + dJ theta``."""
    return curvature_report(S).ric_bismut


def weyl_curvature_form(S: AlmostHermitianStructure) -> np.ndarray:
    return curvature_report(S).rwf


def weyl_ricci(S: AlmostHermitianStructure) -> tuple[np.ndarray, np.ndarray]:
    rep = curvature_report(S)
    return rep.ric_weyl, rep.ric_weyl_tilde


def riemann_ricci_and_star(S: AlmostHermitianStructure) -> tuple[np.ndarray, np.ndarray]:
    rep = curvature_report(S)
    return rep.ric_riemann, rep.rho_star


def scalar_curvatures(S: AlmostHermitianStructure) -> Scalars:
    return curvature_report(S).scalars


def d_theta_sym_parts(S: AlmostHermitianStructure) -> dict[str, np.ndarray]:
    """Symmetric J-invariant and J-anti-invariant parts of ``D^g theta``."""
    Dt = symmetric_part(curvature_report(S).D_theta)
    return {"sym,J+": j_invariant_part(S, Dt), "sym,J-": j_anti_invariant_part(S, Dt)}


def wedge1(a, b) -> np.ndarray:
    return wedge(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
