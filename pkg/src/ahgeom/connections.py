"""Levi-Civita, Chern and canonical Weyl connections of a left-invariant structure.

A connection is a table ``gamma[i, j, k] = Gamma^k_{ij}`` with
``nabla_{e_i} e_j = sum_k Gamma^k_{ij} e_k``.  Since all fields are left-invariant,
``nabla_X`` acts on invariant tensors as a linear derivation and curvature reduces
to matrix algebra:

    R_{X,Y} = nabla_{[X,Y]} - [nabla_X, nabla_Y]

stored as ``R[i, j, k, l]``, the ``e_k`` component of ``R_{e_i, e_j} e_l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import CO, CONTRA, EPS_ABS, InvariantTensor, derivation_action
from .errors import ConventionError
from .structure import AlmostHermitianStructure

LEVI_CIVITA = "levi_civita"
CHERN = "chern"
WEYL = "weyl"


@dataclass(frozen=True, eq=False)
class Connection:
    kind: str
    gamma: np.ndarray = field(repr=False)
    owner: AlmostHermitianStructure = field(repr=False)

    @cached_property
    def matrices(self) -> np.ndarray:
        """``matrices[i][k, j] = Gamma^k_{ij}``: the endomorphism ``nabla_{e_i}``."""
        return np.transpose(self.gamma, (0, 2, 1))

    def along(self, X) -> np.ndarray:
        return np.tensordot(np.asarray(X, dtype=float), self.matrices, axes=(0, 0))

    def apply(self, X, Y) -> np.ndarray:
        return self.along(X) @ np.asarray(Y, dtype=float)

    @cached_property
    def torsion(self) -> np.ndarray:
        """``T[i, j, k]``: ``e_k`` component of ``nabla_i e_j - nabla_j e_i - [e_i, e_j]``."""
        return self.gamma - np.transpose(self.gamma, (1, 0, 2)) - self.owner.algebra.c

    @cached_property
    def curvature(self) -> np.ndarray:
        return curvature(self)

    def metric_derivative(self) -> np.ndarray:
        """``(nabla_{e_i} g)(e_j, e_l)``."""
        return covariant_derivative(self, self.owner.g)

    def J_derivative(self) -> np.ndarray:
        """``(nabla_{e_i} J)`` as matrices."""
        return covariant_derivative(self, self.owner.J, (CONTRA, CO))


def _lowered_levi_civita(S: AlmostHermitianStructure) -> np.ndarray:
    # 2 g(D_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)
    C = np.einsum("ijk,kl->ijl", S.algebra.c, S.g)
    return 0.5 * (C - np.einsum("jli->ijl", C) + np.einsum("lij->ijl", C))


def levi_civita(S: AlmostHermitianStructure) -> Connection:
    cached = S.__dict__.get("_levi_civita")
    if cached is not None:
        return cached
    gamma = np.einsum("ijl,kl->ijk", _lowered_levi_civita(S), S.ginv)
    conn = Connection(LEVI_CIVITA, gamma, S)
    S.__dict__["_levi_civita"] = conn
    return conn


def _lee_terms(S: AlmostHermitianStructure, use_jx: bool) -> np.ndarray:
    """Common first-order corrections built from theta.

    Weyl:  -1/2 theta(X) Y - 1/2 theta(Y) X + 1/2 g(X, Y) theta#
    Chern: -1/2 theta(JX) JY - 1/2 theta(Y) X + 1/2 g(X, Y) theta#
    """
    m = S.dim
    theta = S.theta
    tsharp = S.sharp(theta)
    eye = np.eye(m)
    if use_jx:
        first = -0.5 * np.einsum("i,kj->ijk", theta @ S.J, S.J)
    else:
        first = -0.5 * np.einsum("i,jk->ijk", theta, eye)
    second = -0.5 * np.einsum("j,ik->ijk", theta, eye)
    third = 0.5 * np.einsum("ij,k->ijk", S.g, tsharp)
    return first + second + third


def _checked(S: AlmostHermitianStructure, key: str, conn: Connection, residuals, tol: float,
             strict: bool) -> Connection:
    if not strict:
        return conn
    res = residuals(conn)
    scale = max(1.0, float(np.max(np.abs(conn.gamma))))
    if max(res.values()) > tol * scale:
        raise ConventionError(f"{conn.kind} connection", res)
    S.__dict__[key] = conn
    return conn


def chern_connection(S: AlmostHermitianStructure, tol: float = 1e-8, strict: bool = True) -> Connection:
    """Chern connection; the Nijenhuis term ``g(X, N(., Y))`` is read as the vector
    ``W`` with ``g(W, Z) = g(X, N(Z, Y))``.

    With ``strict`` (the default) the postconditions are enforced and the result is
    cached on ``S``; ``strict=False`` returns the raw formula unchecked and uncached.
    """
    cached = S.__dict__.get("_chern")
    if cached is not None:
        return cached
    D = levi_civita(S)
    N = S.nijenhuis.N
    W = np.einsum("kl,im,ljm->ijk", S.ginv, S.g, N)
    gamma = D.gamma + _lee_terms(S, use_jx=True) + W
    return _checked(S, "_chern", Connection(CHERN, gamma, S), chern_residuals, tol, strict)


def weyl_connection(S: AlmostHermitianStructure, tol: float = 1e-8, strict: bool = True) -> Connection:
    cached = S.__dict__.get("_weyl")
    if cached is not None:
        return cached
    gamma = levi_civita(S).gamma + _lee_terms(S, use_jx=False)
    return _checked(S, "_weyl", Connection(WEYL, gamma, S), weyl_residuals, tol, strict)


def levi_civita_residuals(conn: Connection) -> dict[str, float]:
    return {
        "torsion": float(np.max(np.abs(conn.torsion))),
        "metric": float(np.max(np.abs(conn.metric_derivative()))),
    }


def chern_residuals(conn: Connection) -> dict[str, float]:
    S = conn.owner
    T = conn.torsion
    # (1,1)-part of the torsion: T(X, Y) + T(JX, JY)
    TJ = np.einsum("ai,bj,abk->ijk", S.J, S.J, T)
    return {
        "metric": float(np.max(np.abs(conn.metric_derivative()))),
        "J": float(np.max(np.abs(conn.J_derivative()))),
        "torsion_11": float(np.max(np.abs(T + TJ))),
    }


def weyl_residuals(conn: Connection) -> dict[str, float]:
    S = conn.owner
    target = np.einsum("i,jl->ijl", S.theta, S.g)
    return {
        "torsion": float(np.max(np.abs(conn.torsion))),
        "metric_theta": float(np.max(np.abs(conn.metric_derivative() - target))),
    }


def curvature(conn: Connection) -> np.ndarray:
    G = conn.matrices
    c = conn.owner.algebra.c
    first = np.einsum("ijm,mkl->ijkl", c, G)
    comm = np.einsum("ika,jal->ijkl", G, G) - np.einsum("jka,ial->ijkl", G, G)
    return first - comm


def curvature_apply(R: np.ndarray, X, Y, Z) -> np.ndarray:
    return np.einsum("i,j,l,ijkl->k", X, Y, Z, R)


def covariant_derivative(conn: Connection, T, variance: Sequence[str] | None = None):
    """``(nabla T)[a, ...] = (nabla_{e_a} T)[...]``; the new covariant slot comes first.

    Bare arrays default to fully covariant.  An ``InvariantTensor`` comes back as one.
    """
    if isinstance(T, InvariantTensor):
        comps = np.stack([derivation_action(G, T.components, T.variance) for G in conn.matrices])
        return InvariantTensor((CO,) + T.variance, comps)
    T = np.asarray(T, dtype=float)
    var = tuple(variance) if variance is not None else (CO,) * T.ndim
    return np.stack([derivation_action(G, T, var) for G in conn.matrices])


def is_valid(conn: Connection, tol: float = EPS_ABS) -> bool:
    check = {LEVI_CIVITA: levi_civita_residuals, CHERN: chern_residuals, WEYL: weyl_residuals}[conn.kind]
    return max(check(conn).values()) <= tol
