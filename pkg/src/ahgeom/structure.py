"""Almost-Hermitian structures ``(g, J)`` on a Lie algebra and the tensors they determine.

Conventions used throughout the package:

* ``J[i, j]`` is the ``e_i`` component of ``J e_j``; ``g[i, j] = g(e_i, e_j)``.
* ``F(X, Y) = g(JX, Y)``; the orientation is the one with ``F ^ F = 2 v_g`` (dimension 4),
  i.e. the one in which adapted frames ``(f1, J f1, f3, J f3)`` are positive.
* ``J`` acts on k-forms by ``(J alpha)(X_1..X_k) = (-1)^k alpha(J X_1, .., J X_k)``.
* The inner product of k-forms sums over increasing index tuples of an orthonormal
  frame, so ``<F, F> = n`` in dimension ``2n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import EPS_ABS, LieAlgebra, alternate, exterior_derivative, wedge
from .errors import StructuralError, ValidationError


@dataclass(frozen=True, eq=False)
class AlmostHermitianStructure:
    algebra: LieAlgebra
    g: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @cached_property
    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    @cached_property
    def F(self) -> np.ndarray:
        return self.J.T @ self.g

    @cached_property
    def frame(self) -> np.ndarray:
        """Adapted orthonormal frame as columns ``(f1, J f1, f3, J f3, ...)``."""
        return adapted_frame(self.g, self.J)

    @cached_property
    def orientation(self) -> int:
        return 1 if np.linalg.det(self.frame) > 0 else -1

    @cached_property
    def volume(self) -> np.ndarray:
        """Riemannian volume form in the J-orientation."""
        return self.orientation * math.sqrt(np.linalg.det(self.g)) * levi_civita_symbol(self.dim)

    @cached_property
    def lee(self) -> "LeeForm":
        return lee_form(self)

    @property
    def theta(self) -> np.ndarray:
        return self.lee.theta

    @cached_property
    def nijenhuis(self) -> "NijenhuisTensor":
        return nijenhuis(self)

    # small conveniences used everywhere downstream
    def sharp(self, alpha) -> np.ndarray:
        return self.ginv @ np.asarray(alpha, dtype=float)

    def flat(self, X) -> np.ndarray:
        return self.g @ np.asarray(X, dtype=float)

    def inner(self, a, b) -> float:
        return form_inner(self, a, b)

    def norm_sq(self, a) -> float:
        return form_inner(self, a, a)


def _check_square(name: str, M: np.ndarray, dim: int) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape != (dim, dim):
        raise StructuralError(f"{name} must have shape ({dim}, {dim}), got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise StructuralError(f"{name} must be finite")
    return M


def build_structure(L: LieAlgebra, g, J, name: str = "", tol: float = EPS_ABS) -> AlmostHermitianStructure:
    """Validate ``(g, J)`` over ``L`` and freeze it.

    Raises ``ValidationError`` naming the first violated invariant.
    """
    m = L.dim
    if m % 2:
        raise StructuralError(f"almost-Hermitian structures need even dimension, got {m}")
    g = _check_square("metric", g, m)
    J = _check_square("J", J, m)
    scale = max(1.0, float(np.max(np.abs(g))))
    sym = float(np.max(np.abs(g - g.T)))
    if sym > tol * scale:
        raise ValidationError("metric symmetry", sym)
    eig_min = float(np.min(np.linalg.eigvalsh(0.5 * (g + g.T))))
    if eig_min <= 0:
        raise ValidationError("metric positive-definiteness", -eig_min)
    jsq = float(np.max(np.abs(J @ J + np.eye(m))))
    if jsq > tol:
        raise ValidationError("J^2 = -Id", jsq)
    compat = float(np.max(np.abs(J.T @ g @ J - g)))
    if compat > tol * scale:
        raise ValidationError("g(J.,J.) = g", compat)
    g = np.array(0.5 * (g + g.T))
    J = np.array(J)
    g.setflags(write=False)
    J.setflags(write=False)
    return AlmostHermitianStructure(L, g, J, name or L.name)


def adapted_frame(g: np.ndarray, J: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Greedy Gram-Schmidt over J-invariant planes, in basis order."""
    m = g.shape[0]
    cols: list[np.ndarray] = []
    for k in range(m):
        if len(cols) == m:
            break
        v = np.eye(m)[:, k]
        for f in cols:
            v = v - (f @ g @ v) * f
        nrm = math.sqrt(max(float(v @ g @ v), 0.0))
        if nrm <= tol:
            continue
        f = v / nrm
        cols.extend([f, J @ f])
    return np.column_stack(cols)


def levi_civita_symbol(m: int) -> np.ndarray:
    from .algebra import _permutations

    eps = np.zeros((m,) * m)
    for p, s in _permutations(m):
        eps[p] = s
    return eps


def form_inner(S: AlmostHermitianStructure, a, b) -> float:
    """``<a, b>`` for k-forms (sum over increasing tuples of an orthonormal frame)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise StructuralError("forms of different degree")
    k = a.ndim
    raised = b
    for s in range(k):
        raised = np.moveaxis(np.tensordot(S.ginv, raised, axes=(1, s)), 0, s)
    return float(np.sum(a * raised)) / math.factorial(k)


def tensor_inner(S: AlmostHermitianStructure, a, b) -> float:
    """Full contraction ``g^{..} a_{..} b_{..}`` of covariant tensors (no 1/k! factor)."""
    a = np.asarray(a, dtype=float)
    raised = np.asarray(b, dtype=float)
    for s in range(raised.ndim):
        raised = np.moveaxis(np.tensordot(S.ginv, raised, axes=(1, s)), 0, s)
    return float(np.sum(a * raised))


# ---------------------------------------------------------------- Lee form

@dataclass(frozen=True, eq=False)
class LeeForm:
    theta: np.ndarray
    residual: float


def _lee_operator(S: AlmostHermitianStructure) -> np.ndarray:
    """Matrix of ``theta -> theta ^ F^{n-1} / (n-1)`` on the coordinate basis of 1-forms."""
    m, n = S.dim, S.dim // 2
    Fpow = S.F
    for _ in range(n - 2):
        Fpow = wedge(Fpow, S.F)
    cols = [wedge(np.eye(m)[i], Fpow).ravel() / (n - 1) for i in range(m)]
    return np.column_stack(cols)


def lee_form(S: AlmostHermitianStructure) -> LeeForm:
    """Least-squares solution of ``d(F^{n-1}) = theta ^ F^{n-1} / (n-1)`` (``dF = theta ^ F`` in dim 4)."""
    m, n = S.dim, S.dim // 2
    if n < 2:
        return LeeForm(np.zeros(m), 0.0)
    Fpow = S.F
    for _ in range(n - 2):
        Fpow = wedge(Fpow, S.F)
    rhs = exterior_derivative(S.algebra, Fpow).ravel()
    A = _lee_operator(S)
    theta, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    res = float(np.linalg.norm(A @ theta - rhs))
    theta = np.array(theta)
    theta.setflags(write=False)
    return LeeForm(theta, res)


def lee_form_codifferential(S: AlmostHermitianStructure) -> np.ndarray:
    """Independent route ``theta = J delta F``."""
    return form_J(S, codifferential(S, S.F))


# ---------------------------------------------------------------- Nijenhuis tensor

@dataclass(frozen=True, eq=False)
class NijenhuisTensor:
    """``N[a, b, k]``: the ``e_k`` component of ``N(e_a, e_b)``."""

    N: np.ndarray
    norm_sq: float

    @property
    def integrable(self) -> bool:
        return self.norm_sq <= EPS_ABS

    def __call__(self, X, Y) -> np.ndarray:
        return np.einsum("a,b,abk->k", X, Y, self.N)


def nijenhuis_components(L: LieAlgebra, J: np.ndarray) -> np.ndarray:
    c = L.c
    JJ = np.einsum("ia,jb,ijk->abk", J, J, c)            # [Je_a, Je_b]
    J1 = np.einsum("km,ia,ibm->abk", J, J, c)            # J[Je_a, e_b]
    J2 = np.einsum("km,jb,ajm->abk", J, J, c)            # J[e_a, Je_b]
    return 0.25 * (JJ - c - J1 - J2)


def nijenhuis(S: AlmostHermitianStructure) -> NijenhuisTensor:
    N = nijenhuis_components(S.algebra, S.J)
    nsq = float(np.einsum("ai,bj,abk,ijl,kl->", S.ginv, S.ginv, N, N, S.g))
    N.setflags(write=False)
    return NijenhuisTensor(N, nsq)


def nijenhuis_norm_sq_frame(S: AlmostHermitianStructure) -> float:
    """``sum_{i,j} |N(f_i, f_j)|^2`` by explicit summation over the adapted frame."""
    P = S.frame
    N = S.nijenhuis
    total = 0.0
    for i in range(S.dim):
        for j in range(S.dim):
            w = N(P[:, i], P[:, j])
            total += float(w @ S.g @ w)
    return total


def n_theta(S: AlmostHermitianStructure) -> np.ndarray:
    """``N_{theta#}(X, Y) = theta(N(X, Y))``."""
    return np.einsum("abk,k->ab", S.nijenhuis.N, S.theta)


def n_vector_form(S: AlmostHermitianStructure, X) -> np.ndarray:
    """``N_X(Y, Z) = g(N(Y, Z), X)``."""
    return np.einsum("abk,kl,l->ab", S.nijenhuis.N, S.g, np.asarray(X, dtype=float))


# ---------------------------------------------------------------- Hodge star, codifferential

def hodge_star(S: AlmostHermitianStructure, alpha) -> np.ndarray:
    """``a ^ *b = <a, b> v_g`` in the J-orientation."""
    alpha = np.asarray(alpha, dtype=float)
    k, m = alpha.ndim, S.dim
    if k > m or (k and alpha.shape != (m,) * k):
        raise StructuralError(f"unsupported form of shape {alpha.shape} in dim {m}")
    raised = alpha
    for s in range(k):
        raised = np.moveaxis(np.tensordot(S.ginv, raised, axes=(1, s)), 0, s)
    axes = list(range(k))
    return np.tensordot(raised, S.volume, axes=(axes, axes)) / math.factorial(k)


def codifferential(S: AlmostHermitianStructure, alpha) -> np.ndarray:
    """``delta alpha = -sum_i iota_{f_i} D^g_{f_i} alpha`` over an orthonormal frame."""
    from .connections import covariant_derivative, levi_civita

    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim == 0:
        return np.zeros(())
    D = covariant_derivative(levi_civita(S), alpha)  # D[b, a, ...] = (D_{e_b} alpha)(e_a, ...)
    return -np.einsum("ab,ba...->...", S.ginv, D)


# ---------------------------------------------------------------- decompositions and J action

def j_invariant_part(S: AlmostHermitianStructure, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    return 0.5 * (psi + S.J.T @ psi @ S.J)


def j_anti_invariant_part(S: AlmostHermitianStructure, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    return 0.5 * (psi - S.J.T @ psi @ S.J)


def symmetric_part(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    return 0.5 * (psi + psi.T)


def antisymmetric_part(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    return 0.5 * (psi - psi.T)


def decompose_2tensor(S: AlmostHermitianStructure, psi) -> dict[str, np.ndarray]:
    """J-invariant / J-anti-invariant and symmetric / antisymmetric parts, plus their products."""
    psi = np.asarray(psi, dtype=float)
    plus, minus = j_invariant_part(S, psi), j_anti_invariant_part(S, psi)
    return {
        "J+": plus,
        "J-": minus,
        "sym": symmetric_part(psi),
        "anti": antisymmetric_part(psi),
        "sym,J+": symmetric_part(plus),
        "sym,J-": symmetric_part(minus),
        "anti,J+": antisymmetric_part(plus),
        "anti,J-": antisymmetric_part(minus),
    }


def compose_J(S: AlmostHermitianStructure, psi) -> np.ndarray:
    """``psi(J., .)``."""
    return S.J.T @ np.asarray(psi, dtype=float)


def endomorphism_to_bilinear(S: AlmostHermitianStructure, E) -> np.ndarray:
    """``(X, Y) -> g(E X, Y)``."""
    return np.asarray(E, dtype=float).T @ S.g


def form_J(S: AlmostHermitianStructure, alpha) -> np.ndarray:
    """``(J alpha)(X_1..X_k) = (-1)^k alpha(J X_1, .., J X_k)``."""
    alpha = np.asarray(alpha, dtype=float)
    out = alpha
    for s in range(alpha.ndim):
        out = np.moveaxis(np.tensordot(out, S.J, axes=(s, 0)), -1, s)
    return (-1) ** alpha.ndim * out


def musical_sharp(S: AlmostHermitianStructure, alpha) -> np.ndarray:
    return S.sharp(alpha)


def musical_flat(S: AlmostHermitianStructure, X) -> np.ndarray:
    return S.flat(X)


def self_dual_part(S: AlmostHermitianStructure, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    return 0.5 * (beta + hodge_star(S, beta))


def is_antisymmetric(T, tol: float = EPS_ABS) -> bool:
    T = np.asarray(T, dtype=float)
    return bool(np.max(np.abs(T - alternate(T)), initial=0.0) <= tol)
