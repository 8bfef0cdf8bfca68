"""Real Lie algebras given by structure constants, with left-invariant exterior calculus.

Everything is expressed in the algebra's own basis ``e_1, ..., e_m``:

* vectors are arrays ``X[i]``;
* k-forms are fully antisymmetric arrays ``alpha[i1, ..., ik] = alpha(e_i1, ..., e_ik)``
  (determinant convention, so ``(e^1 ^ e^3)(e_1, e_3) = 1``);
* the bracket is ``[e_i, e_j] = sum_k c[i, j, k] e_k``.

Indices are 0-based in code and 1-based in every external format.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .errors import StructuralError

EPS_ABS = 1e-9
EPS_REL = 1e-8

# Overall factor of the Chevalley-Eilenberg differential.  Kept as a module constant so
# mutation tests can perturb it; every caller goes through exterior_derivative.
D_NORMALIZATION = 1.0

CONTRA = "contra"
CO = "co"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants ``c[i, j, k]`` of a real Lie algebra."""

    c: np.ndarray
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1 or c.shape[0] < 1:
            raise StructuralError(f"structure constants must have shape (m, m, m), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise StructuralError("structure constants must be finite")
        object.__setattr__(self, "c", _frozen(c))

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, float]],
                      name: str = "") -> "LieAlgebra":
        """Build from 1-based nonzero brackets ``{(i, j): {k: coeff}}``; ``[e_j, e_i]`` is mirrored."""
        c = np.zeros((dim, dim, dim))
        for (i, j), out in brackets.items():
            if not (1 <= i <= dim and 1 <= j <= dim) or i == j:
                raise StructuralError(f"bad bracket indices ({i}, {j}) for dim {dim}")
            for k, v in out.items():
                if not 1 <= int(k) <= dim:
                    raise StructuralError(f"bad output index {k} for dim {dim}")
                c[i - 1, j - 1, int(k) - 1] += float(v)
                c[j - 1, i - 1, int(k) - 1] -= float(v)
        return cls(c, name)

    def brackets(self, tol: float = 0.0) -> list[dict]:
        """1-based bracket list with ``i < j``, the JSON wire form."""
        out = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                coeffs = {str(k + 1): float(self.c[i, j, k])
                          for k in range(self.dim) if abs(self.c[i, j, k]) > tol}
                if coeffs:
                    out.append({"i": i + 1, "j": j + 1, "out": coeffs})
        return out

    def to_dict(self) -> dict:
        return {"dim": self.dim, "brackets": self.brackets()}

    @classmethod
    def from_dict(cls, doc: Mapping, name: str = "") -> "LieAlgebra":
        try:
            dim = int(doc["dim"])
            entries = doc.get("brackets", [])
            brackets: dict[tuple[int, int], dict[int, float]] = {}
            for e in entries:
                i, j = int(e["i"]), int(e["j"])
                if i > j:
                    i, j = j, i
                    out = {int(k): -float(v) for k, v in e["out"].items()}
                else:
                    out = {int(k): float(v) for k, v in e["out"].items()}
                slot = brackets.setdefault((i, j), {})
                for k, v in out.items():
                    slot[k] = slot.get(k, 0.0) + v
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise StructuralError(f"malformed algebra description: {exc}") from exc
        if dim < 1:
            raise StructuralError("dim must be positive")
        return cls.from_brackets(dim, brackets, name=name or str(doc.get("name", "")))

    @classmethod
    def from_json(cls, text: str) -> "LieAlgebra":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructuralError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def bracket(self, X, Y) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        if X.shape != (self.dim,) or Y.shape != (self.dim,):
            raise StructuralError(f"vectors must have shape ({self.dim},)")
        return np.einsum("i,j,ijk->k", X, Y, self.c)

    def ad(self, X) -> np.ndarray:
        """Matrix of ``ad_X``: ``ad(X)[k, j]`` is the ``e_k`` component of ``[X, e_j]``."""
        X = np.asarray(X, dtype=float)
        return np.einsum("i,ijk->kj", X, self.c)

    def jacobi_residual(self) -> float:
        c = self.c
        # [[e_i, e_j], e_k] summed cyclically
        t = np.einsum("ijm,mkn->ijkn", c, c)
        cyc = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
        return float(np.max(np.abs(cyc))) if cyc.size else 0.0

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.c + np.transpose(self.c, (1, 0, 2)))))


@dataclass(frozen=True)
class Diagnostics:
    jacobi_residual: float
    antisymmetry_residual: float
    unimodular: bool
    trace_residual: float
    nilpotent: bool
    solvable: bool

    @property
    def is_lie_algebra(self) -> bool:
        return self.jacobi_residual <= EPS_ABS and self.antisymmetry_residual <= EPS_ABS


def _derived(c: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Orthonormal (Euclidean) basis of the span of brackets of ``basis`` with all of g."""
    if basis.shape[1] == 0:
        return basis
    vecs = np.einsum("ia,jb,ijk->kab", np.eye(c.shape[0]), basis, c).reshape(c.shape[0], -1)
    return _span(vecs)


def _span(vecs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    if vecs.size == 0:
        return np.zeros((vecs.shape[0], 0))
    u, s, _ = np.linalg.svd(vecs, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0] if s.size else 1.0)]


def _series_terminates(c: np.ndarray, lower: bool) -> bool:
    m = c.shape[0]
    basis = np.eye(m)
    for _ in range(m + 1):
        if lower:
            nxt = _derived(c, basis)
        else:
            nxt = _span(np.einsum("ia,jb,ijk->kab", basis, basis, c).reshape(m, -1))
        if nxt.shape[1] == 0:
            return True
        if nxt.shape[1] == basis.shape[1]:
            return False
        basis = nxt
    return False


def validate_algebra(L: LieAlgebra) -> Diagnostics:
    """Jacobi and antisymmetry residuals, unimodularity, and nilpotency hints."""
    if L.dim < 2:
        raise StructuralError("dim must be at least 2")
    traces = np.einsum("ijj->i", L.c)  # tr ad_{e_i}
    tr_res = float(np.max(np.abs(traces)))
    return Diagnostics(
        jacobi_residual=L.jacobi_residual(),
        antisymmetry_residual=L.antisymmetry_residual(),
        unimodular=tr_res <= EPS_ABS,
        trace_residual=tr_res,
        nilpotent=_series_terminates(L.c, lower=True),
        solvable=_series_terminates(L.c, lower=False),
    )


# ---------------------------------------------------------------- exterior algebra

@lru_cache(maxsize=None)
def _permutations(k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    out = []
    for p in itertools.permutations(range(k)):
        inv = sum(1 for a in range(k) for b in range(a + 1, k) if p[a] > p[b])
        out.append((p, -1 if inv % 2 else 1))
    return tuple(out)


def alternate(T: np.ndarray) -> np.ndarray:
    """Antisymmetrization ``Alt(T) = (1/k!) sum_sigma sgn(sigma) T o sigma``."""
    T = np.asarray(T, dtype=float)
    k = T.ndim
    if k <= 1:
        return T.copy()
    out = np.zeros_like(T)
    for p, s in _permutations(k):
        out += s * np.transpose(T, p)
    return out / math.factorial(k)


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k, l = a.ndim, b.ndim
    if k == 0 or l == 0:
        return a * b
    coeff = math.factorial(k + l) / (math.factorial(k) * math.factorial(l))
    return coeff * alternate(np.multiply.outer(a, b))


def basis_form(dim: int, *indices: int) -> np.ndarray:
    """``e^{i1} ^ ... ^ e^{ik}`` from 1-based indices."""
    out = np.ones(())
    for i in indices:
        v = np.zeros(dim)
        v[i - 1] = 1.0
        out = wedge(out, v) if out.ndim else v
    return out


def form_from_coefficients(dim: int, coeffs: Mapping[Sequence[int] | str, float]) -> np.ndarray:
    """Sum of ``coeff * e^{i...}``; keys are 1-based index tuples or digit strings like ``"13"``."""
    out = None
    for key, val in coeffs.items():
        idx = tuple(int(ch) for ch in key) if isinstance(key, str) else tuple(key)
        term = val * basis_form(dim, *idx)
        out = term if out is None else out + term
    if out is None:
        raise StructuralError("empty coefficient table")
    return out


def form_coefficients(alpha: np.ndarray, tol: float = 0.0) -> dict[str, float]:
    """Coefficients on ``e^{i1...ik}`` with ``i1 < ... < ik``, keyed by 1-based digit strings."""
    alpha = np.asarray(alpha, dtype=float)
    k, dim = alpha.ndim, (alpha.shape[0] if alpha.ndim else 0)
    out = {}
    for idx in itertools.combinations(range(dim), k):
        v = float(alpha[idx])
        if abs(v) > tol:
            out["".join(str(i + 1) for i in idx)] = v
    return out


def is_form(alpha: np.ndarray, tol: float = EPS_ABS) -> bool:
    alpha = np.asarray(alpha, dtype=float)
    return bool(np.max(np.abs(alpha - alternate(alpha)), initial=0.0) <= tol)


def interior(X, alpha: np.ndarray) -> np.ndarray:
    """``iota_X alpha = alpha(X, ...)``."""
    return np.tensordot(np.asarray(X, dtype=float), alpha, axes=(0, 0))


def exterior_derivative(L: LieAlgebra, alpha: np.ndarray) -> np.ndarray:
    """Chevalley-Eilenberg differential of a left-invariant k-form.

    ``d alpha(X_0..X_k) = sum_{p<q} (-1)^{p+q} alpha([X_p, X_q], X_0, ..^p..^q.., X_k)``,
    so ``d alpha(X, Y) = -alpha([X, Y])`` on 1-forms.
    """
    alpha = np.asarray(alpha, dtype=float)
    k = alpha.ndim
    m = L.dim
    if k == 0:
        return np.zeros(m)
    if alpha.shape != (m,) * k:
        raise StructuralError(f"form shape {alpha.shape} does not match dim {m}")
    if k >= m:
        return np.zeros((m,) * (k + 1))
    beta = np.tensordot(L.c, alpha, axes=(2, 0))  # beta[i, j, rest] = alpha([e_i, e_j], rest)
    out = np.zeros((m,) * (k + 1))
    for p in range(k + 1):
        for q in range(p + 1, k + 1):
            out += (-1) ** (p + q) * np.moveaxis(beta, [0, 1], [p, q])
    return D_NORMALIZATION * out


# ---------------------------------------------------------------- invariant tensors

@dataclass(frozen=True, eq=False)
class InvariantTensor:
    """Component array with one slot kind (``"co"`` / ``"contra"``) per axis."""

    variance: tuple[str, ...]
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        var = tuple(self.variance)
        if any(v not in (CO, CONTRA) for v in var):
            raise StructuralError(f"unknown slot kind in {var}")
        if comps.ndim != len(var) or (comps.ndim and len(set(comps.shape)) != 1):
            raise StructuralError(f"components of shape {comps.shape} do not match variance {var}")
        object.__setattr__(self, "variance", var)
        object.__setattr__(self, "components", _frozen(comps))

    @classmethod
    def form(cls, alpha) -> "InvariantTensor":
        alpha = np.asarray(alpha, dtype=float)
        return cls((CO,) * alpha.ndim, alpha)

    @classmethod
    def vector(cls, X) -> "InvariantTensor":
        return cls((CONTRA,), X)

    @classmethod
    def endomorphism(cls, E) -> "InvariantTensor":
        return cls((CONTRA, CO), E)


def derivation_action(D: np.ndarray, T: np.ndarray, variance: Sequence[str]) -> np.ndarray:
    """Extend a linear map ``D`` of the algebra to tensors by the Leibniz rule.

    ``D[k, j]`` is the ``e_k`` component of ``D(e_j)``; covariant slots pick up ``-T(.., D., ..)``.
    """
    T = np.asarray(T, dtype=float)
    out = np.zeros_like(T)
    for s, kind in enumerate(variance):
        if kind == CONTRA:
            term = np.tensordot(D, T, axes=(1, s))  # new axis 0 is the slot
            out += np.moveaxis(term, 0, s)
        else:
            term = np.tensordot(T, D, axes=(s, 0))  # new last axis is the slot
            out -= np.moveaxis(term, -1, s)
    return out


def lie_derivative(L: LieAlgebra, X, T: InvariantTensor | np.ndarray,
                   variance: Sequence[str] | None = None):
    """``L_X T`` for left-invariant X and T; on vectors ``L_X Y = [X, Y]``.

    A bare array is treated as a covariant tensor unless ``variance`` says otherwise.
    """
    X = np.asarray(X, dtype=float)
    if X.shape != (L.dim,):
        raise StructuralError(f"vector must have shape ({L.dim},)")
    if isinstance(T, InvariantTensor):
        comps = T.components
        if comps.ndim and comps.shape[0] != L.dim:
            raise StructuralError("tensor dimension does not match algebra")
        return InvariantTensor(T.variance, derivation_action(L.ad(X), comps, T.variance))
    T = np.asarray(T, dtype=float)
    var = tuple(variance) if variance is not None else (CO,) * T.ndim
    if T.ndim and T.shape[0] != L.dim:
        raise StructuralError("tensor dimension does not match algebra")
    return derivation_action(L.ad(X), T, var)
