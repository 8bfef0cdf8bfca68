"""Named example structures, JSON input/output and the observable registry used to check them.

Every preset stores its brackets, metric and complex structure in 1-based form together
with a list of expectations.  An expectation names an observable from ``OBSERVABLES``,
the expected value and a provenance tag:

* ``PAPER``   reference values the implementation has to reproduce;
* ``DERIVED`` values obtained by an independent hand computation;
* ``TRIVIAL`` values that hold for structural reasons (for instance a flat abelian algebra).

Irrational constants are stored as decimals with the defining expression next to them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .algebra import LieAlgebra, exterior_derivative, form_coefficients, form_from_coefficients
from .almost_abelian import AlmostAbelianData, ClassLabel, realize
from .curvatures import CurvatureReport, d_theta_sym_parts
from .errors import StructuralError
from .structure import AlmostHermitianStructure, build_structure, nijenhuis_norm_sq_frame
from .verifier import condition_flags, einstein_residuals

SQRT5 = math.sqrt(5.0)
SQRT17 = math.sqrt(17.0)
TAGS = ("PAPER", "DERIVED", "TRIVIAL")


def J_from_pairs(dim: int, pairs) -> np.ndarray:
    """``J e_i = e_j`` and ``J e_j = -e_i`` for each 1-based pair ``(i, j)``."""
    J = np.zeros((dim, dim))
    seen = set()
    for i, j in pairs:
        i, j = int(i), int(j)
        if not (1 <= i <= dim and 1 <= j <= dim) or i == j or {i, j} & seen:
            raise StructuralError(f"bad J pair ({i}, {j}) for dim {dim}")
        seen |= {i, j}
        J[j - 1, i - 1] = 1.0
        J[i - 1, j - 1] = -1.0
    if len(seen) != dim:
        raise StructuralError("J pairs must cover every basis vector exactly once")
    return J


# --------------------------------------------------------------------------- observables


def _frame_theta_norm(S: AlmostHermitianStructure) -> float:
    P = S.frame
    return float(sum((S.theta @ P[:, i]) ** 2 for i in range(S.dim)))


def _nijenhuis_pair(i: int, j: int):
    def fn(S, rep):
        E = np.eye(S.dim)
        return S.nijenhuis(E[i], E[j])
    return fn


def _flag(name: str):
    return lambda S, rep: getattr(condition_flags(S, report=rep), name).value


# observable name -> (kind, evaluator); kind is "scalar", "flag", "vector", "form" or "tensor"
OBSERVABLES: dict[str, tuple[str, Callable]] = {
    "theta": ("form", lambda S, rep: np.array(S.theta)),
    "dF": ("form", lambda S, rep: exterior_derivative(S.algebra, S.F)),
    "r": ("form", lambda S, rep: rep.r_second_chern),
    "rho_chern": ("form", lambda S, rep: rep.rho_chern),
    "ric_bismut": ("form", lambda S, rep: rep.ric_bismut),
    "d_theta": ("form", lambda S, rep: rep.d_theta),
    "n_theta": ("form", lambda S, rep: rep.n_theta),
    "D_theta_sym_J_minus": ("tensor", lambda S, rep: d_theta_sym_parts(S)["sym,J-"]),
    "N12": ("vector", _nijenhuis_pair(0, 1)),
    "s_H": ("scalar", lambda S, rep: rep.scalars.s_H),
    "s_W": ("scalar", lambda S, rep: rep.scalars.s_W),
    "s_star": ("scalar", lambda S, rep: rep.scalars.s_star),
    "s_g": ("scalar", lambda S, rep: rep.scalars.s_g),
    "N_norm_sq": ("scalar", lambda S, rep: nijenhuis_norm_sq_frame(S)),
    "theta_norm_sq": ("scalar", lambda S, rep: _frame_theta_norm(S)),
    "second_chern_residual": ("scalar", lambda S, rep: einstein_residuals(S, report=rep).second_chern_residual),
    "second_chern_einstein": ("flag", lambda S, rep: einstein_residuals(S, report=rep).second_chern_einstein),
    "lcs": ("flag", _flag("lcs")),
    "lee_parallel": ("flag", _flag("lee_parallel")),
    "lee_killing": ("flag", _flag("lee_killing")),
    "integrable": ("flag", _flag("integrable")),
    "n_theta_vanishes": ("flag", _flag("n_theta_vanishes")),
    "j_invariant_rho_chern": ("flag", _flag("j_invariant_rho_chern")),
}


def _expected_array(kind: str, dim: int, value) -> np.ndarray:
    if kind == "vector":
        out = np.zeros(dim)
        for k, x in value.items():
            out[int(k) - 1] = x
        return out
    if kind == "tensor":
        out = np.zeros((dim, dim))
        for key, x in value.items():
            out[int(key[0]) - 1, int(key[1]) - 1] = x
        return out
    if kind == "form":
        if not value:
            return np.zeros(0)
        if len(next(iter(value))) == 1:
            out = np.zeros(dim)
            for k, x in value.items():
                out[int(k) - 1] = x
            return out
        return form_from_coefficients(dim, value)
    raise StructuralError(f"no array form for kind {kind!r}")


@dataclass(frozen=True)
class Expectation:
    observable: str
    value: object
    tag: str
    expr: str = ""

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise StructuralError(f"unknown observable {self.observable!r}")
        if self.tag not in TAGS:
            raise StructuralError(f"unknown provenance tag {self.tag!r}")


@dataclass(frozen=True)
class CheckResult:
    observable: str
    tag: str
    expected: object
    observed: object
    error: float
    passed: bool

    def as_dict(self) -> dict:
        return {"observable": self.observable, "tag": self.tag, "error": self.error, "passed": self.passed}


def evaluate_expectation(S: AlmostHermitianStructure, rep: CurvatureReport, e: Expectation,
                         tol: float = 1e-9) -> CheckResult:
    kind, fn = OBSERVABLES[e.observable]
    got = fn(S, rep)
    if kind == "flag":
        ok = bool(got) == bool(e.value)
        return CheckResult(e.observable, e.tag, e.value, bool(got), 0.0 if ok else 1.0, ok)
    if kind == "scalar":
        err = abs(float(got) - float(e.value))
        return CheckResult(e.observable, e.tag, e.value, float(got), err, err <= tol)
    got = np.asarray(got, dtype=float)
    want = _expected_array(kind, S.dim, e.value)
    if want.size == 0:
        want = np.zeros_like(got)
    err = float(np.max(np.abs(got - want)))
    return CheckResult(e.observable, e.tag, e.value, got, err, err <= tol)


# --------------------------------------------------------------------------- presets


@dataclass(frozen=True, eq=False)
class Preset:
    name: str
    title: str
    class_label: ClassLabel
    dim: int
    brackets: Mapping
    metric: np.ndarray = field(repr=False)
    J_pairs: tuple
    expectations: tuple = ()
    ad_matrix: np.ndarray | None = field(default=None, repr=False)
    almost_abelian: AlmostAbelianData | None = field(default=None, repr=False)
    basis_to_almost_abelian: np.ndarray | None = field(default=None, repr=False)
    notes: str = ""

    def algebra(self) -> LieAlgebra:
        return LieAlgebra.from_brackets(self.dim, self.brackets, name=self.name)

    def structure(self) -> AlmostHermitianStructure:
        return build_structure(self.algebra(), self.metric, J_from_pairs(self.dim, self.J_pairs), name=self.name)

    def check(self, tags=TAGS, tol: float = 1e-9) -> list[CheckResult]:
        S = self.structure()
        rep = CurvatureReport(S)
        return [evaluate_expectation(S, rep, e, tol) for e in self.expectations if e.tag in tags]

    def to_dict(self) -> dict:
        doc = structure_to_dict(self.structure())
        doc["name"] = self.name
        doc["title"] = self.title
        doc["class_label"] = self.class_label.value
        doc["expectations"] = [
            {"observable": e.observable, "value": e.value, "tag": e.tag, **({"expr": e.expr} if e.expr else {})}
            for e in self.expectations
        ]
        if self.almost_abelian is not None:
            doc["almost_abelian"] = self.almost_abelian.to_dict()
        return doc


def _a36() -> Preset:
    s = SQRT5 - 1.0
    c = 1.0 / s
    E = np.zeros((4, 4))
    E[0, 0] = 1 / math.sqrt(s)
    E[1, 1] = 1.0
    E[3, 2] = 1.0
    E[2, 3] = 1 / math.sqrt(s)
    ex = [
        Expectation("theta", {"4": c}, "PAPER", "1/(sqrt5-1)"),
        Expectation("r", {"13": 0.25, "24": c / 4}, "PAPER", "e13/4 + e24/(4(sqrt5-1))"),
        Expectation("s_H", c, "PAPER", "1/(sqrt5-1)"),
        Expectation("rho_chern", {"13": 0.5}, "PAPER"),
        Expectation("d_theta", {}, "PAPER"),
        Expectation("D_theta_sym_J_minus", {}, "PAPER"),
        Expectation("N12", {"3": 0.25}, "PAPER"),
        Expectation("n_theta", {}, "PAPER"),
        Expectation("lee_parallel", True, "PAPER"),
        Expectation("lcs", True, "PAPER"),
        Expectation("second_chern_einstein", True, "PAPER"),
        Expectation("N_norm_sq", 0.5, "PAPER"),
        Expectation("theta_norm_sq", 1.0 / (6.0 - 2.0 * SQRT5), "PAPER", "1/(6-2 sqrt5)"),
        Expectation("s_W", -1.0, "PAPER", "-2 |N|^2"),
        Expectation("s_star", 0.5 / (6.0 - 2.0 * SQRT5), "PAPER", "|theta|^2 / 2"),
        Expectation("integrable", False, "DERIVED"),
    ]
    return Preset(
        name="a36_a1",
        title="A_{3,6} + A_1 with a parallel Lee form",
        class_label=ClassLabel.A36_PLUS_A1,
        dim=4,
        brackets={(1, 3): {2: -1.0}, (2, 3): {1: 1.0}},
        metric=np.diag([s, 1.0, s, 1.0]),
        J_pairs=((1, 3), (2, 4)),
        expectations=tuple(ex),
        ad_matrix=np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
        almost_abelian=AlmostAbelianData(0.0, [-1.0, 0.0], [1.0 / s, 0.0], np.zeros((2, 2))),
        basis_to_almost_abelian=E,
        notes="metric (sqrt5-1)(e1e1 + e3e3) + e2e2 + e4e4; the standard-form basis is "
              "(e1/sqrt(s), e2, e4, e3/sqrt(s)) with s = sqrt5-1",
    )


def _a41() -> Preset:
    ex = [
        Expectation("theta", {"3": -0.5}, "PAPER"),
        Expectation("dF", {"234": 0.5}, "PAPER"),
        Expectation("r", {}, "PAPER"),
        Expectation("rho_chern", {}, "PAPER"),
        Expectation("D_theta_sym_J_minus", {"24": 0.5, "42": 0.5}, "PAPER"),
        Expectation("N12", {"2": 0.25}, "PAPER"),
        Expectation("lee_killing", False, "PAPER"),
        Expectation("second_chern_einstein", True, "DERIVED"),
    ]
    return Preset(
        name="a41",
        title="A_{4,1}",
        class_label=ClassLabel.A41,
        dim=4,
        brackets={(2, 4): {1: 1.0}, (3, 4): {2: 1.0}},
        metric=np.diag([0.5, 1.0, 0.5, 1.0]),
        J_pairs=((1, 3), (2, 4)),
        expectations=tuple(ex),
        ad_matrix=np.array([[0.0, -1.0, 0.0], [0.0, 0.0, -1.0], [0.0, 0.0, 0.0]]),
    )


def _a48() -> Preset:
    ex = [
        Expectation("theta", {"4": -1.0}, "PAPER"),
        Expectation("r", {}, "PAPER"),
        Expectation("rho_chern", {}, "PAPER"),
        Expectation("s_H", 0.0, "PAPER"),
        Expectation("second_chern_residual", 0.0, "PAPER"),
        Expectation("D_theta_sym_J_minus", {"33": 1.0, "22": -1.0}, "PAPER"),
        Expectation("N12", {"3": 0.5}, "PAPER"),
    ]
    return Preset(
        name="a48",
        title="A_{4,8}",
        class_label=ClassLabel.A48,
        dim=4,
        brackets={(2, 3): {1: 1.0}, (2, 4): {2: 1.0}, (3, 4): {3: -1.0}},
        metric=np.eye(4),
        J_pairs=((1, 4), (2, 3)),
        expectations=tuple(ex),
    )


def _a410() -> Preset:
    t = (1.0 + SQRT17) / 8.0
    ex = [
        Expectation("theta", {"1": -t}, "PAPER", "-(1+sqrt17)/8"),
        Expectation("dF", {"124": -t}, "PAPER", "-(1+sqrt17)/8"),
        Expectation("r", {"13": t / 4, "24": 0.25}, "PAPER", "(1+sqrt17)/32 e13 + e24/4"),
        Expectation("s_H", 1.0, "PAPER"),
        Expectation("rho_chern", {"24": 0.5, "34": -0.5}, "PAPER"),
        Expectation("j_invariant_rho_chern", False, "PAPER"),
        Expectation("lcs", False, "PAPER"),
        Expectation("n_theta_vanishes", False, "PAPER"),
        Expectation("second_chern_einstein", True, "PAPER"),
    ]
    return Preset(
        name="a410",
        title="A_{4,10}",
        class_label=ClassLabel.A410,
        dim=4,
        brackets={(2, 3): {1: 1.0}, (2, 4): {3: -1.0}, (3, 4): {2: 1.0}},
        metric=np.diag([t, 1.0, t, 1.0]),
        J_pairs=((1, 3), (2, 4)),
        expectations=tuple(ex),
    )


def _abelian() -> Preset:
    ex = [Expectation(name, {}, "TRIVIAL") for name in ("theta", "dF", "r", "rho_chern", "ric_bismut")]
    ex += [Expectation(name, 0.0, "TRIVIAL") for name in ("s_H", "s_W", "s_star", "s_g", "N_norm_sq")]
    ex += [Expectation("integrable", True, "TRIVIAL"), Expectation("second_chern_einstein", True, "TRIVIAL")]
    return Preset(
        name="abelian_flat",
        title="flat Kaehler R^4",
        class_label=ClassLabel.ABELIAN,
        dim=4,
        brackets={},
        metric=np.eye(4),
        J_pairs=((1, 4), (2, 3)),
        expectations=tuple(ex),
        ad_matrix=np.zeros((3, 3)),
        almost_abelian=AlmostAbelianData.zero(2),
        basis_to_almost_abelian=np.eye(4),
    )


_BUILDERS = {"a36_a1": _a36, "a41": _a41, "a48": _a48, "a410": _a410, "abelian_flat": _abelian}


def catalog() -> list[Preset]:
    return [build() for build in _BUILDERS.values()]


def preset_names() -> list[str]:
    return list(_BUILDERS)


def get_preset(name: str) -> Preset:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise StructuralError(f"unknown preset {name!r}; known: {', '.join(_BUILDERS)}") from None


# --------------------------------------------------------------------------- structure I/O


def change_basis(S: AlmostHermitianStructure, C) -> AlmostHermitianStructure:
    """The same structure written in the basis ``E_a = sum_i C[i, a] e_i``."""
    C = np.asarray(C, dtype=float)
    Ci = np.linalg.inv(C)
    c = np.einsum("ia,jb,ijk,ck->abc", C, C, S.algebra.c, Ci)
    return build_structure(LieAlgebra(c, S.algebra.name), C.T @ S.g @ C, Ci @ S.J @ C, name=S.name)


def perturb(S: AlmostHermitianStructure, rng: np.random.Generator, size: float = 0.1) -> AlmostHermitianStructure:
    """A nearby structure ``(P^T g P, P^-1 J P)`` on the same algebra, ``P`` close to the identity."""
    P = np.eye(S.dim) + size * rng.standard_normal((S.dim, S.dim))
    Pi = np.linalg.inv(P)
    return build_structure(S.algebra, P.T @ S.g @ P, Pi @ S.J @ P, name=f"{S.name}~")


def structure_to_dict(S: AlmostHermitianStructure) -> dict:
    return {
        "name": S.name,
        "algebra": S.algebra.to_dict(),
        "metric": S.g.tolist(),
        "J": S.J.tolist(),
    }


def structure_from_dict(doc: Mapping) -> AlmostHermitianStructure:
    """Accepts ``{"algebra", "metric", "J" | "J_pairs"}`` or ``{"almost_abelian", ["metric"]}``."""
    if not isinstance(doc, Mapping):
        raise StructuralError("structure description must be a JSON object")
    name = str(doc.get("name", ""))
    try:
        if "almost_abelian" in doc:
            d = AlmostAbelianData.from_dict(doc["almost_abelian"])
            return realize(d, doc.get("metric"), name=name)
        L = LieAlgebra.from_dict(doc["algebra"], name=name)
        g = np.array(doc.get("metric", np.eye(L.dim)), dtype=float)
        if "J" in doc:
            J = np.array(doc["J"], dtype=float)
        elif "J_pairs" in doc:
            J = J_from_pairs(L.dim, doc["J_pairs"])
        else:
            raise StructuralError("structure needs either 'J' or 'J_pairs'")
    except KeyError as exc:
        raise StructuralError(f"structure description is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, StructuralError):
            raise
        raise StructuralError(f"malformed structure description: {exc}") from None
    return build_structure(L, g, J, name=name)


def load_structure(path: str) -> AlmostHermitianStructure:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise StructuralError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid JSON in {path}: {exc}") from None
    return structure_from_dict(doc)


# --------------------------------------------------------------------------- serialization


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise StructuralError(f"cannot serialize non-finite number {x}")
    if x == 0.0:
        return "0.0"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float, bool, np.floating, np.integer)) or x is None for x in obj):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in obj) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise StructuralError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with every float written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def coefficients(alpha, tol: float = 1e-13) -> dict[str, float]:
    """1-based coefficient dictionary of a form (or a vector), dropping entries below ``tol``."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim == 1:
        return {str(i + 1): float(x) for i, x in enumerate(alpha) if abs(x) > tol}
    return form_coefficients(alpha, tol)
