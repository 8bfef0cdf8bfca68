"""Command line: ``ahgeom {report,verify,classify,solve,catalog}``.

Exit codes: 0 success, 1 a verification failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import almost_abelian as aa
from .algebra import EPS_ABS, EPS_REL, exterior_derivative
from .curvatures import CurvatureReport
from .errors import ConventionError, StructuralError, ValidationError
from .presets import (
    catalog,
    coefficients,
    dumps,
    get_preset,
    load_structure,
    perturb,
    preset_names,
    structure_to_dict,
)
from .verifier import IDENTITY_IDS, condition_flags, einstein_residuals, run_identity_suite

FORMAT_VERSION = 1
CLIP = 1e-13


def _matrix(M) -> list:
    M = np.where(np.abs(M) > CLIP, M, 0.0)
    return M.tolist()


def build_report(S, tol: float = EPS_ABS) -> dict:
    rep = CurvatureReport(S)
    flags = condition_flags(S, tol, report=rep)
    einstein = einstein_residuals(S, tol, report=rep, flags=flags)
    return {
        "format_version": FORMAT_VERSION,
        "structure": structure_to_dict(S),
        "theta": coefficients(S.theta),
        "dF": coefficients(exterior_derivative(S.algebra, S.F)),
        "nijenhuis_norm_sq": S.nijenhuis.norm_sq,
        "forms": {
            "rho_chern": coefficients(rep.rho_chern),
            "r_second_chern": coefficients(rep.r_second_chern),
            "ric_bismut": coefficients(rep.ric_bismut),
            "nijenhuis_factor": coefficients(rep.nijenhuis_factor),
            "d_theta": coefficients(rep.d_theta),
            "n_theta": coefficients(rep.n_theta),
        },
        "tensors": {
            "rwf": _matrix(rep.rwf),
            "ric_weyl": _matrix(rep.ric_weyl),
            "ric_weyl_tilde": _matrix(rep.ric_weyl_tilde),
            "ric_riemann": _matrix(rep.ric_riemann),
            "rho_star": _matrix(rep.rho_star),
        },
        "scalars": rep.scalars.as_dict(),
        "flags": flags.as_dict(),
        "einstein": einstein.as_dict(),
    }


# --------------------------------------------------------------------------- targets


def _targets(args) -> list:
    if args.file:
        return [load_structure(args.file)]
    name = args.preset or "all"
    names = preset_names() if name == "all" else [name]
    return [get_preset(n).structure() for n in names]


def _selection(args) -> list[str] | None:
    if not args.identities:
        return None
    ids = [s.strip() for s in args.identities.split(",") if s.strip()]
    unknown = [i for i in ids if i not in IDENTITY_IDS]
    if unknown:
        raise StructuralError(f"unknown identity id(s) {unknown}; known: {', '.join(IDENTITY_IDS)}")
    return ids


def _parse_matrix(text: str) -> np.ndarray:
    try:
        M = np.array(json.loads(text), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise StructuralError(f"cannot parse matrix: {exc}") from None
    return M


# --------------------------------------------------------------------------- commands


def cmd_report(args) -> tuple[int, dict, str]:
    if not (args.preset or args.file) or args.preset == "all":
        raise StructuralError("report needs --preset NAME or --file PATH")
    S = _targets(args)[0]
    doc = build_report(S, args.tolerance)
    sc = doc["scalars"]
    text = [f"structure {S.name or '(unnamed)'}",
            f"  theta   {doc['theta']}",
            f"  r       {doc['forms']['r_second_chern']}",
            f"  rho     {doc['forms']['rho_chern']}",
            "  scalars " + ", ".join(f"{k}={v:.12g}" for k, v in sc.items()),
            "  flags   " + ", ".join(k for k, v in doc["flags"].items() if v["value"]),
            f"  second-Chern-Einstein residual {doc['einstein']['second_chern']['residual']:.3e}"]
    return 0, doc, "\n".join(text)


def cmd_verify(args) -> tuple[int, dict, str]:
    selection = _selection(args)
    structures = _targets(args)
    rng = np.random.default_rng(args.seed)
    runs = []
    for S in structures:
        variants = [S] + [perturb(S, rng) for _ in range(args.perturbations)]
        for k, T in enumerate(variants):
            suite = run_identity_suite(T, selection, args.tolerance)
            runs.append({"target": S.name if k == 0 else f"{S.name}#perturbation{k}", **suite.as_dict()})
    passed = all(r["passed"] for r in runs)
    doc = {"format_version": FORMAT_VERSION, "seed": args.seed, "passed": passed, "runs": runs}
    lines = []
    for r in runs:
        status = "PASS" if r["passed"] else "FAIL"
        skipped = sum(1 for x in r["identities"] if x["skipped"])
        lines.append(f"{status} {r['target']}: {len(r['identities'])} identities, {skipped} skipped")
        for x in r["identities"]:
            if x["skipped"] and selection:
                lines.append(f"    {x['id']} skipped: {x['reason']}")
            elif not x["skipped"] and not x["passed"]:
                lines.append(f"    {x['id']} residual {x['residual']:.3e}")
    return (0 if passed else 1), doc, "\n".join(lines)


def cmd_classify(args) -> tuple[int, dict, str]:
    if args.A is not None:
        M = _parse_matrix(args.A)
        label = aa.classify_jordan(M)
        source = "matrix"
    elif args.file:
        with open(args.file, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise StructuralError(f"invalid JSON in {args.file}: {exc}") from None
        d = aa.AlmostAbelianData.from_dict(doc.get("almost_abelian", doc))
        M = d.ad_matrix
        label = aa.classify_data(d)
        source = args.file
    elif args.preset and args.preset != "all":
        p = get_preset(args.preset)
        M = p.ad_matrix
        label = aa.classify_jordan(M) if M is not None else p.class_label
        source = p.name
    else:
        raise StructuralError("classify needs --A MATRIX, --file PATH or --preset NAME")
    out = {"format_version": FORMAT_VERSION, "source": source, "label": label.value}
    if M is not None:
        out["ad_matrix"] = np.asarray(M, dtype=float).tolist()
    return 0, out, label.value


def cmd_solve(args) -> tuple[int, dict, str]:
    if args.problem == "bismut":
        if args.constraint not in (None, "none"):
            raise StructuralError("the Bismut problem takes no extra constraint")
        families = aa.solve_bismut_unimodular_dim4()
    else:
        if args.constraint != "parallel-lee":
            raise StructuralError("the second-Chern problem is solved under --constraint parallel-lee")
        families = aa.solve_second_chern_parallel_lee_dim4()
    doc = {
        "format_version": FORMAT_VERSION,
        "problem": args.problem,
        "constraint": args.constraint or "none",
        "labels": sorted(aa.labels_of(families)),
        "families": [f.as_dict() for f in families],
    }
    if args.samples:
        doc["sampler"] = aa.sample_solutions(args.problem, args.samples, args.seed).as_dict()
    lines = [f"{f.class_label.value:14s} {f.description}" for f in families]
    lines.append("labels: " + ", ".join(doc["labels"]))
    if args.samples:
        smp = doc["sampler"]
        lines.append(f"sampler (seed {smp['seed']}): {smp['converged']}/{smp['starts']} converged, "
                     f"labels {smp['labels']}, {smp['outside_families']} outside the families")
    return 0, doc, "\n".join(lines)


def cmd_catalog(args) -> tuple[int, dict, str]:
    presets = catalog()
    doc = {"format_version": FORMAT_VERSION, "presets": [p.to_dict() for p in presets]}
    lines = [f"{p.name:14s} {p.class_label.value:14s} {p.title}" for p in presets]
    return 0, doc, "\n".join(lines)


COMMANDS = {
    "report": cmd_report,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "solve": cmd_solve,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ahgeom", description="Curvature of left-invariant almost-Hermitian structures")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, targets: bool = True):
        if targets:
            p.add_argument("--preset", help=f"one of {', '.join(preset_names())} (or 'all' for verify)")
            p.add_argument("--file", help="JSON structure description")
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--seed", type=int, default=0)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
        fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
        p.set_defaults(fmt="json")

    common(sub.add_parser("report", help="full curvature report of one structure"))
    v = sub.add_parser("verify", help="run the identity suite")
    common(v)
    v.add_argument("--identities", help="comma separated identity ids")
    v.add_argument("--perturbations", type=int, default=0, help="random nearby structures per target")
    c = sub.add_parser("classify", help="isomorphism class from an ad matrix")
    common(c)
    c.add_argument("--A", help="3x3 matrix as JSON")
    s = sub.add_parser("solve", help="almost-abelian Einstein-type problems in dimension 4")
    common(s, targets=False)
    s.add_argument("--problem", choices=("bismut", "second-chern"), required=True)
    s.add_argument("--constraint", choices=("none", "parallel-lee"))
    s.add_argument("--samples", type=int, default=0, help="random least-squares starts for the cross-check")
    common(sub.add_parser("catalog", help="list the presets"), targets=False)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.tolerance is None:
        args.tolerance = EPS_REL if args.command == "verify" else EPS_ABS
    try:
        code, doc, text = COMMANDS[args.command](args)
    except (StructuralError, ValidationError, ConventionError, OSError) as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(dumps(err))
        return 2
    sys.stdout.write(dumps(doc) if args.fmt == "json" else text + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
