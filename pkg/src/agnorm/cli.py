"""Command-line front end: group/norm/spectrum/symset/pair/freiman/decompose/verify.

All subcommands emit JSON (stdout or --json PATH) with numbers at 15
significant digits and complex values as [re, im]; identical inputs, seed
and caps produce byte-identical output.  Exit codes: 0 success, 1 assertion
or audit failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import decompose as dc
from . import freiman as fr
from . import pairs as pr
from . import setstats as st
from . import spectral as sp
from .gfunc import GFunc
from .groups import (
    GroupError,
    GSubset,
    build_group,
    export_catalog,
    subgroups,
)
from .verify import SUITES, run_suite, suite_names

__all__ = ["main"]


def _round15(x: float):
    if not np.isfinite(x):
        return repr(float(x))
    return float(f"{float(x):.15g}")


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, Fraction):
        return _round15(float(obj))
    if isinstance(obj, complex):
        return [_round15(obj.real), _round15(obj.imag)]
    if isinstance(obj, (np.complexfloating,)):
        return [_round15(float(obj.real)), _round15(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        return _round15(float(obj))
    if isinstance(obj, (int, np.integer, bool, str)) or obj is None:
        return int(obj) if isinstance(obj, np.integer) else obj
    if isinstance(obj, GSubset):
        return [int(i) for i in obj.indices]
    if isinstance(obj, GFunc):
        return _json_ready(obj.to_json_obj())
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    return str(obj)


def _emit(obj, path: str | None) -> None:
    text = json.dumps(_json_ready(obj), sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_inline(arg: str):
    if arg.startswith("@"):
        return json.loads(Path(arg[1:]).read_text())
    return json.loads(arg)


def _parse_eta(text: str):
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return float(text)


def _get_function(args, group) -> GFunc:
    if args.function is None:
        raise GroupError("this subcommand needs --function")
    return GFunc.from_json_obj(_load_inline(args.function), group)


def _get_set(args, group) -> GSubset:
    if args.set is None:
        raise GroupError("this subcommand needs --set")
    obj = _load_inline(args.set)
    if isinstance(obj, dict):
        obj = obj.get("subset", obj.get("indices"))
    return GSubset.from_indices(group, obj)


def _pair_from_json(obj, group) -> pr.MultiplicativePair:
    width = obj.get("r")
    if width in (None, "inf", "exact"):
        width = None
    else:
        width = int(width)
    return pr.MultiplicativePair(
        GSubset.from_indices(group, obj["ground"]),
        GSubset.from_indices(group, obj["perturb"]),
        GSubset.from_indices(group, obj["upper"]),
        GSubset.from_indices(group, obj["lower"]),
        width,
    )


# -- subcommands -------------------------------------------------------------------


def cmd_group(args) -> int:
    if args.export_catalog:
        written = export_catalog(args.export_catalog, args.max_order)
        _emit({"exported": [str(p) for p in written]}, args.json)
        return 0
    group = build_group(args.group)
    out = {
        "spec": args.group,
        "order": group.order,
        "abelian": group.is_abelian(),
        "identity": group.identity,
    }
    try:
        subs = subgroups(group, args.cap_subgroups)
        out["subgroups"] = [s.indices.tolist() for s in subs]
        out["num_subgroups"] = len(subs)
    except GroupError as exc:
        out["subgroups_skipped"] = str(exc)
    _emit(out, args.json)
    return 0


def cmd_norm(args) -> int:
    group = build_group(args.group)
    f = _get_function(args, group)
    _emit(
        {
            "a_norm": sp.a_norm(f),
            "pm_norm": sp.pm_norm(f),
            "l1": f.l1(),
            "l2": f.l2(),
            "linf": f.linf(),
        },
        args.json,
    )
    return 0


def cmd_spectrum(args) -> int:
    group = build_group(args.group)
    f = _get_function(args, group)
    op = sp.ConvOp(f)
    s = op.singular_values
    out = {
        "singular_values": s.tolist(),
        "a_norm": float(s.sum()),
        "pm_norm": float(s[0]) if s.size else 0.0,
        "reconstruction_error": op.reconstruction_error(),
    }
    if args.delta is not None:
        thr = float(args.delta) * f.l1()
        out["delta"] = float(args.delta)
        out["spectrum_dim"] = int(np.count_nonzero(s >= thr))
    _emit(out, args.json)
    return 0


def cmd_symset(args) -> int:
    group = build_group(args.group)
    a = _get_set(args, group)
    eta = _parse_eta(args.eta) if args.eta else Fraction(1, 2)
    s = st.symmetry_set(a, eta)
    _emit(
        {
            "members": s.indices.tolist(),
            "size": s.size,
            "energy": st.energy(a),
            "doubling": st.doubling(a),
        },
        args.json,
    )
    return 0


def cmd_pair(args) -> int:
    group = build_group(args.group)
    if args.pair:
        p = _pair_from_json(_load_inline(args.pair), group)
    elif args.construct:
        a = _get_set(args, group)
        if args.construct == "subgroup":
            p = pr.subgroup_pair(a)
        elif args.construct == "product":
            p = pr.pair_from_product_set(a, args.r or 1)
        elif args.construct == "growth":
            p = pr.pair_from_growth(a, args.r or 1, float(args.eps or 0.25))
        else:
            raise GroupError(f"unknown constructor {args.construct!r}")
    else:
        raise GroupError("pair needs --pair JSON or --construct with --set")
    report = pr.validate_pair(p)
    out = {
        "ground": p.ground,
        "perturb": p.perturb,
        "upper": p.upper,
        "lower": p.lower,
        "r": "inf" if p.width_r is None else p.width_r,
        "report": report,
    }
    _emit(out, args.json)
    return 0 if report["valid"] else 1


def cmd_freiman(args) -> int:
    group = build_group(args.group)
    a = _get_set(args, group)
    stage = args.stage
    try:
        if stage == "fournier":
            eta = _parse_eta(args.eta) if args.eta else Fraction(1, 20)
            sub, x = fr.fournier_subgroup(a, eta)
            hi = sub.indices
            overlap = int(np.count_nonzero(a.mask[group.mul[hi, x]]))
            out = {"stage": stage, "subgroup": sub, "x": x,
                   "overlap": overlap / sub.size}
        elif stage == "witness":
            w, size = fr.sym_witness_search(a, float(args.eps or 0.5),
                                            budget=args.budget, seed=args.seed)
            out = {"stage": stage, "witness": w, "sym_measure": size}
        elif stage == "doubling_to_tripling":
            res = fr.doubling_to_tripling(a, budget=args.budget, seed=args.seed)
            out = {"stage": stage, "subset": res.subset, "x": res.x,
                   "size_ratio": res.size_ratio, "tripling": res.tripling,
                   "audits": res.audits}
        elif stage == "weak_freiman":
            res = fr.weak_freiman(a, args.r or 1, float(args.eps or 0.5),
                                  budget=args.budget, seed=args.seed)
            out = {"stage": stage, "ground": res.pair.ground, "perturb": res.pair.perturb,
                   "upper": res.pair.upper, "lower": res.pair.lower,
                   "epsilon": res.pair.epsilon(), "thickness": res.pair.thickness(),
                   "regular_threshold": res.regular_threshold,
                   "achieved_ratio": res.achieved_ratio, "report": res.report}
        elif stage == "correlation":
            res = fr.freiman_correlation(a, args.r or 1, float(args.eps or 0.5),
                                         budget=args.budget, seed=args.seed)
            out = {"stage": stage, "ground": res.pair.ground, "sup": res.sup,
                   "report": res.report}
        elif stage == "pair_system":
            res = fr.pair_system(a, lambda c: args.r or 1, lambda c: float(args.eps or 0.5),
                                 depth=args.depth, budget=args.budget, seed=args.seed)
            out = {"stage": stage,
                   "levels": res.levels,
                   "thickness": res.thickness,
                   "pairs": {f"{i},{j}": rep for (i, j), rep in res.pair_reports.items()},
                   "audits": res.audits}
        else:
            raise GroupError(f"unknown stage {stage!r}")
    except fr.StageError as exc:
        _emit({"stage": stage, "error": str(exc), "failed_stage": exc.stage,
               "inequality": exc.inequality}, args.json)
        return 1
    _emit(out, args.json)
    return 0


def cmd_decompose(args) -> int:
    group = build_group(args.group)
    f = _get_function(args, group)
    try:
        deco = dc.idempotent_decompose(f, max_steps=args.max_steps,
                                       limit=args.cap_subgroups)
    except dc.DecomposeError as exc:
        out = {"error": str(exc)}
        if exc.partial is not None:
            out["partial_terms"] = [
                {"z": z, "subgroup": sub, "rep": rep} for z, sub, rep in exc.partial.terms
            ]
            out["residual"] = GFunc(group, (f.values - exc.partial.reconstruct())).values.real.tolist()
        _emit(out, args.json)
        return 1
    _emit(
        {
            "terms": [{"z": z, "subgroup": sub, "rep": rep} for z, sub, rep in deco.terms],
            "steps": len(deco.steps),
            "norms": [(s["norm_before"], s["norm_after"]) for s in deco.steps],
            "reconstruction_ok": deco.verify(),
        },
        args.json,
    )
    return 0


def cmd_verify(args) -> int:
    names = suite_names() if args.suite in (None, "all") else [args.suite]
    reports = []
    ok = True
    for name in names:
        rep = run_suite(name, args.group, seed=args.seed, trials=args.trials)
        reports.append(rep)
        status = "pass" if rep["passed"] else "FAIL"
        sys.stderr.write(f"{status} {name} on {args.group}\n")
        ok = ok and rep["passed"]
    _emit({"reports": reports, "passed": ok}, args.json)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agnorm",
        description="Algebra norms, symmetry sets, multiplicative pairs and "
        "coset decompositions on finite groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--group", default="cyclic:8",
                       help="group spec (cyclic:n, dihedral:n, symmetric:n, "
                            "quaternion:8, products with x, @file)")
        p.add_argument("--json", help="write the JSON report to this path")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
        p.add_argument("--cap-subgroups", type=int, default=None,
                       help="override the subgroup enumeration limit")

    p = sub.add_parser("group", help="inspect a group or export the catalog")
    common(p)
    p.add_argument("--export-catalog", metavar="DIR",
                   help="write catalog Cayley-table files (build step)")
    p.add_argument("--max-order", type=int, default=24)
    p.set_defaults(fn=cmd_group)

    p = sub.add_parser("norm", help="algebra and PM norms of a function")
    common(p)
    p.add_argument("--function", help='JSON {"values": [[re,im],...]} or {"subset": [...]} or @file')
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("spectrum", help="singular values of the convolution operator")
    common(p)
    p.add_argument("--function")
    p.add_argument("--delta", type=float, help="also report dim of the delta-spectrum")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("symset", help="symmetry set at a threshold")
    common(p)
    p.add_argument("--set", help="JSON list of element indices or @file")
    p.add_argument("--eta", help="threshold in (0,1]; fractions like 5/6 are exact")
    p.set_defaults(fn=cmd_symset)

    p = sub.add_parser("pair", help="build/validate a multiplicative pair")
    common(p)
    p.add_argument("--pair", help='JSON {"ground": [...], "perturb": [...], '
                                  '"upper": [...], "lower": [...], "r": int|"inf"}')
    p.add_argument("--construct", choices=["subgroup", "product", "growth"])
    p.add_argument("--set", help="base set for --construct")
    p.add_argument("--r", type=int)
    p.add_argument("--eps", type=float)
    p.set_defaults(fn=cmd_pair)

    p = sub.add_parser("freiman", help="run one stage of the small-doubling pipeline")
    common(p)
    p.add_argument("--set")
    p.add_argument("--stage", default="weak_freiman",
                   choices=["fournier", "witness", "doubling_to_tripling",
                            "weak_freiman", "correlation", "pair_system"])
    p.add_argument("--eta")
    p.add_argument("--eps", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--budget", type=int, default=64)
    p.set_defaults(fn=cmd_freiman)

    p = sub.add_parser("decompose", help="exact coset decomposition of an integer function")
    common(p)
    p.add_argument("--function")
    p.add_argument("--max-steps", type=int)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("verify", help="run named lemma suites")
    common(p)
    p.add_argument("--suite", help="suite name or 'all'; known: " + ", ".join(suite_names()))
    p.add_argument("--trials", type=int)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (GroupError, pr.PairError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (dc.DecomposeError, fr.StageError) as exc:
        sys.stderr.write(f"audit failure: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
