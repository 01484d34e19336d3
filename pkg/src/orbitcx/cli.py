"""Command-line interface.

Exit codes: 0 when the input verifies (or is feasible), 2 for a
mathematically negative answer (not a sphere, AHR failure, Obstruction,
Borel-Smith violation, Infeasible), 1 for malformed input.

Group arguments are JSON files ``{"degree", "generators", "name"}`` or
the shorthands ``catalog:NAME`` (C2, C3, C4, C2xC2, S3, Q8, C3xC3) and
``qd:P``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ahr, superclass
from .chaincx import (FreeChainComplex, NotASphere, SuperClassFunction, dim_function, hdim_function,
                      is_homology_sphere, is_oriented, validate)
from .exactalg import Coefficients
from .gcw import boundary_sphere
from .groups import Group, catalog, enumerate_subgroups, family, group_from_json, parse_gset_spec, qd
from .orbitcat import OrbitCategory


class InputError(Exception):
    pass


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


def load_group(arg: str) -> Group:
    if arg.startswith("catalog:"):
        name = arg.split(":", 1)[1]
        groups = catalog()
        if name not in groups:
            raise InputError(f"unknown catalog group {name!r}; known: {', '.join(groups)}")
        return groups[name]
    if arg.startswith("qd:"):
        try:
            return qd(int(arg.split(":", 1)[1]))
        except ValueError as e:
            raise InputError(str(e)) from e
    data = _read_json(arg)
    try:
        return group_from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{arg}: malformed group file ({e})") from e


def load_complex(path: str) -> FreeChainComplex:
    data = _read_json(path)
    try:
        return FreeChainComplex.from_json(data)
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise InputError(f"{path}: malformed complex file ({type(e).__name__}: {e})") from e


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _coeffs(args) -> Coefficients:
    if args.coefficients:
        return Coefficients.parse(args.coefficients)
    return Coefficients(args.p) if args.p else Coefficients(None)


# -- commands ---------------------------------------------------------------


def cmd_subgroups(args) -> int:
    G = load_group(args.group)
    lat = enumerate_subgroups(G)
    classes = [{"class": c, "order": lat.class_order(c), "size": len(members), "rank": lat.rank(members[0]),
                "contained_in": [int(k) for k in range(len(lat.classes)) if k != c and lat.class_leq[c, k]]}
               for c, members in enumerate(lat.classes)]
    _emit({"group": G.name, "order": G.order, "subgroups": len(lat), "classes": classes}, args.output)
    return 0


def cmd_gen(args) -> int:
    G = load_group(args.group)
    cat = OrbitCategory.of(G, args.family)
    try:
        omega = parse_gset_spec(cat.lattice, args.gset)
    except (ValueError, IndexError) as e:
        raise InputError(f"bad --gset {args.gset!r}: {e}") from e
    _, C = boundary_sphere(cat, omega, _coeffs(args))
    _emit(C.to_json(), args.output)
    return 0


def cmd_sphere_check(args) -> int:
    C = load_complex(args.complex)
    rep = validate(C)
    out = {"valid": rep.ok, "dim": list(dim_function(C).values), "hdim": list(hdim_function(C).values)}
    if not rep.ok:
        out.update(boundary_failures=rep.boundary_failures, augmentation_failure=rep.augmentation_failure)
        _emit(out)
        return 2
    try:
        n = is_homology_sphere(C)
    except NotASphere as e:
        out.update(sphere=False, failure={"class": e.cls_id, "degree": e.degree})
        _emit(out)
        return 2
    o = is_oriented(C)
    out.update(sphere=True, n=list(n.values), oriented=o.oriented,
               orientation_failures=[list(f) for f in o.failures])
    _emit(out)
    return 0


def cmd_ahr_check(args) -> int:
    C = load_complex(args.complex)
    try:
        rep = ahr.is_algebraic_homotopy_representation(C)
    except NotASphere as e:
        _emit({"sphere": False, "failure": {"class": e.cls_id, "degree": e.degree}})
        return 2
    out = rep.to_json()
    out["tight"] = ahr.is_tight(C).tight
    _emit(out)
    return 0 if rep.ok else 2


def cmd_tighten(args) -> int:
    C = load_complex(args.complex)
    try:
        res = ahr.tighten(C, seed=args.seed, debug_verify_moves=args.debug_verify_moves)
    except NotASphere as e:
        _emit({"ok": False, "error": f"not a homology sphere at class {e.cls_id}, degree {e.degree}"})
        return 2
    summary = res.to_json()
    result = summary.pop("result")
    if res.ok:
        summary["dim"] = list(dim_function(res.result).values)
        summary["hdim"] = list(hdim_function(res.result).values)
        if args.output:
            _emit(result, args.output)
    _emit(summary)
    return 0 if res.ok else 2


def cmd_bs_check(args) -> int:
    G = load_group(args.group)
    lat = enumerate_subgroups(G)
    try:
        n = SuperClassFunction.from_json(lat, _read_json(args.function))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{args.function}: malformed function file ({e})") from e
    rep = superclass.borel_smith_check(n, args.p, superclass.enumerate_bs_instances(lat, args.p, not args.no_dedup))
    _emit(rep.to_json(lat))
    return 0 if rep.ok else 2


def _print_chain(res: superclass.InferenceResult, lat, names) -> None:
    for step in res.chain:
        print("  " + step.describe(lat, names))


def cmd_bs_infer(args) -> int:
    G = load_group(args.group)
    lat = enumerate_subgroups(G)
    res = superclass.bs_infer(lat, args.p, family(lat, args.family))
    _emit(res.to_json(lat))
    return 2 if res.infeasible else 0


def cmd_qd_demo(args) -> int:
    try:
        G = qd(args.p)
    except ValueError as e:
        raise InputError(str(e)) from e
    lat = enumerate_subgroups(G)
    fam = family(lat, "rank_le:1")
    z = superclass.sylow_center_class(lat, args.p)
    names = {z: "Z(P)", 0: "1"}
    print(f"Qd({args.p}): order {G.order}, {len(lat)} subgroups in {len(lat.classes)} classes; "
          f"rank <= 1 family has {len(fam.classes)} classes")
    res = superclass.bs_infer(lat, args.p, fam)
    print("forced by the type (ii) equalities:")
    _print_chain(res, lat, names)
    if res.infeasible:
        print(f"n(1) = -1: contradiction ({res.reason}); Infeasible")
        return 2
    print("feasible")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitcx", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("subgroups", help="subgroup lattice report")
    s.add_argument("group")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_subgroups)

    s = sub.add_parser("gen", help="generate a complex")
    s.add_argument("kind", choices=["boundary-sphere"])
    s.add_argument("group")
    s.add_argument("--gset", required=True, help="e.g. regular+trivial:1+cosets:2,3 (coset args are class ids)")
    s.add_argument("-p", type=int, help="coefficients Z/p (default Z)")
    s.add_argument("--coefficients", help="Z or Zmod:p; overrides -p")
    s.add_argument("--family", default="all", help="all | p:P | rank_le:R | explicit:c1,c2,...")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("sphere-check", help="homology sphere, orientation and dimension functions")
    s.add_argument("complex")
    s.set_defaults(func=cmd_sphere_check)

    s = sub.add_parser("ahr-check", help="algebraic homotopy representation conditions")
    s.add_argument("complex")
    s.set_defaults(func=cmd_ahr_check)

    s = sub.add_parser("tighten", help="reduce to a tight complex or report an obstruction")
    s.add_argument("complex")
    s.add_argument("-o", "--output", help="write the tight complex here")
    s.add_argument("--seed", type=int, default=0, help="seed for the unit search")
    s.add_argument("--debug-verify-moves", action="store_true", help="recheck all homology after every move")
    s.set_defaults(func=cmd_tighten)

    bs = sub.add_parser("borel-smith", help="Borel-Smith conditions")
    bsub = bs.add_subparsers(dest="action", required=True)
    s = bsub.add_parser("check")
    s.add_argument("group")
    s.add_argument("function", help='JSON {"values": {class_id: n}}')
    s.add_argument("-p", type=int, required=True)
    s.add_argument("--no-dedup", action="store_true", help="do not merge conjugate configurations")
    s.set_defaults(func=cmd_bs_check)
    s = bsub.add_parser("infer")
    s.add_argument("group")
    s.add_argument("--family", default="all")
    s.add_argument("-p", type=int, required=True)
    s.set_defaults(func=cmd_bs_infer)

    s = sub.add_parser("qd-demo", help="no homology sphere for Qd(p) with rank <= 1 isotropy")
    s.add_argument("-p", type=int, default=3)
    s.set_defaults(func=cmd_qd_demo)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
