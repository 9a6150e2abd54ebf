"""Command-line workbench.

Exit codes: 0 success or a true answer, 1 a mathematical negative, 2 usage
errors (including malformed input), 3 an internal invariant breach.
"""

from __future__ import annotations

import argparse
import sys

from . import lefschetz as lf
from . import surface as sf
from .errors import DimensionMismatch, NotSquare, PseudolatticeError, ReplayMismatch
from .io import InputError, dumps, encode, parse_basis, parse_factorization, parse_hom, parse_moves, parse_pseudolattice, parse_qdp_instance, read_input, decode_matrix, decode_vector
from .lattice import apply_moves, flip, gram_in_basis, is_exceptional_sequence, standard_basis
from .linalg import Matrix
from .qdp import DEFAULT_BUDGET, check_qdp, classify
from .spherical import cokernel, cotwist, glue, has_integral_adjoint, is_relative_cy, is_spherical, right_adjoint, twist

OK, NEGATIVE, USAGE, BREACH = 0, 1, 2, 3


class Usage(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, dict):
        return dumps(value)
    if isinstance(value, Matrix):
        return "\n".join("  [" + ", ".join(str(x) for x in row) + "]" for row in value.tolist()) or "  []"
    if isinstance(value, (list, tuple)) and value and isinstance(value[0], (list, tuple)):
        return "\n".join("  " + str(list(v)) for v in value)
    return str(encode(value))


def emit(report: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        print(dumps(report), file=out)
        return
    for key, value in report.items():
        text = _fmt(value)
        if "\n" in text or text.startswith("  "):
            print(f"{key}:", file=out)
            print(text, file=out)
        else:
            print(f"{key}: {text}", file=out)


# verbs ---------------------------------------------------------------------------


def cmd_inspect(args):
    obj = read_input(args.input)
    G = parse_pseudolattice(obj)
    points = sf.find_point_like(G, height=args.height)
    report = {
        "gram": G.gram,
        "serre": G.serre_operator(),
        "unimodular": G.is_unimodular(),
        "cy_parity": G.cy_parity(),
        "point_like": [list(p) for p in points.points],
        "point_like_complete": points.complete,
    }
    code = OK
    if args.surface:
        p = decode_vector(obj["point"]) if isinstance(obj, dict) and "point" in obj else None
        if args.point:
            p = tuple(int(x) for x in args.point.split(","))
        if p is None:
            if not points.points:
                report["surface"] = None
                emit(report, args.json)
                return NEGATIVE
            p = points.points[0]
        sd = sf.surface_data(G, p)
        report.update(
            point=list(p),
            ns_gram=sd.ns_gram,
            ns_embedding=[list(v) for v in sd.ns_embedding],
            ns_signature=list(sf.ns_signature(sd)) if sd.ns_rank else [0, 0, 0],
            K=list(sd.K),
            K_integral=all(x == int(x) for x in sd.K),
            defect=sd.defect,
            geometric=sf.is_geometric(sd),
        )
    emit(report, args.json)
    return code


def cmd_mutate(args):
    obj = read_input(args.input)
    G = parse_pseudolattice(obj)
    basis = parse_basis(obj) if "columns" in obj else standard_basis(G.rank)
    moves = parse_moves(obj.get("moves", []))
    if args.moves:
        moves += _parse_move_flags(args.moves, ("L", "R"))
    new = apply_moves(G, basis, moves)
    if obj.get("flips"):
        new = flip(new, [int(i) for i in obj["flips"]])
    report = {
        "columns": [list(v) for v in new],
        "gram": gram_in_basis(G, new),
        "exceptional": is_exceptional_sequence(G, new),
    }
    emit(report, args.json)
    return OK


def cmd_spherical(args):
    f = parse_hom(read_input(args.input))
    integral = has_integral_adjoint(f)
    report = {
        "adjoint": right_adjoint(f),
        "adjoint_integral": integral,
        "twist": twist(f),
        "cotwist": cotwist(f),
        "spherical": is_spherical(f),
        "relative_cy": is_relative_cy(f, args.parity) if integral else None,
        "parity": args.parity,
        "cokernel": cokernel(f),
    }
    emit(report, args.json)
    return OK if report["spherical"] else NEGATIVE


def cmd_glue(args):
    obj = read_input(args.input)
    if "first" not in obj or "second" not in obj:
        raise InputError("glue needs {'first': hom, 'second': hom}")
    G, h = glue(parse_hom(obj["first"]), parse_hom(obj["second"]))
    emit({"pseudolattice": G.to_json(), "hom": h.to_json(), "twist": twist(h)}, args.json)
    return OK


def cmd_classify_qdp(args):
    inst = parse_qdp_instance(read_input(args.input))
    diag = check_qdp(inst)
    if not diag.ok:
        emit({"qdp": diag.as_dict()}, args.json)
        return NEGATIVE
    res = classify(inst, args.budget)
    emit(res.to_json(), args.json)
    return OK


def _parse_move_flags(items, allowed):
    out = []
    for item in items:
        for part in item.split(","):
            pos, _, d = part.partition(":")
            if d not in allowed or not pos.strip().lstrip("-").isdigit():
                raise InputError(f"move {part!r} must look like 3:{allowed[0]}")
            out.append((int(pos), d))
    return out


def cmd_lefschetz(args):
    action = args.action
    if action == "sigma":
        if args.n is None:
            raise Usage("lefschetz sigma needs --n")
        n = args.n
        report = {
            "n": n,
            "sigma_y": lf.sigma_y(n),
            "meyer_phi": lf.meyer_phi_parabolic(n - 12),
            "consistent": lf.meyer_consistent(n),
        }
        emit(report, args.json)
        return OK if report["consistent"] else NEGATIVE
    obj = read_input(args.input)
    f = lf.make_factorization(parse_factorization(obj))
    if action == "total":
        emit({"total_monodromy": lf.total_monodromy(f)}, args.json)
        return OK
    if action == "hurwitz":
        moves = parse_moves(obj.get("moves", []), ("fwd", "inv"))
        if args.moves:
            moves += _parse_move_flags(args.moves, ("fwd", "inv"))
        g = lf.apply_hurwitz(f, moves)
        emit({"cycles": [list(c) for c in g], "total_monodromy": lf.total_monodromy(g)}, args.json)
        return OK
    if action == "conjugate":
        psi = obj.get("psi")
        if args.psi:
            import json

            psi = json.loads(args.psi)
        if psi is None:
            raise InputError("conjugate needs a psi matrix")
        g = lf.conjugate(f, decode_matrix(psi))
        emit({"cycles": [list(c) for c in g], "total_monodromy": lf.total_monodromy(g)}, args.json)
        return OK
    if action == "seifert":
        G, hom = lf.seifert_pseudolattice(f)
        emit({"gram": G.gram, "matrix": hom.matrix, "junction_pairing": lf.junction_pairing(f)}, args.json)
        return OK
    if action == "is-quasi-lg":
        q = lf.is_quasi_lg(f, height=args.height)
        report = {"quasi_lg": q.ok, "reason": q.reason}
        if q.P is not None:
            report["P"] = q.P
            report["k"] = q.k
        if q.r_of_a is not None:
            report["r_of_a"] = list(q.r_of_a)
        emit(report, args.json)
        return OK if q.ok else NEGATIVE
    if action == "classify-lg":
        res = lf.classify_lg(f, args.budget)
        emit(res.to_json(), args.json)
        return OK
    if action == "defect":
        d, ok = lf.defect_divisibility(f)
        emit({"defect": d, "divisible_by_12": ok}, args.json)
        return OK if ok else NEGATIVE
    raise Usage(f"unknown lefschetz action {action}")


def cmd_verify(args):
    from .verify import check_rank5_up_to_sign, run_all

    results = run_all(seed=args.seed)
    for number, name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} [{number}] {name}: {detail}")
        if number == 3:
            ok3, detail3 = check_rank5_up_to_sign()
            print(f"{'PASS' if ok3 else 'FAIL'} [3, up to sign] rank-5 equivalence with sign flips: {detail3}")
    return OK if all(r[2] for r in results) else NEGATIVE


# parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON file, '-' for stdin, or inline JSON")
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node budget")
    common.add_argument("--height", type=int, default=None, help="enumeration height bound")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    parser = argparse.ArgumentParser(prog="pseudolattices", description="Exact pseudolattice workbench.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("inspect", parents=[common], help="Serre operator, point-like vectors, NS data")
    p.add_argument("--surface", action="store_true", help="also compute NS, K and the defect")
    p.add_argument("--point", help="point-like vector as comma separated integers")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("mutate", parents=[common], help="apply mutations to a basis")
    p.add_argument("--move", dest="moves", action="append", help="move like 2:L (repeatable)")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("spherical", parents=[common], help="adjoint, twist, cotwist, cokernel")
    p.add_argument("--parity", type=int, default=0)
    p.set_defaults(func=cmd_spherical)

    p = sub.add_parser("glue", parents=[common], help="glue two homs over a common target")
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("classify-qdp", parents=[common], help="classify a quasi del Pezzo instance")
    p.set_defaults(func=cmd_classify_qdp)

    p = sub.add_parser("lefschetz", parents=[common], help="monodromy factorizations")
    p.add_argument(
        "action", choices=["total", "hurwitz", "conjugate", "seifert", "is-quasi-lg", "classify-lg", "sigma", "defect"]
    )
    p.add_argument("--n", type=int)
    p.add_argument("--move", dest="moves", action="append", help="move like 1:fwd (repeatable)")
    p.add_argument("--psi", help="conjugating matrix as JSON")
    p.set_defaults(func=cmd_lefschetz)

    p = sub.add_parser("verify-paper", parents=[common], help="run the regression suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    if args.height is None:
        args.height = sf.DEFAULT_HEIGHT if args.verb == "inspect" else 24
    try:
        return args.func(args)
    except (InputError, Usage, NotSquare, DimensionMismatch) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except ReplayMismatch as exc:
        print(f"ReplayMismatch: {exc}", file=sys.stderr)
        return BREACH
    except PseudolatticeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return NEGATIVE
    except (TypeError, ValueError, KeyError) as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
