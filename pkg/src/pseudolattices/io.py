"""JSON encoding and decoding of the package's value types.

Integers that do not fit in 64 bits are written as decimal strings and
fractions as ``"p/q"`` strings; both forms are accepted on input.
"""

from __future__ import annotations

import json
import os
import sys
from fractions import Fraction

from .lattice import Pseudolattice, standard_basis
from .linalg import Matrix
from .qdp import QdpInstance, instance_from_images
from .spherical import Hom

INT64_MAX = 2**63 - 1


class InputError(ValueError):
    """Malformed JSON input; reported as a usage error."""


def encode(obj):
    """Convert to plain JSON values."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if -INT64_MAX - 1 <= obj <= INT64_MAX else str(obj)
    if isinstance(obj, Fraction):
        return encode(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Matrix):
        return encode(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [encode(v) for v in items]
    if hasattr(obj, "to_json"):
        return encode(obj.to_json())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, **kw) -> str:
    return json.dumps(encode(obj), **kw)


def decode_number(x):
    if isinstance(x, bool):
        raise InputError("booleans are not numbers")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            if "/" in x:
                f = Fraction(x)
                return f.numerator if f.denominator == 1 else f
            return int(x)
        except ValueError as exc:
            raise InputError(f"not an integer: {x!r}") from exc
    raise InputError(f"expected an integer, got {x!r}")


def decode_int(x) -> int:
    v = decode_number(x)
    if not isinstance(v, int):
        raise InputError(f"expected an integer, got {x!r}")
    return v


def decode_matrix(rows) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("a matrix is a list of rows")
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise InputError("ragged matrix")
    return Matrix([[decode_int(x) for x in r] for r in rows], ncols=ncols)


def decode_vector(v) -> tuple:
    if not isinstance(v, list):
        raise InputError("a vector is a list of integers")
    return tuple(decode_int(x) for x in v)


def _key(obj, name):
    if not isinstance(obj, dict) or name not in obj:
        raise InputError(f"missing key {name!r}")
    return obj[name]


def parse_pseudolattice(obj) -> Pseudolattice:
    return Pseudolattice(decode_matrix(_key(obj, "gram")))


def parse_basis(obj) -> tuple:
    return tuple(decode_vector(c) for c in _key(obj, "columns"))


def parse_hom(obj) -> Hom:
    return Hom(parse_pseudolattice(_key(obj, "source")), parse_pseudolattice(_key(obj, "target")), decode_matrix(_key(obj, "matrix")))


def parse_factorization(obj) -> tuple:
    cycles = _key(obj, "cycles")
    if not isinstance(cycles, list):
        raise InputError("cycles must be a list of [p, q] pairs")
    out = []
    for c in cycles:
        c = decode_vector(c)
        if len(c) != 2:
            raise InputError(f"cycle {list(c)} must have two entries")
        out.append(c)
    return tuple(out)


def parse_moves(moves, allowed=("L", "R")) -> list:
    out = []
    for m in moves:
        if not isinstance(m, list) or len(m) != 2 or m[1] not in allowed:
            raise InputError(f"moves are [position, direction] with direction in {allowed}")
        out.append((decode_int(m[0]), m[1]))
    return out


def parse_qdp_instance(obj) -> QdpInstance:
    """Accepts ``{"hom", "e_basis"?, "ab_basis"?}``, a bare hom, or ``{"images": [[p,q],...]}``."""
    if not isinstance(obj, dict):
        raise InputError("a qdp instance is a JSON object")
    ab = decode_matrix(obj["ab_basis"]) if "ab_basis" in obj else None
    if "images" in obj:
        return instance_from_images([decode_vector(v) for v in obj["images"]], ab)
    hom = parse_hom(obj["hom"] if "hom" in obj else obj)
    basis = parse_basis(obj["e_basis"]) if "e_basis" in obj else standard_basis(hom.source.rank)
    return QdpInstance(hom, basis, Matrix.identity(2) if ab is None else ab)


def read_input(source: str | None):
    """Load JSON from ``-`` (stdin), a file path, or an inline JSON string."""
    if source is None:
        raise InputError("--input is required")
    if source == "-":
        text = sys.stdin.read()
    elif os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is neither a readable file nor valid JSON: {exc}") from exc
