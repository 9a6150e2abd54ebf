"""Homomorphisms into pseudolattices: adjoints, twists, gluing and Z(v_1, ..., v_n)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, NormMismatch, NotOddCY, NotPrimitive, NotSpherical, TargetMismatch
from .lattice import Pseudolattice
from .linalg import Matrix, as_matrix, det, inverse, is_primitive, smith_normal_form


@dataclass(frozen=True)
class Hom:
    """``f: source -> target`` given by an ``n x m`` integer matrix.

    The adjoint, twist and cotwist are always recomputed from ``matrix``.
    """

    source: Pseudolattice
    target: Pseudolattice
    matrix: Matrix

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.shape != (self.target.rank, self.source.rank):
            raise DimensionMismatch(
                f"matrix shape {m.shape} does not fit {self.source.rank} -> {self.target.rank}"
            )
        if not m.is_integral:
            raise TypeError("hom matrix must be integral")

    def __call__(self, u) -> tuple:
        return self.matrix @ u

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(), "matrix": self.matrix.tolist()}


def right_adjoint(f: Hom) -> Matrix:
    """``R = gram_G^{-1} F^T gram_H``, so that ``<f u, v>_H = <u, R v>_G``."""
    return inverse(f.source.gram) @ f.matrix.T @ f.target.gram


def has_integral_adjoint(f: Hom) -> bool:
    return right_adjoint(f).is_integral


def twist(f: Hom) -> Matrix:
    """``T_f = I - F R`` on the target."""
    return Matrix.identity(f.target.rank) - f.matrix @ right_adjoint(f)


def cotwist(f: Hom) -> Matrix:
    """``C_f = I - R F`` on the source."""
    return Matrix.identity(f.source.rank) - right_adjoint(f) @ f.matrix


def is_spherical(f: Hom) -> bool:
    if not has_integral_adjoint(f):
        return False
    return abs(det(twist(f))) == 1


def is_relative_cy(f: Hom, parity: int) -> bool:
    """``C_f = (-1)^parity S_source``.

    Only a missing integral adjoint raises; an invertibility failure simply
    makes the comparison false.
    """
    if not has_integral_adjoint(f):
        raise NotSpherical("right adjoint is not integral")
    sign = -1 if parity % 2 else 1
    return cotwist(f) == f.source.serre_operator() * sign


def cotwist_inverse(f: Hom) -> Matrix:
    """``I + R T_f^{-1} F``."""
    r = right_adjoint(f)
    return Matrix.identity(f.source.rank) + r @ inverse(twist(f)) @ f.matrix


def _block(tl: Matrix, tr: Matrix, bl: Matrix, br: Matrix) -> Matrix:
    rows = [list(tl.row(i)) + list(tr.row(i)) for i in range(tl.nrows)]
    rows += [list(bl.row(i)) + list(br.row(i)) for i in range(bl.nrows)]
    return Matrix(rows, ncols=tl.shape[1] + tr.shape[1])


def glue(f1: Hom, f2: Hom) -> tuple[Pseudolattice, Hom]:
    """``G1 x| G2`` with ``<u1, v2> = <f1 u1, f2 v2>_H`` and zero in the other corner."""
    if f1.target != f2.target:
        raise TargetMismatch("glued homomorphisms must share a target")
    H = f1.target
    tr = f1.matrix.T @ H.gram @ f2.matrix
    gram = _block(f1.source.gram, tr, Matrix.zeros(f2.source.rank, f1.source.rank), f2.source.gram)
    G = Pseudolattice(gram)
    cols = f1.matrix.columns() + f2.matrix.columns()
    return G, Hom(G, H, Matrix.from_columns(cols, nrows=H.rank))


def z_of(H: Pseudolattice, vs: Sequence[Sequence[int]]) -> tuple[Pseudolattice, Hom]:
    """``Z(v_1, ..., v_n) -> H``: unit upper triangular Gram with ``<v_i, v_j>_H`` above the diagonal."""
    if H.cy_parity() != "odd":
        raise NotOddCY("Z(v_1, ..., v_n) needs an antisymmetric target")
    vs = [tuple(v) for v in vs]
    if not vs:
        raise ValueError("need at least one vector")
    n = len(vs)
    rows = [[1 if i == j else (H.pair(vs[i], vs[j]) if i < j else 0) for j in range(n)] for i in range(n)]
    G = Pseudolattice(Matrix(rows))
    return G, Hom(G, H, Matrix.from_columns(vs, nrows=H.rank))


def z_of_vector(H: Pseudolattice, parity: int, v: Sequence[int]) -> tuple[Pseudolattice, Hom]:
    """Rank-one source ``[1]`` mapping its generator to ``v``."""
    v = tuple(v)
    if not is_primitive(v):
        raise NotPrimitive(f"{v} is not primitive")
    expected = 0 if parity % 2 else 2
    if H.pair(v, v) != expected:
        raise NormMismatch(f"<v,v> = {H.pair(v, v)}, expected {expected} for parity {parity}")
    G = Pseudolattice(Matrix([[1]]))
    return G, Hom(G, H, Matrix.from_columns([v], nrows=H.rank))


def cokernel(f: Hom) -> list[int]:
    """Nontrivial invariant factors of ``coker F``; ``0`` marks a free summand."""
    _, d, _ = smith_normal_form(f.matrix)
    n, m = f.matrix.shape
    factors = [d[i, i] for i in range(min(n, m))] + [0] * max(0, n - m)
    return [x for x in factors if x != 1]
