"""Pseudolattices, Serre operators, exceptional sequences and mutations.

A pseudolattice is stored as its Gram matrix in fixed ambient coordinates.
Elements are integer coordinate tuples and an ordered basis is a tuple of
such columns; mutations return new tuples and never touch the lattice.
Mutation positions are 1-based, matching the usual ``L_{i,i+1}`` notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, IndexOutOfRange, NotABasis, NotExceptional, NotSquare, Singular
from .linalg import Matrix, as_matrix, det, inverse

Element = tuple
Basis = tuple


@dataclass(frozen=True)
class Pseudolattice:
    """Free abelian group with a nondegenerate, possibly non-symmetric form."""

    gram: Matrix

    def __post_init__(self):
        gram = as_matrix(self.gram)
        object.__setattr__(self, "gram", gram)
        if not gram.is_square:
            raise NotSquare(f"Gram matrix has shape {gram.shape}")
        if not gram.is_integral:
            raise TypeError("Gram matrix must be integral")
        if det(gram) == 0:
            raise Singular("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return self.gram.nrows

    def _check(self, *vectors):
        for v in vectors:
            if len(v) != self.rank:
                raise DimensionMismatch(f"element of length {len(v)} in a rank-{self.rank} pseudolattice")

    def pair(self, u: Sequence[int], v: Sequence[int]) -> int:
        """``<u, v>`` computed as ``u^T gram v``."""
        self._check(u, v)
        return sum(ui * x for ui, x in zip(u, self.gram @ v))

    def serre_operator(self) -> Matrix:
        """``gram^{-1} gram^T``; integral exactly when the lattice is unimodular."""
        return inverse(self.gram) @ self.gram.T

    def is_unimodular(self) -> bool:
        return abs(det(self.gram)) == 1

    def cy_parity(self) -> str | None:
        """``"even"`` for a symmetric form, ``"odd"`` for an antisymmetric one."""
        if self.gram == self.gram.T:
            return "even"
        if self.gram == -self.gram.T:
            return "odd"
        return None

    def to_json(self) -> dict:
        return {"gram": self.gram.tolist()}


#: The rank-2 antisymmetric pseudolattice with <a,b> = -1, <b,a> = 1.
E = Pseudolattice(Matrix([[0, -1], [1, 0]]))
A_VEC = (1, 0)
B_VEC = (0, 1)


def pair(G: Pseudolattice, u, v) -> int:
    return G.pair(u, v)


def standard_basis(n: int) -> Basis:
    return tuple(tuple(int(i == j) for i in range(n)) for j in range(n))


def basis_matrix(seq: Sequence[Element]) -> Matrix:
    return Matrix.from_columns(seq)


def is_exceptional(G: Pseudolattice, e: Element) -> bool:
    return G.pair(e, e) == 1


def is_exceptional_sequence(G: Pseudolattice, seq: Sequence[Element]) -> bool:
    for i, ei in enumerate(seq):
        if G.pair(ei, ei) != 1:
            return False
        for ej in seq[:i]:
            if G.pair(ei, ej) != 0:
                return False
    return True


def is_basis(seq: Sequence[Element]) -> bool:
    seq = list(seq)
    return bool(seq) and len(seq) == len(seq[0]) and abs(det(basis_matrix(seq))) == 1


def _combine(u, k, e):
    return tuple(x - k * y for x, y in zip(u, e))


def mutate_left(G: Pseudolattice, e: Element, u: Element) -> Element:
    """``L_e(u) = u - <e,u> e``."""
    if not is_exceptional(G, e):
        raise NotExceptional(f"{e} is not exceptional")
    return _combine(u, G.pair(e, u), e)


def mutate_right(G: Pseudolattice, u: Element, e: Element) -> Element:
    """``R_e(u) = u - <u,e> e``."""
    if not is_exceptional(G, e):
        raise NotExceptional(f"{e} is not exceptional")
    return _combine(u, G.pair(u, e), e)


def mutate_basis(G: Pseudolattice, seq: Sequence[Element], i: int, direction: str) -> Basis:
    """Apply ``L_{i,i+1}`` (direction ``"L"``) or ``R_{i,i+1}`` (``"R"``).

    ``i`` is 1-based. The result is again exceptional when ``seq`` is; the
    two directions are mutually inverse.
    """
    seq = tuple(tuple(v) for v in seq)
    if not 1 <= i < len(seq):
        raise IndexOutOfRange(f"mutation position {i} outside 1..{len(seq) - 1}")
    a, b = seq[i - 1], seq[i]
    if direction == "L":
        pair_ = (mutate_left(G, a, b), a)
    elif direction == "R":
        pair_ = (b, mutate_right(G, a, b))
    else:
        raise ValueError(f"direction must be 'L' or 'R', got {direction!r}")
    return seq[: i - 1] + pair_ + seq[i + 1 :]


def apply_moves(G: Pseudolattice, seq: Sequence[Element], moves) -> Basis:
    """Apply ``(i, direction)`` moves in order."""
    seq = tuple(tuple(v) for v in seq)
    for i, direction in moves:
        seq = mutate_basis(G, seq, i, direction)
    return seq


def flip(seq: Sequence[Element], indices) -> Basis:
    """Negate the (1-based) positions in ``indices``."""
    idx = set(indices)
    return tuple(tuple(-x for x in v) if k + 1 in idx else tuple(v) for k, v in enumerate(seq))


def gram_in_basis(G: Pseudolattice, seq: Sequence[Element]) -> Matrix:
    """Gram matrix ``P^T gram P`` of the form in the basis ``seq``."""
    if not is_basis(seq) or len(seq) != G.rank:
        raise NotABasis("columns do not form a unimodular basis")
    p = basis_matrix(seq)
    return p.T @ G.gram @ p


def exceptional_sequence_is_basis(G: Pseudolattice, seq: Sequence[Element]) -> bool:
    """A full-length exceptional sequence is a basis and forces unimodularity.

    Returned as a checked fact rather than assumed.
    """
    if len(seq) != G.rank or not is_exceptional_sequence(G, seq):
        return False
    return is_basis(seq) and G.is_unimodular()
