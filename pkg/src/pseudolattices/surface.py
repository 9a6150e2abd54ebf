"""Point-like elements, the rank function, Neron-Severi lattice and canonical class."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import NotPointLike, SearchExhausted, ZeroVector
from .lattice import Pseudolattice
from .linalg import Matrix, integer_kernel, is_primitive, signature, smith_normal_form, solve_rational, vec_gcd

DEFAULT_HEIGHT = 16


def _rank_row(G: Pseudolattice, p) -> tuple:
    # rank(u) = <u, p> = u . (gram p)
    return G.gram @ p


def is_point_like(G: Pseudolattice, p: Sequence[int]) -> bool:
    p = tuple(p)
    G._check(p)
    if not any(p):
        raise ZeroVector("point-like candidates must be nonzero")
    if not is_primitive(p) or G.pair(p, p) != 0:
        return False
    if G.gram @ p != G.gram.T @ p:
        return False
    perp = integer_kernel(Matrix([_rank_row(G, p)]))
    return all(G.pair(u, v) == G.pair(v, u) for u, v in itertools.combinations(perp, 2))


class PointLikeSearch(NamedTuple):
    points: list
    complete: bool


def find_point_like(G: Pseudolattice, height: int = DEFAULT_HEIGHT, max_candidates: int = 2_000_000) -> PointLikeSearch:
    """All point-like elements, both signs.

    Point-like vectors live in the kernel of ``gram - gram^T``. When that
    kernel has rank 1 the answer is exact. Otherwise primitive kernel
    combinations with coefficients bounded by ``height`` are scanned and the
    result is marked incomplete.
    """
    kernel = integer_kernel(G.gram - G.gram.T)
    if not kernel:
        return PointLikeSearch([], True)
    if len(kernel) == 1:
        g = kernel[0]
        found = [g, tuple(-x for x in g)] if is_point_like(G, g) else []
        return PointLikeSearch(found, True)
    if (2 * height + 1) ** len(kernel) > max_candidates:
        raise SearchExhausted(
            f"kernel of rank {len(kernel)} too large to scan to height {height}", partial=PointLikeSearch([], False)
        )
    found = []
    for coeffs in itertools.product(range(-height, height + 1), repeat=len(kernel)):
        if vec_gcd(coeffs) != 1:
            continue
        v = tuple(sum(c * k[i] for c, k in zip(coeffs, kernel)) for i in range(G.rank))
        if is_point_like(G, v):
            found.append(v)
    return PointLikeSearch(found, False)


def rank_of(G: Pseudolattice, p, u, check: bool = True) -> int:
    """``rank(u) = <u, p>``."""
    if check and not is_point_like(G, p):
        raise NotPointLike(f"{tuple(p)} is not point-like")
    return G.pair(u, p)


@dataclass(frozen=True)
class SurfaceData:
    """Neron-Severi data attached to a choice of point-like element ``p``.

    ``perp_basis`` is a basis of ``p^perp`` whose first vector is ``+-p``;
    the remaining vectors (``ns_embedding``) lift a basis of NS. ``coord_map``
    sends an element of ``p^perp`` to its coordinates in ``perp_basis``.
    """

    ambient: Pseudolattice
    p: tuple
    perp_basis: tuple
    coord_map: Matrix
    ns_gram: Matrix
    K: tuple | None = None
    defect: int | Fraction | None = None

    @property
    def ns_embedding(self) -> tuple:
        return self.perp_basis[1:]

    @property
    def ns_rank(self) -> int:
        return self.ns_gram.nrows

    def rank(self, u) -> int:
        return self.ambient.pair(u, self.p)

    def ns_coordinates(self, u) -> tuple:
        if self.rank(u) != 0:
            raise ValueError(f"{tuple(u)} is not orthogonal to p")
        return (self.coord_map @ u)[1:]

    def q(self, x, y):
        return sum(a * b for a, b in zip(x, self.ns_gram @ y))

    def lift(self, coords) -> tuple:
        return tuple(sum(c * v[i] for c, v in zip(coords, self.ns_embedding)) for i in range(self.ambient.rank))


def neron_severi(G: Pseudolattice, p) -> SurfaceData:
    """Saturated ``p^perp`` modulo ``Z p`` with the form ``q = -<.,.>``."""
    p = tuple(p)
    if not is_point_like(G, p):
        raise NotPointLike(f"{p} is not point-like")
    n = G.rank
    perp = integer_kernel(Matrix([_rank_row(G, p)]))
    kmat = Matrix.from_columns(perp)
    u, _, v = smith_normal_form(kmat)
    # coordinates of p in the kernel basis
    up = u @ p
    c = v @ up[: n - 1]
    u2, _, _ = smith_normal_form(Matrix.from_columns([c]))
    w = u2.inverse()
    lifts = kmat @ w
    perp_basis = tuple(lifts.columns())
    coord_map = w.inverse() @ v @ u.submatrix(range(n - 1), range(n))
    ns = perp_basis[1:]
    gram = Matrix([[-G.pair(a, b) for b in ns] for a in ns], ncols=len(ns))
    if gram != gram.T:
        raise NotPointLike("restricted form on p^perp is not symmetric")
    return SurfaceData(G, p, perp_basis, coord_map, gram)


def lambda_class(sd: SurfaceData, u1, u2) -> tuple:
    """NS class of ``rank(u1) u2 - rank(u2) u1``."""
    r1, r2 = sd.rank(u1), sd.rank(u2)
    return sd.ns_coordinates(tuple(r1 * b - r2 * a for a, b in zip(u1, u2)))


def canonical_class(sd: SurfaceData) -> tuple:
    """Solve ``q(K, lambda(e_i ^ e_j)) = -(<e_i,e_j> - <e_j,e_i>)`` over Q."""
    G = sd.ambient
    n = G.rank
    rows, rhs = [], []
    basis = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        lam = lambda_class(sd, basis[i], basis[j])
        rows.append(sd.ns_gram @ lam)
        rhs.append(G.gram[j, i] - G.gram[i, j])
    if sd.ns_rank == 0:
        if any(rhs):
            from .errors import Inconsistent

            raise Inconsistent("nonzero antisymmetry with a rank-0 Neron-Severi lattice")
        return ()
    return solve_rational(Matrix(rows, ncols=sd.ns_rank), rhs)


def surface_data(G: Pseudolattice, p) -> SurfaceData:
    """Neron-Severi lattice together with its canonical class and defect."""
    sd = neron_severi(G, p)
    K = canonical_class(sd)
    d = Fraction(sd.q(K, K)) + sd.ns_rank - 10
    return replace(sd, K=K, defect=d.numerator if d.denominator == 1 else d)


def defect(G: Pseudolattice, p):
    return surface_data(G, p).defect


def ns_signature(sd: SurfaceData) -> tuple[int, int, int]:
    return signature(sd.ns_gram)


def is_geometric(sd: SurfaceData) -> bool | None:
    """Informational check ``q(K,u) = q(u,u) mod 2``; ``None`` when K is not integral."""
    K = sd.K if sd.K is not None else canonical_class(sd)
    if not all(isinstance(x, int) for x in K):
        return None
    m = sd.ns_rank
    for i in range(m):
        u = tuple(int(i == j) for j in range(m))
        if (sd.q(K, u) - sd.q(u, u)) % 2:
            return False
    return True
