"""Quasi del Pezzo homomorphisms and their classification by contraction.

The search routines work on the images ``f(e_i)`` written in the chosen
``(a, b)`` basis of E rather than on the basis itself. For an exceptional
basis of a relative CY homomorphism the Gram matrix is determined by those
images, and so is the effect of every mutation, so nothing is lost. Every
result is then replayed on the genuine basis and compared exactly.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import (
    DescentStuck,
    NotASolution,
    NotQdp,
    PseudolatticeError,
    RankTooSmall,
    ReplayMismatch,
    SearchExhausted,
    TargetMismatch,
    UnexpectedCokernel,
)
from .lattice import E, Pseudolattice, apply_moves, basis_matrix, flip, gram_in_basis, is_exceptional_sequence, standard_basis
from .linalg import Matrix, as_matrix, det, is_primitive, signature
from .spherical import Hom, cokernel, glue, has_integral_adjoint, is_relative_cy, is_spherical, right_adjoint, twist, z_of, z_of_vector
from .surface import is_point_like, neron_severi, surface_data

DEFAULT_BUDGET = 200_000

CHAIN_HEAD = ((0, 1), (3, 1), (6, 1))
QUADRIC = ((0, 1), (2, 1), (2, 1), (4, 1))

# Moves taking the standard basis of Z(b,3a+b,6a+b,a,a) to that of
# Z(b,2a+b,2a+b,4a+b,a), listed in the order they are applied.
RANK5_FORWARD = ((3, "R"), (4, "R"), (2, "L"), (3, "L"), (4, "R"))
RANK5_INVERSE = tuple((i, "R" if d == "L" else "L") for i, d in reversed(RANK5_FORWARD))


def chain_images(n: int) -> tuple:
    if n < 3:
        raise ValueError("chains start at rank 3")
    return CHAIN_HEAD + ((1, 0),) * (n - 3)


@dataclass(frozen=True)
class QdpInstance:
    """A homomorphism ``f: G -> E`` with a candidate exceptional basis and ``(a, b)``.

    ``ab_basis`` has ``a`` and ``b`` as its columns, in standard coordinates of E.
    """

    f: Hom
    e_basis: tuple
    ab_basis: Matrix = field(default_factory=lambda: Matrix.identity(2))

    def __post_init__(self):
        if self.f.target.gram != E.gram:
            raise TargetMismatch("a qdp instance must map to E")
        object.__setattr__(self, "e_basis", tuple(tuple(v) for v in self.e_basis))
        object.__setattr__(self, "ab_basis", as_matrix(self.ab_basis))
        if len(self.e_basis) != self.rank or any(len(v) != self.rank for v in self.e_basis):
            raise ValueError("e_basis must consist of rank-many columns of the right length")
        if self.ab_basis.shape != (2, 2):
            raise ValueError("ab_basis must be 2x2")

    @classmethod
    def standard(cls, f: Hom, ab_basis=None) -> "QdpInstance":
        return cls(f, standard_basis(f.source.rank), Matrix.identity(2) if ab_basis is None else ab_basis)

    @property
    def G(self) -> Pseudolattice:
        return self.f.source

    @property
    def rank(self) -> int:
        return self.f.source.rank

    @property
    def a(self) -> tuple:
        return self.ab_basis.column(0)

    def r_of_a(self) -> tuple:
        return right_adjoint(self.f) @ self.a

    def images(self, basis=None) -> tuple:
        """Images of the basis elements in ``(a, b)`` coordinates."""
        inv = self.ab_basis.inverse()
        basis = self.e_basis if basis is None else basis
        return tuple(inv @ self.f(e) for e in basis)

    def to_json(self) -> dict:
        return {
            "hom": self.f.to_json(),
            "e_basis": {"columns": [list(v) for v in self.e_basis]},
            "ab_basis": self.ab_basis.tolist(),
        }


def instance_from_images(images: Sequence[Sequence[int]], ab_basis=None) -> QdpInstance:
    """``Z(v_1, ..., v_n) -> E`` with its standard basis; images given in ``(a, b)`` coordinates."""
    ab = Matrix.identity(2) if ab_basis is None else as_matrix(ab_basis)
    _, f = z_of(E, [ab @ v for v in images])
    return QdpInstance.standard(f, ab)


@dataclass(frozen=True)
class QdpDiagnostics:
    ab_valid: bool
    spherical: bool
    point_like_primitive: bool
    twist_fixes_a: bool
    point_like: bool
    relative_cy: bool
    exceptional_primitive: bool
    ns_signature: tuple | None
    signature_ok: bool
    r_of_a: tuple | None = None

    @property
    def condition1(self) -> bool:
        return self.point_like_primitive and self.twist_fixes_a and self.point_like

    @property
    def ok(self) -> bool:
        return (
            self.ab_valid
            and self.spherical
            and self.condition1
            and self.relative_cy
            and self.exceptional_primitive
            and self.signature_ok
        )

    def as_dict(self) -> dict:
        return {
            "ab_valid": self.ab_valid,
            "spherical": self.spherical,
            "condition1": self.condition1,
            "condition2": self.relative_cy,
            "condition3": self.exceptional_primitive,
            "condition4": self.signature_ok,
            "ns_signature": list(self.ns_signature) if self.ns_signature else None,
            "ok": self.ok,
        }


def check_qdp(inst: QdpInstance) -> QdpDiagnostics:
    """Evaluate each defining condition separately; never raises on a failing condition."""
    f = inst.f
    ab_valid = det(inst.ab_basis) == 1
    spherical = is_spherical(f)
    integral = has_integral_adjoint(f)
    ra = inst.r_of_a() if integral else None
    prim = bool(ra) and any(ra) and is_primitive(ra)
    fixes = twist(f) @ inst.a == inst.a
    try:
        pl = bool(ra) and any(ra) and is_point_like(f.source, ra)
    except PseudolatticeError:
        pl = False
    rel = integral and is_relative_cy(f, 0)
    exc = is_exceptional_sequence(f.source, inst.e_basis) and all(is_primitive(f(e)) for e in inst.e_basis)
    sig, sig_ok = None, False
    if pl:
        sd = neron_severi(f.source, ra)
        sig = signature(sd.ns_gram) if sd.ns_rank else (0, 0, 0)
        sig_ok = sd.ns_rank >= 1 and sig == (1, sd.ns_rank - 1, 0)
    return QdpDiagnostics(ab_valid, spherical, prim, fixes, pl, rel, exc, sig, sig_ok, ra)


def require_qdp(inst: QdpInstance) -> QdpDiagnostics:
    diag = check_qdp(inst)
    if not diag.ok:
        failed = [k for k, v in diag.as_dict().items() if v is False]
        raise NotQdp(f"quasi del Pezzo conditions fail: {', '.join(failed)}")
    return diag


def basis_norm(inst: QdpInstance, basis=None) -> int:
    """Sum of ``rank(e_i)^2`` with ``rank(u) = <u, r(a)>``."""
    G = inst.G
    ra = inst.r_of_a()
    basis = inst.e_basis if basis is None else basis
    return sum(G.pair(e, ra) ** 2 for e in basis)


# image-level moves ----------------------------------------------------------------


def e_pair(v, w) -> int:
    """``<v, w>_E`` for vectors in a determinant-one basis of E."""
    return v[1] * w[0] - v[0] * w[1]


def normalize_cycle(v) -> tuple:
    p, q = v
    return (p, q) if q > 0 or (q == 0 and p > 0) else (-p, -q)


def mutate_images(images: tuple, i: int, direction: str) -> tuple:
    v, w = images[i - 1], images[i]
    c = e_pair(v, w)
    if direction == "L":
        new = ((w[0] - c * v[0], w[1] - c * v[1]), v)
    else:
        new = (w, (v[0] - c * w[0], v[1] - c * w[1]))
    return images[: i - 1] + new + images[i + 1 :]


def _normal(images) -> tuple:
    return tuple(normalize_cycle(v) for v in images)


def _norm(images) -> int:
    return sum(v[1] * v[1] for v in images)


class SearchResult:
    def __init__(self, moves, images, expanded):
        self.moves = moves
        self.images = images
        self.expanded = expanded


def best_first(images, goal: Callable, budget: int = DEFAULT_BUDGET, length: int | None = None) -> SearchResult:
    """Best-first search on ``sum q_i^2`` over the first ``length`` positions, FIFO on ties."""
    length = len(images) if length is None else length
    start = _normal(images)
    parent: dict = {start: None}
    counter = itertools.count()
    heap = [(_norm(start[:length]), next(counter), start)]
    expanded = 0
    while heap:
        _, _, state = heapq.heappop(heap)
        if goal(state):
            moves = []
            cur = state
            while parent[cur] is not None:
                prev, move = parent[cur]
                moves.append(move)
                cur = prev
            return SearchResult(moves[::-1], state, expanded)
        if expanded >= budget:
            break
        expanded += 1
        for i in range(1, length):
            for d in ("L", "R"):
                nxt = _normal(mutate_images(state, i, d))
                if nxt not in parent:
                    parent[nxt] = (state, (i, d))
                    heapq.heappush(heap, (_norm(nxt[:length]), next(counter), nxt))
    raise SearchExhausted(f"no goal basis within {budget} expansions", partial=expanded)


@dataclass(frozen=True)
class RankZero:
    basis: tuple
    index: int
    moves: tuple
    expanded: int


def _has_rank_zero(images, length):
    return any(v[1] == 0 for v in images[:length])


def find_rank_zero(inst: QdpInstance, budget: int = DEFAULT_BUDGET, allow_rank4: bool = False, check: bool = True) -> RankZero:
    """Mutate until some basis element has rank zero; returns that basis and the 1-based index."""
    if inst.rank < 4 or (inst.rank == 4 and not allow_rank4):
        raise RankTooSmall(f"rank-zero search needs rank > 4, got {inst.rank}")
    if check:
        require_qdp(inst)
    n = inst.rank
    res = best_first(inst.images(), lambda s: _has_rank_zero(s, n), budget)
    basis = apply_moves(inst.G, inst.e_basis, res.moves)
    images = inst.images(basis)
    index = next(i for i, v in enumerate(images) if v[1] == 0) + 1
    return RankZero(basis, index, tuple(res.moves), res.expanded)


def push_to_end(inst: QdpInstance, basis, alpha: int) -> tuple[tuple, list]:
    """Left mutations ``L_{alpha,alpha+1}, ..., L_{n-1,n}`` carrying ``e_alpha`` to the end."""
    from .errors import IndexOutOfRange

    n = len(basis)
    if not 1 <= alpha <= n:
        raise IndexOutOfRange(f"position {alpha} outside 1..{n}")
    moves = [(j, "L") for j in range(alpha, n)]
    return apply_moves(inst.G, basis, moves), moves


@dataclass(frozen=True)
class ContractionWitness:
    """Moves (relative to the input basis), the sign flip and the mutated basis ``(e', e_alpha)``."""

    moves: tuple
    alpha: int
    flipped: bool
    basis: tuple
    psi: Matrix
    checks: dict


def contract(inst: QdpInstance, budget: int = DEFAULT_BUDGET, rank_zero: RankZero | None = None, check: bool = True):
    """Split off a rank-zero element with image ``a`` and return the rank ``n-1`` instance."""
    n = inst.rank
    if check:
        require_qdp(inst)
    if rank_zero is None:
        rank_zero = find_rank_zero(inst, budget, allow_rank4=False, check=False)
    basis, alpha = rank_zero.basis, rank_zero.index
    images = inst.images(basis)
    flipped = images[alpha - 1] == (-1, 0)
    if flipped:
        basis = flip(basis, [alpha])
    elif images[alpha - 1] != (1, 0):
        raise NotQdp(f"rank-zero element has image {images[alpha - 1]}, not +-a")
    hat, push = push_to_end(inst, basis, alpha)
    G = inst.G
    full_gram = gram_in_basis(G, hat)
    sub = Pseudolattice(full_gram.submatrix(range(n - 1), range(n - 1)))
    f_sub = Hom(sub, E, Matrix.from_columns([inst.f(e) for e in hat[:-1]], nrows=2))
    new = QdpInstance.standard(f_sub, inst.ab_basis)

    checks = {}
    _, zeta = z_of_vector(E, 1, inst.a)
    glued_gram, glued = glue(f_sub, zeta)
    checks["glue_gram"] = glued_gram.gram == full_gram
    psi = basis_matrix(hat).inverse()
    checks["commutes"] = glued.matrix @ psi == inst.f.matrix
    ra_coords = psi @ inst.r_of_a()
    checks["r_prime_a"] = ra_coords[-1] == 0 and tuple(ra_coords[:-1]) == new.r_of_a()
    checks["qdp"] = check_qdp(new).ok if check else None
    if not all(v is not False for v in checks.values()):
        raise ReplayMismatch(f"contraction witness failed: {checks}")
    moves = tuple(rank_zero.moves) + tuple(push)
    return new, ContractionWitness(moves, alpha, flipped, hat, psi, checks)


# Markov triples -------------------------------------------------------------------


def is_markov(t) -> bool:
    x, y, z = t
    return x * x + y * y + z * z == x * y * z


def vieta(t, i: int) -> tuple:
    """Replace coordinate ``i`` (0-based) by the product of the others minus itself."""
    t = list(t)
    others = [t[j] for j in range(3) if j != i]
    t[i] = others[0] * others[1] - t[i]
    return tuple(t)


def markov_descent(t) -> tuple[tuple, list]:
    """Greedy Vieta descent to ``(3, 6, 3)`` up to order.

    The trace lists the replaced coordinates (0-based). Descent stops as soon as
    a reordering of ``(3, 6, 3)`` is reached; ``(3, 3, 3)`` sits one step below
    it and is lifted back up.
    """
    t = tuple(t)
    if len(t) != 3 or not is_markov(t) or min(t) <= 0:
        raise NotASolution(f"{t} is not a positive solution of x^2+y^2+z^2 = xyz")
    trace = []
    while sorted(t) != [3, 3, 6]:
        if t == (3, 3, 3):
            t = vieta(t, 0)
            trace.append(0)
            continue
        options = [(sum(vieta(t, i)), i) for i in range(3)]
        best, i = min(options)
        if best >= sum(t):
            raise DescentStuck(f"no downhill Vieta move from {t}")
        t = vieta(t, i)
        trace.append(i)
    return t, trace


def _upper(gram: Matrix) -> tuple:
    return gram[0, 1], gram[0, 2], gram[1, 2]


def _positive_signs(G, basis):
    x, y, z = _upper(gram_in_basis(G, basis))
    if x < 0 and y < 0:
        return flip(basis, [1])
    if x < 0 and z < 0:
        return flip(basis, [2])
    if y < 0 and z < 0:
        return flip(basis, [3])
    return basis


def _k_from_first(images) -> int:
    p, q = images[0]
    if abs(q) != 1:
        raise NotQdp(f"first image {images[0]} does not have rank +-1")
    return -p * q


def match_rank3(inst: QdpInstance, check: bool = True) -> tuple[list, int]:
    """Mutations bringing the Gram matrix to ``[[1,3,6],[0,1,3],[0,0,1]]`` and the base change ``k``.

    Lifted Vieta moves: in Gram coordinates ``(x, y, z) = (g12, g13, g23)``,
    ``L12`` replaces ``z``, ``R12`` and ``L23`` replace ``y``, ``R23`` replaces
    ``x``, up to signs and reordering. Signs are fixed by flips, which are not
    recorded since they commute with mutations.
    """
    if inst.rank != 3:
        raise ValueError("match_rank3 needs rank 3")
    if check:
        require_qdp(inst)
    G = inst.G
    basis = _positive_signs(G, inst.e_basis)
    trace: list = []
    target = (3, 6, 3)

    def size(b):
        return sum(abs(c) for c in _upper(gram_in_basis(G, b)))

    while _upper(gram_in_basis(G, basis)) != target:
        cur = _upper(gram_in_basis(G, basis))
        if not is_markov(cur):
            raise NotASolution(f"Gram triple {cur} is not a Markov solution")
        if cur == (3, 3, 3):
            move = (1, "L")
        else:
            options = []
            for move in ((1, "L"), (1, "R"), (2, "L"), (2, "R")):
                options.append((size(apply_moves(G, basis, [move])), move))
            best, move = min(options, key=lambda o: o[0])
            if best >= size(basis):
                raise DescentStuck(f"no downhill mutation from Gram triple {cur}")
        basis = _positive_signs(G, apply_moves(G, basis, [move]))
        trace.append(move)
        if len(trace) > 10_000:
            raise DescentStuck("descent did not terminate")
    k = _k_from_first(inst.images(basis))
    return trace, k


def cokernel_of(inst: QdpInstance) -> list:
    return cokernel(inst.f)


def match_quadric(inst: QdpInstance, budget: int = DEFAULT_BUDGET) -> SearchResult:
    def goal(s):
        if any(v[1] != 1 for v in s):
            return False
        p0 = s[0][0]
        return tuple(v[0] - p0 for v in s) == (0, 2, 2, 4)

    return best_first(inst.images(), goal, budget)


# classification ------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationResult:
    normal_form: str
    n: int
    mutation_trace: tuple
    sign_flips: frozenset
    base_change_k: int
    contraction_order: tuple
    witness_ab: Matrix
    expanded: int = 0

    @property
    def target_images(self) -> tuple:
        return QUADRIC if self.normal_form == "Quadric" else chain_images(self.n)

    def to_json(self) -> dict:
        out = {"normal_form": self.normal_form}
        if self.normal_form == "P2Chain":
            out["n"] = self.n
        out.update(
            rank=self.n,
            mutation_trace=[[i, d] for i, d in self.mutation_trace],
            sign_flips=sorted(self.sign_flips),
            base_change_k=self.base_change_k,
            contraction_order=list(self.contraction_order),
            witness_ab=self.witness_ab.tolist(),
        )
        return out


def base_change(k: int) -> Matrix:
    return Matrix([[1, k], [0, 1]])


def replay(inst: QdpInstance, moves, flips, k) -> tuple:
    """Basis and images (in the base-changed ``(a, b)``) after moves, flips and ``[[1,k],[0,1]]``."""
    basis = flip(apply_moves(inst.G, inst.e_basis, moves), flips)
    kmat = base_change(k)
    return basis, tuple(kmat @ v for v in inst.images(basis))


def verify_replay(inst: QdpInstance, result: ClassificationResult) -> bool:
    """Exact comparison of Gram, F and R against the normal form model."""
    basis, images = replay(inst, result.mutation_trace, result.sign_flips, result.base_change_k)
    target = result.target_images
    if images != tuple(target):
        return False
    model, zf = z_of(E, list(target))
    if gram_in_basis(inst.G, basis) != model.gram:
        return False
    ab = result.witness_ab
    P = basis_matrix(basis)
    F_new = ab.inverse() @ inst.f.matrix @ P
    R_new = P.inverse() @ right_adjoint(inst.f) @ ab
    return F_new == zf.matrix and R_new == right_adjoint(zf)


def _finish(inst: QdpInstance, moves, normal_form: str, order, expanded) -> ClassificationResult:
    n = inst.rank
    target = QUADRIC if normal_form == "Quadric" else chain_images(n)
    unsigned = apply_moves(inst.G, inst.e_basis, moves)
    images = inst.images(unsigned)
    k = _k_from_first(images)
    kmat = base_change(k)
    flips = set()
    for i, (v, t) in enumerate(zip(images, target), start=1):
        w = kmat @ v
        if w == tuple(-x for x in t):
            flips.add(i)
        elif w != tuple(t):
            raise ReplayMismatch(f"position {i}: image {w} does not match {t}")
    witness_ab = inst.ab_basis @ kmat.inverse()
    result = ClassificationResult(normal_form, n, tuple(moves), frozenset(flips), k, tuple(order), witness_ab, expanded)
    if not verify_replay(inst, result):
        raise ReplayMismatch("classification replay does not reproduce the normal form")
    return result


def classify(inst: QdpInstance, budget: int = DEFAULT_BUDGET) -> ClassificationResult:
    """Contract down to rank 4 or 3 and match the chain or quadric model."""
    require_qdp(inst)
    n = inst.rank
    if n < 3:
        raise NotQdp("quasi del Pezzo homomorphisms have rank at least 3")
    moves: list = []
    order: list = []
    expanded = 0
    cur = inst
    while cur.rank > 4:
        rz = find_rank_zero(cur, budget, check=False)
        expanded += rz.expanded
        cur, wit = contract(cur, budget, rank_zero=rz, check=False)
        moves += wit.moves
        order.append(wit.alpha)
    if cur.rank == 4:
        coker = cokernel(cur.f)
        if coker == []:
            rz = find_rank_zero(cur, budget, allow_rank4=True, check=False)
            expanded += rz.expanded
            cur, wit = contract(cur, budget, rank_zero=rz, check=False)
            moves += wit.moves
            order.append(wit.alpha)
        elif coker == [2]:
            res = match_quadric(cur, budget)
            expanded += res.expanded
            moves += res.moves
            if n == 4:
                return _finish(inst, moves, "Quadric", order, expanded)
            moves += RANK5_INVERSE
            return _finish(inst, moves, "P2Chain", order, expanded)
        else:
            raise UnexpectedCokernel(f"rank-4 cokernel invariants {coker}, expected [] or [2]")
    trace3, _ = match_rank3(cur, check=False)
    moves += trace3
    return _finish(inst, moves, "P2Chain", order, expanded)


def match_rank4(inst: QdpInstance, budget: int = DEFAULT_BUDGET) -> ClassificationResult:
    if inst.rank != 4:
        raise ValueError("match_rank4 needs rank 4")
    return classify(inst, budget)


def twist_in(ab: Matrix, f: Hom) -> Matrix:
    """Twist of ``f`` written in the basis given by the columns of ``ab``."""
    return ab.inverse() @ twist(f) @ ab


def twist_defect_check(inst: QdpInstance, result: ClassificationResult) -> tuple[bool, object]:
    """Twist ``[[1, n-12],[0,1]]`` in the witness basis and defect of the point-like ``r(a)``."""
    t = twist_in(result.witness_ab, inst.f)
    d = surface_data(inst.G, inst.r_of_a()).defect
    return t == Matrix([[1, inst.rank - 12], [0, 1]]) and d == 0, d
