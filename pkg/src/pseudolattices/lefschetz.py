"""Genus-one Lefschetz fibrations over a disc, encoded by monodromy factorizations in SL(2, Z)."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import IndexOutOfRange, NotParabolic, NotPrimitive, NotQuasiLG, NotSL2, ReplayMismatch
from .lattice import E, Pseudolattice
from .linalg import Matrix, as_matrix, ext_gcd, integer_kernel, is_primitive, signature, vec_gcd
from .qdp import (
    DEFAULT_BUDGET,
    QUADRIC,
    ClassificationResult,
    QdpInstance,
    base_change,
    chain_images,
    classify,
    normalize_cycle,
)
from .spherical import Hom, right_adjoint, z_of
from .surface import neron_severi

Cycle = tuple
Factorization = tuple

IDENTITY = Matrix.identity(2)


def make_factorization(cycles: Sequence[Sequence[int]]) -> Factorization:
    """Validate primitivity and store every cycle sign-normalized."""
    out = []
    for c in cycles:
        c = tuple(int(x) for x in c)
        if len(c) != 2 or not is_primitive(c):
            raise NotPrimitive(f"vanishing cycle {c} is not primitive")
        out.append(normalize_cycle(c))
    if not out:
        raise ValueError("a factorization needs at least one cycle")
    return tuple(out)


def dehn_matrix(c: Cycle) -> Matrix:
    """``M_{p,q} = [[1 - pq, p^2], [-q^2, 1 + pq]]``."""
    p, q = c
    return Matrix([[1 - p * q, p * p], [-q * q, 1 + p * q]])


def total_monodromy(f: Factorization) -> Matrix:
    m = IDENTITY
    for c in f:
        m = m @ dehn_matrix(c)
    return m


def hurwitz(f: Factorization, i: int, direction: str = "fwd") -> Factorization:
    """``fwd`` replaces ``(c_i, c_{i+1})`` by ``(M_{c_i} c_{i+1}, c_i)``; ``inv`` undoes it."""
    f = tuple(f)
    if not 1 <= i < len(f):
        raise IndexOutOfRange(f"Hurwitz position {i} outside 1..{len(f) - 1}")
    c, d = f[i - 1], f[i]
    if direction == "fwd":
        new = (normalize_cycle(dehn_matrix(c) @ d), c)
    elif direction == "inv":
        new = (d, normalize_cycle(dehn_matrix(d).inverse() @ c))
    else:
        raise ValueError(f"direction must be 'fwd' or 'inv', got {direction!r}")
    return f[: i - 1] + new + f[i + 1 :]


def apply_hurwitz(f: Factorization, moves) -> Factorization:
    for i, d in moves:
        f = hurwitz(f, i, d)
    return f


def check_sl2(psi) -> Matrix:
    psi = as_matrix(psi)
    if psi.shape != (2, 2) or not psi.is_integral or psi.det() != 1:
        raise NotSL2(f"{psi} is not in SL(2,Z)")
    return psi


def conjugate(f: Factorization, psi) -> Factorization:
    """Global conjugation ``tau_i -> psi tau_i psi^{-1}``, i.e. ``c_i -> psi c_i``."""
    psi = check_sl2(psi)
    return tuple(normalize_cycle(psi @ c) for c in f)


def seifert_pseudolattice(f: Factorization) -> tuple[Pseudolattice, Hom]:
    """Thimble pairing ``q_i p_j - p_i q_j`` (``i < j``) with the asymptotic charge map."""
    n = len(f)
    rows = [
        [1 if i == j else (f[i][1] * f[j][0] - f[i][0] * f[j][1] if i < j else 0) for j in range(n)]
        for i in range(n)
    ]
    G = Pseudolattice(Matrix(rows))
    hom = Hom(G, E, Matrix.from_columns(list(f), nrows=2))
    zG, zf = z_of(E, list(f))
    if zG.gram != G.gram or zf.matrix != hom.matrix:
        raise ReplayMismatch("Seifert pairing disagrees with Z(v_1, ..., v_n)")
    return G, hom


def junction_pairing(f: Factorization) -> Matrix:
    """``-(chi + chi^T) / 2``."""
    G, _ = seifert_pseudolattice(f)
    return (G.gram + G.gram.T) * Fraction(-1, 2)


def normalize_parabolic(M) -> tuple[int, Matrix]:
    """``(k, P)`` with ``P^{-1} M P = [[1, k], [0, 1]]``.

    The first column of ``P`` is the sign-normalized primitive fixed vector
    and the second completes it to determinant one, reduced so the choice is
    deterministic.
    """
    M = check_sl2(M)
    if M == IDENTITY:
        return 0, IDENTITY
    if M[0, 0] + M[1, 1] != 2:
        raise NotParabolic(f"trace {M[0, 0] + M[1, 1]} is not 2")
    (v,) = integer_kernel(M - IDENTITY)
    v0, v1 = normalize_cycle(v)
    _, s, t = ext_gcd(v0, v1)
    # v0 * y - v1 * x = 1
    x, y = -t, s
    if v1 != 0:
        # v1 > 0 after normalization; take 0 <= y < v1
        m = (y % v1 - y) // v1
        x, y = x + m * v0, y + m * v1
    else:
        x, y = 0, v0
    P = Matrix([[v0, x], [v1, y]])
    N = P.inverse() @ M @ P
    if N[0, 0] != 1 or N[1, 0] != 0 or N[1, 1] != 1:
        raise ReplayMismatch(f"parabolic normal form failed for {M}")
    return N[0, 1], P


def complete_to_sl2(v) -> Matrix:
    """An SL(2,Z) matrix with first column ``v``."""
    v0, v1 = v
    if vec_gcd(v) != 1:
        raise NotPrimitive(f"{tuple(v)} is not primitive")
    _, s, t = ext_gcd(v0, v1)
    return Matrix([[v0, -t], [v1, s]])


@dataclass(frozen=True)
class QuasiLG:
    ok: bool
    reason: str
    P: Matrix | None = None
    k: int | None = None
    r_of_a: tuple | None = None

    def __bool__(self):
        return self.ok


def is_quasi_lg(f: Factorization, height: int = 24) -> QuasiLG:
    """Total monodromy conjugate to ``[[1, n-12], [0, 1]]`` with ``r(a)`` primitive.

    ``P`` conjugates ``f`` into the frame where ``a = (1, 0)``:
    ``conjugate(f, P^{-1})`` has the normalized monodromy.
    """
    f = tuple(f)
    n = len(f)
    M = total_monodromy(f)
    if n == 12:
        if M != IDENTITY:
            return QuasiLG(False, "total monodromy is not the identity")
        _, hom = seifert_pseudolattice(f)
        R = right_adjoint(hom)
        if vec_gcd([x for row in R.tolist() for x in row]) != 1:
            return QuasiLG(False, "entries of r share a common factor")
        for h in range(1, height + 1):
            for v in itertools.product(range(-h, h + 1), repeat=2):
                if max(abs(v[0]), abs(v[1])) != h or vec_gcd(v) != 1 or normalize_cycle(v) != v:
                    continue
                ra = R @ v
                if is_primitive(ra):
                    return QuasiLG(True, "ok", complete_to_sl2(v), 0, ra)
        from .errors import SearchExhausted

        raise SearchExhausted(f"no primitive r(a) witness up to height {height}")
    try:
        k, P = normalize_parabolic(M)
    except NotParabolic:
        return QuasiLG(False, "total monodromy is not parabolic")
    if k != n - 12:
        return QuasiLG(False, f"normal form [[1,{k}],[0,1]] but n - 12 = {n - 12}", P, k)
    g = conjugate(f, P.inverse())
    _, hom = seifert_pseudolattice(g)
    ra = right_adjoint(hom).column(0)
    if not is_primitive(ra):
        return QuasiLG(False, "r(a) is not primitive", P, k, ra)
    return QuasiLG(True, "ok", P, k, ra)


def sigma_y(n: int) -> int:
    if n < 12:
        return 5 - n
    if n == 12:
        return -8
    return 3 - n


def meyer_phi_parabolic(d: int) -> Fraction:
    """Meyer's function on ``[[1, d], [0, 1]]``."""
    if d < 0:
        return 1 - Fraction(d, 3)
    if d == 0:
        return Fraction(0)
    return -1 - Fraction(d, 3)


def meyer_consistent(n: int) -> bool:
    return meyer_phi_parabolic(n - 12) - Fraction(2 * n, 3) == sigma_y(n)


def ns_signature(f: Factorization) -> tuple:
    q = is_quasi_lg(f)
    if not q:
        raise NotQuasiLG(q.reason)
    g = conjugate(f, q.P.inverse())
    G, hom = seifert_pseudolattice(g)
    p = right_adjoint(hom).column(0)
    sd = neron_severi(G, p)
    return signature(sd.ns_gram) if sd.ns_rank else (0, 0, 0)


def ns_signature_check(f: Factorization) -> bool:
    return ns_signature(f) == (1, len(f) - 3, 0)


def chain_factorization(n: int) -> Factorization:
    return tuple(chain_images(n))


def quadric_factorization() -> Factorization:
    return QUADRIC


@dataclass(frozen=True)
class LGClassification:
    result: ClassificationResult
    hurwitz_moves: tuple
    conjugator: Matrix
    normal_factorization: Factorization
    instance: QdpInstance | None = None

    def to_json(self) -> dict:
        out = self.result.to_json()
        out["hurwitz_moves"] = [[i, d] for i, d in self.hurwitz_moves]
        out["conjugator"] = self.conjugator.tolist()
        out["normal_factorization"] = [list(c) for c in self.normal_factorization]
        return out


def mutations_to_hurwitz(moves) -> tuple:
    return tuple((i, "fwd" if d == "L" else "inv") for i, d in moves)


def classify_lg(f: Factorization, budget: int = DEFAULT_BUDGET) -> LGClassification:
    """Classify through the Seifert qdp instance and replay the answer as Hurwitz moves.

    Replay: ``conjugate(apply_hurwitz(conjugate(f, P^{-1}), moves), [[1,k],[0,1]])``
    must equal the chain or quadric factorization exactly.
    """
    f = make_factorization(f)
    q = is_quasi_lg(f)
    if not q:
        raise NotQuasiLG(q.reason)
    pinv = q.P.inverse()
    g = conjugate(f, pinv)
    _, hom = seifert_pseudolattice(g)
    inst = QdpInstance.standard(hom)
    res = classify(inst, budget)
    moves = mutations_to_hurwitz(res.mutation_trace)
    kmat = base_change(res.base_change_k)
    final = conjugate(apply_hurwitz(g, moves), kmat)
    expected = QUADRIC if res.normal_form == "Quadric" else chain_factorization(len(f))
    if final != tuple(expected):
        raise ReplayMismatch(f"Hurwitz replay gave {final}, expected {expected}")
    return LGClassification(res, moves, kmat @ pinv, final, inst)


def defect_divisibility(f: Factorization) -> tuple[int, bool]:
    """``defect = d + n - 12`` for total monodromy conjugate to ``[[1, -d], [0, 1]]``."""
    k, _ = normalize_parabolic(total_monodromy(f))
    d = -k
    defect = d + len(f) - 12
    return defect, defect % 12 == 0


def random_sl2(rng: random.Random, bound: int = 10) -> Matrix:
    """Uniform-ish SL(2,Z) element with all entries bounded by ``bound``."""
    while True:
        a, c = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if vec_gcd((a, c)) != 1:
            continue
        _, s, t = ext_gcd(a, c)
        b, d = -t, s
        shifts = [m for m in range(-2 * bound - 1, 2 * bound + 2) if abs(b + m * a) <= bound and abs(d + m * c) <= bound]
        if not shifts:
            continue
        m = rng.choice(shifts)
        return Matrix([[a, b + m * a], [c, d + m * c]])


def random_hurwitz_moves(rng: random.Random, n: int, count: int) -> list:
    return [(rng.randint(1, n - 1), rng.choice(("fwd", "inv"))) for _ in range(count)]


def scramble(f: Factorization, rng: random.Random, moves: int = 25, bound: int = 10) -> tuple[Factorization, list, Matrix]:
    ms = random_hurwitz_moves(rng, len(f), moves) if len(f) > 1 else []
    psi = random_sl2(rng, bound)
    return conjugate(apply_hurwitz(f, ms), psi), ms, psi
