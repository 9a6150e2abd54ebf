import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudolattices.errors import IndexOutOfRange, NotParabolic, NotPrimitive, NotQuasiLG, NotSL2
from pseudolattices.lattice import apply_moves, gram_in_basis, standard_basis
from pseudolattices.lefschetz import (
    apply_hurwitz,
    chain_factorization,
    classify_lg,
    conjugate,
    defect_divisibility,
    dehn_matrix,
    hurwitz,
    is_quasi_lg,
    junction_pairing,
    make_factorization,
    meyer_consistent,
    meyer_phi_parabolic,
    mutations_to_hurwitz,
    normalize_parabolic,
    ns_signature,
    ns_signature_check,
    quadric_factorization,
    random_sl2,
    scramble,
    seifert_pseudolattice,
    sigma_y,
    total_monodromy,
)
from pseudolattices.linalg import Matrix
from pseudolattices.spherical import cokernel, is_relative_cy, is_spherical, twist

CHAIN3 = ((0, 1), (3, 1), (6, 1))


def test_dehn_matrices():
    assert dehn_matrix((1, 0)) == Matrix([[1, 1], [0, 1]])
    assert dehn_matrix((0, 1)) == Matrix([[1, 0], [-1, 1]])
    assert dehn_matrix((3, 1)) == Matrix([[-2, 9], [-1, 4]])
    assert dehn_matrix((-3, -1)) == dehn_matrix((3, 1))


def test_total_monodromy():
    assert total_monodromy(CHAIN3) == Matrix([[1, -9], [0, 1]])
    assert total_monodromy(quadric_factorization()) == Matrix([[1, -8], [0, 1]])
    assert total_monodromy(((1, 0),)) == Matrix([[1, 1], [0, 1]])
    for n in range(3, 21):
        assert total_monodromy(chain_factorization(n)) == Matrix([[1, n - 12], [0, 1]])


def test_make_factorization():
    assert make_factorization([(0, -1), (-1, 0)]) == ((0, 1), (1, 0))
    with pytest.raises(NotPrimitive):
        make_factorization([(2, 0)])


def test_hurwitz_examples():
    f = ((0, 1), (3, 1))
    g = hurwitz(f, 1, "fwd")
    assert g == ((-3, 2), (0, 1))
    assert total_monodromy(g) == total_monodromy(f) == Matrix([[-2, 9], [1, -5]])
    assert hurwitz(g, 1, "inv") == f
    with pytest.raises(IndexOutOfRange):
        hurwitz(f, 2, "fwd")
    assert len(hurwitz(chain_factorization(6), 3, "inv")) == 6


def test_conjugate_examples():
    assert conjugate(CHAIN3, Matrix.identity(2)) == CHAIN3
    assert conjugate(((0, 1),), Matrix([[1, 1], [0, 1]])) == ((1, 1),)
    with pytest.raises(NotSL2):
        conjugate(CHAIN3, Matrix([[2, 0], [0, 1]]))
    p1, p2 = Matrix([[2, 1], [1, 1]]), Matrix([[1, -3], [0, 1]])
    assert conjugate(conjugate(CHAIN3, p1), p2) == conjugate(CHAIN3, p2 @ p1)


def test_seifert_examples():
    G, hom = seifert_pseudolattice(CHAIN3)
    assert G.gram == Matrix([[1, 3, 6], [0, 1, 3], [0, 0, 1]])
    assert hom.matrix == Matrix([[0, 3, 6], [1, 1, 1]])
    G4, _ = seifert_pseudolattice(quadric_factorization())
    assert G4.gram == Matrix([[1, 2, 2, 4], [0, 1, 0, 2], [0, 0, 1, 2], [0, 0, 0, 1]])
    assert seifert_pseudolattice(((5, 2),))[0].gram == Matrix([[1]])


def test_junction_pairing():
    assert junction_pairing(((1, 0),)) == Matrix([[-1]])
    J = junction_pairing(((0, 1), (3, 1)))
    assert J == Matrix([[-1, Fraction(-3, 2)], [Fraction(-3, 2), -1]])
    assert J == J.T


def test_normalize_parabolic():
    assert normalize_parabolic(Matrix([[1, -9], [0, 1]])) == (-9, Matrix.identity(2))
    k, P = normalize_parabolic(dehn_matrix((3, 1)))
    assert k == 1 and P == Matrix([[3, -1], [1, 0]])
    assert P.inverse() @ dehn_matrix((3, 1)) @ P == Matrix([[1, 1], [0, 1]])
    assert normalize_parabolic(Matrix.identity(2)) == (0, Matrix.identity(2))
    with pytest.raises(NotParabolic):
        normalize_parabolic(Matrix([[0, -1], [1, 0]]))


def test_is_quasi_lg_examples():
    q = is_quasi_lg(CHAIN3)
    assert q and q.r_of_a == (1, -2, 1)
    assert not is_quasi_lg(((1, 0),))
    assert is_quasi_lg(quadric_factorization())
    q12 = is_quasi_lg(chain_factorization(12))
    assert q12 and q12.k == 0
    # twelve parallel twists multiply to [[1,12],[0,1]], not the identity
    assert not is_quasi_lg(((1, 0),) * 12)


def test_sigma_and_meyer():
    assert sigma_y(3) == 2 and meyer_phi_parabolic(-9) == 4
    assert sigma_y(12) == -8 and meyer_phi_parabolic(0) == 0
    assert sigma_y(13) == -10 and meyer_phi_parabolic(1) == Fraction(-4, 3)
    assert all(meyer_consistent(n) for n in range(3, 21))


def test_ns_signatures():
    assert ns_signature(CHAIN3) == (1, 0, 0)
    assert ns_signature(quadric_factorization()) == (1, 1, 0)
    assert ns_signature(chain_factorization(13)) == (1, 10, 0)
    assert all(ns_signature_check(chain_factorization(n)) for n in range(3, 17))
    with pytest.raises(NotQuasiLG):
        ns_signature_check(((1, 0),))


def test_ns_signature_against_sympy():
    import sympy

    from pseudolattices.lefschetz import is_quasi_lg as qlg
    from pseudolattices.spherical import right_adjoint
    from pseudolattices.surface import neron_severi

    f = chain_factorization(13)
    q = qlg(f)
    G, hom = seifert_pseudolattice(conjugate(f, q.P.inverse()))
    sd = neron_severi(G, right_adjoint(hom).column(0))
    eig = sympy.Matrix(sd.ns_gram.tolist()).eigenvals()
    pos = sum(m for ev, m in eig.items() if ev > 0)
    neg = sum(m for ev, m in eig.items() if ev < 0)
    assert (pos, neg) == (1, 10)


def test_classify_lg_examples():
    res = classify_lg(CHAIN3)
    assert res.result.normal_form == "P2Chain" and res.result.n == 3
    assert classify_lg(quadric_factorization()).result.normal_form == "Quadric"
    four = classify_lg(chain_factorization(4)).result.normal_form
    assert four == "P2Chain"
    _, h4 = seifert_pseudolattice(quadric_factorization())
    _, hc = seifert_pseudolattice(chain_factorization(4))
    assert cokernel(h4) == [2] and cokernel(hc) == []
    with pytest.raises(NotQuasiLG):
        classify_lg(((1, 0),))


def test_classify_lg_scrambled_rank5():
    rng = random.Random(5)
    f = chain_factorization(5)
    g = conjugate(apply_hurwitz(f, [(rng.randint(1, 4), rng.choice(("fwd", "inv"))) for _ in range(10)]),
                  Matrix([[2, 1], [1, 1]]))
    res = classify_lg(g)
    assert res.result.n == 5 and res.normal_factorization == f
    assert apply_hurwitz(conjugate(g, res.conjugator), res.hurwitz_moves) == f


def test_defect_divisibility():
    assert defect_divisibility(CHAIN3) == (0, True)
    assert defect_divisibility(((1, 0),) * 12) == (-12, True)
    assert defect_divisibility(((1, 0),) * 5) == (-12, True)
    with pytest.raises(NotParabolic):
        defect_divisibility(((1, 0), (0, 1)))


def test_mutations_to_hurwitz():
    assert mutations_to_hurwitz([(1, "L"), (2, "R")]) == ((1, "fwd"), (2, "inv"))


factorizations = st.lists(
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)).filter(lambda v: __import__("math").gcd(*v) == 1),
    min_size=2,
    max_size=7,
).map(make_factorization)
hurwitz_moves = st.lists(st.tuples(st.integers(1, 6), st.sampled_from(["fwd", "inv"])), max_size=10)


@settings(max_examples=300, deadline=None)
@given(factorizations, hurwitz_moves, st.integers(0, 10**6))
def test_hurwitz_and_conjugation_invariants(f, moves, seed):
    n = len(f)
    moves = [(1 + (i - 1) % (n - 1), d) for i, d in moves]
    g = apply_hurwitz(f, moves)
    M = total_monodromy(f)
    assert total_monodromy(g) == M
    psi = random_sl2(random.Random(seed))
    assert total_monodromy(conjugate(f, psi)) == psi @ M @ psi.inverse()
    # the Seifert Gram transforms by the mutation congruence
    G, _ = seifert_pseudolattice(f)
    Gg, hg = seifert_pseudolattice(g)
    basis = apply_moves(G, standard_basis(n), [(i, "L" if d == "fwd" else "R") for i, d in moves])
    gram = gram_in_basis(G, basis)
    F = Matrix.from_columns(list(f))
    D = Matrix.diag([1 if hg.matrix.column(j) == F @ basis[j] else -1 for j in range(n)])
    assert D @ gram @ D == Gg.gram


@settings(max_examples=300, deadline=None)
@given(factorizations)
def test_seifert_hom_properties(f):
    _, hom = seifert_pseudolattice(f)
    assert is_spherical(hom) and is_relative_cy(hom, 0)
    assert twist(hom) == total_monodromy(f)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 6, 9, 12, 13]), st.integers(0, 10**6))
def test_quasi_lg_is_equivalence_invariant(n, seed):
    f = chain_factorization(n)
    g, _, _ = scramble(f, random.Random(seed), moves=10, bound=6)
    assert is_quasi_lg(g)
    q = is_quasi_lg(g)
    assert q.k == (0 if n == 12 else n - 12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 4, 5, 7, 10, 14]), st.booleans(), st.integers(0, 10**6))
def test_classify_lg_round_trip(n, quadric, seed):
    f = quadric_factorization() if quadric and n == 4 else chain_factorization(n)
    g, _, _ = scramble(f, random.Random(seed))
    res = classify_lg(g)
    assert res.normal_factorization == f
    # conjugation commutes with Hurwitz moves, so one global conjugation suffices
    assert apply_hurwitz(conjugate(g, res.conjugator), res.hurwitz_moves) == f
