import random
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudolattices.errors import NotASolution, NotQdp, RankTooSmall, SearchExhausted
from pseudolattices.lattice import E, apply_moves, flip, gram_in_basis, is_exceptional_sequence, standard_basis
from pseudolattices.lefschetz import (
    chain_factorization,
    make_factorization,
    random_hurwitz_moves,
    apply_hurwitz,
)
from pseudolattices.linalg import Matrix, is_primitive
from pseudolattices.qdp import (
    QUADRIC,
    RANK5_FORWARD,
    QdpInstance,
    basis_norm,
    best_first,
    chain_images,
    check_qdp,
    classify,
    contract,
    twist_defect_check,
    find_rank_zero,
    instance_from_images,
    is_markov,
    markov_descent,
    match_rank3,
    match_rank4,
    mutate_images,
    normalize_cycle,
    push_to_end,
    verify_replay,
    vieta,
)
from pseudolattices.spherical import cokernel, glue, z_of, z_of_vector
from pseudolattices.surface import rank_of

F3 = instance_from_images(chain_images(3))
F4 = instance_from_images(QUADRIC)
GRAM3 = Matrix([[1, 3, 6], [0, 1, 3], [0, 0, 1]])
GRAM4 = Matrix([[1, 2, 2, 4], [0, 1, 0, 2], [0, 0, 1, 2], [0, 0, 0, 1]])


def test_check_qdp_models():
    for inst in (F3, F4, instance_from_images(chain_images(7))):
        diag = check_qdp(inst)
        assert diag.ok, diag.as_dict()
    assert check_qdp(F4).ns_signature == (1, 1, 0)


def test_check_qdp_detects_broken_basis():
    bad = QdpInstance(F3.f, [(1, 0, 0), (-1, 2, 0), (0, 0, 1)])
    diag = check_qdp(bad)
    assert not diag.exceptional_primitive and not diag.ok
    assert diag.condition1 and diag.relative_cy
    with pytest.raises(NotQdp):
        classify(bad)


def test_check_qdp_non_primitive_image():
    # Z(2a+b, 2b): 2b is not primitive
    _, f = z_of(E, [(2, 1), (0, 2)])
    assert not check_qdp(QdpInstance.standard(f)).ok


def test_basis_norm_examples():
    assert basis_norm(F3) == 3
    assert basis_norm(instance_from_images(chain_images(4))) == 3
    assert basis_norm(F4) == 4


def test_find_rank_zero():
    inst = instance_from_images(chain_images(5))
    rz = find_rank_zero(inst)
    assert rz.moves == () and rz.index in (4, 5)
    with pytest.raises(RankTooSmall):
        find_rank_zero(instance_from_images(chain_images(4)))
    with pytest.raises(SearchExhausted):
        best_first(chain_images(5), lambda s: False, budget=5)


def _bfs_has_rank_zero(images, depth):
    start = tuple(normalize_cycle(v) for v in images)
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        s, d = queue.popleft()
        if any(v[1] == 0 for v in s):
            return True
        if d == depth:
            continue
        for i in range(1, len(s)):
            for di in "LR":
                t = tuple(normalize_cycle(v) for v in mutate_images(s, i, di))
                if t not in seen:
                    seen.add(t)
                    queue.append((t, d + 1))
    return False


def test_find_rank_zero_scrambled_rank5():
    rng = random.Random(7)
    f = chain_factorization(5)
    for _ in range(5):
        g = apply_hurwitz(f, random_hurwitz_moves(rng, 5, 5))
        inst = instance_from_images(g)
        assert _bfs_has_rank_zero(inst.images(), 8)
        rz = find_rank_zero(inst)
        images = inst.images(rz.basis)
        assert images[rz.index - 1][1] == 0
        assert rank_of(inst.G, inst.r_of_a(), rz.basis[rz.index - 1]) == 0
        assert apply_moves(inst.G, inst.e_basis, rz.moves) == rz.basis


def test_push_to_end():
    inst = instance_from_images(chain_images(5))
    b, moves = push_to_end(inst, inst.e_basis, 5)
    assert moves == [] and b == inst.e_basis
    b, moves = push_to_end(inst, inst.e_basis, 4)
    assert moves == [(4, "L")]
    assert inst.images(b)[-1] == (1, 0)
    assert b[-1] == inst.e_basis[3]
    g = gram_in_basis(inst.G, b)
    assert [g[4, j] for j in range(5)] == [0, 0, 0, 0, 1]
    assert is_exceptional_sequence(inst.G, b)


def test_contract_examples():
    new, wit = contract(instance_from_images(chain_images(4)), rank_zero=find_rank_zero(
        instance_from_images(chain_images(4)), allow_rank4=True))
    assert new.G.gram == GRAM3
    assert new.f.matrix == Matrix([[0, 3, 6], [1, 1, 1]])
    assert all(wit.checks[k] for k in ("glue_gram", "commutes", "r_prime_a", "qdp"))
    inst5 = instance_from_images(chain_images(5))
    once, _ = contract(inst5)
    twice, _ = contract(once, rank_zero=find_rank_zero(once, allow_rank4=True))
    assert twice.G.gram == GRAM3 and twice.f.matrix == F3.f.matrix


def test_contract_r_prime_of_a():
    inst = instance_from_images(chain_images(6))
    new, wit = contract(inst)
    coords = wit.psi @ inst.r_of_a()
    assert coords[-1] == 0 and tuple(coords[:-1]) == new.r_of_a()
    assert new.rank == inst.rank - 1


def test_markov_examples():
    assert markov_descent((3, 6, 3)) == ((3, 6, 3), [])
    t, trace = markov_descent((3, 6, 15))
    assert sorted(t) == [3, 3, 6] and trace == [2]
    with pytest.raises(NotASolution):
        markov_descent((1, 1, 1))
    assert vieta((3, 6, 15), 2) == (3, 6, 3)
    assert is_markov((3, 15, 39))


def test_markov_descent_from_deep_solutions():
    rng = random.Random(3)
    for _ in range(30):
        t = (3, 6, 3)
        for _ in range(rng.randint(0, 12)):
            t = vieta(t, rng.randrange(3))
        end, trace = markov_descent(t)
        assert sorted(end) == [3, 3, 6]


def test_match_rank3_examples():
    assert match_rank3(F3) == ([], 0)
    shifted = instance_from_images([(5, 1), (8, 1), (11, 1)])
    assert match_rank3(shifted)[1] == -5
    G = F3.G
    there_and_back = apply_moves(G, standard_basis(3), [(1, "L"), (1, "R")])
    inst = QdpInstance(F3.f, there_and_back)
    assert match_rank3(inst) == ([], 0)


def test_match_rank3_after_scrambling():
    rng = random.Random(11)
    for _ in range(20):
        moves = [(rng.randint(1, 2), rng.choice("LR")) for _ in range(6)]
        b = apply_moves(F3.G, standard_basis(3), moves)
        inst = QdpInstance(F3.f, b)
        trace, k = match_rank3(inst)
        nb = apply_moves(F3.G, b, trace)
        g = gram_in_basis(F3.G, nb)
        assert tuple(abs(x) for x in (g[0, 1], g[0, 2], g[1, 2])) == (3, 6, 3)


def test_match_rank4_examples():
    res = match_rank4(F4)
    assert res.normal_form == "Quadric" and res.base_change_k == 0
    assert match_rank4(instance_from_images(chain_images(4))).normal_form == "P2Chain"
    conj = instance_from_images([(x - 2 * y, y) for x, y in QUADRIC])
    res = match_rank4(conj)
    assert res.normal_form == "Quadric" and res.base_change_k == 2


def test_classify_examples():
    res = classify(instance_from_images(chain_images(5)))
    assert (res.normal_form, res.n) == ("P2Chain", 5)
    res = classify(instance_from_images(QUADRIC + ((1, 0),)))
    assert (res.normal_form, res.n) == ("P2Chain", 5)
    res = classify(F4)
    assert res.normal_form == "Quadric"
    res = classify(F3)
    assert res.mutation_trace == () and res.base_change_k == 0


def test_rank5_sequence_up_to_signs():
    inst = instance_from_images(chain_images(5))
    b = apply_moves(inst.G, inst.e_basis, RANK5_FORWARD)
    target, _ = z_of(E, QUADRIC + ((1, 0),))
    assert gram_in_basis(inst.G, b) != target.gram
    b = flip(b, [2, 3, 5])
    assert gram_in_basis(inst.G, b) == target.gram
    assert inst.images(b) == QUADRIC + ((1, 0),)


def test_classification_with_nontrivial_ab():
    ab = Matrix([[2, 1], [1, 1]])
    inst = instance_from_images(chain_images(6), ab)
    res = classify(inst)
    assert res.n == 6 and verify_replay(inst, res)
    ok, d = twist_defect_check(inst, res)
    assert ok and d == 0


def _scrambled(images, rng, steps=20, ab=None):
    f = apply_hurwitz(make_factorization(images), random_hurwitz_moves(rng, len(images), steps))
    return instance_from_images(f, ab)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10**6))
def test_classify_replay_sound(n, seed):
    rng = random.Random(seed)
    inst = _scrambled(chain_images(n), rng)
    res = classify(inst)
    assert res.normal_form == "P2Chain" and res.n == n
    assert verify_replay(inst, res)
    assert twist_defect_check(inst, res)[0]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_quadric_class_is_stable(seed):
    rng = random.Random(seed)
    inst = _scrambled(QUADRIC, rng)
    assert cokernel(inst.f) == [2]
    res = classify(inst)
    assert res.normal_form == "Quadric" and verify_replay(inst, res)
    chain = _scrambled(chain_images(4), rng)
    assert cokernel(chain.f) == []
    assert classify(chain).normal_form == "P2Chain"


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([chain_images(3), chain_images(5), QUADRIC]),
       st.lists(st.tuples(st.integers(1, 4), st.sampled_from("LR")), max_size=12))
def test_mutation_walks_preserve_qdp(images, moves):
    inst = instance_from_images(images)
    n = inst.rank
    moves = [(1 + (i - 1) % (n - 1), d) for i, d in moves]
    b = apply_moves(inst.G, inst.e_basis, moves)
    moved = QdpInstance(inst.f, b)
    assert all(is_primitive(inst.f(e)) for e in b)
    assert check_qdp(moved).ok


@settings(max_examples=15, deadline=None)
@given(st.integers(5, 8), st.integers(0, 10**6))
def test_contract_properties(n, seed):
    inst = _scrambled(chain_images(n), random.Random(seed))
    new, wit = contract(inst)
    assert new.rank == n - 1 and check_qdp(new).ok
    _, zeta = z_of_vector(E, 1, inst.a)
    glued, _ = glue(new.f, zeta)
    assert glued.gram == gram_in_basis(inst.G, wit.basis)
