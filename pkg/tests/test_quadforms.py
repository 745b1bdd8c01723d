import random
from fractions import Fraction

from kmlift.quadforms import (GramMat, automorphism_count,
                              automorphism_count_full, disc_split,
                              enumerate_classes, fundamental_split,
                              hasse_invariant, isometry_test, mat_det,
                              minkowski_reduce, transform, vectors_of_norm)

A2 = GramMat([[2, 1], [1, 2]])
D4 = GramMat([[2, 0, 1, 0], [0, 2, -1, 0], [1, -1, 2, -1], [0, 0, -1, 2]])
I4 = GramMat([[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]])


def test_automorphism_counts():
    assert automorphism_count(A2) == 6
    assert automorphism_count_full(A2) == 12
    assert automorphism_count(I4) == 192
    assert automorphism_count(D4) == 576
    # e_N(T) = 1 for large N (identity only)
    assert automorphism_count(A2, 5) == 1


def test_reduction_round_trip():
    rng = random.Random(7)
    words = [[[1, 1], [0, 1]], [[1, 0], [1, 1]], [[0, -1], [1, 0]]]
    for _ in range(5):
        U = [[1, 0], [0, 1]]
        for _ in range(4):
            W = rng.choice(words)
            U = [[sum(U[i][k] * W[k][j] for k in range(2)) for j in range(2)]
                 for i in range(2)]
        scr = GramMat(transform(A2.entries, U))
        red, V = minkowski_reduce(scr)
        assert abs(red.entries[0][1]) * 2 <= red.entries[0][0]
        assert red.entries[0][0] <= red.entries[1][1]
        assert isometry_test(A2, red) is not None


def test_reduction_inequalities_random():
    rng = random.Random(3)
    for _ in range(5):
        d = sorted(rng.randrange(1, 5) * 2 for _ in range(3))
        G = [[d[i] if i == j else 0 for j in range(3)] for i in range(3)]
        G[0][1] = G[1][0] = rng.randrange(-1, 2)
        if mat_det(G) <= 0:
            continue
        red, U = minkowski_reduce(GramMat(G))
        n = 3
        for i in range(n - 1):
            assert red.entries[i][i] <= red.entries[i + 1][i + 1]
        for i in range(n):
            for j in range(i + 1, n):
                assert 2 * abs(red.entries[i][j]) <= red.entries[i][i]


def test_isometry_invariants():
    assert isometry_test(GramMat([[2, 1, 0, 0], [1, 2, 0, 0],
                                  [0, 0, 2, 1], [0, 0, 1, 2]]), D4) is None
    U = isometry_test(A2, GramMat([[2, -1], [-1, 2]]))
    assert U is not None
    assert transform(A2.entries, U) == [[2, -1], [-1, 2]]
    assert mat_det(U) == 1


def test_class_enumeration_binary():
    cl3 = enumerate_classes(2, 3)
    assert len(cl3.classes) == 1
    assert cl3.classes[0].gram.det() == 3
    cl4 = enumerate_classes(2, 4)
    assert sorted(c.gram.det() for c in cl4.classes) == [3, 4]
    es = {c.gram.det(): c.e for c in cl4.classes}
    assert es == {3: 6, 4: 4}


def test_class_enumeration_quaternary(classlist16):
    dets = sorted(c.gram.det() for c in classlist16.classes)
    assert dets.count(4) == 1 and dets.count(9) == 1 and dets.count(16) == 2
    by16 = classlist16.by_det(16)
    assert sorted(c.e for c in by16) == [48, 192]


def test_enumeration_margin_stability():
    base = enumerate_classes(2, 8)
    wide = enumerate_classes(2, 8, margin=Fraction(8, 3))
    assert len(base.classes) == len(wide.classes)
    b4 = enumerate_classes(4, 12)
    w4 = enumerate_classes(4, 12, margin=2 * Fraction(4, 3) ** 6)
    assert len(b4.classes) == len(w4.classes)


def test_disc_split():
    assert tuple(disc_split(I4)) == (1, 4)
    assert tuple(disc_split(D4)) == (1, 2)
    assert tuple(disc_split(A2)) == (-3, 1)
    assert tuple(fundamental_split(9)) == (1, 3)
    assert tuple(fundamental_split(12)) == (12, 1)
    assert tuple(fundamental_split(20)) == (5, 2)
    assert tuple(fundamental_split(-4)) == (-4, 1)


def test_hasse_invariant():
    assert hasse_invariant([[1, 0], [0, 1]], 2) == 1
    assert hasse_invariant([[1, 0], [0, -1]], 2) == -1
    rng = random.Random(9)
    vals = [-5, -3, -2, -1, 1, 2, 3, 5, 6, 10]
    for _ in range(6):
        d = [rng.choice(vals) for _ in range(3)]
        A = [[d[i] if i == j else 0 for j in range(3)] for i in range(3)]
        prod = hasse_invariant(A, -1)
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53):
            prod *= hasse_invariant(A, p)
        assert prod == 1


def test_vectors_of_norm():
    vs = vectors_of_norm(A2.entries, 2)
    assert len(vs) == 6          # minimal vectors of the hexagonal lattice
    vs4 = vectors_of_norm(I4.entries, 2)
    assert len(vs4) == 8
