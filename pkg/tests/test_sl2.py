import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liebracket.errors import ModulusMismatch, NotGenerating
from liebracket.sl2 import (
    Sl2Element,
    adjoint_matrix,
    bracket,
    combine,
    decompose,
    gram_triple,
    inner,
    is_generating_pair,
    random_element,
)

PRIMES = [3, 5, 7, 11, 13, 101, 1009, 999983]


@st.composite
def elements(draw, count=1):
    p = draw(st.sampled_from(PRIMES))
    coords = st.tuples(*(st.integers(0, p - 1) for _ in range(3)))
    return tuple(Sl2Element(*draw(coords), p) for _ in range(count))


def matmul(X, Y):
    p = X.p
    x, y = X.matrix(), Y.matrix()
    return [[sum(x[i][k] * y[k][j] for k in range(2)) % p for j in range(2)] for i in range(2)]


def test_worked_example(pair11):
    A, B = pair11
    X0 = bracket(A, B)
    assert X0.matrix() == [[1, 10], [2, 10]]
    assert bracket(B, X0).matrix() == [[4, 1], [10, 7]]
    assert inner(A, B) == 2
    assert inner(A, A) == 8
    gt = gram_triple(A, B)
    assert (gt.alpha, gt.beta, gt.gamma) == (4, 5, 4)
    assert is_generating_pair(A, B)


def test_adjoint_examples(pair11):
    gt = gram_triple(*pair11)
    assert adjoint_matrix("A", gt).tolist() == [[0, 0, 7], [0, 0, 5], [0, 1, 0]]
    assert adjoint_matrix("B", gt).tolist() == [[0, 0, 7], [0, 0, 4], [10, 0, 0]]
    assert (adjoint_matrix("A", gt) @ np.array([0, 1, 0]) % 11).tolist() == [0, 0, 1]
    with pytest.raises(ValueError):
        adjoint_matrix("C", gt)


def test_degenerate_pairs(pair11):
    A, _ = pair11
    zero = Sl2Element.zero(11)
    assert bracket(A, A).is_zero()
    assert not is_generating_pair(A, A)
    assert not is_generating_pair(A, zero)
    gt = gram_triple(A, A)
    assert gt.alpha == gt.beta == gt.gamma
    gt0 = gram_triple(A, zero)
    assert (gt0.alpha, gt0.gamma) == (0, 0) and gt0.beta == 2 * inner(A, A) % 11
    assert inner(A, zero) == 0


def test_decompose(pair11):
    A, B = pair11
    assert decompose(A, B, A) == (1, 0, 0)
    assert decompose(A, B, bracket(A, B)) == (0, 0, 1)
    target = Sl2Element.from_matrix([[0, 1], [0, 0]], 11)
    assert combine(A, B, *decompose(A, B, target)) == target
    with pytest.raises(NotGenerating):
        decompose(A, A, target)


def test_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        bracket(Sl2Element(1, 0, 0, 5), Sl2Element(1, 0, 0, 7))


def test_from_matrix_rejects_nonzero_trace():
    with pytest.raises(ValueError):
        Sl2Element.from_matrix([[1, 0], [0, 1]], 5)


@given(elements(2))
def test_bracket_is_commutator(pair):
    X, Y = pair
    xy, yx = matmul(X, Y), matmul(Y, X)
    expected = [[(xy[i][j] - yx[i][j]) % X.p for j in range(2)] for i in range(2)]
    assert bracket(X, Y).matrix() == expected


@given(elements(1))
def test_norm_is_minus_twice_det(single):
    (X,) = single
    assert inner(X, X) == (-2 * X.det()) % X.p


def test_bracket_identity_random(rng):
    # [[A,B],B] = 2<B,B>A - 2<A,B>B
    for _ in range(10**4):
        p = int(rng.choice(PRIMES))
        A, B = random_element(rng, p), random_element(rng, p)
        assert bracket(bracket(A, B), B) == 2 * inner(B, B) * A - 2 * inner(A, B) * B


def test_ad_invariance_random(rng):
    for _ in range(10**4):
        p = int(rng.choice(PRIMES))
        X, Y, Z = (random_element(rng, p) for _ in range(3))
        assert inner(bracket(X, Y), Z) == inner(X, bracket(Y, Z))
        assert inner(X, Y) == inner(Y, X)


def test_adjoint_consistency(rng):
    for _ in range(300):
        p = int(rng.choice(PRIMES[:6]))
        A, B = random_element(rng, p), random_element(rng, p)
        if not is_generating_pair(A, B):
            continue
        gt = gram_triple(A, B)
        v = rng.integers(0, p, size=3)
        V = combine(A, B, *(int(c) for c in v))
        for which, Z in (("A", A), ("B", B)):
            coords = adjoint_matrix(which, gt) @ v % p
            assert combine(A, B, *(int(c) for c in coords)) == bracket(Z, V)
