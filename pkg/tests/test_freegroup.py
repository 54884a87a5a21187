import random

import pytest

from artifact.builders import artin_generator
from artifact.freegroup import (
    FreeAutomorphism,
    FreeGroupRingElement,
    FreeWord,
    Letter,
    apply_automorphism,
    apply_to_matrix,
    compose,
    fox_derivative,
    identity_matrix,
    jacobian,
    matmul,
    reduce,
)

from randutil import random_automorphism, random_word


def w(text, rank=3):
    return FreeWord.parse(text, rank)


def ring(text, rank=3):
    return FreeGroupRingElement.from_word(w(text, rank))


def test_reduce_cancels():
    assert reduce([Letter(1, 1), Letter(1, -1)], 2).is_identity()
    assert reduce([(2, 1)], 2) == w("x2", 2)
    assert reduce([1, 2, -2, 3, -3, -1], 3).is_identity()


def test_reduce_rejects_out_of_range():
    with pytest.raises(ValueError):
        reduce([(4, 1)], 3)


def test_word_times_inverse(rng):
    for _ in range(200):
        u = random_word(rng, 4, 50)
        assert (u * u.inverse()).is_identity()
        again = FreeWord(4, u.code)
        assert again == u and len(again) <= len(u.code)


def test_parse_and_format_roundtrip():
    u = w("x1 x2^-1 x3^2")
    assert str(u) == "x1 x2^-1 x3 x3"
    assert FreeWord.parse("1", 3).is_identity()
    assert str(FreeWord(3)) == "1"
    with pytest.raises(ValueError):
        FreeWord.parse("y1", 3)


def test_artin_image():
    a = artin_generator(3, 1)
    assert apply_automorphism(a, w("x1")) == w("x1 x2 x1^-1")
    assert apply_automorphism(a, w("x2")) == w("x1")
    assert apply_automorphism(a, w("x3")) == w("x3")


def test_apply_is_homomorphic(rng):
    for _ in range(100):
        phi = random_automorphism(rng, 3)
        u, v = random_word(rng, 3, 10), random_word(rng, 3, 10)
        assert phi(u * v) == phi(u) * phi(v)
        assert phi(u.inverse()) == phi(u).inverse()
        assert phi.inverse()(phi(u)) == u


def test_identity_automorphism(rng):
    e = FreeAutomorphism.identity(3)
    for _ in range(20):
        u = random_word(rng, 3, 12)
        assert e(u) == u
    assert jacobian(e) == identity_matrix(3, 3)


def test_compose_identity_and_inverse(rng):
    phi = random_automorphism(rng, 3)
    assert compose(phi, FreeAutomorphism.identity(3)) == phi
    assert compose(phi, phi.inverse()).is_identity()


def test_compose_order():
    a = artin_generator(3, 1)
    b = artin_generator(3, 2)
    u = w("x1 x3")
    assert compose(a, b)(u) == a(b(u))


def test_bad_inverse_rejected():
    with pytest.raises(ValueError):
        FreeAutomorphism(2, ["x1 x2", "x2"], ["x1", "x2"])


def test_rank_mismatch():
    with pytest.raises(ValueError):
        apply_automorphism(FreeAutomorphism.identity(2), w("x1"))


def test_fox_basic_rules():
    assert fox_derivative(w("x1"), 1) == 1
    assert fox_derivative(w("x1"), 2).is_zero()
    assert fox_derivative(w("x1^-1"), 1) == -ring("x1^-1")
    u = w("x1 x2 x1^-1")
    assert fox_derivative(u, 1) == 1 - ring("x1 x2 x1^-1")
    assert fox_derivative(u, 2) == ring("x1")
    with pytest.raises(ValueError):
        fox_derivative(u, 4)


def test_jacobian_of_reference_action():
    # x_{1,2} -> x_{2,2}, x_{2,2} -> x_{1,2}^-1 x_{2,2} in rank 2
    mu = FreeAutomorphism(2, ["x2", "x1^-1 x2"], ["x1 x2^-1", "x1"])
    J = jacobian(mu)
    inv = FreeGroupRingElement.from_word(FreeWord.parse("x1^-1", 2))
    assert J == [[FreeGroupRingElement.scalar(2, 0), FreeGroupRingElement.scalar(2, 1)], [-inv, inv]]


def test_jacobian_of_inverse(rng):
    # J(a^-1) composed per the chain rule with J(a) gives the identity
    for _ in range(50):
        a = random_automorphism(rng, 3)
        ainv = a.inverse()
        prod = matmul(apply_to_matrix(ainv, jacobian(a)), jacobian(ainv))
        assert prod == identity_matrix(3, 3)


def test_group_ring_arithmetic():
    x = ring("x1")
    y = ring("x2")
    assert (x + y) * (x - y) == x * x - x * y + y * x - y * y
    assert (x - x).is_zero()
    assert (3 * x + 2).augmentation() == 5
    assert str(x - 1) == "-1 + x1"
