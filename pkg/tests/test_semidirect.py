import itertools

import pytest

from artifact.builders import (
    artin_generator,
    b4_1,
    b4_prime,
    builtin,
    direct_product,
    load_group_file,
    p3_milnor,
    pb_generator,
    pbD3,
    pnl,
    pure_braid,
)
from artifact.freegroup import FreeAutomorphism, FreeWord
from artifact.magnus import braid_action
from artifact.semidirect import (
    GroupElement,
    GroupRingElement,
    IteratedProduct,
    act,
    is_compatible,
    multiply,
    normalize,
    parse_ring_element,
    validate,
)


def A(G, i, j, ell=1):
    return G.gen(*pb_generator(i, j, ell))


def comm(a, b):
    return a * b * a.inverse() * b.inverse()


def test_normal_order_is_kept():
    G = b4_1()
    g = normalize(G, "x1_2 x1_1")
    assert g.component(2) == FreeWord.parse("x1", 2)
    assert g.component(1) == FreeWord.parse("x1", 1)


def test_pushing_a_lower_letter_right():
    G = b4_1()
    g = G.element("x1_1 x1_2")
    assert g.comps == ((1,), (1, -2), ())
    assert str(g) == "x1_2 x2_2^-1 x1_1"
    # the normal form re-multiplies to the same element
    assert multiply(G.element("x1_2 x2_2^-1"), G.gen(1, 1)) == g


def test_identity_and_inverse():
    G = pure_braid(4)
    g = G.element("x2_3 x1_1 x2_2^-1 x3_3")
    assert g * G.identity() == g == G.identity() * g
    assert (g * g.inverse()).is_identity()
    assert (g ** 3) * (g ** -3) == G.identity()


def test_conjugation_in_p3():
    G = pure_braid(3)
    a12, a13, a23 = A(G, 1, 2), A(G, 1, 3), A(G, 2, 3)
    c = a13 * a23
    assert a12.inverse() * a13 * a12 == c * a13 * c.inverse()


@pytest.mark.parametrize("ell", [3, 4, 5])
def test_pure_braid_relations(ell):
    G = pure_braid(ell)
    pairs = [(i, j) for i, j in itertools.combinations(range(1, ell + 1), 2)]
    for (r, s), (i, j) in itertools.product(pairs, pairs):
        lhs = A(G, r, s).inverse() * A(G, i, j) * A(G, r, s)
        aij = A(G, i, j)
        if i < r < s < j or r < s < i < j:
            rhs = aij
        elif r < s == i < j:
            rhs = A(G, r, j) * aij * A(G, r, j).inverse()
        elif r == i < s < j:
            c = A(G, r, j) * A(G, s, j)
            rhs = c * aij * c.inverse()
        elif r < i < s < j:
            c = comm(A(G, r, j), A(G, s, j))
            rhs = c * aij * c.inverse()
        else:
            continue
        assert lhs == rhs, ((r, s), (i, j))


def test_two_structures_of_p3():
    # t_1 = A12^-1 A13, t_2 = A12^-1 A23, t_3 = A13 A12^-1, t_4 = A23 A12^-1, x_{1,1} = A12
    P, M = pure_braid(3), p3_milnor()
    a12, a13, a23 = A(P, 1, 2), A(P, 1, 3), A(P, 2, 3)
    t = {1: a12.inverse() * a13, 2: a12.inverse() * a23, 3: a13 * a12.inverse(), 4: a23 * a12.inverse()}

    def image(g: GroupElement):
        out = P.identity()
        for i, q, s in M.raw_word(g.comps):
            x = a12 if q == 1 else t[i]
            out = out * (x if s > 0 else x.inverse())
        return out

    for i in range(1, 5):
        conj = M.gen(1, 1).inverse() * M.gen(i, 2) * M.gen(1, 1)
        assert image(conj) == a12.inverse() * t[i] * a12


def test_act_on_top_factor():
    G = b4_1()
    assert act(G, G.gen(1, 1), 3) == artin_generator(3, 1)
    assert act(G, G.identity(), 3).is_identity()
    # letters in factors >= q act trivially
    assert act(G, G.gen(2, 3), 3).is_identity()


def test_act_is_homomorphic():
    G = pure_braid(4)
    g = G.element("x1_1 x2_2 x1_2^-1")
    h = G.element("x2_2 x1_1^-1")
    # right action: alpha(gh) applies alpha(g) first
    u = FreeWord.parse("x1 x3 x2^-1", 3)
    assert act(G, g * h, 3)(u) == act(G, h, 3)(act(G, g, 3)(u))


@pytest.mark.parametrize(
    "G", [pure_braid(3), pure_braid(4), pure_braid(5), b4_1(), p3_milnor(), pbD3(), b4_prime(), pnl(5, 3), direct_product(2, 1, 3)]
)
def test_builders_validate(G):
    assert validate(G).valid


def test_corrupted_inverse_is_reported():
    bad = FreeAutomorphism(2, ["x2", "x1^-1 x2"], ["x1", "x1"], check=False)
    G = IteratedProduct([1, 2], {(2, 1, 1): bad})
    rep = validate(G)
    assert not rep.valid and rep.violations


def test_corrupted_compatibility_is_reported():
    G = b4_1()
    actions = dict(G.actions)
    actions[(3, 2, 2)] = artin_generator(3, 2)
    rep = validate(IteratedProduct(G.exponents, actions))
    assert not rep.valid


def test_builder_exponents():
    assert pure_braid(3).exponents == (1, 2)
    assert pbD3().exponents == (1, 2, 5)
    assert b4_prime().exponents == (2, 2)
    assert pnl(5, 3).exponents == (3, 4)
    with pytest.raises(ValueError):
        pnl(3, 3)
    with pytest.raises(ValueError):
        builtin("nonsense(2)")


def test_b4_prime_action_table():
    G = b4_prime()
    assert G.action(2, 1, 1).images == tuple(FreeWord.parse(s, 2) for s in ["x1 x2^-1 x1 x1", "x1"])


def test_compatible_conjugation():
    G = b4_1()
    H = IteratedProduct([2, 3], {(2, 1, j): G.actions[(3, 2, j)] for j in (1, 2)})
    psi = (G.actions[(2, 1, 1)], G.actions[(3, 1, 1)])
    assert is_compatible(H, psi)
    assert is_compatible(H, [FreeAutomorphism.identity(d) for d in H.exponents])
    assert not is_compatible(H, (G.actions[(2, 1, 1)], FreeAutomorphism.identity(3)))


def test_braid_action_is_compatible():
    spec = braid_action(5, 3)
    for psi in spec.generators.values():
        assert is_compatible(spec.structure, psi.factors)


def test_group_file_roundtrip(tmp_path):
    G = b4_1()
    path = tmp_path / "g.toml"
    path.write_text(G.description(), encoding="utf-8")
    H = load_group_file(path)
    assert H.exponents == G.exponents
    assert H.description() == G.description()


def test_group_ring_elements():
    G = b4_1()
    r = parse_ring_element(G, "x1_1 - 1")
    s = parse_ring_element(G, "x1_2 + 2")
    assert (r * s).augmentation() == 0
    assert (r + s) - s == r
    assert GroupRingElement.of(G.gen(1, 1)) - 1 == r
