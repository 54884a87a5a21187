"""Randomized property suites, 500 cases each, seeded so failures reproduce."""

import itertools
import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from artifact.builders import b4_1, b4_prime, p3_milnor, pbD3, pure_braid
from artifact.freegroup import (
    FreeGroupRingElement,
    FreeWord,
    apply_to_matrix,
    compose,
    fox_derivative,
    jacobian,
    matmul,
)
from artifact.homology import diagonal_matrix, smith
from artifact.magnus import braid_action, higher_jacobian, pure_action
from artifact.resolution import delta, rho_lift, summand_rank
from artifact.rings import Integers, Laurent, LaurentRat, RingMatrix
from artifact.semidirect import GroupElement, GroupRingMatrix, multiply, normalize

from randutil import random_automorphism, random_code

CASES = 500
PROFILE = settings(max_examples=CASES, derandomize=True, deadline=None, database=None)


# -- Fox calculus ---------------------------------------------------------------


@PROFILE
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(-n, n).filter(bool), max_size=100))))
def test_fox_fundamental_formula(data):
    n, code = data
    w = FreeWord(n, code)
    lhs = FreeGroupRingElement.from_word(w) - 1
    rhs = FreeGroupRingElement(n)
    for j in range(1, n + 1):
        xj = FreeGroupRingElement.from_word(FreeWord.generator(n, j)) - 1
        rhs = rhs + fox_derivative(w, j) * xj
    assert lhs == rhs


def test_chain_rule():
    rng = random.Random(23)
    for _ in range(CASES):
        n = rng.randint(1, 5)
        a = random_automorphism(rng, n)
        b = random_automorphism(rng, n)
        assert jacobian(compose(b, a)) == matmul(apply_to_matrix(b, jacobian(a)), jacobian(b))


# -- higher chain rule for compatible automorphisms -----------------------------


def _pool(spec, rng, size, max_image=9):
    """Random short products of the acting generators; long images make the lifts explode."""
    keys = spec.keys()
    out = []
    while len(out) < size:
        psi = None
        for _ in range(rng.randint(1, 3)):
            g = spec.automorphism(rng.choice(keys), rng.choice((1, -1)))
            psi = g if psi is None else psi.then(g)
        if max(len(w) for f in psi.factors for w in f.image_codes[1:]) <= max_image:
            out.append(psi)
    return out


def _image_length(psi) -> int:
    return max(len(w) for f in psi.factors for w in f.image_codes[1:])


def test_higher_chain_rule():
    rng = random.Random(48)
    specs = [braid_action(4, 2), braid_action(5, 3), pure_action(5, 3), braid_action(5, 2), pure_action(4, 2)]
    cheap, costly = [], []
    for spec in specs:
        G = spec.structure
        pool = _pool(spec, rng, 10)
        pairs = [(a, b, a.then(b)) for a in pool for b in pool]
        for k in range(1, G.ell + 1):
            for ps in itertools.combinations(range(1, G.ell + 1), k):
                rank = summand_rank(G, ps)
                if rank > 24:
                    continue
                for a, b, ab in pairs:
                    if _image_length(ab) > 9:
                        continue
                    (costly if rank > 12 else cheap).append((G, ps, a, b, ab))
    # rank-24 summands cost seconds each, so only a few of the 500 cases use them
    cases = rng.sample(cheap, CASES - 12) + rng.sample(costly, 12)
    for G, ps, phi, psi, both in cases:
        expect = psi.apply_matrix(higher_jacobian(G, phi, ps)) @ higher_jacobian(G, psi, ps)
        assert higher_jacobian(G, both, ps) == expect, (G, ps)


# -- lifted elements commute with the boundary column ---------------------------


def test_lift_commutes_with_delta():
    rng = random.Random(210)
    groups = [pure_braid(4), b4_1()]
    for _ in range(CASES):
        G = rng.choice(groups)
        ell = G.ell
        i = rng.randint(1, ell - 1)
        q = rng.randint(i + 1, ell)
        middle = [p for p in range(i + 1, q) if rng.random() < 0.5]
        comps = [()] * ell
        comps[i - 1] = FreeWord(G.exponents[i - 1], random_code(rng, G.exponents[i - 1], rng.randint(1, 4))).code
        A = GroupRingMatrix.from_entries(G, [[GroupElement(G, tuple(comps))]])
        for p in middle:
            A = rho_lift(G, p, A)
        D = delta(G, (q,)).block_diagonal(A.nrows)
        assert rho_lift(G, q, A) @ D == D @ A


# -- normal forms ------------------------------------------------------------------


def _raw(rng, G, length):
    return [(rng.randint(1, G.exponents[q - 1]), q, rng.choice((1, -1))) for q in (rng.randint(1, G.ell) for _ in range(length))]


def test_normalize_multiply_coherence():
    rng = random.Random(7)
    groups = [pure_braid(4), b4_1(), pbD3(), p3_milnor(), b4_prime()]
    for _ in range(CASES):
        G = rng.choice(groups)
        a, b, c = (_raw(rng, G, rng.randint(0, 8)) for _ in range(3))
        ga, gb, gc = normalize(G, a), normalize(G, b), normalize(G, c)
        assert normalize(G, a + b) == multiply(ga, gb)
        assert multiply(multiply(ga, gb), gc) == multiply(ga, multiply(gb, gc))
        inv = [(i, q, -s) for i, q, s in reversed(a)]
        assert normalize(G, a + inv).is_identity()


# -- Smith normal form --------------------------------------------------------------


def _check_smith(M: RingMatrix, divides):
    res = smith(M, transforms=True)
    ring = M.ring
    D = diagonal_matrix(res, M.nrows, M.ncols)
    assert res.U @ M @ res.V == D
    assert res.U @ res.U_inv == RingMatrix.identity(ring, M.nrows)
    assert res.V @ res.V_inv == RingMatrix.identity(ring, M.ncols)
    for a, b in zip(res.divisors, res.divisors[1:]):
        assert divides(a, b)


def test_smith_integers():
    rng = random.Random(5)
    for _ in range(CASES):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        M = RingMatrix(Integers, [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])
        _check_smith(M, lambda a, b: b % a == 0)


def test_smith_laurent():
    rng = random.Random(6)
    R = LaurentRat(1)
    for _ in range(CASES):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        rows = []
        for _ in range(m):
            row = []
            for _ in range(n):
                lo = rng.randint(-1, 1)
                terms = {(lo + e,): Fraction(rng.randint(-2, 2)) for e in range(rng.randint(0, 2))}
                row.append(Laurent(R, {k: v for k, v in terms.items() if v}))
            rows.append(row)
        _check_smith(RingMatrix(R, rows), lambda a, b: R.divides(a, b))
