import random
from math import comb, prod

import pytest

from artifact.builders import b4_1, direct_product, p3_milnor, pbD3, pnl, pure_braid
from artifact.homology import (
    NotFree,
    UnsupportedRing,
    homology,
    homology_basis,
    lcs_product,
    lcs_ranks,
    poincare_poly,
    smith,
)
from artifact.magnus import burau_tau
from artifact.resolution import ChainComplex, specialized_complex, trivial_complex
from artifact.rings import Integers, LaurentInt, LaurentRat, RingMatrix, character


def betti_of_product(exponents):
    coeffs = [1]
    for d in exponents:
        coeffs = [a + d * b for a, b in zip(coeffs + [0], [0] + coeffs)]
    return tuple(coeffs)


def test_smith_small_cases():
    assert smith(RingMatrix(Integers, [[2, 0], [0, 3]])).divisors == [1, 6]
    R = LaurentRat(1)
    t = R.var()
    assert smith(RingMatrix(R, [[t - 1]])).divisors == [t - 1]
    assert smith(RingMatrix(R, [[t ** -2 - t ** -1]])).divisors == [t - 1]
    with pytest.raises(UnsupportedRing):
        smith(RingMatrix(LaurentInt(2), [[LaurentInt(2).var(0)]]))


def test_smith_transforms_integers():
    rng = random.Random(17)
    M = RingMatrix(Integers, [[rng.randint(-20, 20) for _ in range(4)] for _ in range(3)])
    res = smith(M, transforms=True)
    fast = smith(M)
    assert res.divisors == fast.divisors


def test_free_group_homology():
    h = homology(trivial_complex(direct_product(3)))
    assert h.betti == (1, 3) and h.torsion_free


@pytest.mark.parametrize("ell", [3, 4, 5])
def test_pure_braid_homology(ell):
    h = homology(trivial_complex(pure_braid(ell)))
    assert h.betti == betti_of_product(range(1, ell))
    assert h.torsion_free


def test_b4_1_homology():
    h = homology(trivial_complex(b4_1()))
    assert h.betti == (1, 2, 2, 1) and h.torsion_free
    assert str(h).splitlines()[1] == "H_1 = Z^2"


def test_cross_structure_consistency():
    assert homology(trivial_complex(pbD3())).to_json() == homology(trivial_complex(pure_braid(4))).to_json()
    assert homology(trivial_complex(p3_milnor())).to_json() == homology(trivial_complex(pure_braid(3))).to_json()


def test_torsion_is_reported():
    C = ChainComplex(Integers, [1, 1], {1: RingMatrix(Integers, [[2]])})
    h = homology(C)
    assert h.betti == (0, 0) and h[0].torsion == [2] and not h.torsion_free


def test_homology_basis_reduced_burau_carrier():
    G = direct_product(3)
    R = LaurentInt(1)
    C = specialized_complex(G, character(G, R, {g: R.var() for g in G.generators()}))
    assert homology_basis(C, 1).rank == 2


def test_homology_basis_pnl():
    tau = burau_tau(5, 3, 1)
    C = specialized_complex(tau.structure, tau)
    assert homology_basis(C, 2).rank == 6


def test_homology_basis_not_free():
    G = direct_product(3)
    R = LaurentInt(3)
    C = specialized_complex(G, character(G, R, {(i, 1): R.var(i - 1) for i in range(1, 4)}))
    with pytest.raises(NotFree):
        homology_basis(C, 1)


def test_euler_characteristic_of_specialized_complexes():
    G = pnl(5, 3)
    R = LaurentInt(1)
    C = specialized_complex(G, character(G, R, {g: R.var() for g in G.generators()}))
    h = homology(C)
    assert sum((-1) ** d.degree * d.rank for d in h.degrees) == prod(1 - d for d in G.exponents)


def test_poincare_poly():
    R = LaurentInt(1)
    t = R.var()
    assert poincare_poly([1, 2]) == 1 + 3 * t + 2 * t * t
    assert poincare_poly([1]) == 1 + t
    assert poincare_poly([1, 2, 3], pure_braid(4)) == (1 + t) * (1 + 2 * t) * (1 + 3 * t)
    with pytest.raises(ValueError):
        poincare_poly(b4_1().exponents, b4_1())


def _product_series(phis, K):
    # independent expansion of prod (1 - t^k)^phi_k by the binomial theorem
    series = [1] + [0] * K
    for k, phi in enumerate(phis, 1):
        factor = [0] * (K + 1)
        for m in range(0, K // k + 1):
            factor[m * k] = comb(phi, m) * (-1) ** m
        series = [sum(series[i] * factor[n - i] for i in range(n + 1)) for n in range(K + 1)]
    return series


def test_lcs_ranks():
    assert lcs_ranks([1, 2, 3], 3) == (6, 4, 10)
    assert lcs_ranks([1], 3) == (1, 0, 0)
    target = [1, -6, 11, -6]
    assert _product_series((6, 4, 10), 3) == target
    assert lcs_product((6, 4, 10), 3) == target
    for exps in ([2, 3], [1, 2, 3, 4], [5]):
        K = 6
        phis = lcs_ranks(exps, K)
        full = [1]
        for d in exps:
            full = [a - d * b for a, b in zip(full + [0], [0] + full)]
        full = (full + [0] * K)[: K + 1]
        assert _product_series(phis, K) == full
        assert all(p >= 0 for p in phis)
