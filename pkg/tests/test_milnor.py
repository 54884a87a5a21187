from itertools import combinations
from math import factorial

import pytest

from artifact.builders import pnl
from artifact.homology import homology
from artifact.milnor import (
    PowerProduct,
    discriminant_d3_milnor_number,
    discriminant_d4,
    divisors,
    eigenspace_dims,
    generic_character,
    milnor_integral_homology,
    milnor_report,
    mobius,
    monodromy_char_polys,
    projective_group,
    quasi_generic,
    subset_element,
    subsets_in,
    triangular_form_check,
    vanishing_verify,
    y_basis,
    zeta,
    zeta_closed_form,
)
from artifact.resolution import trivial_complex
from artifact.rings import Rationals, character


def test_mobius_and_divisors():
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert divisors(6) == [1, 2, 3, 6]


def test_power_products():
    p = PowerProduct({1: 3, 3: 1, 6: 2})
    assert p.degree() == 18
    assert p.cyclotomic_exponents() == {1: 6, 2: 2, 3: 3, 6: 2}
    assert PowerProduct.from_cyclotomic(6, p.cyclotomic_exponents()) == p
    assert str(p) == "(1-t)^3(1-t^3)(1-t^6)^2"
    assert p.to_poly() == PowerProduct({1: 3}).to_poly() * PowerProduct({3: 1, 6: 2}).to_poly()


@pytest.mark.parametrize("ell,betti", [(3, (1, 4)), (4, (1, 7, 18))])
def test_milnor_betti(ell, betti):
    h = milnor_integral_homology(ell)
    assert h.betti == betti and h.torsion_free


def test_guard():
    with pytest.raises(ValueError):
        milnor_integral_homology(6)
    with pytest.raises(ValueError):
        eigenspace_dims(4, 5)


def test_eigenspaces_l4():
    # eigenvalue 1 is the projective complement itself: Betti numbers 1, 5, 6
    assert eigenspace_dims(4, 1) == [1, 5, 6]
    assert eigenspace_dims(4, 3) == [0, 1, 3]
    assert eigenspace_dims(4, 6) == [0, 0, 2]


def test_char_polys():
    assert [str(p) for p in monodromy_char_polys(3)] == ["(1-t)", "(1-t)(1-t^3)"]
    assert [str(p) for p in monodromy_char_polys(4)] == ["(1-t)", "(1-t)^4(1-t^3)", "(1-t)^3(1-t^3)(1-t^6)^2"]


def test_eigenvalue_one_is_the_base():
    # the 1-eigenspace of h_* on H_i(F) is H_i of the projective complement
    for ell in (3, 4, 5):
        base = homology(trivial_complex(projective_group(ell))).betti
        polys = monodromy_char_polys(ell)
        assert tuple(p.cyclotomic_exponents().get(1, 0) for p in polys) == base


@pytest.mark.parametrize("ell", [3, 4, 5])
def test_zeta(ell):
    z = zeta(ell)
    assert z == zeta_closed_form(ell)
    assert z.exps == {ell * (ell - 1) // 2: (-1) ** (ell + 1) * factorial(ell - 2)}


def test_report():
    rep = milnor_report(4)
    assert rep.euler == 12 and rep.to_json()["betti"] == [1, 7, 18]
    assert "zeta(t) = (1-t^6)^-2" in rep.table()


def test_subsets_and_elements():
    J = list(subsets_in(5, 3, 2))
    assert (1, 4) in J and (1, 2) not in J and all(j[1] > 3 for j in J)
    G = pnl(5, 3)
    assert subset_element(G, (1, 4)) == G.gen(1, 1).comps


def test_quasi_generic():
    G = pnl(4, 2)
    assert quasi_generic(generic_character(G), 2)
    res = quasi_generic(character(G, Rationals, {g: 1 for g in G.generators()}), 2)
    assert not res and res.witness is not None
    # one trivial generator A_{1,3} is already a witness
    vals = [1] + [3] * (len(G.generators()) - 1)
    assert quasi_generic(generic_character(G, vals), 2).witness == (1, 3)


@pytest.mark.parametrize("n,ell,q,top", [(4, 2, 2, 2), (5, 3, 2, 6), (5, 2, 3, 6)])
def test_vanishing(n, ell, q, top):
    rep = vanishing_verify(n, ell, q)
    assert rep.ok and rep.dims[-1] == top and not any(rep.dims[:-1])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pn1_is_acyclic(n):
    rep = vanishing_verify(n, 1, n - 1)
    assert rep.ok and not any(rep.dims)


def test_vanishing_flags_non_generic():
    G = pnl(4, 2)
    rep = vanishing_verify(4, 2, 2, character(G, Rationals, {g: 1 for g in G.generators()}))
    assert not rep.ok and not rep.quasi_generic


def test_y_basis():
    assert y_basis(4, (1, 3)) == [(1,), (1, 2, -1), (1, 3)]


@pytest.mark.parametrize("ell,size", [(4, 2), (5, 3)])
def test_triangular_form(ell, size):
    for J in combinations(range(1, ell), size):
        assert triangular_form_check(ell, J)


def test_triangular_form_needs_adapted_basis():
    standard = [(i,) for i in range(1, 4)]
    assert not any(triangular_form_check(4, J, standard) for J in combinations(range(1, 4), 2))


def test_discriminants():
    h = discriminant_d4()
    assert h.betti == (1, 2, 2) and h.torsion_free
    assert discriminant_d3_milnor_number() == 2
