import json

import pytest

from artifact.builders import b4_1, pure_braid_action
from artifact.freegroup import FreeAutomorphism
from artifact.golden import CORPUS_DIR, PASS, _matrix, run_corpus
from artifact.magnus import (
    BraidWord,
    NotInvariant,
    PureBraidWord,
    braid_action,
    burau,
    chain_map_check,
    collapse,
    detect,
    eta,
    gassner,
    gassner_submodule,
    hecke_test,
    higher_jacobian,
    homological_rep,
    homology_char_poly,
    longpaton_xi,
    make_rep,
    pure_action,
    restrict,
    same_up_to_orientation,
)
from artifact.resolution import boundary, delta
from artifact.rings import Poly, RingMatrix, char_poly, det, rank, specialize_matrix
from artifact.semidirect import CompatibleAutomorphism, GroupRingElement, GroupRingMatrix, IteratedProduct


def test_braid_words():
    w = BraidWord.parse("s1 s2^-2 s1", 3)
    assert len(w) == 4 and str(w.inverse()) == "s1^-1 s2 s2 s1^-1"
    with pytest.raises(ValueError):
        BraidWord.parse("s3", 3)
    assert len(longpaton_xi()) == 106
    assert str(PureBraidWord.parse("A1,3", 3).as_braid()) == "s2 s1 s1 s2^-1"


def test_classical_burau():
    b = burau(3)
    t = b.ring.var()
    assert b.size == 3
    assert b.matrices[1] == RingMatrix(b.ring, [[1 - t, t, 0], [1, 0, 0], [0, 0, 1]])
    assert b.check_relations() and b.check_inverses()


@pytest.mark.parametrize("spec", [braid_action(4, 2), braid_action(5, 3), pure_action(4, 3)])
def test_actions_satisfy_relations(spec):
    assert spec.check_relations()


def test_gassner_action_is_pure_braid_action():
    spec = pure_action(4, 3)
    for key, psi in spec.generators.items():
        assert psi.factors[-1] == pure_braid_action(*key, 4)


def test_compatible_conjugation_gives_chain_maps():
    G = b4_1()
    H = IteratedProduct([2, 3], {(2, 1, j): G.actions[(3, 2, j)] for j in (1, 2)})
    psi = CompatibleAutomorphism(H, (G.actions[(2, 1, 1)], G.actions[(3, 1, 1)]))
    assert chain_map_check(H, psi)
    ident = CompatibleAutomorphism(H, tuple(FreeAutomorphism.identity(d) for d in H.exponents))
    assert chain_map_check(H, ident)
    bad = CompatibleAutomorphism.unchecked(H, (G.actions[(2, 1, 1)], FreeAutomorphism.identity(3)))
    assert not chain_map_check(H, bad)


def test_conjugation_jacobian_in_b4_1():
    G = b4_1()
    H = IteratedProduct([2, 3], {(2, 1, j): G.actions[(3, 2, j)] for j in (1, 2)})
    psi = CompatibleAutomorphism(H, (G.actions[(2, 1, 1)], G.actions[(3, 1, 1)]))
    J = higher_jacobian(H, psi, (1, 2))
    # read the entries of J in ZG through H = F_3 x| F_2 inside B_4^1
    rows = [{j: GroupRingElement(G, {((),) + k: c for k, c in x.terms.items()}) for j, x in r.items()} for r in J.rows]
    J = GroupRingMatrix(G, 6, 6, rows)
    xinv = GroupRingMatrix.from_entries(G, [[G.gen(1, 1).inverse()]]).block_diagonal(6)
    one = GroupRingMatrix.identity(G, 6)
    D = delta(G, (1, 2, 3))
    assert J == xinv @ (one + D)
    assert J != xinv @ (one - D)


def test_empty_word_and_units():
    b = burau(3, 2, 1, 2)
    assert b.evaluate(BraidWord(3)).is_identity()
    R = b.ring
    for m in b.matrices.values():
        assert R.is_unit(det(m))


def test_pure_word_on_braid_handle():
    b = burau(3)
    w = PureBraidWord.parse("A1,2", 3)
    assert b.evaluate(w) == b.evaluate("s1 s1")
    with pytest.raises(ValueError):
        gassner(3).evaluate(BraidWord.parse("s1", 3))


def test_reduced_burau():
    for ell in (3, 4):
        r = homological_rep(burau(ell))
        assert r.size == ell - 1
        assert r.check_relations()
    assert hecke_test(homological_rep(burau(3))).factors_through_hecke


def test_higher_burau_is_not_hecke():
    r = homological_rep(burau(3, 2, 1, 2))
    assert r.size == 6
    rep = hecke_test(r)
    assert not rep.factors_through_hecke and min(rep.degrees.values()) > 2


def test_sigma_char_poly():
    h = burau(3, 2, 1, 2)
    t = h.ring.var()
    expect = Poly.from_roots(h.ring, [1, 1, -1, -t]) * Poly(h.ring, [-(t ** 3), 0, 1])
    for key in (1, 2):
        got = char_poly(homological_rep(h).matrices[key])
        assert same_up_to_orientation(got.map(h.ring.coerce), expect.map(h.ring.coerce)) is not None


def test_gassner_submodule_restriction():
    g = gassner(3, 2, 1, 2)
    r = restrict(g, gassner_submodule(g.ring))
    assert r.size == 6 and r.check_relations() and r.check_inverses()


def test_wrong_submodule_is_rejected():
    g = gassner(3, 2, 1, 2)
    R = g.ring
    rows = [[R.one() if j == i else R.zero() for j in range(12)] for i in range(6)]
    with pytest.raises(NotInvariant):
        restrict(g, RingMatrix(R, rows))


def test_gassner_collapse_is_burau_on_cycles():
    g = gassner(3, 2, 1, 2)
    M = gassner_submodule(g.ring)
    r = restrict(g, M)
    b = burau(3, 2, 1, 2)
    S = b.ring
    cM = collapse(M, S)
    D = specialize_matrix(boundary(b.action.structure, 2), b.tau)
    # the collapsed generators are independent 2-cycles, as many as dim H_2
    assert (cM @ D).is_zero() and rank(cM) == 6 == homological_rep(b).size
    for key, A in r.matrices.items():
        w = PureBraidWord(3, ((key, 1),))
        assert collapse(A, S) @ cM == cM @ b.evaluate(w)


def test_eta_collapse_is_burau():
    e, b = eta(3, 2, 2, 2), burau(3, 2, 2, 2)
    for key in e.matrices:
        assert collapse(e.matrices[key], b.ring) == b.matrices[key]
    with open(CORPUS_DIR / "eta_3_2_2_2_charpoly.json", encoding="utf-8") as fh:
        ref = json.load(fh)["expected"]
    for key in (1, 2):
        P = _matrix(e.ring, ref[f"s{key}"]["matrix"], ["s", "t"])
        assert char_poly(collapse(P, b.ring)) == homology_char_poly(b, key)


def test_representation_goldens():
    names = ["burau_3_2_1_2_charpoly", "eta_3_2_2_2_charpoly", "gassner_3_2_1_2_submodule"]
    results = run_corpus(names=names)
    assert len(results) == 3
    assert all(r.status == PASS for r in results), [r.line() for r in results]


def test_make_rep_rejects_bad_input():
    with pytest.raises(ValueError):
        make_rep("jones", 3, 1, 1, 1)
    with pytest.raises(ValueError):
        burau(3, 1, 2, 1)


def test_to_json_shape():
    out = burau(3).to_json()
    assert out["size"] == 3 and set(out["generators"]) == {"s1", "s2"}


def test_detect_small_cases():
    b = burau(3)
    assert detect(b, "s1 s2 s1 s2^-1 s1^-1 s2^-1").identity
    assert not detect(b, "s1 s2").identity


def test_longpaton_kernel_element():
    xi = longpaton_xi()
    assert detect(burau(6), xi).identity
    res = detect(burau(6, 2, 1, 2), xi)
    assert not res.identity and res.method == "modular certificate"
