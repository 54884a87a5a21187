"""Higher-order Fox Jacobians and generalized Magnus representations of braid groups.

A group Gamma acting compatibly on G induces chain maps of C_*(G).  After
specializing along a Gamma-invariant tau: ZG -> S, the degree-k map is
S-linear and its matrix is the block sum over summands of tau(J_{p_1..p_k}).
Matrices act on row vectors, so the image of a word is the product of the
generator matrices in the order the letters are read.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .builders import artin_generator, artin_word, pnl, pure_braid_word
from .freegroup import FreeAutomorphism, fox_terms
from .homology import NotFree, homology_basis
from .resolution import ChainComplex, boundary, rho_lift, specialized_complex, summand_rank, summands
from .rings import (
    LaurentInt,
    LaurentRing,
    Poly,
    RingMatrix,
    Specialization,
    char_poly,
    det,
    rank,
    specialize_matrix,
)
from .semidirect import CompatibleAutomorphism, GroupRingElement, GroupRingMatrix, IteratedProduct


class NotInvariant(ValueError):
    """A proposed submodule is not carried into itself by some generator."""


# -- words in the acting group ------------------------------------------------------------

LONGPATON_ZETA = "s4^-1 s5 s3^-1 s4 s2^-1 s3^-3 s1^3 s5 s4 s3^-1 s2^-1 s1"

_SIGMA = re.compile(r"s(\d+)(?:\^(-?\d+))?$")
_PURE = re.compile(r"A(\d+),(\d+)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class BraidWord:
    """A word in sigma_1, ..., sigma_{l-1}: letters (i, ±1)."""

    strands: int
    letters: tuple = ()

    def __post_init__(self):
        for i, s in self.letters:
            if not 1 <= i < self.strands or s not in (1, -1):
                raise ValueError(f"sigma_{i}^{s} is not a generator of B_{self.strands}")

    @classmethod
    def parse(cls, text: str, strands: int) -> "BraidWord":
        text = text.strip()
        if text in NAMED_WORDS:
            return NAMED_WORDS[text](strands)
        letters = []
        for tok in text.split():
            if tok == "1":
                continue
            m = _SIGMA.match(tok)
            if not m:
                raise ValueError(f"bad braid token {tok!r}")
            e = int(m.group(2)) if m.group(2) else 1
            letters.extend([(int(m.group(1)), 1 if e > 0 else -1)] * abs(e))
        return cls(strands, tuple(letters))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.strands, self.letters + other.letters)

    def __pow__(self, n: int) -> "BraidWord":
        w = self if n >= 0 else self.inverse()
        return BraidWord(self.strands, w.letters * abs(n))

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((i, -s) for i, s in reversed(self.letters)))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"s{i}" if s > 0 else f"s{i}^-1" for i, s in self.letters)


def commutator(a: BraidWord, b: BraidWord) -> BraidWord:
    """[a, b] = a b a^-1 b^-1."""
    return a * b * a.inverse() * b.inverse()


def longpaton_zeta(strands: int = 6) -> BraidWord:
    return BraidWord.parse(LONGPATON_ZETA, strands)


def longpaton_xi(strands: int = 6) -> BraidWord:
    """xi = [zeta^-1 sigma_5 zeta, (sigma_2 sigma_3 sigma_4 sigma_5)^5], in the kernel of Burau on B_6."""
    z = longpaton_zeta(strands)
    a = z.inverse() * BraidWord.parse("s5", strands) * z
    return commutator(a, BraidWord.parse("s2 s3 s4 s5", strands) ** 5)


NAMED_WORDS = {"@longpaton-xi": longpaton_xi, "@longpaton-zeta": longpaton_zeta}


@dataclass(frozen=True)
class PureBraidWord:
    """A word in the generators A_{r,s} of P_l: letters ((r, s), ±1)."""

    strands: int
    letters: tuple = ()

    def __post_init__(self):
        for (r, s), e in self.letters:
            if not 1 <= r < s <= self.strands or e not in (1, -1):
                raise ValueError(f"A{r},{s} is not a generator of P_{self.strands}")

    @classmethod
    def parse(cls, text: str, strands: int) -> "PureBraidWord":
        letters = []
        for tok in text.split():
            if tok == "1":
                continue
            m = _PURE.match(tok)
            if not m:
                raise ValueError(f"bad pure braid token {tok!r}")
            e = int(m.group(3)) if m.group(3) else 1
            letters.extend([((int(m.group(1)), int(m.group(2))), 1 if e > 0 else -1)] * abs(e))
        return cls(strands, tuple(letters))

    def as_braid(self) -> BraidWord:
        out = []
        for (r, s), e in self.letters:
            w = pure_braid_word(r, s)
            out.extend(w if e > 0 else [(i, -x) for i, x in reversed(w)])
        return BraidWord(self.strands, tuple(out))

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"A{r},{s}" if e > 0 else f"A{r},{s}^-1" for (r, s), e in self.letters)


# -- compatible actions -------------------------------------------------------------------


@dataclass
class GroupActionSpec:
    """Compatible action of B_l (kind 'braid') or P_l (kind 'pure') on a structure."""

    structure: IteratedProduct
    kind: str
    strands: int
    generators: dict

    def keys(self) -> list:
        return list(self.generators)

    def automorphism(self, key, sign: int = 1) -> CompatibleAutomorphism:
        psi = self.generators[key]
        return psi if sign > 0 else psi.inverse()

    def parse(self, text: str):
        if self.kind == "braid":
            return BraidWord.parse(text, self.strands)
        return PureBraidWord.parse(text, self.strands)

    def word_automorphism(self, word) -> CompatibleAutomorphism:
        """Phi of a word; the first letter acts first."""
        out = None
        for key, s in word.letters:
            psi = self.automorphism(key, s)
            out = psi if out is None else out.then(psi)
        if out is None:
            out = CompatibleAutomorphism.unchecked(
                self.structure, [FreeAutomorphism.identity(d) for d in self.structure.exponents]
            )
        return out

    def relations(self) -> list:
        """Defining relations of the acting group as pairs of words."""
        ell = self.strands
        out = []
        if self.kind == "braid":
            for i in range(1, ell - 1):
                out.append((BraidWord(ell, ((i, 1), (i + 1, 1), (i, 1))), BraidWord(ell, ((i + 1, 1), (i, 1), (i + 1, 1)))))
            for i in range(1, ell):
                for j in range(i + 2, ell):
                    out.append((BraidWord(ell, ((i, 1), (j, 1))), BraidWord(ell, ((j, 1), (i, 1)))))
        else:
            # A_{r,s} commutes with A_{i,j} when the chords are disjoint or nested
            gens = self.keys()
            for a in gens:
                for b in gens:
                    if a < b and (a[1] < b[0] or (b[0] < a[0] and a[1] < b[1])):
                        out.append((PureBraidWord(ell, ((a, 1), (b, 1))), PureBraidWord(ell, ((b, 1), (a, 1)))))
        return out

    def check_relations(self) -> bool:
        for u, v in self.relations():
            if self.word_automorphism(u).factors != self.word_automorphism(v).factors:
                return False
        return True


def braid_action(n: int, ell: int) -> GroupActionSpec:
    """Phi_{l,n}: B_l acts on each factor F_p = F_l * F_{p-l} of P_{n,l} by Artin on F_l, trivially on the rest."""
    G = pnl(n, ell)
    gens = {}
    for i in range(1, ell):
        gens[i] = CompatibleAutomorphism(G, tuple(artin_generator(d, i) for d in G.exponents))
    return GroupActionSpec(G, "braid", ell, gens)


def pure_action(n: int, ell: int) -> GroupActionSpec:
    """Restriction of Phi_{l,n} to P_l."""
    G = pnl(n, ell)
    gens = {}
    for s in range(2, ell + 1):
        for r in range(1, s):
            w = pure_braid_word(r, s)
            gens[(r, s)] = CompatibleAutomorphism(G, tuple(artin_word(d, w) for d in G.exponents))
    return GroupActionSpec(G, "pure", ell, gens)


# -- higher-order Jacobians ---------------------------------------------------------------


def _factor_elem(G: IteratedProduct, p: int, code: tuple) -> tuple:
    comps = [()] * G.ell
    comps[p - 1] = code
    return tuple(comps)


def factor_jacobian(G: IteratedProduct, psi: CompatibleAutomorphism, p: int) -> GroupRingMatrix:
    """J_p(psi): Fox Jacobian of psi_p with entries read in ZG."""
    phi = psi[p]
    d = G.exponents[p - 1]
    rows = []
    for i in range(1, d + 1):
        img = phi.image_codes[i]
        row = {}
        for j in range(1, d + 1):
            terms = {_factor_elem(G, p, u): c for u, c in fox_terms(img, j).items()}
            if terms:
                row[j - 1] = GroupRingElement(G, terms)
        rows.append(row)
    return GroupRingMatrix(G, d, d, rows)


def higher_jacobian(G: IteratedProduct, psi: CompatibleAutomorphism, ps) -> GroupRingMatrix:
    """J_{p_1..p_k}(psi) = [J_{p_k}]^{d_{p_1}...d_{p_{k-1}}} * rho~_{p_k}(J_{p_1..p_{k-1}})."""
    ps = tuple(ps)
    cache = psi.__dict__.setdefault("_jac_cache", {})
    hit = cache.get(ps)
    if hit is not None:
        return hit
    if len(ps) == 1:
        out = factor_jacobian(G, psi, ps[0])
    else:
        head = ps[:-1]
        out = factor_jacobian(G, psi, ps[-1]).block_diagonal(summand_rank(G, head)) @ rho_lift(
            G, ps[-1], higher_jacobian(G, psi, head)
        )
    cache[ps] = out
    return out


def _direct_sum(G, blocks: list) -> GroupRingMatrix:
    n = sum(b.nrows for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.rows:
            rows.append({off + j: x for j, x in r.items()})
        off += b.ncols
    return GroupRingMatrix(G, n, n, rows)


def chain_map(G: IteratedProduct, psi: CompatibleAutomorphism, k: int) -> GroupRingMatrix:
    """Linear part of Psi_k: the block sum of higher Jacobians over the summands of C_k."""
    if k == 0:
        return GroupRingMatrix.identity(G, 1)
    return _direct_sum(G, [higher_jacobian(G, psi, ps) for ps in summands(G, k)])


def chain_map_check(G: IteratedProduct, psi: CompatibleAutomorphism, k: int | None = None) -> bool:
    """Psi_{k-1} ∘ boundary = boundary ∘ Psi_k, i.e. J_k D_k = psi~(D_k) J_{k-1} over ZG."""
    degrees = [k] if k is not None else range(1, G.ell + 1)
    for j in degrees:
        D = boundary(G, j)
        if not (chain_map(G, psi, j) @ D) == (psi.apply_matrix(D) @ chain_map(G, psi, j - 1)):
            return False
    return True


# -- specializations used by the braid representations ------------------------------------


def _tau(G: IteratedProduct, ring, value) -> Specialization:
    """Character sending A_{i,j} (generator (i, j - l)) to value(i, j)."""
    ell = G.exponents[0]
    images = {}
    for i, q in G.generators():
        v = value(i, ell + q)
        if v is not None:
            images[(i, q)] = RingMatrix(ring, [[v]])
    return Specialization(G, ring, images)


def burau_tau(n: int, ell: int, m: int) -> Specialization:
    """tau(A_{r,s}) = t if s >= n - m + 1, else 1."""
    R = LaurentInt(1)
    t = R.var()
    return _tau(pnl(n, ell), R, lambda r, s: t if s >= n - m + 1 else None)


def eta_tau(n: int, ell: int, m: int) -> Specialization:
    """tau(A_{r,s}) = t_s for the last m strands."""
    names = [f"t{s}" for s in range(n - m + 1, n + 1)]
    R = LaurentInt(m, names)
    return _tau(pnl(n, ell), R, lambda r, s: R.var(s - (n - m + 1)) if s >= n - m + 1 else None)


def gassner_names(n: int, m: int) -> list:
    return [f"t{r}_{s}" for s in range(n - m + 1, n + 1) for r in range(1, s)]


def gassner_tau(n: int, ell: int, m: int, names=None) -> Specialization:
    """tau(A_{r,s}) = t_{r,s} for the last m strands; N = C(n,2) - C(n-m,2) variables."""
    pairs = [(r, s) for s in range(n - m + 1, n + 1) for r in range(1, s)]
    assert len(pairs) == comb(n, 2) - comb(n - m, 2)
    R = LaurentInt(len(pairs), names or gassner_names(n, m))
    index = {p: k for k, p in enumerate(pairs)}
    return _tau(pnl(n, ell), R, lambda r, s: R.var(index[(r, s)]) if (r, s) in index else None)


def is_invariant(action: GroupActionSpec, tau: Specialization) -> bool:
    """tau(psi(g)) = tau(g) on every generator g for every generator psi of the action."""
    G = action.structure
    for key in action.keys():
        psi = action.automorphism(key)
        for i, q in G.generators():
            g = G.generator_comps(i, q)
            if not tau.comps_matrix(psi.apply_comps(g)) == tau.comps_matrix(g):
                return False
    return True


# -- representations ----------------------------------------------------------------------


@dataclass
class RepresentationHandle:
    """Generator matrices of Phi^tau_k (or of a reduction of it) over ``ring``."""

    action: GroupActionSpec
    tau: Specialization
    degree: int
    ring: object
    matrices: dict
    inverses: dict
    basis: str = "chains"
    basis_rows: RingMatrix | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return next(iter(self.matrices.values())).nrows

    def generator(self, key, sign: int = 1) -> RingMatrix:
        return self.matrices[key] if sign > 0 else self.inverses[key]

    def evaluate(self, word) -> RingMatrix:
        if isinstance(word, str):
            word = self.action.parse(word)
        if self.action.kind == "pure" and isinstance(word, BraidWord):
            raise ValueError("a pure braid representation needs a pure braid word")
        if self.action.kind == "braid" and isinstance(word, PureBraidWord):
            word = word.as_braid()
        out = RingMatrix.identity(self.ring, self.size)
        for key, s in word.letters:
            out = out @ self.generator(key, s)
        return out

    def check_relations(self) -> bool:
        return all(self.evaluate(u) == self.evaluate(v) for u, v in self.action.relations())

    def check_inverses(self) -> bool:
        return all((self.matrices[k] @ self.inverses[k]).is_identity() for k in self.matrices)

    def to_json(self) -> dict:
        fmt = self.ring.fmt
        def mat(m):
            return [[fmt(x) for x in row] for row in m.rows]
        out = {
            "label": self.label,
            "degree": self.degree,
            "basis": self.basis,
            "ring": self.ring.name,
            "size": self.size,
            "generators": {_key_name(k, self.action.kind): mat(m) for k, m in self.matrices.items()},
        }
        if self.basis_rows is not None:
            out["basis_rows"] = mat(self.basis_rows)
        return out


def _key_name(key, kind: str) -> str:
    return f"s{key}" if kind == "braid" else f"A{key[0]},{key[1]}"


def _block_sum(ring, blocks: list) -> RingMatrix:
    n = sum(b.nrows for b in blocks)
    z = ring.zero()
    rows = [[z] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, r in enumerate(b.rows):
            rows[off + i][off : off + b.ncols] = list(r)
        off += b.nrows
    return RingMatrix._raw(ring, rows, n)


def rep_matrix(G: IteratedProduct, psi: CompatibleAutomorphism, tau: Specialization, k: int) -> RingMatrix:
    return _block_sum(tau.ring, [specialize_matrix(higher_jacobian(G, psi, ps), tau) for ps in summands(G, k)])


def magnus_rep(action: GroupActionSpec, tau: Specialization, k: int, label: str = "", check: bool = True) -> RepresentationHandle:
    G = action.structure
    if tau.structure is not G:
        raise ValueError("specialization belongs to another structure")
    if not 1 <= k <= G.ell:
        raise ValueError(f"degree {k} out of range 1..{G.ell}")
    if check and not is_invariant(action, tau):
        raise ValueError("tau is not invariant under the action")
    mats, invs = {}, {}
    for key in action.keys():
        mats[key] = rep_matrix(G, action.automorphism(key), tau, k)
        invs[key] = rep_matrix(G, action.automorphism(key, -1), tau, k)
    h = RepresentationHandle(action, tau, k, tau.ring, mats, invs, label=label)
    if check and not h.check_inverses():
        raise ArithmeticError("generator matrices are not inverse to each other")
    return h


def _check_range(ell: int, q: int, m: int, k: int):
    if not (1 <= m <= q and 1 <= k <= q):
        raise ValueError("need 1 <= m <= n - l and 1 <= k <= n - l")


def burau(ell: int, q: int = 1, m: int = 1, k: int = 1) -> RepresentationHandle:
    """beta^m_{l,q,k} on C_k of P_{l+q,l}; beta^1_{l,1,1} is the Burau representation."""
    _check_range(ell, q, m, k)
    n = ell + q
    return magnus_rep(braid_action(n, ell), burau_tau(n, ell, m), k, label=f"beta^{m}_({ell},{q},{k})")


def eta(ell: int, q: int, m: int, k: int) -> RepresentationHandle:
    _check_range(ell, q, m, k)
    n = ell + q
    return magnus_rep(braid_action(n, ell), eta_tau(n, ell, m), k, label=f"eta^{m}_({ell},{q},{k})")


def gassner(ell: int, q: int = 1, m: int = 1, k: int = 1, names=None) -> RepresentationHandle:
    """theta^m_{l,q,k}; theta^1_{l,1,1} is the Gassner representation of P_l."""
    _check_range(ell, q, m, k)
    n = ell + q
    return magnus_rep(pure_action(n, ell), gassner_tau(n, ell, m, names), k, label=f"theta^{m}_({ell},{q},{k})")


def make_rep(kind: str, ell: int, q: int, m: int, k: int, names=None) -> RepresentationHandle:
    if kind == "gassner":
        return gassner(ell, q, m, k, names)
    builders = {"burau": burau, "eta": eta}
    if kind not in builders:
        raise ValueError(f"unknown representation kind {kind!r}")
    return builders[kind](ell, q, m, k)


def handle_complex(handle: RepresentationHandle) -> ChainComplex:
    G = handle.action.structure
    return specialized_complex(G, handle.tau)


# -- reductions ---------------------------------------------------------------------------


def _solve_in_span(gens: RingMatrix, v: list, cols: list, dG):
    """Coefficients c with c * gens = v by Cramer's rule on the chosen columns, exactly."""
    ring = gens.ring
    r = gens.nrows
    sub = [[gens.rows[i][j] for j in cols] for i in range(r)]
    out = []
    for i in range(r):
        rows = [list(x) for x in sub]
        rows[i] = [v[j] for j in cols]
        num = det(RingMatrix._raw(ring, rows, r))
        out.append(ring.exquo(num, dG))
    # verify on all columns
    for j in range(gens.ncols):
        s = ring.zero()
        for i in range(r):
            s = s + out[i] * gens.rows[i][j]
        if not s == v[j]:
            raise ArithmeticError("not in the span")
    return out


def _pivot_columns(gens: RingMatrix) -> tuple:
    """Columns on which the generator rows have a nonzero maximal minor."""
    from itertools import combinations

    ring = gens.ring
    r = gens.nrows
    for cols in combinations(range(gens.ncols), r):
        m = RingMatrix._raw(ring, [[row[j] for j in cols] for row in gens.rows], r)
        d = det(m)
        if not ring.is_zero(d):
            return list(cols), d
    raise NotFree("submodule generators are linearly dependent")


def restrict(handle: RepresentationHandle, gens: RingMatrix) -> RepresentationHandle:
    """Matrices of the action on the submodule spanned by the rows of ``gens``."""
    ring = handle.ring
    gens = gens.map(ring.coerce, ring)
    if gens.ncols != handle.size:
        raise ValueError("generators live in the wrong module")
    cols, dG = _pivot_columns(gens)
    # prefer a unit minor when one exists; Cramer's rule then divides exactly
    def reduce(M: RingMatrix) -> RingMatrix:
        img = gens @ M
        rows = []
        for v in img.rows:
            try:
                rows.append(_solve_in_span(gens, v, cols, dG))
            except ArithmeticError:
                raise NotInvariant("submodule is not invariant") from None
        return RingMatrix._raw(ring, rows, gens.nrows)

    mats = {k: reduce(m) for k, m in handle.matrices.items()}
    invs = {k: reduce(m) for k, m in handle.inverses.items()}
    return RepresentationHandle(
        handle.action, handle.tau, handle.degree, ring, mats, invs, "submodule", gens, handle.label + " (submodule)"
    )


def homological_rep(handle: RepresentationHandle, mode: str = "homology", generators: RingMatrix | None = None) -> RepresentationHandle:
    """Reduce to a basis of H_k (univariate) or to an invariant free submodule."""
    if mode == "submodule":
        if generators is None:
            raise ValueError("submodule mode needs generators")
        return restrict(handle, generators)
    if mode != "homology":
        raise ValueError(f"unknown reduction mode {mode!r}")
    ring = handle.ring
    if not isinstance(ring, LaurentRing) or ring.nvars != 1:
        raise NotFree("homology-basis mode needs univariate Laurent coefficients; use a submodule")
    hb = homology_basis(handle_complex(handle), handle.degree)
    Q = hb.ring
    B = hb.basis

    def reduce(M: RingMatrix) -> RingMatrix:
        return hb.coordinates(B @ M.map(Q.coerce, Q))

    mats = {k: reduce(m) for k, m in handle.matrices.items()}
    invs = {k: reduce(m) for k, m in handle.inverses.items()}
    return RepresentationHandle(
        handle.action, handle.tau, handle.degree, Q, mats, invs, "homology", B, handle.label + " (homology)"
    )


def gassner_submodule(ring) -> RingMatrix:
    """Six generators of a free invariant submodule of C_2 for theta^1_{3,2,2}.

    Coordinates e_1..e_12 follow the single summand (1, 2) of C_2(P_{5,3}),
    and the four variables are t_r = t_{r,5}.
    """
    t1, t2, t3, t4 = (ring.var(i) for i in range(4))
    one = ring.one()

    def vec(entries):
        v = [ring.zero()] * 12
        for i, x in entries.items():
            v[i - 1] = x
        return v

    return RingMatrix._raw(ring, [
        vec({1: t4 * (t2 - one), 2: one - t1 * t4, 4: t2 - one}),
        vec({2: one - t3, 3: t2 - one}),
        vec({5: t4 * (t3 - one), 7: one - t1, 8: (one - t1) * (t3 - one)}),
        vec({6: t4 * (t3 - one), 7: one - t2 * t4, 8: t3 - one}),
        vec({9: one - t2, 10: t1 - one}),
        vec({9: one - t3 * t4, 11: t1 - one, 12: t3 * (t1 - one)}),
    ], 12)


# -- invariants of representations --------------------------------------------------------


def minimal_polynomial_degree(M: RingMatrix) -> int:
    """Smallest d with I, M, ..., M^d dependent over the fraction field."""
    n = M.nrows
    ring = M.ring
    powers = [RingMatrix.identity(ring, n)]
    flat = []
    for d in range(n + 1):
        flat.append([x for row in powers[-1].rows for x in row])
        if rank(RingMatrix._raw(ring, [list(r) for r in flat], n * n)) < len(flat):
            return d
        powers.append(powers[-1] @ M)
    return n


@dataclass
class HeckeReport:
    degrees: dict

    @property
    def factors_through_hecke(self) -> bool:
        return all(d <= 2 for d in self.degrees.values())

    def __str__(self):
        parts = [f"{k}: minimal polynomial degree {d}" for k, d in self.degrees.items()]
        verdict = "satisfies" if self.factors_through_hecke else "violates"
        return "\n".join(parts + [f"{verdict} a quadratic (Hecke) relation"])


def hecke_test(handle: RepresentationHandle) -> HeckeReport:
    if handle.action.kind != "braid":
        raise ValueError("the Hecke test applies to braid group representations")
    return HeckeReport({_key_name(k, "braid"): minimal_polynomial_degree(m) for k, m in handle.matrices.items()})


def flip(ring, x):
    """Substitute every variable v -> v^-1."""
    return type(x)(ring, {tuple(-e for e in k): c for k, c in x.terms.items()})


def collapse(M: RingMatrix, target) -> RingMatrix:
    """Send every variable to the single variable of ``target`` (t_i -> t)."""
    def one(x):
        out: dict = {}
        for k, c in x.terms.items():
            e = (sum(k),)
            out[e] = out.get(e, 0) + c
        return type(x)(target, {k: c for k, c in out.items() if c})

    return M.map(one, target)


def same_up_to_orientation(p: Poly, q: Poly) -> str | None:
    """'exact', 'inverted' (after v -> v^-1 on coefficients) or None."""
    if p == q:
        return "exact"
    ring = p.ring
    if p.map(lambda x: flip(ring, x)) == q:
        return "inverted"
    return None


def homology_char_poly(handle: RepresentationHandle, key) -> Poly:
    """Characteristic polynomial of the action on H_top ⊗ Frac, basis-free.

    Uses charpoly(Psi_k) = charpoly(H_k) * charpoly(Psi_{k-1} restricted to im d_k), valid
    when the lower homology vanishes over the fraction field (generic local systems), where
    the restriction to im d_k is the action on C_{k-1} divided by the one on im d_{k-1}.
    """
    G = handle.action.structure
    tau = handle.tau
    psi = handle.action.automorphism(key)
    k = handle.degree
    polys = [char_poly(rep_matrix(G, psi, tau, j)) for j in range(1, k + 1)]
    lam_minus_one = Poly(tau.ring, [-1, 1])
    # image of d_1 in C_0 is C_0 over the fraction field: action is 1
    im = lam_minus_one
    for j in range(1, k):
        im = polys[j - 1].exquo(im)
    return polys[k - 1].exquo(im)


# -- kernel detection ---------------------------------------------------------------------


def _eval_matrix(M: RingMatrix, t0: int, p: int) -> np.ndarray:
    """Entries of a univariate Laurent matrix at t = t0 modulo p."""
    inv = pow(t0, -1, p)
    out = np.zeros((M.nrows, M.ncols), dtype=object)
    for i, row in enumerate(M.rows):
        for j, x in enumerate(row):
            s = 0
            for (e,), c in x.terms.items():
                s += int(c) * pow(t0 if e >= 0 else inv, abs(e), p)
            out[i, j] = s % p
    return out


def _rank_mod_p(A: np.ndarray, p: int) -> int:
    A = np.array(A, dtype=object) % p
    m, n = A.shape
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i, c] % p), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        for i in range(m):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == m:
            break
    return r


@dataclass
class DetectionResult:
    identity: bool
    method: str
    detail: str = ""

    def __str__(self):
        head = "identity" if self.identity else "NOT identity"
        return f"{head} ({self.method}{': ' + self.detail if self.detail else ''})"


def detect(handle: RepresentationHandle, word, exact: bool | None = None, t0: int = 2, p: int = 2_147_483_647) -> DetectionResult:
    """Decide whether the reduced representation on H_k sends ``word`` to the identity.

    Exact mode evaluates the reduced matrices.  Otherwise the chain-level matrix
    is evaluated at t = t0 modulo p: if [d_k | M(word) - I] has rank above
    rank d_k over the fraction field, the word acts nontrivially on the cycles
    (ranks only drop under specialization).  A rank equal to rank d_k is not a
    proof of triviality, so exact mode is used as a fallback.
    """
    if isinstance(word, str):
        word = handle.action.parse(word)
    ring = handle.ring
    if exact is None:
        exact = handle.size <= 12
    if handle.basis == "homology" and exact:
        M = handle.evaluate(word)
        return DetectionResult(M.is_identity(), "exact", f"{M.nrows}x{M.nrows} over {ring.name}")
    if handle.basis != "chains":
        raise ValueError("modular detection needs the chain-level handle")
    if not isinstance(ring, LaurentRing) or ring.nvars != 1:
        raise ValueError("modular detection needs univariate coefficients")
    G = handle.action.structure
    k = handle.degree
    D = specialize_matrix(boundary(G, k), handle.tau)
    rk = rank(D)
    mats = {key: _eval_matrix(m, t0, p) for key, m in handle.matrices.items()}
    invs = {key: _eval_matrix(m, t0, p) for key, m in handle.inverses.items()}
    n = handle.size
    W = np.identity(n, dtype=object)
    if isinstance(word, PureBraidWord) and handle.action.kind == "braid":
        word = word.as_braid()
    for key, s in word.letters:
        W = (W.dot(mats[key] if s > 0 else invs[key])) % p
    Dp = _eval_matrix(D, t0, p)
    stacked = np.concatenate([Dp, (W - np.identity(n, dtype=object)) % p], axis=1)
    r_both = _rank_mod_p(stacked, p)
    if r_both > rk:
        return DetectionResult(False, "modular certificate", f"rank [d_{k} | M - I] = {r_both} > rank d_{k} = {rk} at t = {t0} mod {p}")
    reduced = homological_rep(handle)
    M = reduced.evaluate(word)
    return DetectionResult(M.is_identity(), "exact", f"{M.nrows}x{M.nrows} over {reduced.ring.name}")
