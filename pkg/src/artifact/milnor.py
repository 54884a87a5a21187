"""Milnor fibers of braid arrangements, monodromy eigenspaces, and the vanishing machinery.

The Milnor fiber of the braid arrangement A_l is the cyclic C(l,2)-fold cover
of the projectivized complement, whose fundamental group is P_{l,2}.  Its
integral homology is the homology of P_{l,2} with coefficients in
Z[t]/(t^n - 1), every generator acting by t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, factorial

from .builders import b3, b4_prime, nielsen_inverse, pb_generator, pnl, pure_braid
from .freegroup import FreeAutomorphism, FreeWord, fox_terms
from .homology import HomologyResult, homology
from .resolution import ChainComplex, specialized_complex, trivial_complex
from .rings import (
    CyclicAlgebra,
    Cyclotomic,
    LaurentInt,
    LaurentRat,
    Rationals,
    RingMatrix,
    Specialization,
    character,
    det,
    trivial_character,
)
from .semidirect import GroupRingElement, IteratedProduct

MAX_ELL = 5


def _guard(ell: int, force: bool, limit: int = MAX_ELL):
    if ell < 3:
        raise ValueError("need l >= 3")
    if ell > limit and not force:
        raise ValueError(f"l = {ell} exceeds the desk-scale limit {limit}; pass force=True to run anyway")


def divisors(n: int) -> list:
    return [d for d in range(1, n + 1) if n % d == 0]


def mobius(n: int) -> int:
    out, k, p = 1, n, 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            out = -out
        p += 1
    return -out if k > 1 else out


# -- products of (1 - t^a) ---------------------------------------------------------------


@dataclass
class PowerProduct:
    """prod (1 - t^a)^{e_a}; negative exponents allowed (rational functions)."""

    exps: dict = field(default_factory=dict)

    def __post_init__(self):
        self.exps = {a: e for a, e in sorted(self.exps.items()) if e}

    def __mul__(self, other: "PowerProduct") -> "PowerProduct":
        out = dict(self.exps)
        for a, e in other.exps.items():
            out[a] = out.get(a, 0) + e
        return PowerProduct(out)

    def __pow__(self, k: int) -> "PowerProduct":
        return PowerProduct({a: e * k for a, e in self.exps.items()})

    def __eq__(self, other):
        return isinstance(other, PowerProduct) and self.exps == other.exps

    def degree(self) -> int:
        return sum(a * e for a, e in self.exps.items())

    def to_poly(self):
        """Expanded polynomial (only for nonnegative exponents)."""
        if any(e < 0 for e in self.exps.values()):
            raise ValueError("not a polynomial")
        R = LaurentInt(1)
        t = R.var()
        out = R.one()
        for a, e in self.exps.items():
            out = out * (1 - t**a) ** e
        return out

    def cyclotomic_exponents(self) -> dict:
        """Multiplicity of each primitive-root block: e_d = sum over a divisible by d."""
        out: dict = {}
        for a, e in self.exps.items():
            for d in divisors(a):
                out[d] = out.get(d, 0) + e
        return {d: e for d, e in sorted(out.items()) if e}

    @classmethod
    def from_cyclotomic(cls, n: int, e: dict) -> "PowerProduct":
        """Invert ``cyclotomic_exponents`` over the divisors of n."""
        out = {}
        for a in divisors(n):
            c = 0
            for b in divisors(n):
                if b % a == 0:
                    c += mobius(b // a) * e.get(b, 0)
            out[a] = c
        return cls(out)

    def __str__(self):
        if not self.exps:
            return "1"
        parts = []
        for a, e in self.exps.items():
            base = "(1-t)" if a == 1 else f"(1-t^{a})"
            parts.append(base if e == 1 else f"{base}^{e}")
        return "".join(parts)

    def to_json(self):
        return {str(a): e for a, e in self.exps.items()}


# -- Milnor fiber homology ---------------------------------------------------------------


def projective_group(ell: int):
    """P_{l,2}: fundamental group of the projectivized braid arrangement complement."""
    return pnl(ell, 2)


def cover_order(ell: int) -> int:
    return comb(ell, 2)


def all_to(structure, ring, value) -> Specialization:
    return character(structure, ring, {g: value for g in structure.generators()})


def milnor_complex(ell: int, force: bool = False) -> ChainComplex:
    _guard(ell, force)
    G = projective_group(ell)
    A = CyclicAlgebra(cover_order(ell))
    return specialized_complex(G, all_to(G, A, A.gen()))


def milnor_integral_homology(ell: int, force: bool = False) -> HomologyResult:
    """Integral homology of the Milnor fiber F(A_l) through the finite cyclic cover."""
    return homology(milnor_complex(ell, force))


def eigenspace_dims(ell: int, d: int, force: bool = False) -> list:
    """dim H_i(P_{l,2}; V) with every generator acting by a primitive d-th root of unity."""
    _guard(ell, force)
    n = cover_order(ell)
    if n % d:
        raise ValueError(f"{d} does not divide {n}")
    G = projective_group(ell)
    if d == 1:
        nu = trivial_character(G, Rationals)
    else:
        K = Cyclotomic(d)
        nu = all_to(G, K, K.gen())
    return list(homology(specialized_complex(G, nu)).betti)


def monodromy_char_polys(ell: int, force: bool = False) -> list:
    """p_i(t) = det(I - t h_*) on H_i(F), as products of (1 - t^a)."""
    n = cover_order(ell)
    dims = {d: eigenspace_dims(ell, d, force) for d in divisors(n)}
    out = []
    for i in range(ell - 1):
        out.append(PowerProduct.from_cyclotomic(n, {d: dims[d][i] for d in dims}))
    return out


def zeta(ell: int, polys: list | None = None, force: bool = False) -> PowerProduct:
    """Alternating product p_0^{-1} p_1 p_2^{-1} ...; checked against (1 - t^n)^{(-1)^{l+1}(l-2)!}."""
    polys = polys if polys is not None else monodromy_char_polys(ell, force)
    z = PowerProduct()
    for i, p in enumerate(polys):
        z = z * (p ** (1 if i % 2 else -1))
    expected = zeta_closed_form(ell)
    if z != expected:
        raise ArithmeticError(f"zeta function {z} differs from the closed form {expected}")
    return z


def zeta_closed_form(ell: int) -> PowerProduct:
    return PowerProduct({cover_order(ell): (-1) ** (ell + 1) * factorial(ell - 2)})


@dataclass
class MilnorReport:
    ell: int
    n: int
    betti: tuple
    torsion: list
    char_polys: list | None = None
    zeta: PowerProduct | None = None
    euler: int = 0

    def to_json(self):
        out = {
            "l": self.ell,
            "n": self.n,
            "betti": list(self.betti),
            "torsion": self.torsion,
            "euler_characteristic": self.euler,
        }
        if self.char_polys is not None:
            out["char_polys"] = [str(p) for p in self.char_polys]
        if self.zeta is not None:
            out["zeta"] = str(self.zeta)
        return out

    def table(self) -> str:
        lines = [f"A_{self.ell}  (n = {self.n})"]
        lines.append("  " + "  ".join(f"b_{i}(F) = {b}" for i, b in enumerate(self.betti)))
        if any(self.torsion):
            lines.append(f"  torsion: {self.torsion}")
        lines.append(f"  chi(F) = {self.euler}")
        if self.char_polys is not None:
            for i, p in enumerate(self.char_polys):
                lines.append(f"  p_{i}(t) = {p}")
        if self.zeta is not None:
            lines.append(f"  zeta(t) = {self.zeta}")
        return "\n".join(lines)


def milnor_report(ell: int, eigenspaces: bool = True, with_zeta: bool = True, force: bool = False) -> MilnorReport:
    h = milnor_integral_homology(ell, force)
    betti = h.betti
    tors = [list(d.torsion) for d in h.degrees]
    chi = sum((-1) ** i * b for i, b in enumerate(betti))
    if chi != (-1) ** ell * factorial(ell) // 2:
        raise ArithmeticError(f"Euler characteristic {chi} is wrong")
    polys = z = None
    if eigenspaces or with_zeta:
        polys = monodromy_char_polys(ell, force)
        if [p.degree() for p in polys] != list(betti):
            raise ArithmeticError("eigenspace and integral computations disagree")
        if with_zeta:
            z = zeta(ell, polys)
    return MilnorReport(ell, cover_order(ell), betti, tors, polys if eigenspaces else None, z, chi)


# -- quasi-genericity and vanishing ------------------------------------------------------


def subset_braid(J) -> list:
    """Pairs (j_a, j_b) of A_J = (A_{j1,j2})(A_{j1,j3} A_{j2,j3}) ... in product order."""
    J = tuple(J)
    if len(J) < 2 or any(b <= a for a, b in zip(J, J[1:])):
        raise ValueError(f"bad index set {J}")
    return [(J[a], J[b]) for b in range(1, len(J)) for a in range(b)]


def _offset(structure: IteratedProduct) -> int:
    # pnl(n, l) and pure_braid(l) = pnl(l, 1): factor q holds A_{i, l+q}
    return structure.exponents[0]


def subset_element(structure: IteratedProduct, J) -> tuple:
    """Normal form of A_J inside a structure built by pnl or pure_braid."""
    ell = _offset(structure)
    raw = []
    for r, s in subset_braid(J):
        i, q = pb_generator(r, s, ell)
        raw.append((i, q, 1))
    return structure.normalize_raw(raw)


def subsets_in(n: int, ell: int, q: int):
    """Index sets J with 2 <= |J| <= q + 2 and A_J in P_{n,l} (that is, j_2 > l)."""
    for p in range(2, min(q + 2, n) + 1):
        for J in combinations(range(1, n + 1), p):
            if J[1] > ell:
                yield J


@dataclass
class QuasiGenericResult:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def quasi_generic(nu: Specialization, q: int) -> QuasiGenericResult:
    """Every nu(A_J) with 2 <= |J| <= q+2 has no eigenvalue 1 (tested as det(v_J - I) != 0)."""
    G = nu.structure
    ell = _offset(G)
    n = ell + G.ell
    ident = RingMatrix.identity(nu.ring, nu.m)
    for J in subsets_in(n, ell, q):
        v = nu.comps_matrix(subset_element(G, J))
        if nu.m == 1:
            bad = nu.ring.is_zero(v.rows[0][0] - nu.ring.one())
        else:
            bad = nu.ring.is_zero(det(v - ident))
        if bad:
            return QuasiGenericResult(False, J)
    return QuasiGenericResult(True)


def primes(k: int) -> list:
    out, c = [], 2
    while len(out) < k:
        if all(c % p for p in out):
            out.append(c)
        c += 1
    return out


def generic_character(structure: IteratedProduct, values=None) -> Specialization:
    """Rank-one rational character; defaults to distinct primes on the generators."""
    gens = structure.generators()
    vals = list(values) if values is not None else primes(len(gens))
    if len(vals) != len(gens):
        raise ValueError(f"need {len(gens)} values")
    return character(structure, Rationals, dict(zip(gens, vals)))


@dataclass
class VanishingReport:
    n: int
    ell: int
    q: int
    quasi_generic: bool
    witness: tuple | None
    dims: list
    vanishing_range: int
    top_expected: int | None
    ok: bool

    def to_json(self):
        return {
            "n": self.n,
            "l": self.ell,
            "q": self.q,
            "quasi_generic": self.quasi_generic,
            "witness": list(self.witness) if self.witness else None,
            "dims": self.dims,
            "vanishing_through": self.vanishing_range,
            "top_rank_expected": self.top_expected,
            "ok": self.ok,
        }

    def __str__(self):
        lines = [f"P_({self.n},{self.ell}), q = {self.q}"]
        if not self.quasi_generic:
            lines.append(f"  not quasi-generic: A_J with J = {self.witness} has eigenvalue 1")
        lines.append("  " + "  ".join(f"dim H_{i} = {d}" for i, d in enumerate(self.dims)))
        lines.append(f"  vanishing expected for i <= {self.vanishing_range}")
        if self.top_expected is not None:
            lines.append(f"  top rank expected {self.top_expected}")
        lines.append("  ok" if self.ok else "  FAILED")
        return "\n".join(lines)


def vanishing_verify(n: int, ell: int, q: int, nu: Specialization | None = None) -> VanishingReport:
    """Check the vanishing range and the top rank for a quasi-generic local system on P_{n,l}."""
    G = pnl(n, ell)
    if nu is None:
        nu = generic_character(G)
    elif nu.structure is not G:
        raise ValueError("specialization belongs to another structure")
    qg = quasi_generic(nu, q)
    dims = list(homology(specialized_complex(G, nu)).betti)
    through = min(q, n - ell - 1)
    ok = bool(qg) and all(d == 0 for d in dims[: through + 1])
    top = None
    if qg and q >= n - ell - 1:
        if ell >= 2:
            top = nu.m * factorial(n - 2) // factorial(ell - 2)
        else:
            top = 0
        ok = ok and dims[-1] == top
    return VanishingReport(n, ell, q, bool(qg), qg.witness, dims, through, top, ok)


# -- triangular form of rho_{l-1}(A_J) ---------------------------------------------------


def y_basis(ell: int, J) -> list:
    """The generating set y_1..y_{l-1} of F_{l-1} = <A_{1,l}, ..., A_{l-1,l}> adapted to J."""
    J = tuple(J)
    out = []
    for i in range(1, ell):
        if i <= J[0] or i > J[-1]:
            out.append((i,))
            continue
        k = max(a for a in range(len(J)) if J[a] <= i)
        head = tuple(J[: k + 1])
        if J[k] == i:
            out.append(head)
        else:
            out.append(head + (i,) + tuple(-c for c in reversed(head)))
    return out


def _top_element(G: IteratedProduct, low: tuple, code: tuple) -> tuple:
    comps = [()] * G.ell
    comps[G.ell - 1] = code
    return G.mul(low, tuple(comps))


def rho_in_basis(ell: int, J, basis: list | None = None) -> tuple:
    """rho_{l-1}(A_J) on F_{l-1} written in the generating set ``basis`` (default: the y-basis).

    Returns (structure, A_J normal form, matrix as list of lists of GroupRingElement).
    """
    G = pure_braid(ell)
    J = tuple(J)
    if J[-1] > ell - 1:
        raise ValueError("need j_p <= l - 1")
    basis = basis if basis is not None else y_basis(ell, J)
    d = ell - 1
    beta = FreeAutomorphism(d, basis, nielsen_inverse(d, basis))
    aj = subset_element(G, J)
    alpha = G.act_comps(aj, G.ell)
    binv = beta.inverse()
    U = []
    for i in range(1, d + 1):
        w = binv(alpha(beta(FreeWord.generator(d, i)))).code
        row = []
        for j in range(1, d + 1):
            terms: dict = {}
            for u, c in fox_terms(w, j).items():
                g = _top_element(G, aj, beta(FreeWord(d, u)).code)
                terms[g] = terms.get(g, 0) + c
            row.append(GroupRingElement(G, terms))
        U.append(row)
    return G, aj, U


def triangular_form_check(ell: int, J, basis: list | None = None) -> bool:
    """rho_{l-1}(A_J) in the y-basis is upper triangular with the expected entries."""
    J = tuple(J)
    G, aj, U = rho_in_basis(ell, J, basis)
    d = ell - 1
    y = basis if basis is not None else y_basis(ell, J)
    AJ = GroupRingElement(G, {aj: 1})
    top = J[-1]
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            x = U[i - 1][j - 1]
            if i in J[:-1] and j == i:
                want = GroupRingElement(G, {_top_element(G, aj, y[top - 1]): 1})
            elif i in J[:-1] and j == top:
                yk = GroupRingElement(G, {_top_element(G, G.identity_comps(), y[i - 1]): 1})
                want = AJ - yk * AJ
            elif i == j:
                want = AJ
            else:
                want = GroupRingElement(G, {})
            if not x == want:
                return False
    return True


# -- discriminant arrangements -----------------------------------------------------------


def discriminant_d4() -> HomologyResult:
    """Integral homology of B_4', the fundamental group of the Milnor fiber of D_4."""
    h = homology(trivial_complex(b4_prime()))
    chi = sum((-1) ** i * b for i, b in enumerate(h.betti))
    if chi != 1:
        raise ArithmeticError(f"Euler characteristic {chi}, expected 1")
    return h


def discriminant_d3_milnor_number() -> int:
    """b_1 of the Milnor fiber of D_3: homology of B_3 with Q[t^±] coefficients via abelianization.

    The Milnor fibration induces abelianization on B_3 = F_2 ⋊ F_1, sending
    x_{1,1} = sigma_1 to t and the fiber generators to 1.
    """
    G = b3()
    R = LaurentRat(1)
    nu = character(G, R, {(1, 1): R.var()})
    h = homology(specialized_complex(G, nu))
    if h[1].rank:
        raise ArithmeticError("H_1 of the infinite cyclic cover is not torsion")
    return sum(R.norm(t) for t in h[1].torsion)
