"""Smith normal forms, homology of free chain complexes, and the Poincaré/LCS combinatorics."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .kernels import chain_normalize, snf_diagonal
from .rings import (
    CyclicAlgebra,
    Integers,
    Laurent,
    LaurentInt,
    LaurentRat,
    LaurentRing,
    Ring,
    RingMatrix,
    _poly_divmod,
    _poly_mul,
    bareiss_rank,
)
from .resolution import ChainComplex


class UnsupportedRing(ArithmeticError):
    """Raised when a Smith form is requested over a ring that is not Euclidean here."""


class NotFree(ArithmeticError):
    """Raised when a homology module has torsion, so no basis exists."""


# -- Euclidean structures ------------------------------------------------------------------


class _IntOps:
    ring = Integers

    @staticmethod
    def norm(a):
        return abs(a)

    @staticmethod
    def divmod(a, b):
        q, r = divmod(a, b)
        if 2 * abs(r) > abs(b):
            # balanced remainder keeps entries small
            q, r = (q + 1, r - b) if (r > 0) == (b > 0) else (q - 1, r + b)
        return q, r

    @staticmethod
    def normalize(a):
        return (a, 1) if a >= 0 else (-a, -1)

    @staticmethod
    def is_unit(a):
        return a in (1, -1)


class _LaurentOps:
    def __init__(self, ring: LaurentRing):
        self.ring = ring

    def norm(self, a):
        return self.ring.norm(a)

    def divmod(self, a, b):
        return self.ring.euclid_divmod(a, b)

    def normalize(self, a):
        return self.ring.normalize_unit(a)

    def is_unit(self, a):
        return len(a.terms) == 1


class _FieldOps:
    def __init__(self, ring: Ring):
        self.ring = ring

    def norm(self, a):
        return 0

    def divmod(self, a, b):
        return a * self.ring.inv(b), self.ring.zero()

    def normalize(self, a):
        u = self.ring.inv(a)
        return self.ring.one(), u

    def is_unit(self, a):
        return True


def _ops_for(ring: Ring):
    if ring is Integers:
        return _IntOps()
    if isinstance(ring, LaurentRing):
        if ring.nvars != 1:
            raise UnsupportedRing("Smith form over a multivariate Laurent ring; use fraction-field ranks")
        if not ring.rational:
            raise UnsupportedRing("Smith form over Z[t^±] is not supported; coerce to Q[t^±]")
        return _LaurentOps(ring)
    if ring.is_field:
        return _FieldOps(ring)
    raise UnsupportedRing(f"Smith form over {ring.name} is not supported")


# -- Smith normal form -------------------------------------------------------------------------


@dataclass
class SmithResult:
    """U M V = D with D diagonal; ``divisors`` are the nonzero diagonal entries in order."""

    ring: Ring
    divisors: list
    U: RingMatrix | None = None
    V: RingMatrix | None = None
    U_inv: RingMatrix | None = None
    V_inv: RingMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def nonunits(self) -> list:
        ring = self.ring
        if ring is Integers:
            return [d for d in self.divisors if d != 1]
        if isinstance(ring, LaurentRing):
            return [d for d in self.divisors if len(d.terms) != 1]
        return []


def _as_rational_laurent(m: RingMatrix) -> RingMatrix:
    ring = m.ring
    if isinstance(ring, LaurentRing) and not ring.rational and ring.nvars == 1:
        target = LaurentRat(1, ring.names)
        return m.map(target.coerce, target)
    return m


def smith(M: RingMatrix, transforms: bool = False) -> SmithResult:
    """Smith normal form over Z, Q[t^±], or a field.

    Integer Laurent input is read over Q[t^±].  Without ``transforms`` the
    integer case runs on the fast kernel.
    """
    M = _as_rational_laurent(M)
    ring = M.ring
    if ring is Integers and not transforms:
        diag = chain_normalize(snf_diagonal([list(r) for r in M.rows]))
        return SmithResult(ring, diag)
    ops = _ops_for(ring)
    if isinstance(ring, LaurentRing) and not transforms:
        return _laurent_smith_diagonal(M, ops)
    return _euclid_smith(M, ops, transforms)


# Univariate Laurent entries for the sparse routine: (v, p) means t^v p(t) with p[0] != 0.


def _lp(x) -> tuple:
    (m,) = x.min_exponents()
    deg = max(k[0] for k in x.terms) - m
    p = [Fraction(0)] * (deg + 1)
    for (e,), c in x.terms.items():
        p[e - m] = Fraction(c)
    return m, p


def _lp_norm(p: list) -> list:
    k = 0
    while k < len(p) and not p[k]:
        k += 1
    while p and not p[-1]:
        p.pop()
    return p[k:], k


def _lp_sub_mul(a, q, b):
    """a - q b for (v, p) entries; returns None for zero."""
    (va, pa), (vq, pq), (vb, pb) = a, q, b
    prod = [Fraction(0)] * (len(pq) + len(pb) - 1)
    for i, x in enumerate(pq):
        if x:
            for j, y in enumerate(pb):
                prod[i + j] += x * y
    vp = vq + vb
    lo = min(va, vp)
    out = [Fraction(0)] * (max(va + len(pa), vp + len(prod)) - lo)
    for i, x in enumerate(pa):
        out[va - lo + i] += x
    for i, x in enumerate(prod):
        out[vp - lo + i] -= x
    out, k = _lp_norm(out)
    return (lo + k, out) if out else None


def _lp_divmod(a, b):
    """Quotient and remainder with span(r) < span(b); remainder None when exact."""
    (va, pa), (vb, pb) = a, b
    r = list(pa)
    lead = pb[-1]
    q = [Fraction(0)] * max(len(pa) - len(pb) + 1, 1)
    while len(r) >= len(pb):
        c = r[-1] / lead
        s = len(r) - len(pb)
        q[s] = c
        for i, y in enumerate(pb):
            r[s + i] -= c * y
        r.pop()
        while r and not r[-1]:
            r.pop()
    qn, qk = _lp_norm(q)
    rn, rk = _lp_norm(r)
    quo = (va - vb + qk, qn) if qn else None
    return quo, ((va + rk, rn) if rn else None)


def _poly_gcd(a: list, b: list) -> list:
    while b:
        r = list(a)
        while len(r) >= len(b):
            c = r[-1] / b[-1]
            s = len(r) - len(b)
            for i, y in enumerate(b):
                r[s + i] -= c * y
            r.pop()
            while r and not r[-1]:
                r.pop()
        a, b = b, r
    return [c / a[-1] for c in a]


def _chain_polys(divs: list) -> list:
    """Turn monic polynomials with nonzero constant term into a divisibility chain."""
    d = sorted(divs, key=len)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = _poly_gcd(d[i], d[j])
            if len(g) < len(d[i]):
                lcm = _poly_divmod(_poly_mul(d[i], d[j]), g)[0]
                d[i], d[j] = g, lcm
        d = d[: i + 1] + sorted(d[i + 1 :], key=len)
    return d


def _laurent_smith_diagonal(M: RingMatrix, ops) -> SmithResult:
    """Divisors over Q[t^±] by sparse Euclidean elimination with Markowitz pivots."""
    ring = M.ring
    rows: dict = {}
    cols: dict = {}
    for i, r in enumerate(M.rows):
        row = {j: _lp(x) for j, x in enumerate(r) if x.terms}
        if row:
            rows[i] = row
            for j in row:
                cols.setdefault(j, set()).add(i)

    def set_entry(i, j, v):
        if v is None:
            if rows[i].pop(j, None) is not None:
                cols[j].discard(i)
        else:
            if j not in rows[i]:
                cols[j].add(i)
            rows[i][j] = v

    divs = []
    while rows:
        best = None
        for i, row in rows.items():
            for j, (_, p) in row.items():
                key = (len(p), (len(row) - 1) * (len(cols[j]) - 1))
                if best is None or key < best[0]:
                    best = (key, i, j)
        _, pi, pj = best
        while True:
            moved = False
            piv = rows[pi][pj]
            for r in list(cols[pj]):
                if r == pi:
                    continue
                q, rem = _lp_divmod(rows[r][pj], piv)
                for c, y in list(rows[pi].items()):
                    cur = rows[r].get(c)
                    if c == pj:
                        set_entry(r, c, rem)
                    elif q is not None:
                        set_entry(r, c, _lp_sub_mul(cur or (0, []), q, y))
                if rem is not None:
                    pi, moved = r, True
                    break
            if moved:
                continue
            for c in list(rows[pi]):
                if c == pj:
                    continue
                q, rem = _lp_divmod(rows[pi][c], piv)
                set_entry(pi, c, rem)
                if rem is not None:
                    pj, moved = c, True
                    break
            if not moved:
                break
        (_, p) = rows[pi][pj]
        divs.append([c / p[-1] for c in p])
        set_entry(pi, pj, None)
        del rows[pi]
        for r in [r for r, row in rows.items() if not row]:
            del rows[r]
    out = [ring._from_poly(p) for p in _chain_polys(divs)]
    return SmithResult(ring, out)


def _euclid_smith(M: RingMatrix, ops, transforms: bool) -> SmithResult:
    ring = M.ring
    zero, one = ring.zero(), ring.one()
    is_zero = ring.is_zero
    m, n = M.nrows, M.ncols
    A = [list(r) for r in M.rows]

    def ident(k):
        return [[one if i == j else zero for j in range(k)] for i in range(k)]

    U = ident(m) if transforms else None
    Ui = ident(m) if transforms else None
    V = ident(n) if transforms else None
    Vi = ident(n) if transforms else None

    def row_add(i, t, c):
        # row_i += c * row_t
        A[i] = [x + c * y for x, y in zip(A[i], A[t])]
        if transforms:
            U[i] = [x + c * y for x, y in zip(U[i], U[t])]
            for r in Ui:
                r[t] = r[t] - c * r[i]

    def row_swap(i, t):
        A[i], A[t] = A[t], A[i]
        if transforms:
            U[i], U[t] = U[t], U[i]
            for r in Ui:
                r[i], r[t] = r[t], r[i]

    def row_scale(i, u, uinv):
        A[i] = [u * x for x in A[i]]
        if transforms:
            U[i] = [u * x for x in U[i]]
            for r in Ui:
                r[i] = r[i] * uinv

    def col_add(j, t, c):
        # col_j += c * col_t
        for r in A:
            r[j] = r[j] + c * r[t]
        if transforms:
            for r in V:
                r[j] = r[j] + c * r[t]
            Vi[t] = [x - c * y for x, y in zip(Vi[t], Vi[j])]

    def col_swap(j, t):
        for r in A:
            r[j], r[t] = r[t], r[j]
        if transforms:
            for r in V:
                r[j], r[t] = r[t], r[j]
            Vi[j], Vi[t] = Vi[t], Vi[j]

    t = 0
    diag = []
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if not is_zero(A[i][j]):
                    nv = ops.norm(A[i][j])
                    if best is None or nv < best[0]:
                        best = (nv, i, j)
                        if nv == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, i0, j0 = best
        if i0 != t:
            row_swap(i0, t)
        if j0 != t:
            col_swap(j0, t)
        while True:
            dirty = False
            for i in range(t + 1, m):
                if not is_zero(A[i][t]):
                    q, r = ops.divmod(A[i][t], A[t][t])
                    row_add(i, t, -q)
                    if not is_zero(r):
                        row_swap(i, t)
                        dirty = True
            for j in range(t + 1, n):
                if not is_zero(A[t][j]):
                    q, r = ops.divmod(A[t][j], A[t][t])
                    col_add(j, t, -q)
                    if not is_zero(r):
                        col_swap(j, t)
                        dirty = True
            if dirty:
                continue
            piv = A[t][t]
            if not ops.is_unit(piv):
                for i in range(t + 1, m):
                    if any(not is_zero(ops.divmod(x, piv)[1]) for x in A[i][t + 1 :]):
                        row_add(t, i, one)
                        dirty = True
                        break
            if not dirty:
                break
        canon, u = ops.normalize(A[t][t])
        if u != one:
            row_scale(t, u, ring.inv(u))
        diag.append(A[t][t])
        t += 1

    def wrap(rows, k):
        return RingMatrix._raw(ring, rows, k) if rows is not None else None

    return SmithResult(ring, diag, wrap(U, m), wrap(V, n), wrap(Ui, m), wrap(Vi, n))


def diagonal_matrix(res: SmithResult, nrows: int, ncols: int) -> RingMatrix:
    D = RingMatrix.zeros(res.ring, nrows, ncols)
    for i, d in enumerate(res.divisors):
        D.rows[i][i] = d
    return D


# -- ranks over the various rings ----------------------------------------------------------------


def realize(m: RingMatrix) -> RingMatrix:
    """Integer (or rational) matrix of a CyclicAlgebra/Cyclotomic matrix acting on coordinate rows."""
    ring = m.ring
    deg = ring.deg
    base = Integers if isinstance(ring, CyclicAlgebra) else None
    rows = []
    for r in m.rows:
        blocks = [ring.regular_matrix(a) for a in r]
        for a in range(deg):
            row = []
            for b in blocks:
                row.extend(b[a])
            rows.append(row)
    if base is None:
        from .rings import Rationals

        base = Rationals
    return RingMatrix._raw(base, rows, m.ncols * deg)


def matrix_rank(m: RingMatrix) -> int:
    """Rank over the fraction field (over Z for CyclicAlgebra, counted over Z)."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    ring = m.ring
    if ring is Integers:
        return len(snf_diagonal([list(r) for r in m.rows]))
    if isinstance(ring, CyclicAlgebra):
        return matrix_rank(realize(m))
    return bareiss_rank(m)


# -- homology ----------------------------------------------------------------------------------------


@dataclass
class DegreeHomology:
    degree: int
    rank: int
    torsion: list = field(default_factory=list)
    torsion_known: bool = True

    def to_json(self, ring=None):
        tors = None
        if self.torsion_known:
            tors = [t if isinstance(t, int) else ring.fmt(t) if ring is not None else str(t) for t in self.torsion]
        return {"degree": self.degree, "rank": self.rank, "torsion": tors}


@dataclass
class HomologyResult:
    ring: Ring
    degrees: list

    @property
    def betti(self) -> tuple:
        return tuple(d.rank for d in self.degrees)

    @property
    def torsion_free(self) -> bool:
        return all(d.torsion_known and not d.torsion for d in self.degrees)

    def __getitem__(self, k) -> DegreeHomology:
        return self.degrees[k]

    def to_json(self):
        return [d.to_json(self.ring) for d in self.degrees]

    def __str__(self):
        lines = []
        for d in self.degrees:
            if isinstance(self.ring, CyclicAlgebra) or self.ring is Integers:
                base = "Z"
            else:
                base = {"Rationals": "Q"}.get(self.ring.name, self.ring.name)
                if isinstance(self.ring, LaurentRing):
                    base = ("Q" if self.ring.rational else "Z") + "[" + ",".join(f"{v}^±1" for v in self.ring.names) + "]"
            parts = [f"{base}^{d.rank}"] if d.rank else []
            if d.torsion and d.torsion_known:
                fmt = getattr(self.ring, "fmt", str) if not isinstance(d.torsion[0], int) else str
                parts += [f"{base}/({fmt(t)})" for t in d.torsion]
            s = f"H_{d.degree} = " + (" + ".join(parts) or "0")
            if not d.torsion_known:
                s += " (torsion not computed)"
            lines.append(s)
        return "\n".join(lines)


def homology(complex: ChainComplex) -> HomologyResult:
    """Homology of a free complex: ranks, plus torsion wherever a Smith form exists."""
    ring = complex.ring
    top = complex.top
    bds = dict(complex.boundaries)
    if isinstance(ring, CyclicAlgebra):
        # finite cover: read the complex over Z
        bds = {k: realize(b) for k, b in bds.items()}
        ring_z = Integers
        ranks = [r * ring.deg for r in complex.ranks]
    else:
        ring_z = ring
        ranks = list(complex.ranks)
    if isinstance(ring_z, LaurentRing) and ring_z.nvars == 1:
        bds = {k: _as_rational_laurent(b) for k, b in bds.items()}
    pid = ring_z is Integers or (isinstance(ring_z, LaurentRing) and ring_z.nvars == 1) or ring_z.is_field
    rk = {}
    tors = {}
    for k, b in bds.items():
        if pid and not ring_z.is_field:
            res = smith(b)
            rk[k] = res.rank
            tors[k] = res.nonunits()
        else:
            rk[k] = matrix_rank(b)
            tors[k] = [] if ring_z.is_field else None
    degrees = []
    for k in range(top + 1):
        r = ranks[k] - rk.get(k, 0) - rk.get(k + 1, 0)
        t = tors.get(k + 1, []) if k + 1 <= top else []
        degrees.append(DegreeHomology(k, r, list(t) if t is not None else [], t is not None))
    return HomologyResult(ring_z if ring_z is Integers else ring, degrees)


@dataclass
class HomologyBasis:
    """Basis of a free H_k: cycle representatives plus the coordinate map on cycles."""

    ring: Ring
    degree: int
    basis: RingMatrix
    # coordinates(x) = (x * _proj)[_skip:]
    _proj: RingMatrix
    _skip: int

    @property
    def rank(self) -> int:
        return self.basis.nrows

    def coordinates(self, x: RingMatrix) -> RingMatrix:
        """Coordinates of cycles (rows of x) in the basis, modulo boundaries."""
        y = x @ self._proj
        return y.submatrix(range(y.nrows), range(self._skip, y.ncols))


def homology_basis(complex: ChainComplex, k: int) -> HomologyBasis:
    """Rows of cycles forming a basis of H_k over Q[t^±] or a field; NotFree if torsion is present."""
    ring = complex.ring
    if isinstance(ring, LaurentRing):
        if ring.nvars != 1:
            raise NotFree("homology over a multivariate Laurent ring need not be free; use a submodule")
        ring = LaurentRat(1, ring.names)
    ops = _ops_for(ring)
    n_k = complex.ranks[k]
    coerce = ring.coerce
    if k >= 1:
        dk = complex.boundaries[k].map(coerce, ring)
        res = _euclid_smith(dk, ops, True)
        r = res.rank
        Z = res.U.submatrix(range(r, n_k), range(n_k))
        to_z = res.U_inv.submatrix(range(n_k), range(r, n_k))
    else:
        Z = RingMatrix.identity(ring, n_k)
        to_z = RingMatrix.identity(ring, n_k)
    z = Z.nrows
    if k + 1 <= complex.top and complex.ranks[k + 1]:
        B = complex.boundaries[k + 1].map(coerce, ring) @ to_z
        res2 = _euclid_smith(B, ops, True)
        if res2.nonunits():
            raise NotFree(f"H_{k} has torsion {[ring.fmt(d) for d in res2.nonunits()]}")
        s = res2.rank
        Vinv, V = res2.V_inv, res2.V
    else:
        s = 0
        Vinv = V = RingMatrix.identity(ring, z)
    reps = Vinv.submatrix(range(s, z), range(z)) @ Z if z else RingMatrix.zeros(ring, 0, n_k)
    return HomologyBasis(ring, k, reps, to_z @ V, s)


# -- Poincaré polynomial and lower central series ------------------------------------------------------


def is_IA(structure) -> bool:
    from .resolution import is_IA as _is_ia

    return _is_ia(structure)


def poincare_poly(exponents: Sequence[int], structure=None) -> Laurent:
    """prod (1 + d_q t); with a structure given, first require the IA gate."""
    if structure is not None and not is_IA(structure):
        raise ValueError("structure is not an IA-product: boundaries with trivial coefficients do not vanish")
    R = LaurentInt(1)
    t = R.var()
    out = R.one()
    for d in exponents:
        out = out * (1 + d * t)
    return out


def _series_mul(a: list, b: list, K: int) -> list:
    out = [0] * (K + 1)
    for i, x in enumerate(a[: K + 1]):
        if x:
            for j, y in enumerate(b[: K + 1 - i]):
                out[i + j] += x * y
    return out


def lcs_ranks(exponents: Sequence[int], K: int) -> tuple:
    """phi_1..phi_K with prod (1 - t^k)^{phi_k} = prod (1 - d_q t) modulo t^{K+1}."""
    if K < 1:
        raise ValueError("K must be positive")
    series = [1] + [0] * K
    for d in exponents:
        series = _series_mul(series, [1, -d] + [0] * K, K)
    phis = []
    for k in range(1, K + 1):
        phi = -series[k]
        phis.append(phi)
        # divide by (1 - t^k)^phi
        factor = [0] * (K + 1)
        factor[0] = 1
        if phi >= 0:
            geo = [1 if i % k == 0 else 0 for i in range(K + 1)]  # 1/(1 - t^k)
            for _ in range(phi):
                factor = _series_mul(factor, geo, K)
        else:
            lin = [0] * (K + 1)
            lin[0] = 1
            lin[k] = -1
            for _ in range(-phi):
                factor = _series_mul(factor, lin, K)
        series = _series_mul(series, factor, K)
    return tuple(phis)


def lcs_product(phis: Sequence[int], K: int) -> list:
    """Coefficients of prod (1 - t^k)^{phi_k} modulo t^{K+1} (round-trip check)."""
    series = [1] + [0] * K
    for k, phi in enumerate(phis, 1):
        lin = [0] * (K + 1)
        lin[0] = 1
        if k <= K:
            lin[k] = -1
        for _ in range(phi):
            series = _series_mul(series, lin, K)
    return series
