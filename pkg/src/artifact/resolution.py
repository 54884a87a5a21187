"""The free resolution C_*(G) of Z over ZG for an iterated semidirect product.

C_k is the direct sum, over increasing k-tuples (p_1 < ... < p_k) in
lexicographic order, of free modules of rank d_{p_1}...d_{p_k}.  Inside a
summand the basis is indexed by (i_1, ..., i_k) with i_k varying fastest.
Matrices act on row vectors from the right, so the boundary C_k -> C_{k-1}
has shape rank C_k x rank C_{k-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import prod
from typing import Sequence

from .freegroup import fox_terms
from .rings import Integers, Ring, RingMatrix, Specialization, specialize_matrix
from .semidirect import GroupElement, GroupRingElement, GroupRingMatrix, IteratedProduct


def _rho_cache(structure) -> dict:
    cache = getattr(structure, "_rho_cache", None)
    if cache is None:
        cache = structure._rho_cache = {}
    return cache


def rho_comps(structure: IteratedProduct, q: int, comps: tuple) -> list:
    """rho_q of a normal form as a dense d_q x d_q list of {comps: coeff} dicts.

    rho_q(g) = g' J(alpha_q(g')) with g' the image of g in G^{q-1}; factors
    p >= q act trivially.
    """
    low = comps[: q - 1]
    cache = _rho_cache(structure)
    key = (q, low)
    hit = cache.get(key)
    if hit is not None:
        return hit
    d = structure.exponents[q - 1]
    ell = structure.ell
    pad = ((),) * (ell - q + 1)
    if not any(low):
        out = [[{structure.identity_comps(): 1} if i == j else {} for j in range(d)] for i in range(d)]
    else:
        phi = structure.act_comps(low + pad, q)
        conj = structure.conj_images(q, low)
        out = []
        for i in range(1, d + 1):
            img = phi.image_codes[i]
            row = []
            for j in range(1, d + 1):
                entry = {}
                for u, c in fox_terms(img, j).items():
                    # low * u in normal form: u conjugated into factor q
                    w = u if conj is None else structure.conjugate_word(q, low, u)
                    g = low + (w,) + ((),) * (ell - q)
                    entry[g] = entry.get(g, 0) + c
                row.append({k: v for k, v in entry.items() if v})
            out.append(row)
    if len(cache) > 200_000:
        cache.clear()
    cache[key] = out
    return out


def rho(structure: IteratedProduct, q: int, g: GroupElement) -> GroupRingMatrix:
    """The d_q x d_q matrix rho_q(g) over ZG."""
    if not 1 <= q <= structure.ell:
        raise ValueError("factor index out of range")
    dense = rho_comps(structure, q, g.comps)
    return _from_dense(structure, dense)


def _from_dense(structure, dense) -> GroupRingMatrix:
    d = len(dense)
    rows = []
    for r in dense:
        rows.append({j: GroupRingElement(structure, dict(e)) for j, e in enumerate(r) if e})
    return GroupRingMatrix(structure, d, len(dense[0]) if d else 0, rows)


def rho_lift(structure: IteratedProduct, q: int, M: GroupRingMatrix) -> GroupRingMatrix:
    """Replace every entry sum n_g g by the block sum n_g rho_q(g)."""
    d = structure.exponents[q - 1]
    out_rows = [dict() for _ in range(M.nrows * d)]
    for i, row in enumerate(M.rows):
        for j, x in row.items():
            acc = [[{} for _ in range(d)] for _ in range(d)]
            for g, c in x.terms.items():
                blk = rho_comps(structure, q, g)
                for a in range(d):
                    for b in range(d):
                        cell = acc[a][b]
                        for h, n in blk[a][b].items():
                            cell[h] = cell.get(h, 0) + c * n
            for a in range(d):
                for b in range(d):
                    terms = {k: v for k, v in acc[a][b].items() if v}
                    if terms:
                        out_rows[i * d + a][j * d + b] = GroupRingElement(structure, terms)
    return GroupRingMatrix(structure, M.nrows * d, M.ncols * d, out_rows)


def _check_tuple(structure, ps: Sequence[int]) -> tuple:
    ps = tuple(ps)
    if not ps or any(b <= a for a, b in zip(ps, ps[1:])) or ps[0] < 1 or ps[-1] > structure.ell:
        raise ValueError(f"bad index tuple {ps}")
    return ps


def delta(structure: IteratedProduct, ps: Sequence[int]) -> GroupRingMatrix:
    """Delta_{p_1..p_k} = -rho~_{p_k}(Delta_{p_1..p_{k-1}}), Delta_p = (x_{i,p} - 1)^T."""
    ps = _check_tuple(structure, ps)
    cache = getattr(structure, "_delta_cache", None)
    if cache is None:
        cache = structure._delta_cache = {}
    hit = cache.get(ps)
    if hit is not None:
        return hit
    if len(ps) == 1:
        p = ps[0]
        e = structure.identity_comps()
        rows = []
        for i in range(1, structure.exponents[p - 1] + 1):
            rows.append({0: GroupRingElement(structure, {structure.generator_comps(i, p): 1, e: -1})})
        out = GroupRingMatrix(structure, len(rows), 1, rows)
    else:
        out = -rho_lift(structure, ps[-1], delta(structure, ps[:-1]))
    cache[ps] = out
    return out


def summands(structure: IteratedProduct, k: int) -> list:
    """Index tuples of the summands of C_k, lexicographic."""
    if k == 0:
        return [()]
    return list(combinations(range(1, structure.ell + 1), k))


def summand_rank(structure: IteratedProduct, ps: tuple) -> int:
    return prod(structure.exponents[p - 1] for p in ps)


def ranks(structure: IteratedProduct) -> list:
    return [sum(summand_rank(structure, ps) for ps in summands(structure, k)) for k in range(structure.ell + 1)]


def offsets(structure: IteratedProduct, k: int) -> dict:
    out = {}
    pos = 0
    for ps in summands(structure, k):
        out[ps] = pos
        pos += summand_rank(structure, ps)
    return out


def boundary(structure: IteratedProduct, k: int) -> GroupRingMatrix:
    """The boundary C_k -> C_{k-1} assembled from the Delta blocks."""
    if not 1 <= k <= structure.ell:
        raise ValueError(f"degree {k} out of range 1..{structure.ell}")
    cache = getattr(structure, "_boundary_cache", None)
    if cache is None:
        cache = structure._boundary_cache = {}
    if k in cache:
        return cache[k]
    rk = ranks(structure)
    src, dst = offsets(structure, k), offsets(structure, k - 1)
    rows = [dict() for _ in range(rk[k])]
    for ps, r0 in src.items():
        for i in range(k):
            target = ps[:i] + ps[i + 1 :]
            block = delta(structure, ps[i:])
            copies = summand_rank(structure, ps[:i])
            c0 = dst[target]
            h, w = block.nrows, block.ncols
            for c in range(copies):
                for a, brow in enumerate(block.rows):
                    row = rows[r0 + c * h + a]
                    for b, x in brow.items():
                        row[c0 + c * w + b] = x
    out = GroupRingMatrix(structure, rk[k], rk[k - 1], rows)
    cache[k] = out
    return out


def verify_complex(structure: IteratedProduct) -> bool:
    """Check boundary(k) * boundary(k-1) = 0 in ZG and that boundary(1) is augmented to zero."""
    try:
        d1 = boundary(structure, 1)
    except Exception:
        return False
    if any(x.augmentation() for row in d1.rows for x in row.values()):
        return False
    for k in range(2, structure.ell + 1):
        if not (boundary(structure, k) @ boundary(structure, k - 1)).is_zero():
            return False
    return True


def is_IA(structure: IteratedProduct) -> bool:
    """True when every Delta block has zero augmentation (trivial-coefficient boundaries vanish)."""
    for k in range(1, structure.ell + 1):
        for ps in summands(structure, k):
            if any(x.augmentation() for row in delta(structure, ps).rows for x in row.values()):
                return False
    return True


# -- chain complexes over coefficient rings --------------------------------------------


@dataclass
class ChainComplex:
    """Free complex over ``ring``: ``boundaries[k]`` is the rank_k x rank_{k-1} matrix of C_k -> C_{k-1}."""

    ring: Ring
    ranks: list
    boundaries: dict = field(default_factory=dict)

    def __post_init__(self):
        for k in range(1, len(self.ranks)):
            if k not in self.boundaries:
                self.boundaries[k] = RingMatrix.zeros(self.ring, self.ranks[k], self.ranks[k - 1])
            b = self.boundaries[k]
            if b.shape != (self.ranks[k], self.ranks[k - 1]):
                raise ValueError(f"boundary {k} has shape {b.shape}")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def is_complex(self) -> bool:
        for k in range(2, len(self.ranks)):
            if not (self.boundaries[k] @ self.boundaries[k - 1]).is_zero():
                return False
        return True

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * r for k, r in enumerate(self.ranks))

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.boundaries.values())


def specialized_complex(structure: IteratedProduct, nu: Specialization) -> ChainComplex:
    """C_*(G) tensored with the specialization: each ZG entry becomes an m x m block."""
    if nu.structure is not structure:
        raise ValueError("specialization belongs to another structure")
    rk = ranks(structure)
    bds = {k: specialize_matrix(boundary(structure, k), nu) for k in range(1, structure.ell + 1)}
    return ChainComplex(nu.ring, [r * nu.m for r in rk], bds)


def trivial_complex(structure: IteratedProduct) -> ChainComplex:
    """Integer complex with trivial coefficients (augmentation of every entry)."""
    rk = ranks(structure)
    bds = {}
    for k in range(1, structure.ell + 1):
        bds[k] = RingMatrix(Integers, boundary(structure, k).augmentation(), ncols=rk[k - 1])
    return ChainComplex(Integers, rk, bds)
