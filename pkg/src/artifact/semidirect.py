"""Iterated semidirect products of free groups G = F_{d_l} ⋊ ... ⋊ F_{d_1}.

Elements are kept in normal form w_l · ... · w_1 (highest factor leftmost).
Internally a normal form is a tuple ``comps`` with ``comps[q-1]`` the reduced
word code of the factor-q component.  Generator x_{j,p} acts on F_{d_q}
(p < q) by x^{-1} y x = alpha_q^{j,p}(y), so the action is a right action.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .freegroup import FreeAutomorphism, FreeWord, compose, format_code, word_key
from .kernels import concat_reduce, invert_word, substitute

_GEN = re.compile(r"^x(\d+)_(\d+)(?:\^(-?\d+))?$")
_CACHE_LIMIT = 400_000


class IteratedProduct:
    """Exponents d_1..d_l plus the action table alpha_q^{j,p}.

    ``actions`` maps ``(q, p, j)`` to a FreeAutomorphism of F_{d_q}; missing
    entries act trivially.
    """

    def __init__(self, exponents: Sequence[int], actions: dict | None = None, name: str = ""):
        self.exponents = tuple(int(d) for d in exponents)
        if not self.exponents or any(d < 1 for d in self.exponents):
            raise ValueError("exponents must be positive integers")
        self.ell = len(self.exponents)
        self.name = name
        self.actions: dict = {}
        # _img[q][p][j] / _inv[q][p][j]: image code tables (1-based, slot 0 unused)
        self._img = {}
        self._inv = {}
        for (q, p, j), phi in (actions or {}).items():
            if not (1 <= p < q <= self.ell) or not 1 <= j <= self.exponents[p - 1]:
                raise ValueError(f"bad action index {(q, p, j)}")
            if phi.rank != self.exponents[q - 1]:
                raise ValueError(f"action {(q, p, j)} has wrong rank")
            if phi.is_identity():
                continue
            self.actions[(q, p, j)] = phi
            self._img[(q, p, j)] = phi.image_codes
            self._inv[(q, p, j)] = phi.inverse_codes
        self._conj_cache: dict = {}
        self._id_images = {q: (None,) + tuple((i,) for i in range(1, d + 1)) for q, d in enumerate(self.exponents, 1)}

    def __repr__(self):
        return f"IteratedProduct({self.name or list(self.exponents)})"

    # -- generators and raw words -------------------------------------------------

    def generators(self):
        """All generators as (i, q), factor by factor."""
        return [(i, q) for q, d in enumerate(self.exponents, 1) for i in range(1, d + 1)]

    def action(self, q: int, p: int, j: int) -> FreeAutomorphism:
        return self.actions.get((q, p, j)) or FreeAutomorphism.identity(self.exponents[q - 1])

    def identity_comps(self) -> tuple:
        return ((),) * self.ell

    def generator_comps(self, i: int, q: int, sign: int = 1) -> tuple:
        if not 1 <= q <= self.ell or not 1 <= i <= self.exponents[q - 1]:
            raise ValueError(f"generator x{i}_{q} out of range")
        c = [()] * self.ell
        c[q - 1] = (i if sign > 0 else -i,)
        return tuple(c)

    # -- conjugation maps -----------------------------------------------------------

    def _letter_conj(self, q: int, p: int, c: int):
        # images of y -> l y l^{-1} on F_{d_q} for the letter l = x_{|c|,p}^{sign c}
        key = (q, p, abs(c))
        if c > 0:
            return self._inv.get(key)
        return self._img.get(key)

    def conj_images(self, q: int, lower: tuple):
        """Images of x_{i,q} under y -> g y g^{-1}, g the element with components ``lower``.

        ``lower`` holds the components of factors 1..q-1.  Returns a tuple with a
        dummy slot 0, or ``None`` when the map is the identity.
        """
        key = (q, lower)
        cache = self._conj_cache
        hit = cache.get(key, False)
        if hit is not False:
            return hit
        # peel the last letter of the lowest nonempty component: g = g'' l
        p = 0
        for idx, w in enumerate(lower):
            if w:
                p = idx + 1
                break
        if p == 0:
            result = None
        else:
            w = lower[p - 1]
            last = w[-1]
            shorter = lower[: p - 1] + (w[:-1],) + lower[p:]
            outer = self.conj_images(q, shorter)
            step = self._letter_conj(q, p, last)
            if step is None:
                result = outer
            elif outer is None:
                result = step
            else:
                result = (None,) + tuple(substitute(step[i], outer) for i in range(1, len(step)))
        if len(cache) > _CACHE_LIMIT:
            cache.clear()
        cache[key] = result
        return result

    def conjugate_word(self, q: int, lower: tuple, code: tuple) -> tuple:
        imgs = self.conj_images(q, lower)
        if imgs is None:
            return code
        return substitute(code, imgs)

    # -- arithmetic on normal forms -------------------------------------------------

    def mul(self, a: tuple, b: tuple) -> tuple:
        out = []
        for q in range(1, self.ell + 1):
            bq = b[q - 1]
            if not bq:
                out.append(a[q - 1])
                continue
            moved = self.conjugate_word(q, a[: q - 1], bq)
            out.append(concat_reduce(a[q - 1], moved))
        return tuple(out)

    def raw_word(self, comps: tuple) -> list:
        """Letters (i, q, sign) of the normal form read left to right."""
        out = []
        for q in range(self.ell, 0, -1):
            for c in comps[q - 1]:
                out.append((abs(c), q, 1 if c > 0 else -1))
        return out

    def normalize_raw(self, raw: Iterable) -> tuple:
        comps = self.identity_comps()
        for i, q, s in raw:
            if not 1 <= q <= self.ell or not 1 <= i <= self.exponents[q - 1]:
                raise ValueError(f"generator x{i}_{q} out of range")
            c = i if s > 0 else -i
            moved = self.conjugate_word(q, comps[: q - 1], (c,))
            comps = comps[: q - 1] + (concat_reduce(comps[q - 1], moved),) + comps[q:]
        return comps

    def inv(self, a: tuple) -> tuple:
        raw = [(i, q, -s) for (i, q, s) in reversed(self.raw_word(a))]
        return self.normalize_raw(raw)

    def lower(self, a: tuple, q: int) -> tuple:
        """Components of the projection to G^{q-1} (factors below q)."""
        return a[: q - 1] + ((),) * (self.ell - q + 1)

    # -- actions --------------------------------------------------------------------

    def act_comps(self, a: tuple, q: int) -> FreeAutomorphism:
        """alpha_q(g): y -> g^{-1} y g, as an automorphism of F_{d_q}."""
        d = self.exponents[q - 1]
        low = a[: q - 1]
        inv_low = self.inv(a[: q - 1] + ((),) * (self.ell - q + 1))[: q - 1]
        img = self.conj_images(q, inv_low) or self._id_images[q]
        back = self.conj_images(q, low) or self._id_images[q]
        return FreeAutomorphism(d, img[1:], back[1:], check=False)

    def action_of_word(self, q: int, p: int, code: tuple) -> FreeAutomorphism:
        """alpha_q of a word in factor p (right action: first letter applied first)."""
        comps = [()] * self.ell
        comps[p - 1] = code
        return self.act_comps(tuple(comps), q)

    # -- parsing and formatting -----------------------------------------------------

    def parse_raw(self, text: str) -> list:
        raw = []
        for tok in text.split():
            if tok == "1":
                continue
            m = _GEN.match(tok)
            if not m:
                raise ValueError(f"bad generator token {tok!r}")
            i, q = int(m.group(1)), int(m.group(2))
            e = int(m.group(3)) if m.group(3) else 1
            raw.extend([(i, q, 1 if e > 0 else -1)] * abs(e))
        return raw

    def element(self, text_or_raw) -> "GroupElement":
        raw = self.parse_raw(text_or_raw) if isinstance(text_or_raw, str) else text_or_raw
        return GroupElement(self, self.normalize_raw(raw))

    def gen(self, i: int, q: int) -> "GroupElement":
        return GroupElement(self, self.generator_comps(i, q))

    def identity(self) -> "GroupElement":
        return GroupElement(self, self.identity_comps())

    def format_comps(self, comps: tuple) -> str:
        parts = [format_code(comps[q - 1], f"_{q}") for q in range(self.ell, 0, -1) if comps[q - 1]]
        return " ".join(parts) if parts else "1"

    def comps_key(self, comps: tuple):
        return tuple(word_key(comps[q - 1]) for q in range(self.ell, 0, -1))

    def description(self) -> str:
        """Canonical text form of the structure (used for hashing and files)."""
        lines = [f"exponents = {list(self.exponents)}"]
        for key in sorted(self.actions):
            phi = self.actions[key]
            q = key[0]
            img = ", ".join(f'"{format_code(c, f"_{q}")}"' for c in phi.image_codes[1:])
            inv = ", ".join(f'"{format_code(c, f"_{q}")}"' for c in phi.inverse_codes[1:])
            lines.append(f"action.{q}.{key[1]}.{key[2]} = [{img}]")
            lines.append(f"action_inv.{q}.{key[1]}.{key[2]} = [{inv}]")
        return "\n".join(lines) + "\n"


class GroupElement:
    """Normal form (w_l, ..., w_1) of an element of an iterated product."""

    __slots__ = ("structure", "comps")

    def __init__(self, structure: IteratedProduct, comps: tuple):
        self.structure = structure
        self.comps = comps

    @property
    def components(self) -> tuple:
        s = self.structure
        return tuple(
            FreeWord(s.exponents[q - 1], self.comps[q - 1], reduced=True) for q in range(s.ell, 0, -1)
        )

    def component(self, q: int) -> FreeWord:
        return FreeWord(self.structure.exponents[q - 1], self.comps[q - 1], reduced=True)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.structure, self.structure.inv(self.comps))

    def __pow__(self, n: int) -> "GroupElement":
        base = self if n >= 0 else self.inverse()
        out = self.structure.identity()
        for _ in range(abs(n)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return not any(self.comps)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and other.structure is self.structure and other.comps == self.comps

    def __hash__(self):
        return hash(self.comps)

    def __str__(self):
        return self.structure.format_comps(self.comps)

    def __repr__(self):
        return f"GroupElement({self})"


def normalize(structure: IteratedProduct, raw: Iterable) -> GroupElement:
    """Normal form of a raw word given as (i, q, sign) triples or text."""
    if isinstance(raw, str):
        raw = structure.parse_raw(raw)
    return GroupElement(structure, structure.normalize_raw(raw))


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.structure is not h.structure:
        raise ValueError("structure mismatch")
    return GroupElement(g.structure, g.structure.mul(g.comps, h.comps))


def act(structure: IteratedProduct, g: GroupElement, q: int) -> FreeAutomorphism:
    """alpha_q(g); letters in factors >= q act trivially."""
    if not 1 <= q <= structure.ell:
        raise ValueError("factor index out of range")
    return structure.act_comps(g.comps, q)


class GroupRingElement:
    """Integral combination of normal forms."""

    __slots__ = ("structure", "terms")

    def __init__(self, structure: IteratedProduct, terms: dict | None = None):
        self.structure = structure
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def scalar(cls, structure, c: int) -> "GroupRingElement":
        return cls(structure, {structure.identity_comps(): c})

    @classmethod
    def of(cls, g: GroupElement, c: int = 1) -> "GroupRingElement":
        return cls(g.structure, {g.comps: c})

    def _coerce(self, other):
        if isinstance(other, int):
            return GroupRingElement.scalar(self.structure, other)
        if isinstance(other, GroupElement):
            return GroupRingElement.of(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return GroupRingElement(self.structure, out)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(self.structure, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement(self.structure, {k: v * other for k, v in self.terms.items()})
        other = self._coerce(other)
        mul = self.structure.mul
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = mul(a, b)
                out[k] = out.get(k, 0) + ca * cb
        return GroupRingElement(self.structure, out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return self._coerce(other) * self

    def is_zero(self) -> bool:
        return not self.terms

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other):
        other = self._coerce(other)
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        key = self.structure.comps_key
        return sorted(self.terms.items(), key=lambda kv: key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for comps, c in self.sorted_terms():
            w = self.structure.format_comps(comps)
            if w == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(w)
            elif c == -1:
                parts.append("-" + w)
            else:
                parts.append(f"{c} {w}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*((?:x\d+_\d+(?:\^-?\d+)?\s*)*)")


def parse_ring_element(structure: IteratedProduct, text: str) -> GroupRingElement:
    """Parse a signed sum of words, e.g. ``1 + x1_3 x1_1 - x1_1``."""
    text = text.strip()
    if text in ("", "0"):
        return GroupRingElement(structure)
    out = GroupRingElement(structure)
    tokens = re.split(r"(?<=\S)\s*(?=[+-]\s)", text)
    for tok in tokens:
        tok = tok.strip()
        m = re.fullmatch(r"([+-])?\s*(\d+)?\s*(.*)", tok)
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        word = m.group(3).strip()
        g = structure.element(word) if word else structure.identity()
        out = out + GroupRingElement.of(g, sign * coeff)
    return out


class GroupRingMatrix:
    """Matrix over ZG acting on row vectors from the right.

    Entries are stored sparsely: ``rows[i]`` maps a column index to a nonzero
    GroupRingElement.
    """

    __slots__ = ("structure", "nrows", "ncols", "rows")

    def __init__(self, structure: IteratedProduct, nrows: int, ncols: int, rows: list | None = None):
        self.structure = structure
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    @classmethod
    def identity(cls, structure, n: int, scale: int = 1) -> "GroupRingMatrix":
        e = structure.identity_comps()
        return cls(structure, n, n, [{i: GroupRingElement(structure, {e: scale})} for i in range(n)])

    @classmethod
    def from_entries(cls, structure, entries: Sequence[Sequence]) -> "GroupRingMatrix":
        nrows = len(entries)
        ncols = len(entries[0]) if nrows else 0
        m = cls(structure, nrows, ncols)
        for i, row in enumerate(entries):
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            for j, x in enumerate(row):
                if isinstance(x, str):
                    x = parse_ring_element(structure, x)
                elif isinstance(x, int):
                    x = GroupRingElement.scalar(structure, x)
                elif isinstance(x, GroupElement):
                    x = GroupRingElement.of(x)
                if x.terms:
                    m.rows[i][j] = x
        return m

    def __getitem__(self, ij) -> GroupRingElement:
        i, j = ij
        return self.rows[i].get(j) or GroupRingElement(self.structure)

    def entries(self) -> list:
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __eq__(self, other):
        if not isinstance(other, GroupRingMatrix) or (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return all(
            {k: v.terms for k, v in a.items()} == {k: v.terms for k, v in b.items()}
            for a, b in zip(self.rows, other.rows)
        )

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._same_shape(other)
        out = [dict(r) for r in self.rows]
        for i, row in enumerate(other.rows):
            for j, x in row.items():
                y = out[i].get(j)
                z = x if y is None else y + x
                if z.terms:
                    out[i][j] = z
                else:
                    out[i].pop(j, None)
        return GroupRingMatrix(self.structure, self.nrows, self.ncols, out)

    def __neg__(self):
        return GroupRingMatrix(
            self.structure, self.nrows, self.ncols, [{j: -x for j, x in r.items()} for r in self.rows]
        )

    def __sub__(self, other):
        return self + (-other)

    def _same_shape(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        mul = self.structure.mul
        out = []
        for row in self.rows:
            acc: dict = {}
            for k, x in row.items():
                for j, y in other.rows[k].items():
                    bucket = acc.setdefault(j, {})
                    for a, ca in x.terms.items():
                        for b, cb in y.terms.items():
                            g = mul(a, b)
                            bucket[g] = bucket.get(g, 0) + ca * cb
            new = {}
            for j, terms in acc.items():
                e = GroupRingElement(self.structure, terms)
                if e.terms:
                    new[j] = e
            out.append(new)
        return GroupRingMatrix(self.structure, self.nrows, other.ncols, out)

    def scale_left(self, g: GroupRingElement) -> "GroupRingMatrix":
        return GroupRingMatrix(
            self.structure,
            self.nrows,
            self.ncols,
            [{j: e for j, x in r.items() if (e := g * x).terms} for r in self.rows],
        )

    def block_diagonal(self, copies: int) -> "GroupRingMatrix":
        """[M]^copies: block-diagonal repetition."""
        out = []
        for c in range(copies):
            off = c * self.ncols
            for r in self.rows:
                out.append({j + off: x for j, x in r.items()})
        return GroupRingMatrix(self.structure, self.nrows * copies, self.ncols * copies, out)

    def augmentation(self) -> list:
        return [[self[i, j].augmentation() for j in range(self.ncols)] for i in range(self.nrows)]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def __str__(self):
        return "\n".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.entries())


# -- validation -----------------------------------------------------------------------


@dataclass
class ValidationReport:
    valid: bool = True
    violations: list = field(default_factory=list)

    def add(self, msg: str):
        self.valid = False
        self.violations.append(msg)

    def __str__(self):
        if self.valid:
            return "valid"
        return "invalid:\n" + "\n".join("  " + v for v in self.violations)


def validate(structure: IteratedProduct) -> ValidationReport:
    """Check inverse pairs and the compatibility identity on generators."""
    rep = ValidationReport()
    for (q, p, j), phi in structure.actions.items():
        for i in range(1, phi.rank + 1):
            if substitute(phi.image_codes[i], phi.inverse_codes) != (i,):
                rep.add(f"action {q}.{p}.{j}: inverse image fails at x{i}_{q}")
            if substitute(phi.inverse_codes[i], phi.image_codes) != (i,):
                rep.add(f"action {q}.{p}.{j}: image fails to invert inverse at x{i}_{q}")
    if not rep.valid:
        return rep
    ex = structure.exponents
    for k in range(3, structure.ell + 1):
        for jf in range(2, k):
            for i_f in range(1, jf):
                for a in range(1, ex[i_f - 1] + 1):
                    xa = structure.action(k, i_f, a)
                    for b in range(1, ex[jf - 1] + 1):
                        xb = structure.action(k, jf, b)
                        # alpha(x_a^{-1} x_b x_a) = alpha(x_a) o alpha(x_b) o alpha(x_a)^{-1}
                        lhs = compose(xa, compose(xb, xa.inverse()))
                        w = structure.action(jf, i_f, a).image_codes[b]
                        rhs = structure.action_of_word(k, jf, w)
                        if lhs.image_codes != rhs.image_codes:
                            rep.add(
                                f"compatibility fails for x{a}_{i_f}, x{b}_{jf} acting on factor {k}"
                            )
    return rep


def is_compatible(structure: IteratedProduct, psi: Sequence[FreeAutomorphism]) -> bool:
    """Check alpha_q(psi_p(x)) = psi_q o alpha_q(x) o psi_q^{-1} on generators."""
    if len(psi) != structure.ell:
        raise ValueError("need one automorphism per factor")
    for p in range(1, structure.ell):
        for j in range(1, structure.exponents[p - 1] + 1):
            img = psi[p - 1].image_codes[j]
            for q in range(p + 1, structure.ell + 1):
                lhs = structure.action_of_word(q, p, img)
                rhs = compose(psi[q - 1], compose(structure.action(q, p, j), psi[q - 1].inverse()))
                if lhs.image_codes != rhs.image_codes:
                    return False
    return True


@dataclass(frozen=True)
class CompatibleAutomorphism:
    """Per-factor automorphisms psi_1..psi_l of a structure."""

    structure: IteratedProduct
    factors: tuple

    def __post_init__(self):
        if not is_compatible(self.structure, self.factors):
            raise ValueError("per-factor maps are not compatible with the actions")

    @classmethod
    def unchecked(cls, structure, factors) -> "CompatibleAutomorphism":
        obj = object.__new__(cls)
        object.__setattr__(obj, "structure", structure)
        object.__setattr__(obj, "factors", tuple(factors))
        return obj

    def __getitem__(self, p: int) -> FreeAutomorphism:
        return self.factors[p - 1]

    def apply_comps(self, comps: tuple) -> tuple:
        """Image of a normal form; psi preserves each factor."""
        return tuple(substitute(w, self.factors[q].image_codes) if w else w for q, w in enumerate(comps))

    def inverse_comps(self, comps: tuple) -> tuple:
        return tuple(substitute(w, self.factors[q].inverse_codes) if w else w for q, w in enumerate(comps))

    def inverse(self) -> "CompatibleAutomorphism":
        return CompatibleAutomorphism.unchecked(self.structure, [f.inverse() for f in self.factors])

    def then(self, other: "CompatibleAutomorphism") -> "CompatibleAutomorphism":
        """other ∘ self."""
        return CompatibleAutomorphism.unchecked(
            self.structure, [compose(b, a) for a, b in zip(self.factors, other.factors)]
        )

    def apply_ring(self, r: GroupRingElement) -> GroupRingElement:
        out: dict = {}
        for k, c in r.terms.items():
            g = self.apply_comps(k)
            out[g] = out.get(g, 0) + c
        return GroupRingElement(r.structure, out)

    def apply_matrix(self, m: GroupRingMatrix) -> GroupRingMatrix:
        return GroupRingMatrix(
            m.structure, m.nrows, m.ncols, [{j: self.apply_ring(x) for j, x in r.items()} for r in m.rows]
        )
