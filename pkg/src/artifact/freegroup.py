"""Reduced words in free groups, automorphisms, and Fox calculus."""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple, Sequence

from .kernels import concat_reduce, free_reduce, invert_word, substitute


class Letter(NamedTuple):
    index: int
    sign: int

    def code(self) -> int:
        return self.index if self.sign > 0 else -self.index


def _letter_key(c: int):
    return (abs(c), 1 if c > 0 else -1)


def word_key(code: tuple):
    """Canonical order: length first, then lexicographic on (index, sign)."""
    return (len(code), tuple(_letter_key(c) for c in code))


_TOKEN = re.compile(r"^x(\d+)(?:_(\d+))?(?:\^(-?\d+))?$")


class FreeWord:
    """A freely reduced word in F_rank."""

    __slots__ = ("rank", "code", "_hash")

    def __init__(self, rank: int, code: Iterable[int] = (), reduced: bool = False):
        code = tuple(code)
        for c in code:
            if c == 0 or abs(c) > rank:
                raise ValueError(f"generator index {abs(c)} out of range for rank {rank}")
        self.rank = rank
        self.code = code if reduced else free_reduce(code)
        self._hash = None

    @classmethod
    def from_letters(cls, letters: Iterable, rank: int) -> "FreeWord":
        codes = []
        for let in letters:
            if isinstance(let, int):
                codes.append(let)
            else:
                index, sign = let
                if index < 1:
                    raise ValueError("generator index must be positive")
                codes.append(index if sign > 0 else -index)
        return cls(rank, codes)

    @classmethod
    def parse(cls, text: str, rank: int) -> "FreeWord":
        """Parse ``x1 x2^-1 x1`` (``1`` is the empty word)."""
        codes = []
        for tok in text.split():
            if tok == "1":
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise ValueError(f"bad word token {tok!r}")
            i = int(m.group(1))
            e = int(m.group(3)) if m.group(3) else 1
            codes.extend([i if e > 0 else -i] * abs(e))
        return cls(rank, codes)

    @classmethod
    def generator(cls, rank: int, i: int) -> "FreeWord":
        return cls(rank, (i,), reduced=True)

    @property
    def letters(self) -> tuple:
        return tuple(Letter(abs(c), 1 if c > 0 else -1) for c in self.code)

    def __len__(self):
        return len(self.code)

    def is_identity(self) -> bool:
        return not self.code

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return FreeWord(self.rank, concat_reduce(self.code, other.code), reduced=True)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.rank, invert_word(self.code), reduced=True)

    def __pow__(self, n: int) -> "FreeWord":
        base = self if n >= 0 else self.inverse()
        out = FreeWord(self.rank)
        for _ in range(abs(n)):
            out = out * base
        return out

    def exponent_sum(self, i: int) -> int:
        return sum(1 if c == i else -1 for c in self.code if abs(c) == i)

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.rank == other.rank and self.code == other.code

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, self.code))
        return self._hash

    def __lt__(self, other: "FreeWord"):
        return word_key(self.code) < word_key(other.code)

    def format(self, suffix: str = "") -> str:
        return format_code(self.code, suffix)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"FreeWord({self.rank}, {self.format()!r})"


def format_code(code: Sequence[int], suffix: str = "") -> str:
    if not code:
        return "1"
    return " ".join(f"x{abs(c)}{suffix}" + ("" if c > 0 else "^-1") for c in code)


def reduce(letters: Sequence, rank: int) -> FreeWord:
    """Freely reduce a sequence of letters (``Letter``, ``(index, sign)`` or signed ints)."""
    return FreeWord.from_letters(letters, rank)


class FreeGroupRingElement:
    """Element of the integral group ring of F_rank."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: dict | None = None):
        self.rank = rank
        # keys are word codes (tuples); zero coefficients are never stored
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def from_word(cls, w: FreeWord, coeff: int = 1) -> "FreeGroupRingElement":
        return cls(w.rank, {w.code: coeff})

    @classmethod
    def scalar(cls, rank: int, c: int) -> "FreeGroupRingElement":
        return cls(rank, {(): c})

    def __add__(self, other):
        if isinstance(other, int):
            other = FreeGroupRingElement.scalar(self.rank, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return FreeGroupRingElement(self.rank, out)

    __radd__ = __add__

    def __neg__(self):
        return FreeGroupRingElement(self.rank, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if not isinstance(other, int) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return FreeGroupRingElement(self.rank, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, FreeWord):
            other = FreeGroupRingElement.from_word(other)
        out: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                k = concat_reduce(a, b)
                out[k] = out.get(k, 0) + ca * cb
        return FreeGroupRingElement(self.rank, out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        if isinstance(other, FreeWord):
            return FreeGroupRingElement.from_word(other) * self
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other):
        if isinstance(other, int):
            other = FreeGroupRingElement.scalar(self.rank, other)
        return isinstance(other, FreeGroupRingElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: word_key(kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for code, c in self.sorted_terms():
            w = format_code(code)
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


class FreeAutomorphism:
    """Automorphism of F_rank given by generator images and inverse images."""

    __slots__ = ("rank", "_img", "_inv")

    def __init__(self, rank: int, images: Sequence, inverse_images: Sequence, check: bool = True):
        if len(images) != rank or len(inverse_images) != rank:
            raise ValueError("need one image per generator")
        self.rank = rank
        self._img = (None,) + tuple(_as_code(w, rank) for w in images)
        self._inv = (None,) + tuple(_as_code(w, rank) for w in inverse_images)
        if check:
            for i in range(1, rank + 1):
                if substitute(self._img[i], self._inv) != (i,) or substitute(self._inv[i], self._img) != (i,):
                    raise ValueError(f"inverse images do not invert the images at x{i}")

    @classmethod
    def identity(cls, rank: int) -> "FreeAutomorphism":
        gens = [(i,) for i in range(1, rank + 1)]
        return cls(rank, gens, gens, check=False)

    @classmethod
    def from_codes(cls, rank, img, inv, check=True) -> "FreeAutomorphism":
        return cls(rank, img[1:], inv[1:], check=check)

    @property
    def images(self) -> tuple:
        return tuple(FreeWord(self.rank, c, reduced=True) for c in self._img[1:])

    @property
    def inverse_images(self) -> tuple:
        return tuple(FreeWord(self.rank, c, reduced=True) for c in self._inv[1:])

    @property
    def image_codes(self):
        return self._img

    @property
    def inverse_codes(self):
        return self._inv

    def __call__(self, w: FreeWord) -> FreeWord:
        return apply_automorphism(self, w)

    def inverse(self) -> "FreeAutomorphism":
        return FreeAutomorphism.from_codes(self.rank, self._inv, self._img, check=False)

    def is_identity(self) -> bool:
        return all(self._img[i] == (i,) for i in range(1, self.rank + 1))

    def __eq__(self, other):
        return isinstance(other, FreeAutomorphism) and self._img == other._img

    def __hash__(self):
        return hash(self._img)

    def __repr__(self):
        body = ", ".join(f"x{i} -> {format_code(self._img[i])}" for i in range(1, self.rank + 1))
        return f"FreeAutomorphism({body})"


def _as_code(w, rank):
    if isinstance(w, FreeWord):
        if w.rank != rank:
            raise ValueError("rank mismatch")
        return w.code
    if isinstance(w, str):
        return FreeWord.parse(w, rank).code
    return FreeWord(rank, w).code


def apply_automorphism(phi: FreeAutomorphism, w: FreeWord) -> FreeWord:
    if phi.rank != w.rank:
        raise ValueError("rank mismatch")
    return FreeWord(w.rank, substitute(w.code, phi._img), reduced=True)


def compose(phi: FreeAutomorphism, psi: FreeAutomorphism) -> FreeAutomorphism:
    """The automorphism phi∘psi (apply psi first)."""
    if phi.rank != psi.rank:
        raise ValueError("rank mismatch")
    img = [substitute(psi._img[i], phi._img) for i in range(1, phi.rank + 1)]
    inv = [substitute(phi._inv[i], psi._inv) for i in range(1, phi.rank + 1)]
    return FreeAutomorphism(phi.rank, img, inv, check=False)


def fox_derivative(w: FreeWord, j: int) -> FreeGroupRingElement:
    if not 1 <= j <= w.rank:
        raise ValueError(f"generator index {j} out of range")
    return FreeGroupRingElement(w.rank, fox_terms(w.code, j))


def fox_terms(code: tuple, j: int) -> dict:
    """Fox derivative of a word code with respect to x_j, as {prefix code: coeff}."""
    out: dict = {}
    prefix: list = []
    for c in code:
        if c == j:
            k = tuple(prefix)
            out[k] = out.get(k, 0) + 1
        if prefix and prefix[-1] == -c:
            prefix.pop()
        else:
            prefix.append(c)
        if c == -j:
            k = tuple(prefix)
            out[k] = out.get(k, 0) - 1
    return {k: v for k, v in out.items() if v}


def jacobian(phi: FreeAutomorphism) -> list:
    """Fox Jacobian: row i holds the derivatives of the image of x_i."""
    n = phi.rank
    return [
        [FreeGroupRingElement(n, fox_terms(phi._img[i], j)) for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ]


def identity_matrix(rank: int, n: int) -> list:
    return [[FreeGroupRingElement.scalar(rank, 1 if i == j else 0) for j in range(n)] for i in range(n)]


def matmul(a: list, b: list) -> list:
    """Product of matrices over the free group ring."""
    rank = a[0][0].rank
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = FreeGroupRingElement(rank)
            for k, x in enumerate(row):
                if x.terms and b[k][j].terms:
                    acc = acc + x * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def apply_to_element(phi: FreeAutomorphism, r: FreeGroupRingElement) -> FreeGroupRingElement:
    out: dict = {}
    for code, c in r.terms.items():
        k = substitute(code, phi._img)
        out[k] = out.get(k, 0) + c
    return FreeGroupRingElement(r.rank, out)


def apply_to_matrix(phi: FreeAutomorphism, m: list) -> list:
    """Entrywise extension of phi to a matrix over the group ring."""
    return [[apply_to_element(phi, x) for x in row] for row in m]
