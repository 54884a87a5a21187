"""Exact coefficient rings, matrices over them, and specializations of ZG.

Ring elements:

* ``Integers``   -> Python ``int``
* ``Rationals``  -> ``fractions.Fraction``
* ``LaurentRing`` (integer or rational coefficients, m variables) -> ``Laurent``
* ``Cyclotomic(d)`` -> ``CycloElement`` (dense vector modulo Phi_d)
* ``CyclicAlgebra(N)`` -> ``CyclicElement`` (dense vector modulo t^N - 1)
* ``RationalFunctions(m)`` -> ``RatFunc`` (unreduced quotient of Laurents)
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

# -- integer polynomial helpers ---------------------------------------------------------


def _poly_trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a: Sequence, b: Sequence):
    """Division of dense polynomials (coefficient lists, low degree first)."""
    a = list(a)
    b = _poly_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [0] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead if not isinstance(a[-1], int) or a[-1] % lead else a[-1] // lead
        if isinstance(c, float):
            c = Fraction(a[-1], lead)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        a.pop()
    return _poly_trim(q), _poly_trim(a)


@lru_cache(maxsize=None)
def cyclotomic_poly(d: int) -> tuple:
    """Integer coefficients of Phi_d, low degree first."""
    if d < 1:
        raise ValueError("d must be positive")
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num, r = _poly_divmod(num, cyclotomic_poly(e))
            assert not r
    return tuple(int(c) for c in num)


def euler_phi(d: int) -> int:
    return len(cyclotomic_poly(d)) - 1


# -- rings ------------------------------------------------------------------------------


class Ring:
    name = "Ring"
    is_field = False
    nvars = 0

    def zero(self):
        return self.from_int(0)

    def one(self):
        return self.from_int(1)

    def from_int(self, n: int):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a == self.zero()

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def exquo(self, a, b):
        """Exact quotient a / b (raises ArithmeticError if b does not divide a)."""
        if self.is_field:
            return a * self.inv(b)
        raise NotImplementedError

    def coerce(self, x):
        if isinstance(x, int):
            return self.from_int(x)
        return x

    def to_json(self, a):
        raise NotImplementedError

    def from_json(self, data):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name


class _Integers(Ring):
    name = "Integers"

    def from_int(self, n):
        return int(n)

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if a not in (1, -1):
            raise ArithmeticError(f"{a} is not a unit in Z")
        return a

    def exquo(self, a, b):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact division")
        return q

    def to_json(self, a):
        return {"ring": self.name, "terms": {"": a} if a else {}}

    def from_json(self, data):
        return int(data["terms"].get("", 0))

    def fmt(self, a):
        return str(a)


class _Rationals(Ring):
    name = "Rationals"
    is_field = True

    def from_int(self, n):
        return Fraction(n)

    def coerce(self, x):
        return Fraction(x)

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        return 1 / Fraction(a)

    def to_json(self, a):
        return {"ring": self.name, "terms": {"": _coeff_json(a)} if a else {}}

    def from_json(self, data):
        return _coeff_parse(data["terms"].get("", 0))

    def fmt(self, a):
        return str(a)


Integers = _Integers()
Rationals = _Rationals()


def _coeff_json(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return c


def _coeff_parse(c):
    if isinstance(c, str):
        return Fraction(c)
    return c


# -- Laurent polynomials ------------------------------------------------------------------


class Laurent:
    """Laurent polynomial: exponent tuple -> nonzero coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: "LaurentRing", terms: dict | None = None):
        self.ring = ring
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        self._hash = None

    def _lift(self, other):
        if isinstance(other, Laurent):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Laurent(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        if len(self.terms) == 1 and len(other.terms) == 1:
            (ka, va), = self.terms.items()
            (kb, vb), = other.terms.items()
            return Laurent(self.ring, {tuple(x + y for x, y in zip(ka, kb)): va * vb})
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + va * vb
        return Laurent(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.ring.inv(self) ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._lift(other) if not isinstance(other, Laurent) else other
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def is_zero(self):
        return not self.terms

    def substitute(self, values: Sequence):
        """Evaluate with variable i -> values[i] (ring elements or numbers)."""
        out = None
        for k, c in self.terms.items():
            term = c
            for v, e in zip(values, k):
                if e:
                    term = term * (v ** e)
            out = term if out is None else out + term
        return out if out is not None else 0

    def min_exponents(self):
        return tuple(min(k[i] for k in self.terms) for i in range(self.ring.nvars)) if self.terms else None

    def max_exponents(self):
        return tuple(max(k[i] for k in self.terms) for i in range(self.ring.nvars)) if self.terms else None

    def __str__(self):
        return self.ring.fmt(self)

    __repr__ = __str__


class LaurentRing(Ring):
    """Z[t_1^±,...,t_m^±] (``rational=False``) or Q[t_1^±,...,t_m^±]."""

    def __init__(self, nvars: int = 1, rational: bool = False, names: Sequence[str] | None = None):
        self.nvars = nvars
        self.rational = rational
        self.names = tuple(names) if names else (("t",) if nvars == 1 else tuple(f"t{i}" for i in range(1, nvars + 1)))
        if len(self.names) != nvars:
            raise ValueError("one name per variable")
        self.name = f"{'LaurentRat' if rational else 'LaurentInt'}({nvars})"
        self._zero_exp = (0,) * nvars

    def __eq__(self, other):
        return isinstance(other, LaurentRing) and (self.nvars, self.rational) == (other.nvars, other.rational)

    def __hash__(self):
        return hash(self.name)

    def from_int(self, n):
        return Laurent(self, {self._zero_exp: Fraction(n) if self.rational else int(n)})

    def constant(self, c):
        if self.rational:
            c = Fraction(c)
        elif isinstance(c, Fraction):
            if c.denominator != 1:
                raise ValueError("non-integral coefficient in an integer Laurent ring")
            c = c.numerator
        return Laurent(self, {self._zero_exp: c})

    def coerce(self, x):
        if isinstance(x, Laurent):
            if x.ring is self:
                return x
            return Laurent(self, {k: (Fraction(v) if self.rational else v) for k, v in x.terms.items()})
        return self.constant(x)

    def var(self, i: int = 0) -> Laurent:
        e = [0] * self.nvars
        e[i] = 1
        return Laurent(self, {tuple(e): 1})

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps, c=1) -> Laurent:
        return Laurent(self, {tuple(exps): c})

    def is_zero(self, a):
        return not a.terms

    def is_unit(self, a):
        if len(a.terms) != 1:
            return False
        (c,) = a.terms.values()
        return c != 0 if self.rational else c in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise ArithmeticError(f"{a} is not a unit")
        (k, c), = a.terms.items()
        c = 1 / Fraction(c) if self.rational else c
        return Laurent(self, {tuple(-x for x in k): c})

    def exquo(self, a, b):
        if not b.terms:
            raise ZeroDivisionError("division by zero")
        if not a.terms:
            return self.zero()
        if len(b.terms) == 1:
            (kb, cb), = b.terms.items()
            out = {}
            for ka, ca in a.terms.items():
                if self.rational:
                    c = Fraction(ca) / cb
                else:
                    c, r = divmod(ca, cb)
                    if r:
                        raise ArithmeticError("inexact division")
                out[tuple(x - y for x, y in zip(ka, kb))] = c
            return Laurent(self, out)
        # lex order on Z^m is a group order, so leading terms multiply
        lb = max(b.terms)
        cb = b.terms[lb]
        low = tuple(x - y for x, y in zip(min(a.terms), min(b.terms)))
        r = dict(a.terms)
        q = {}
        while r:
            la = max(r)
            e = tuple(x - y for x, y in zip(la, lb))
            if e < low:
                raise ArithmeticError("inexact division")
            ca = r[la]
            if self.rational:
                c = Fraction(ca) / cb
            else:
                c, rem = divmod(ca, cb)
                if rem:
                    raise ArithmeticError("inexact division")
            q[e] = c
            for kb2, v in b.terms.items():
                k = tuple(x + y for x, y in zip(e, kb2))
                nv = r.get(k, 0) - c * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
        return Laurent(self, q)

    def divides(self, b, a) -> bool:
        try:
            self.exquo(a, b)
            return True
        except ArithmeticError:
            return False

    # univariate Euclidean structure (rational coefficients)

    def _to_poly(self, a):
        (m,) = a.min_exponents()
        deg = max(k[0] for k in a.terms) - m
        p = [Fraction(0)] * (deg + 1)
        for (e,), c in a.terms.items():
            p[e - m] = Fraction(c)
        return p

    def _from_poly(self, p, shift=0):
        return Laurent(self, {(i + shift,): c for i, c in enumerate(p) if c})

    def norm(self, a) -> int:
        """Euclidean norm: exponent span (t is a unit)."""
        if not a.terms:
            return -1
        es = [k[0] for k in a.terms]
        return max(es) - min(es)

    def euclid_divmod(self, a, b):
        """a = q b + r with norm(r) < norm(b), univariate rational case."""
        if self.nvars != 1 or not self.rational:
            raise ArithmeticError("Euclidean division needs univariate rational Laurent polynomials")
        if not a.terms:
            return self.zero(), self.zero()
        ma, mb = a.min_exponents()[0], b.min_exponents()[0]
        q, r = _poly_divmod(self._to_poly(a), self._to_poly(b))
        return self._from_poly(q, ma - mb), self._from_poly(r, ma)

    def normalize_unit(self, a):
        """Associate of a that is a monic polynomial with nonzero constant term."""
        if not a.terms:
            return a, self.one()
        p = self._to_poly(a)
        lead = p[-1]
        m = a.min_exponents()
        u = Laurent(self, {tuple(-x for x in m): 1 / Fraction(lead) if self.rational else 1})
        return a * u, u

    def fmt(self, a):
        if not a.terms:
            return "0"
        parts = []
        for k in sorted(a.terms, key=lambda e: (sum(e), e)):
            c = a.terms[k]
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(self.names, k) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self, a):
        return {
            "ring": self.name,
            "terms": {",".join(map(str, k)): _coeff_json(a.terms[k]) for k in sorted(a.terms, key=lambda e: (sum(e), e))},
        }

    def from_json(self, data):
        terms = {}
        for key, c in data["terms"].items():
            k = tuple(int(x) for x in key.split(",")) if key else self._zero_exp
            terms[k] = Fraction(_coeff_parse(c)) if self.rational else int(_coeff_parse(c))
        return Laurent(self, terms)

    def parse(self, text: str) -> Laurent:
        """Parse a polynomial expression in the ring's variable names."""
        import ast

        tree = ast.parse(text.replace("^", "**"), mode="eval")
        names = {n: self.var(i) for i, n in enumerate(self.names)}

        def ev(node):
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.BinOp):
                a, b = ev(node.left), ev(node.right)
                if isinstance(node.op, ast.Add):
                    return a + b
                if isinstance(node.op, ast.Sub):
                    return a - b
                if isinstance(node.op, ast.Mult):
                    return a * b
                if isinstance(node.op, ast.Pow):
                    return a ** int(b.terms.get(self._zero_exp, 0)) if isinstance(b, Laurent) else a ** b
                if isinstance(node.op, ast.Div):
                    return a * self.inv(self.coerce(b))
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
                return -ev(node.operand)
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
                return ev(node.operand)
            if isinstance(node, ast.Constant) and isinstance(node.value, int):
                return self.constant(node.value)
            if isinstance(node, ast.Name) and node.id in names:
                return names[node.id]
            raise ValueError(f"cannot parse {text!r}")

        return self.coerce(ev(tree))


def LaurentInt(m: int = 1, names=None) -> LaurentRing:
    return LaurentRing(m, rational=False, names=names)


def LaurentRat(m: int = 1, names=None) -> LaurentRing:
    return LaurentRing(m, rational=True, names=names)


# -- cyclotomic fields ----------------------------------------------------------------------


class CycloElement:
    __slots__ = ("ring", "c")

    def __init__(self, ring: "Cyclotomic", c: tuple):
        self.ring = ring
        self.c = c

    def _lift(self, other):
        if isinstance(other, CycloElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        return CycloElement(self.ring, tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.ring, tuple(-a for a in self.c))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        return self.ring._reduce(_poly_mul(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.ring.inv(self) ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._lift(other)
        return other is not NotImplemented and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self):
        return not any(self.c)

    def __str__(self):
        return self.ring.fmt(self)

    __repr__ = __str__


class Cyclotomic(Ring):
    """Q(xi) with xi a primitive d-th root of unity, basis 1, xi, ..., xi^{phi(d)-1}."""

    is_field = True

    def __init__(self, d: int):
        self.d = d
        self.phi = cyclotomic_poly(d)
        self.deg = len(self.phi) - 1
        self.name = f"Cyclotomic({d})"

    def _reduce(self, p) -> CycloElement:
        p = [Fraction(x) for x in p]
        n = self.deg
        phi = self.phi
        for i in range(len(p) - 1, n - 1, -1):
            c = p[i]
            if c:
                for j in range(n + 1):
                    p[i - n + j] -= c * phi[j]
        p = (p + [Fraction(0)] * n)[:n]
        return CycloElement(self, tuple(p))

    def from_int(self, n):
        return CycloElement(self, (Fraction(n),) + (Fraction(0),) * (self.deg - 1))

    def gen(self) -> CycloElement:
        return self.power(1)

    def power(self, k: int) -> CycloElement:
        """xi^k for any integer k."""
        k %= self.d
        p = [0] * k + [1]
        return self._reduce(p)

    def is_zero(self, a):
        return not any(a.c)

    def is_unit(self, a):
        return any(a.c)

    def inv(self, a):
        # extended Euclid in Q[x] against Phi_d
        r0, r1 = [Fraction(x) for x in self.phi], _poly_trim([Fraction(x) for x in a.c])
        if not r1:
            raise ZeroDivisionError("inverse of zero")
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        return self._reduce([x / c for x in s1])

    def regular_matrix(self, a) -> list:
        """Matrix of x -> x*a on the power basis (row-vector convention)."""
        rows = []
        for i in range(self.deg):
            rows.append(list((self.power(i) * a).c))
        return rows

    def fmt(self, a):
        parts = []
        for i, c in enumerate(a.c):
            if not c:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_json(self, a):
        return {"ring": self.name, "terms": {str(i): _coeff_json(c) for i, c in enumerate(a.c) if c}}

    def from_json(self, data):
        p = [Fraction(0)] * self.deg
        for k, c in data["terms"].items():
            p[int(k)] = Fraction(_coeff_parse(c))
        return CycloElement(self, tuple(p))


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


# -- cyclic group algebras Z[t]/(t^N - 1) ---------------------------------------------------


class CyclicElement:
    __slots__ = ("ring", "c")

    def __init__(self, ring: "CyclicAlgebra", c: tuple):
        self.ring = ring
        self.c = c

    def _lift(self, other):
        if isinstance(other, CyclicElement):
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        return CyclicElement(self.ring, tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return CyclicElement(self.ring, tuple(-a for a in self.c))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        n = self.ring.N
        out = [0] * n
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        out[(i + j) % n] += a * b
        return CyclicElement(self.ring, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.ring.inv(self) ** (-k)
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        return other is not NotImplemented and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self):
        return not any(self.c)

    def __str__(self):
        return self.ring.fmt(self)

    __repr__ = __str__


class CyclicAlgebra(Ring):
    """Z[t]/(t^N - 1), the group ring of the cyclic group of order N."""

    def __init__(self, N: int):
        self.N = N
        self.deg = N
        self.name = f"CyclicAlgebra({N})"

    def from_int(self, n):
        return CyclicElement(self, (int(n),) + (0,) * (self.N - 1))

    def power(self, k: int) -> CyclicElement:
        c = [0] * self.N
        c[k % self.N] = 1
        return CyclicElement(self, tuple(c))

    def gen(self):
        return self.power(1)

    def is_zero(self, a):
        return not any(a.c)

    def is_unit(self, a):
        nz = [x for x in a.c if x]
        return len(nz) == 1 and nz[0] in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise ArithmeticError("only signed monomials are inverted in a cyclic algebra")
        (k, c), = [(i, x) for i, x in enumerate(a.c) if x]
        return CyclicElement(self, tuple(c if i == (-k) % self.N else 0 for i in range(self.N)))

    def regular_matrix(self, a) -> list:
        n = self.N
        return [[a.c[(j - i) % n] for j in range(n)] for i in range(n)]

    def fmt(self, a):
        parts = []
        for i, c in enumerate(a.c):
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            parts.append(str(c) if not mono else (mono if c == 1 else ("-" + mono if c == -1 else f"{c}*{mono}")))
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_json(self, a):
        return {"ring": self.name, "terms": {str(i): c for i, c in enumerate(a.c) if c}}

    def from_json(self, data):
        c = [0] * self.N
        for k, v in data["terms"].items():
            c[int(k)] = int(v)
        return CyclicElement(self, tuple(c))


# -- rational functions ------------------------------------------------------------------------


class RatFunc:
    __slots__ = ("ring", "num", "den")

    def __init__(self, ring: "RationalFunctions", num: Laurent, den: Laurent):
        if not den.terms:
            raise ZeroDivisionError("zero denominator")
        self.ring = ring
        self.num, self.den = ring._simplify(num, den)

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        return self.ring.coerce(other)

    def __add__(self, other):
        o = self._lift(other)
        return RatFunc(self.ring, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.ring, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        return RatFunc(self.ring, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self.ring.inv(self._lift(other))

    def __eq__(self, other):
        o = self._lift(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    def __hash__(self):
        raise TypeError("rational functions are not hashable")

    def is_zero(self):
        return self.num.is_zero()

    def __str__(self):
        return f"({self.num})/({self.den})"

    __repr__ = __str__


class RationalFunctions(Ring):
    """Fraction field Q(t_1, ..., t_m) of the rational Laurent ring."""

    is_field = True

    def __init__(self, nvars: int = 1, names=None):
        self.base = LaurentRat(nvars, names)
        self.nvars = nvars
        self.name = f"RationalFunctions({nvars})"

    def _simplify(self, num, den):
        base = self.base
        num, den = base.coerce(num), base.coerce(den)
        if not num.terms:
            return num, base.one()
        try:
            q = base.exquo(num, den)
            return q, base.one()
        except ArithmeticError:
            pass
        if self.nvars == 1:
            g = poly_gcd(base, num, den)
            num, den = base.exquo(num, g), base.exquo(den, g)
        nd, u = base.normalize_unit(den) if self.nvars == 1 else (den, base.one())
        return num * u, nd

    def from_int(self, n):
        return RatFunc(self, self.base.constant(n), self.base.one())

    def coerce(self, x):
        if isinstance(x, RatFunc):
            return x
        return RatFunc(self, self.base.coerce(x), self.base.one())

    def is_zero(self, a):
        return a.num.is_zero()

    def is_unit(self, a):
        return not a.num.is_zero()

    def inv(self, a):
        return RatFunc(self, a.den, a.num)

    def fmt(self, a):
        return str(a)


def poly_gcd(ring: LaurentRing, a: Laurent, b: Laurent) -> Laurent:
    """Monic gcd in Q[t^±] (univariate)."""
    while b.terms:
        _, r = ring.euclid_divmod(a, b)
        a, b = b, r
    if not a.terms:
        return a
    g, _ = ring.normalize_unit(a)
    return g


# -- matrices ------------------------------------------------------------------------------------


class RingMatrix:
    """Dense matrix over a coefficient ring (row-vector convention)."""

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: Ring, rows: Sequence[Sequence], ncols: int | None = None):
        self.ring = ring
        self.rows = [[ring.coerce(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def _raw(cls, ring, rows, ncols):
        m = object.__new__(cls)
        m.ring = ring
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def zeros(cls, ring, nrows, ncols):
        z = ring.zero()
        return cls._raw(ring, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ring, n):
        z, o = ring.zero(), ring.one()
        return cls._raw(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def scalar(cls, ring, n, a):
        z = ring.zero()
        return cls._raw(ring, [[a if i == j else z for j in range(n)] for i in range(n)], n)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RingMatrix) and self.shape == other.shape and all(
            a == b for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2)
        )

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RingMatrix._raw(
            self.ring, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)], self.ncols
        )

    def __neg__(self):
        return RingMatrix._raw(self.ring, [[-a for a in r] for r in self.rows], self.ncols)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return RingMatrix._raw(self.ring, [[c * a for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        ring = self.ring
        zero = ring.zero()
        is_zero = ring.is_zero
        out = []
        cols = other.ncols
        for r in self.rows:
            acc = [zero] * cols
            for k, a in enumerate(r):
                if is_zero(a):
                    continue
                ok = other.rows[k]
                for j in range(cols):
                    b = ok[j]
                    if not is_zero(b):
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return RingMatrix._raw(ring, out, cols)

    def transpose(self):
        return RingMatrix._raw(self.ring, [list(c) for c in zip(*self.rows)] if self.rows else [], self.nrows)

    def is_zero(self):
        return all(self.ring.is_zero(a) for r in self.rows for a in r)

    def is_identity(self):
        if self.nrows != self.ncols:
            return False
        o = self.ring.one()
        return all((a == o) if i == j else self.ring.is_zero(a) for i, r in enumerate(self.rows) for j, a in enumerate(r))

    def map(self, f, ring=None):
        ring = ring or self.ring
        return RingMatrix._raw(ring, [[f(a) for a in r] for r in self.rows], self.ncols)

    def submatrix(self, rows, cols):
        return RingMatrix._raw(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def block_diagonal(self, copies: int):
        z = self.ring.zero()
        out = []
        for c in range(copies):
            for r in self.rows:
                out.append([z] * (c * self.ncols) + list(r) + [z] * ((copies - c - 1) * self.ncols))
        return RingMatrix._raw(self.ring, out, self.ncols * copies)

    def inverse(self):
        """Inverse by Gauss-Jordan; pivots must be units of the ring."""
        n = self.nrows
        if n != self.ncols:
            raise ValueError("square matrix required")
        ring = self.ring
        a = [list(r) + [ring.one() if i == j else ring.zero() for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = None
            for i in range(col, n):
                if not ring.is_zero(a[i][col]) and ring.is_unit(a[i][col]):
                    piv = i
                    break
            if piv is None:
                raise ArithmeticError("matrix is not invertible by unit pivoting over this ring")
            a[col], a[piv] = a[piv], a[col]
            pinv = ring.inv(a[col][col])
            a[col] = [pinv * x for x in a[col]]
            for i in range(n):
                if i != col and not ring.is_zero(a[i][col]):
                    f = a[i][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[col])]
        return RingMatrix._raw(ring, [r[n:] for r in a], n)

    def to_json(self):
        return {
            "ring": self.ring.name,
            "rows": self.nrows,
            "cols": self.ncols,
            "entries": [[self.ring.to_json(a)["terms"] for a in r] for r in self.rows],
        }

    def __str__(self):
        fmt = getattr(self.ring, "fmt", str)
        return "\n".join("[" + ", ".join(fmt(a) for a in r) + "]" for r in self.rows)

    __repr__ = __str__


def block_matrix(ring, blocks: Sequence[Sequence[RingMatrix]]) -> RingMatrix:
    rows = []
    for brow in blocks:
        for i in range(brow[0].nrows):
            row = []
            for b in brow:
                row.extend(b.rows[i])
            rows.append(row)
    ncols = sum(b.ncols for b in blocks[0]) if blocks else 0
    return RingMatrix._raw(ring, rows, ncols)


def ring_from_name(name: str, names=None) -> Ring:
    import re

    if name == "Integers":
        return Integers
    if name == "Rationals":
        return Rationals
    m = re.fullmatch(r"(LaurentInt|LaurentRat|Cyclotomic|CyclicAlgebra|RationalFunctions)\((\d+)\)", name)
    if not m:
        raise ValueError(f"unknown ring {name!r}")
    kind, k = m.group(1), int(m.group(2))
    if kind == "LaurentInt":
        return LaurentInt(k, names)
    if kind == "LaurentRat":
        return LaurentRat(k, names)
    if kind == "Cyclotomic":
        return Cyclotomic(k)
    if kind == "CyclicAlgebra":
        return CyclicAlgebra(k)
    return RationalFunctions(k, names)


def matrix_from_json(data, names=None) -> RingMatrix:
    ring = ring_from_name(data["ring"], names)
    rows = [[ring.from_json({"ring": data["ring"], "terms": t}) for t in r] for r in data["entries"]]
    return RingMatrix(ring, rows, ncols=data.get("cols"))


# -- polynomials in lambda, characteristic polynomials -----------------------------------------


class Poly:
    """Univariate polynomial in lambda over a commutative ring (coefficients low first)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: Sequence):
        self.ring = ring
        c = [ring.coerce(x) for x in coeffs]
        while c and ring.is_zero(c[-1]):
            c.pop()
        self.coeffs = c

    @classmethod
    def from_roots(cls, ring, roots) -> "Poly":
        """prod (lambda - r)."""
        p = cls(ring, [1])
        for r in roots:
            p = p * cls(ring, [-ring.coerce(r), 1])
        return p

    def degree(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.ring.zero()
        a = self.coeffs + [z] * (n - len(self.coeffs))
        b = other.coeffs + [z] * (n - len(other.coeffs))
        return Poly(self.ring, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return Poly(self.ring, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.ring, [x * self.ring.coerce(other) for x in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly(self.ring, [])
        out = [self.ring.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return Poly(self.ring, out)

    def __pow__(self, n):
        out = Poly(self.ring, [1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and len(self.coeffs) == len(other.coeffs) and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def map(self, f, ring=None) -> "Poly":
        return Poly(ring or self.ring, [f(c) for c in self.coeffs])

    def exquo(self, other: "Poly") -> "Poly":
        """Exact division by a polynomial whose leading coefficient is a unit or divides exactly."""
        ring = self.ring
        a = list(self.coeffs)
        b = other.coeffs
        if len(a) < len(b):
            if not a:
                return Poly(ring, [])
            raise ArithmeticError("inexact division")
        q = [ring.zero()] * (len(a) - len(b) + 1)
        for k in range(len(a) - len(b), -1, -1):
            c = ring.exquo(a[k + len(b) - 1], b[-1])
            q[k] = c
            for i, y in enumerate(b):
                a[k + i] = a[k + i] - c * y
        if any(not ring.is_zero(x) for x in a):
            raise ArithmeticError("inexact division")
        return Poly(ring, q)

    def __str__(self):
        fmt = getattr(self.ring, "fmt", str)
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if self.ring.is_zero(c):
                continue
            mono = "" if i == 0 else ("λ" if i == 1 else f"λ^{i}")
            cs = fmt(c)
            if mono and cs == "1":
                parts.append(mono)
            elif mono and cs == "-1":
                parts.append("-" + mono)
            elif mono:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"({cs})")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def char_poly(m: RingMatrix) -> Poly:
    """det(lambda*I - M) by the division-free Berkowitz algorithm."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("square matrix required")
    ring = m.ring
    if n == 0:
        return Poly(ring, [1])
    a = m.rows
    zero, one = ring.zero(), ring.one()
    # vector of coefficients, highest degree first
    vect = [one, -a[0][0]]
    for r in range(1, n):
        # Toeplitz column built from the leading r x r block
        R = [a[r][j] for j in range(r)]
        C = [a[i][r] for i in range(r)]
        A = [row[:r] for row in a[:r]]
        col = [one, -a[r][r]]
        Ak_C = C
        for _ in range(r):
            col.append(-sum((x * y for x, y in zip(R, Ak_C)), zero))
            Ak_C = [sum((A[i][j] * Ak_C[j] for j in range(r)), zero) for i in range(r)]
        # multiply lower-triangular Toeplitz (r+2)x(r+1) by vect
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(min(i + 1, len(vect))):
                s = s + col[i - j] * vect[j]
            new.append(s)
        vect = new
    return Poly(ring, list(reversed(vect)))


def det(m: RingMatrix):
    p = char_poly(m)
    c = p.coeffs[0] if p.coeffs else m.ring.zero()
    return c if m.nrows % 2 == 0 else -c


def bareiss_rank(m: RingMatrix) -> int:
    """Rank over the fraction field of an integral domain by fraction-free elimination."""
    ring = m.ring
    a = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    if ring.is_field:
        return _field_rank(ring, a, nr, nc)
    rank = 0
    prev = ring.one()
    for col in range(nc):
        piv = None
        best = None
        for i in range(rank, nr):
            x = a[i][col]
            if not ring.is_zero(x):
                size = len(getattr(x, "terms", ())) if hasattr(x, "terms") else abs(x) if isinstance(x, int) else 0
                if best is None or size < best:
                    piv, best = i, size
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nr):
            f = a[i][col]
            for j in range(col + 1, nc):
                v = p * a[i][j] - f * a[rank][j]
                a[i][j] = ring.exquo(v, prev) if not ring.is_zero(v) else v
            a[i][col] = ring.zero()
        prev = p
        rank += 1
        if rank == nr:
            break
    return rank


def _field_rank(ring, a, nr, nc) -> int:
    rank = 0
    for col in range(nc):
        piv = next((i for i in range(rank, nr) if not ring.is_zero(a[i][col])), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = ring.inv(a[rank][col])
        prow = a[rank]
        for i in range(rank + 1, nr):
            f = a[i][col]
            if ring.is_zero(f):
                continue
            f = f * inv
            row = a[i]
            for j in range(col, nc):
                if not ring.is_zero(prow[j]):
                    row[j] = row[j] - f * prow[j]
        rank += 1
        if rank == nr:
            break
    return rank


def rank(m: RingMatrix) -> int:
    """Rank over the ring's field of fractions."""
    if m.ring is Integers:
        from .kernels import snf_diagonal

        return len(snf_diagonal([list(r) for r in m.rows]))
    return bareiss_rank(m)


def field_nullspace(m: RingMatrix) -> RingMatrix:
    """Basis (as rows) of {x : x M = 0} over a field."""
    ring = m.ring
    if not ring.is_field:
        raise ArithmeticError("nullspace requires a field")
    # row-reduce the transpose: x M = 0  <=>  M^T x^T = 0
    a = [list(r) for r in m.transpose().rows]
    nr, nc = len(a), m.nrows
    pivots = []
    rk = 0
    for col in range(nc):
        piv = next((i for i in range(rk, nr) if not ring.is_zero(a[i][col])), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = ring.inv(a[rk][col])
        a[rk] = [inv * x for x in a[rk]]
        for i in range(nr):
            if i != rk and not ring.is_zero(a[i][col]):
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
        pivots.append(col)
        rk += 1
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fcol in free:
        v = [ring.zero()] * nc
        v[fcol] = ring.one()
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][fcol]
        basis.append(v)
    return RingMatrix(ring, basis, ncols=nc)


# -- specializations ---------------------------------------------------------------------------


class Specialization:
    """Ring homomorphism ZG -> Mat_m(S) given by generator images.

    ``images`` maps each generator (i, q) to an m x m RingMatrix (or a ring
    element when m = 1); generators not listed map to the identity.
    """

    def __init__(self, structure, ring: Ring, images: dict, m: int = 1, inverse_images: dict | None = None, check: bool = True):
        self.structure = structure
        self.ring = ring
        self.m = m
        self._img = {}
        self._inv = {}
        for g in structure.generators():
            x = images.get(g)
            if x is None:
                x = RingMatrix.identity(ring, m)
            elif not isinstance(x, RingMatrix):
                x = RingMatrix(ring, [[x]])
            if x.shape != (m, m):
                raise ValueError(f"image of {g} has wrong size")
            self._img[g] = x
            if inverse_images and g in inverse_images:
                y = inverse_images[g]
                y = y if isinstance(y, RingMatrix) else RingMatrix(ring, [[y]])
            else:
                try:
                    y = x.inverse()
                except ArithmeticError:
                    raise ValueError(f"image of x{g[0]}_{g[1]} is not invertible") from None
            if check and not (x @ y).is_identity():
                raise ValueError(f"inverse image of x{g[0]}_{g[1]} is wrong")
            self._img[g] = x
            self._inv[g] = y
        self._cache: dict = {}
        self._scalar = m == 1

    @property
    def is_character(self) -> bool:
        return self.m == 1

    def image(self, i: int, q: int, sign: int = 1) -> RingMatrix:
        return self._img[(i, q)] if sign > 0 else self._inv[(i, q)]

    def respects_relations(self) -> bool:
        """Check nu(x)^{-1} nu(y) nu(x) = nu(alpha(x)(y)) on generator pairs."""
        s = self.structure
        for (q, p, j), phi in s.actions.items():
            x, xi = self._img[(j, p)], self._inv[(j, p)]
            for i in range(1, s.exponents[q - 1] + 1):
                lhs = xi @ self._img[(i, q)] @ x
                comps = [()] * s.ell
                comps[q - 1] = phi.image_codes[i]
                if not lhs == self.comps_matrix(tuple(comps)):
                    return False
        return True

    def comps_matrix(self, comps: tuple) -> RingMatrix:
        """Image of a normal form (product along the word w_l ... w_1)."""
        hit = self._cache.get(comps)
        if hit is not None:
            return hit
        out = None
        for q in range(len(comps), 0, -1):
            for c in comps[q - 1]:
                g = self._img[(c, q)] if c > 0 else self._inv[(-c, q)]
                out = g if out is None else out @ g
        if out is None:
            out = RingMatrix.identity(self.ring, self.m)
        if len(self._cache) < 200_000:
            self._cache[comps] = out
        return out

    def word_matrix(self, raw) -> RingMatrix:
        out = RingMatrix.identity(self.ring, self.m)
        for i, q, s in raw:
            out = out @ self.image(i, q, s)
        return out

    def scalar_of(self, comps: tuple):
        """Image of a normal form under a character (m = 1).

        The target is commutative, so only exponent sums matter.
        """
        hit = self._cache.get(comps)
        if hit is not None:
            return hit.rows[0][0]
        out = self.ring.one()
        for q, w in enumerate(comps, 1):
            if not w:
                continue
            sums: dict = {}
            for c in w:
                sums[abs(c)] = sums.get(abs(c), 0) + (1 if c > 0 else -1)
            for i, e in sums.items():
                if e:
                    base = self._img[(i, q)].rows[0][0] if e > 0 else self._inv[(i, q)].rows[0][0]
                    out = out * _power(base, abs(e))
        if len(self._cache) < 200_000:
            self._cache[comps] = RingMatrix._raw(self.ring, [[out]], 1)
        return out


def _power(a, e: int):
    out = a
    for _ in range(e - 1):
        out = out * a
    return out


def specialize_element(r, nu: Specialization) -> RingMatrix:
    if r.structure is not nu.structure:
        raise ValueError("structure mismatch")
    out = RingMatrix.zeros(nu.ring, nu.m, nu.m)
    for comps, c in r.terms.items():
        out = out + nu.comps_matrix(comps).scale(nu.ring.coerce(c))
    return out


def specialize_matrix(M, nu: Specialization) -> RingMatrix:
    """Entrywise specialization of a GroupRingMatrix into (rows*m) x (cols*m)."""
    ring, m = nu.ring, nu.m
    z = ring.zero()
    rows = [[z] * (M.ncols * m) for _ in range(M.nrows * m)]
    for i, row in enumerate(M.rows):
        for j, x in row.items():
            if m == 1:
                acc = z
                for comps, c in x.terms.items():
                    acc = acc + nu.scalar_of(comps) * ring.coerce(c)
                rows[i][j] = acc
            else:
                blk = specialize_element(x, nu)
                for a in range(m):
                    for b in range(m):
                        rows[i * m + a][j * m + b] = blk.rows[a][b]
    return RingMatrix._raw(ring, rows, M.ncols * m)


def trivial_character(structure, ring: Ring = Integers) -> Specialization:
    return Specialization(structure, ring, {}, m=1)


def character(structure, ring: Ring, values: dict) -> Specialization:
    """Rank-one specialization from generator -> ring element."""
    return Specialization(structure, ring, {g: RingMatrix(ring, [[ring.coerce(v)]]) for g, v in values.items()}, m=1)


def cyclotomic_character(n: int, k: int, structure, generators=None) -> Specialization:
    """Send the chosen generators (default: all) to xi^k, xi a primitive n-th root of unity."""
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    gens = list(generators) if generators is not None else structure.generators()
    if k == 0:
        return trivial_character(structure, Rationals)
    d = n // gcd(n, k)
    ring = Cyclotomic(d)
    # xi^k for xi = exp(2 pi i / n) is a primitive d-th root: zeta_d^(k / gcd)
    z = ring.power(k // gcd(n, k))
    return character(structure, ring, {g: z for g in gens})
