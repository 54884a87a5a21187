"""Built-in iterated semidirect products."""

from __future__ import annotations

import re
from functools import lru_cache

from .freegroup import FreeAutomorphism, FreeWord, compose
from .kernels import concat_reduce, free_reduce, invert_word
from .semidirect import IteratedProduct, validate


def nielsen_inverse(rank: int, images) -> list:
    """Inverse images of an automorphism by greedy Nielsen reduction.

    Keeps words W_i with phi(W_i) = U_i and shortens the U_i by elementary
    moves until each is a single letter.  Raises ValueError if the greedy
    search stalls (the images need not define an automorphism).
    """
    U = [tuple(c) for c in images]
    W = [(i,) for i in range(1, rank + 1)]
    for _ in range(10_000):
        if all(len(u) == 1 for u in U):
            break
        best = None
        for i in range(rank):
            for j in range(rank):
                if i == j:
                    continue
                for e in (1, -1):
                    uj = U[j] if e > 0 else invert_word(U[j])
                    for side in (0, 1):
                        cand = concat_reduce(U[i], uj) if side else concat_reduce(uj, U[i])
                        gain = len(U[i]) - len(cand)
                        if gain > 0 and (best is None or gain > best[0]):
                            best = (gain, i, j, e, side, cand)
        if best is None:
            raise ValueError("Nielsen reduction stalled; supply inverse images explicitly")
        _, i, j, e, side, cand = best
        wj = W[j] if e > 0 else invert_word(W[j])
        U[i] = cand
        W[i] = concat_reduce(W[i], wj) if side else concat_reduce(wj, W[i])
    inv = [None] * rank
    for u, w in zip(U, W):
        if len(u) != 1:
            raise ValueError("not an automorphism")
        c = u[0]
        inv[abs(c) - 1] = w if c > 0 else invert_word(w)
    if any(x is None for x in inv):
        raise ValueError("not an automorphism")
    return inv


def auto_from_images(rank: int, images) -> FreeAutomorphism:
    codes = [FreeWord.parse(w, rank).code if isinstance(w, str) else free_reduce(w) for w in images]
    return FreeAutomorphism(rank, codes, nielsen_inverse(rank, codes))


# -- Artin action ---------------------------------------------------------------------


def artin_generator(rank: int, i: int, sign: int = 1) -> FreeAutomorphism:
    """sigma_i^{±1} acting on F_rank (only x_i, x_{i+1} move)."""
    if not 1 <= i < rank + 1 or i + 1 > rank:
        raise ValueError(f"sigma_{i} does not act on F_{rank}")
    img = [(k,) for k in range(1, rank + 1)]
    inv = [(k,) for k in range(1, rank + 1)]
    img[i - 1] = (i, i + 1, -i)
    img[i] = (i,)
    inv[i - 1] = (i + 1,)
    inv[i] = (-(i + 1), i, i + 1)
    if sign < 0:
        img, inv = inv, img
    return FreeAutomorphism(rank, img, inv, check=False)


def artin_partial(rank: int, ell: int, i: int, sign: int = 1) -> FreeAutomorphism:
    """sigma_i on the first ``ell`` generators of F_rank, identity on the rest."""
    if not 1 <= i < ell <= rank:
        raise ValueError("bad braid generator")
    return artin_generator(rank, i, sign)


def artin_word(rank: int, letters) -> FreeAutomorphism:
    """Right action of a braid word: the first letter is applied first."""
    out = FreeAutomorphism.identity(rank)
    for i, s in letters:
        out = compose(artin_generator(rank, i, s), out)
    return out


def pure_braid_word(r: int, s: int) -> list:
    """Braid word of A_{r,s} = sigma_{s-1}...sigma_{r+1} sigma_r^2 sigma_{r+1}^{-1}...sigma_{s-1}^{-1}."""
    up = [(k, 1) for k in range(s - 1, r, -1)]
    down = [(k, -1) for k in range(r + 1, s)]
    return up + [(r, 1), (r, 1)] + down


def _pb_table(r: int, s: int, j: int):
    """Images of A_{i,j} (i < j) under conjugation by A_{r,s}, s < j, as codes in F_{j-1}."""
    out = []
    for i in range(1, j):
        if i < r or i > s:
            out.append((i,))
        elif i == s:
            out.append((r, i, -r))
        elif i == r:
            out.append((r, s, i, -s, -r))
        else:
            # [A_rj, A_sj] A_ij [A_rj, A_sj]^{-1} with [a, b] = a b a^{-1} b^{-1}
            comm = (r, s, -r, -s)
            out.append(free_reduce(comm + (i,) + invert_word(comm)))
    return out


@lru_cache(maxsize=None)
def pure_braid_action(r: int, s: int, j: int) -> FreeAutomorphism:
    """Action of A_{r,s} on F_{j-1} = <A_{1,j}, ..., A_{j-1,j}>."""
    rank = j - 1
    img = _pb_table(r, s, j)
    inv = artin_word(rank, [(i, -e) for i, e in reversed(pure_braid_word(r, s))]).image_codes[1:]
    return FreeAutomorphism(rank, img, inv)


def _pnl_actions(n: int, ell: int) -> dict:
    actions = {}
    for q in range(2, n - ell + 1):
        j = ell + q
        for p in range(1, q):
            s = ell + p
            for r in range(1, s):
                actions[(q, p, r)] = pure_braid_action(r, s, j)
    return actions


@lru_cache(maxsize=None)
def pnl(n: int, ell: int) -> IteratedProduct:
    """P_{n,l} = F_{n-1} ⋊ ... ⋊ F_l; factor q has generators A_{i,l+q}."""
    if not 1 <= ell < n:
        raise ValueError("need 1 <= l < n")
    exps = list(range(ell, n))
    return IteratedProduct(exps, _pnl_actions(n, ell), name=f"pnl({n},{ell})")


@lru_cache(maxsize=None)
def pure_braid(ell: int) -> IteratedProduct:
    """P_l = F_{l-1} ⋊ ... ⋊ F_1."""
    if ell < 2:
        raise ValueError("need l >= 2")
    return IteratedProduct(range(1, ell), _pnl_actions(ell, 1), name=f"pure_braid({ell})")


def pb_generator(i: int, j: int, ell: int = 1) -> tuple:
    """Structure generator (index, factor) of A_{i,j} inside P_{n,l}."""
    if not (1 <= i < j and j > ell):
        raise ValueError(f"A{i},{j} is not a generator of P_(n,{ell})")
    return (i, j - ell)


def direct_product(*exponents: int) -> IteratedProduct:
    return IteratedProduct(exponents, {}, name=f"direct_product({', '.join(map(str, exponents))})")


def _auto(rank: int, images, inverse=None) -> FreeAutomorphism:
    if inverse is None:
        return auto_from_images(rank, images)
    return FreeAutomorphism(
        rank, [FreeWord.parse(w, rank) for w in images], [FreeWord.parse(w, rank) for w in inverse]
    )


def b3() -> IteratedProduct:
    """B_3^1 = F_2 ⋊ F_1 with x_{1,1} = sigma_1 acting by x12 -> x22, x22 -> x12^-1 x22."""
    return IteratedProduct([1, 2], {(2, 1, 1): _auto(2, ["x2", "x1^-1 x2"], ["x1 x2^-1", "x1"])}, name="b3()")


def b4_1() -> IteratedProduct:
    """B_4^1 = F_3 ⋊ F_2 ⋊ F_1."""
    actions = {
        (2, 1, 1): _auto(2, ["x2", "x1^-1 x2"], ["x1 x2^-1", "x1"]),
        (3, 1, 1): _auto(3, ["x1 x2 x1^-1", "x1", "x3"], ["x2", "x2^-1 x1 x2", "x3"]),
        (3, 2, 1): _auto(3, ["x1 x3 x1^-1", "x1", "x3^-1 x2 x3"]),
        (3, 2, 2): _auto(3, ["x1 x2 x1^-1", "x3", "x3^-1 x1 x3"]),
    }
    return IteratedProduct([1, 2, 3], actions, name="b4_1()")


def p3_milnor() -> IteratedProduct:
    """P_3 as F_4 ⋊ F_1 with t_1 = A12^-1 A13, t_2 = A12^-1 A23, t_3 = A13 A12^-1, t_4 = A23 A12^-1."""
    mu = _auto(4, ["x1 x4 x2^-1", "x1 x4 x3^-1", "x1", "x2"])
    return IteratedProduct([1, 4], {(2, 1, 1): mu}, name="p3_milnor()")


def pbD3() -> IteratedProduct:
    """Pure braid group of type D_3 as F_5 ⋊ F_2 ⋊ F_1 (the bottom is P_3)."""
    actions = {
        (2, 1, 1): pure_braid_action(1, 2, 3),
        (3, 1, 1): _auto(
            5,
            ["x1", "x2 x4 x5^-1 x3^-1 x2 x1", "x2 x4 x5^-1 x1", "x1^-1 x2^-1 x3 x5", "x1^-1 x5 x4^-1 x2^-1 x3 x5"],
        ),
        (3, 2, 1): _auto(
            5, ["x2^-1 x5", "x2", "x3 x1 x5^-1 x2", "x2^-1 x4 x1^-1 x5", "x2^-1 x5 x1^-1 x5"]
        ),
        (3, 2, 2): _auto(5, ["x3^-1 x1 x4", "x3^-1 x2 x4", "x3", "x4", "x5"]),
    }
    return IteratedProduct([1, 2, 5], actions, name="pbD3()")


def b4_prime() -> IteratedProduct:
    """Commutator subgroup of B_4 as F_2 ⋊ F_2."""
    actions = {
        (2, 1, 1): _auto(2, ["x1 x2^-1 x1 x1", "x1"]),
        (2, 1, 2): _auto(2, ["x1 x2^-1 x1 x1 x1", "x1 x2^-1 x1 x1 x1 x1"]),
    }
    return IteratedProduct([2, 2], actions, name="b4_prime()")


BUILTINS = {
    "pure_braid": pure_braid,
    "pnl": pnl,
    "b3": b3,
    "b4_1": b4_1,
    "p3_milnor": p3_milnor,
    "pbD3": pbD3,
    "b4_prime": b4_prime,
    "direct_product": direct_product,
}


def builtin(spec: str) -> IteratedProduct:
    """Resolve ``name(args)`` such as ``pure_braid(4)`` or ``pnl(5,3)``."""
    m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", spec)
    if not m or m.group(1) not in BUILTINS:
        raise ValueError(f"unknown builtin group {spec!r}; known: {', '.join(sorted(BUILTINS))}")
    args = [int(a) for a in (m.group(2) or "").replace(" ", "").split(",") if a]
    return BUILTINS[m.group(1)](*args)


def load_group_file(path) -> IteratedProduct:
    """Read the key/value group description (TOML syntax)."""
    try:
        import tomllib  # type: ignore[import-not-found]
    except ImportError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return structure_from_dict(data)


def structure_from_dict(data: dict) -> IteratedProduct:
    exps = [int(d) for d in data["exponents"]]
    actions = {}
    images = _flatten(data.get("action", {}))
    inverses = _flatten(data.get("action_inv", {}))
    for key, words in images.items():
        q, p, j = key
        if key not in inverses:
            raise ValueError(f"missing action_inv.{q}.{p}.{j}")
        rank = exps[q - 1]
        img = [_factor_word(w, q, rank) for w in words]
        inv = [_factor_word(w, q, rank) for w in inverses[key]]
        actions[key] = FreeAutomorphism(rank, img, inv)
    return IteratedProduct(exps, actions, name=data.get("name", ""))


def _flatten(tree) -> dict:
    out = {}
    for q, sub in tree.items():
        for p, sub2 in sub.items():
            for j, words in sub2.items():
                out[(int(q), int(p), int(j))] = words
    return out


_FTOK = re.compile(r"^x(\d+)_(\d+)(?:\^(-?\d+))?$")


def _factor_word(text: str, q: int, rank: int) -> tuple:
    codes = []
    for tok in text.split():
        if tok == "1":
            continue
        m = _FTOK.match(tok)
        if not m or int(m.group(2)) != q:
            raise ValueError(f"token {tok!r} is not a generator of factor {q}")
        i = int(m.group(1))
        e = int(m.group(3)) if m.group(3) else 1
        codes.extend([i if e > 0 else -i] * abs(e))
    return FreeWord(rank, codes).code


def check_builtin(structure: IteratedProduct) -> IteratedProduct:
    rep = validate(structure)
    if not rep.valid:
        raise ValueError(str(rep))
    return structure
