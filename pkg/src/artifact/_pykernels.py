"""Pure-Python reference kernels.

Words are tuples of nonzero ints: ``+i`` is the generator x_i and ``-i`` its
inverse.  The compiled module ``_kernels`` exposes the same functions.
"""

from math import gcd


def free_reduce(seq):
    out = []
    for c in seq:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def concat_reduce(a, b):
    # a and b are already reduced, so cancellation only happens at the seam
    i = len(a)
    j = 0
    nb = len(b)
    while i > 0 and j < nb and a[i - 1] == -b[j]:
        i -= 1
        j += 1
    return a[:i] + b[j:]


def invert_word(w):
    return tuple(-c for c in reversed(w))


def substitute(word, images):
    """Image of ``word`` under the endomorphism x_i -> images[i] (1-based)."""
    out = []
    for c in word:
        if c > 0:
            piece = images[c]
        else:
            piece = [-d for d in reversed(images[-c])]
        for d in piece:
            if out and out[-1] == -d:
                out.pop()
            else:
                out.append(d)
    return tuple(out)


def _pivot(rows, cols):
    best = None
    for r, row in rows.items():
        for c, v in row.items():
            key = (abs(v), len(row) * len(cols[c]))
            if best is None or key < best[0]:
                best = (key, r, c)
                if key[0] == 1 and key[1] <= 1:
                    return r, c
    return best[1], best[2]


def snf_diagonal(matrix):
    """Nonzero diagonal of a diagonal form of an integer matrix.

    ``matrix`` is a list of rows of Python ints.  The result is not yet
    normalized into a divisibility chain; see ``homology.smith``.
    """
    rows = {}
    cols = {}
    for i, r in enumerate(matrix):
        d = {j: v for j, v in enumerate(r) if v}
        if d:
            rows[i] = d
            for j in d:
                cols.setdefault(j, set()).add(i)
    diag = []
    while rows:
        r, c = _pivot(rows, cols)
        while True:
            p = rows[r][c]
            # clear column c using row r
            dirty = False
            for i in list(cols[c]):
                if i == r:
                    continue
                q, rem = divmod(rows[i][c], p)
                _row_axpy(rows, cols, i, r, -q)
                if rem:
                    dirty = True
            # clear row r using column c
            for j in list(rows[r]):
                if j == c:
                    continue
                q, rem = divmod(rows[r][j], p)
                _col_axpy(rows, cols, j, c, -q)
                if rem:
                    dirty = True
            if not dirty:
                break
            # a smaller remainder appeared in row r or column c; pivot on it
            best = (abs(p), r, c)
            for i in cols[c]:
                v = abs(rows[i][c])
                if v < best[0]:
                    best = (v, i, c)
            for j, v in rows[r].items():
                if abs(v) < best[0]:
                    best = (abs(v), r, j)
            r, c = best[1], best[2]
        diag.append(abs(rows[r][c]))
        del rows[r]
        cols[c].discard(r)
        del cols[c]
    return diag


def _row_axpy(rows, cols, i, r, q):
    # row_i += q * row_r
    if not q:
        return
    ri = rows[i]
    for j, v in rows[r].items():
        nv = ri.get(j, 0) + q * v
        if nv:
            if j not in ri:
                cols.setdefault(j, set()).add(i)
            ri[j] = nv
        elif j in ri:
            del ri[j]
            cols[j].discard(i)
    if not ri:
        del rows[i]


def _col_axpy(rows, cols, j, c, q):
    # col_j += q * col_c
    if not q:
        return
    for i in list(cols[c]):
        ri = rows[i]
        nv = ri.get(j, 0) + q * ri[c]
        if nv:
            if j not in ri:
                cols.setdefault(j, set()).add(i)
            ri[j] = nv
        elif j in ri:
            del ri[j]
            cols[j].discard(i)
    if not cols.get(j):
        cols.pop(j, None)


def chain_normalize(diag):
    """Turn any list of nonzero diagonal entries into a divisibility chain."""
    d = sorted(abs(x) for x in diag)
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = d[i], d[j]
            if b % a:
                g = gcd(a, b)
                d[i], d[j] = g, a // g * b
    return d
