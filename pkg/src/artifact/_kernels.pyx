# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the functions in ``_pykernels``.

Word kernels work on tuples of Python ints; the Smith kernel works on a dense
int64 copy of the matrix and raises OverflowError when an entry would leave
the 64-bit range, so callers can fall back to arbitrary precision.
"""

from libc.stdlib cimport malloc, free, llabs
from libc.stdint cimport int64_t

cdef extern from *:
    bint __builtin_mul_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_sub_overflow(long long a, long long b, long long *res) nogil


def free_reduce(seq):
    cdef list out = []
    cdef Py_ssize_t n = 0
    cdef long c
    for c in seq:
        if n and <long>out[n - 1] == -c:
            out.pop()
            n -= 1
        else:
            out.append(c)
            n += 1
    return tuple(out)


def concat_reduce(tuple a, tuple b):
    cdef Py_ssize_t i = len(a), j = 0, nb = len(b)
    while i > 0 and j < nb and <long>a[i - 1] == -(<long>b[j]):
        i -= 1
        j += 1
    if i == len(a) and j == 0:
        return a + b
    return a[:i] + b[j:]


def invert_word(tuple w):
    cdef Py_ssize_t n = len(w), k
    cdef list out = [None] * n
    for k in range(n):
        out[k] = -(<long>w[n - 1 - k])
    return tuple(out)


def substitute(tuple word, images):
    cdef Py_ssize_t cap = 64, n = 0, k, m
    cdef long c, d
    cdef long *buf = <long *>malloc(cap * sizeof(long))
    cdef long *tmp
    cdef tuple piece
    try:
        for c in word:
            piece = images[c if c > 0 else -c]
            m = len(piece)
            if n + m > cap:
                while n + m > cap:
                    cap *= 2
                tmp = <long *>malloc(cap * sizeof(long))
                for k in range(n):
                    tmp[k] = buf[k]
                free(buf)
                buf = tmp
            if c > 0:
                for k in range(m):
                    d = piece[k]
                    if n and buf[n - 1] == -d:
                        n -= 1
                    else:
                        buf[n] = d
                        n += 1
            else:
                for k in range(m - 1, -1, -1):
                    d = -(<long>piece[k])
                    if n and buf[n - 1] == -d:
                        n -= 1
                    else:
                        buf[n] = d
                        n += 1
        return tuple([buf[k] for k in range(n)])
    finally:
        free(buf)


cdef inline long long _axpy(long long a, long long q, long long b) except? -1:
    # a - q*b with overflow detection
    cdef long long prod, res
    if __builtin_mul_overflow(q, b, &prod) or __builtin_sub_overflow(a, prod, &res):
        raise OverflowError("int64 overflow in Smith kernel")
    return res


def snf_diagonal(matrix):
    cdef Py_ssize_t nr = len(matrix)
    if nr == 0:
        return []
    cdef Py_ssize_t nc = len(matrix[0])
    if nc == 0:
        return []
    cdef long long *a = <long long *>malloc(nr * nc * sizeof(long long))
    cdef Py_ssize_t i, j, k = 0, bi, bj, lim
    cdef long long p, q, best, v, t
    cdef bint done
    cdef list diag = []
    try:
        for i in range(nr):
            row = matrix[i]
            for j in range(nc):
                a[i * nc + j] = row[j]
        lim = nr if nr < nc else nc
        while k < lim:
            best = 0
            bi = bj = -1
            for i in range(k, nr):
                for j in range(k, nc):
                    v = llabs(a[i * nc + j])
                    if v and (best == 0 or v < best):
                        best = v
                        bi = i
                        bj = j
                        if v == 1:
                            break
                if best == 1:
                    break
            if best == 0:
                break
            while True:
                if bi != k:
                    for j in range(nc):
                        t = a[k * nc + j]
                        a[k * nc + j] = a[bi * nc + j]
                        a[bi * nc + j] = t
                if bj != k:
                    for i in range(nr):
                        t = a[i * nc + k]
                        a[i * nc + k] = a[i * nc + bj]
                        a[i * nc + bj] = t
                p = a[k * nc + k]
                done = True
                for i in range(k + 1, nr):
                    v = a[i * nc + k]
                    if v:
                        q = v // p
                        if q:
                            for j in range(k, nc):
                                if a[k * nc + j]:
                                    a[i * nc + j] = _axpy(a[i * nc + j], q, a[k * nc + j])
                        if a[i * nc + k]:
                            done = False
                for j in range(k + 1, nc):
                    v = a[k * nc + j]
                    if v:
                        q = v // p
                        if q:
                            for i in range(k, nr):
                                if a[i * nc + k]:
                                    a[i * nc + j] = _axpy(a[i * nc + j], q, a[i * nc + k])
                        if a[k * nc + j]:
                            done = False
                if done:
                    break
                best = llabs(p)
                bi = bj = k
                for i in range(k + 1, nr):
                    v = llabs(a[i * nc + k])
                    if v and v < best:
                        best = v
                        bi = i
                        bj = k
                for j in range(k + 1, nc):
                    v = llabs(a[k * nc + j])
                    if v and v < best:
                        best = v
                        bi = k
                        bj = j
            diag.append(llabs(a[k * nc + k]))
            k += 1
        return diag
    finally:
        free(a)
