# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Gaussian elimination over GF(p) for primes p < 2**62.

Drop-in replacement for the pure-Python ``rref`` used by
:mod:`loopcrystal._linalg`; products are taken through unsigned 128-bit
intermediates so 61-bit moduli are exact.
"""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline u64 mulmod(u64 a, u64 b, u64 p) noexcept:
    return <u64>((<u128>a * <u128>b) % <u128>p)


cdef u64 powmod(u64 a, u64 e, u64 p) noexcept:
    cdef u64 r = 1
    a = a % p
    while e:
        if e & 1:
            r = mulmod(r, a, p)
        a = mulmod(a, a, p)
        e >>= 1
    return r


def rref_mod(rows, p_obj):
    """Reduced row echelon form mod p; returns ``(row_lists, pivot_columns)``."""
    cdef u64 p = <u64> p_obj
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t ncols = 0
    if nrows:
        ncols = len(rows[0])
    if nrows == 0 or ncols == 0:
        return [list(r) for r in rows], []

    cdef u64 *m = <u64 *> malloc(nrows * ncols * sizeof(u64))
    if m == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, j, r, c, piv
    cdef u64 inv, f, pr
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                m[i * ncols + j] = <u64> (row[j] % p_obj)

        pivots = []
        r = 0
        for c in range(ncols):
            piv = -1
            for i in range(r, nrows):
                if m[i * ncols + c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(ncols):
                    m[r * ncols + j], m[piv * ncols + j] = \
                        m[piv * ncols + j], m[r * ncols + j]
            inv = powmod(m[r * ncols + c], p - 2, p)
            for j in range(ncols):
                m[r * ncols + j] = mulmod(m[r * ncols + j], inv, p)
            for i in range(nrows):
                if i != r:
                    f = m[i * ncols + c]
                    if f != 0:
                        for j in range(ncols):
                            pr = mulmod(f, m[r * ncols + j], p)
                            m[i * ncols + j] = (m[i * ncols + j] + p - pr) % p
            pivots.append(c)
            r += 1
            if r == nrows:
                break

        out = [[m[i * ncols + j] for j in range(ncols)] for i in range(nrows)]
        return out, pivots
    finally:
        free(m)
