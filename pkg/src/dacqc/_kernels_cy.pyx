# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled Pauli pair-product kernel.

Same contract as dacqc._kernels_py.pair_products; see dacqc.pauli for the
mask encoding and the phase rule.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def pair_products(xs1, zs1, cs1, xs2, zs2, cs2, bint anti_only):
    cdef const cnp.uint64_t[::1] x1 = np.ascontiguousarray(xs1, dtype=np.uint64)
    cdef const cnp.uint64_t[::1] z1 = np.ascontiguousarray(zs1, dtype=np.uint64)
    cdef const double complex[::1] c1 = np.ascontiguousarray(cs1, dtype=np.complex128)
    cdef const cnp.uint64_t[::1] x2 = np.ascontiguousarray(xs2, dtype=np.uint64)
    cdef const cnp.uint64_t[::1] z2 = np.ascontiguousarray(zs2, dtype=np.uint64)
    cdef const double complex[::1] c2 = np.ascontiguousarray(cs2, dtype=np.complex128)
    cdef Py_ssize_t n1 = x1.shape[0]
    cdef Py_ssize_t n2 = x2.shape[0]
    cdef Py_ssize_t i, j, m

    if n1 == 0 or n2 == 0:
        empty = np.empty(0, np.uint64)
        return empty, empty.copy(), np.empty(0, np.complex128)

    cdef Py_ssize_t total
    if anti_only:
        total = 0
        with nogil:
            for i in range(n1):
                for j in range(n2):
                    if (__builtin_popcountll(x1[i] & z2[j])
                            + __builtin_popcountll(z1[i] & x2[j])) & 1:
                        total += 1
    else:
        total = n1 * n2

    out_x = np.empty(total, np.uint64)
    out_z = np.empty(total, np.uint64)
    out_c = np.empty(total, np.complex128)
    cdef cnp.uint64_t[::1] ox = out_x
    cdef cnp.uint64_t[::1] oz = out_z
    cdef cnp.complex128_t[::1] oc = out_c

    cdef unsigned long long xa, za, xb, zb, xc, zc
    cdef int k
    cdef double complex coeff, scale
    cdef double complex ipow[4]
    ipow[0] = 1.0
    ipow[1] = 1.0j
    ipow[2] = -1.0
    ipow[3] = -1.0j
    scale = 2.0 if anti_only else 1.0

    m = 0
    with nogil:
        for i in range(n1):
            xa = x1[i]
            za = z1[i]
            for j in range(n2):
                xb = x2[j]
                zb = z2[j]
                if anti_only:
                    if not ((__builtin_popcountll(xa & zb)
                             + __builtin_popcountll(za & xb)) & 1):
                        continue
                xc = xa ^ xb
                zc = za ^ zb
                k = (__builtin_popcountll(xa & za)
                     + __builtin_popcountll(xb & zb)
                     - __builtin_popcountll(xc & zc)
                     + 2 * __builtin_popcountll(za & xb)) & 3
                coeff = c1[i] * c2[j] * ipow[k] * scale
                ox[m] = xc
                oz[m] = zc
                oc[m] = coeff
                m += 1
    return out_x, out_z, out_c
