"""Numpy implementation of the Pauli pair-product kernel.

Drop-in fallback for the compiled extension ``dacqc._kernels_cy``; both
expose ``pair_products`` with the same array-in/array-out contract. The
mask encoding and the phase rule are documented in ``dacqc.pauli``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# i**k lookup for the product phase
_I_POW = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)

# pair products evaluated per block, bounds peak memory of the broadcasts
_BLOCK_PAIRS = 1 << 21


def pair_products(xs1, zs1, cs1, xs2, zs2, cs2, anti_only):
    """All pairwise products of two Pauli term lists, unreduced.

    Returns raw ``(xs, zs, coeffs)`` arrays with one entry per kept pair.
    With ``anti_only`` set, pairs of commuting strings are dropped and the
    coefficients doubled, which turns the accumulation into a commutator:
    [P, Q] = 2 P Q exactly when P and Q anticommute, and 0 otherwise.
    """
    n1 = xs1.shape[0]
    n2 = xs2.shape[0]
    if n1 == 0 or n2 == 0:
        empty = np.empty(0, np.uint64)
        return empty, empty.copy(), np.empty(0, np.complex128)
    out_x, out_z, out_c = [], [], []
    rows = max(1, _BLOCK_PAIRS // n2)
    for lo in range(0, n1, rows):
        x1 = xs1[lo : lo + rows, None]
        z1 = zs1[lo : lo + rows, None]
        c1 = cs1[lo : lo + rows, None]
        x3 = x1 ^ xs2[None, :]
        z3 = z1 ^ zs2[None, :]
        k = (
            np.bitwise_count(x1 & z1).astype(np.int64)
            + np.bitwise_count(xs2[None, :] & zs2[None, :]).astype(np.int64)
            - np.bitwise_count(x3 & z3).astype(np.int64)
            + 2 * np.bitwise_count(z1 & xs2[None, :]).astype(np.int64)
        )
        coeff = (c1 * cs2[None, :]) * _I_POW[k & 3]
        if anti_only:
            odd = ((np.bitwise_count(x1 & zs2[None, :]) + np.bitwise_count(z1 & xs2[None, :])) & 1).astype(bool)
            out_x.append(x3[odd])
            out_z.append(z3[odd])
            out_c.append(2.0 * coeff[odd])
        else:
            out_x.append(x3.reshape(-1))
            out_z.append(z3.reshape(-1))
            out_c.append(coeff.reshape(-1))
    return np.concatenate(out_x), np.concatenate(out_z), np.concatenate(out_c)
