"""Symbolic algebra over sums of Pauli strings.

Encoding
--------
A Pauli string on ``n_qubits`` sites is a pair of bit masks ``(x_mask,
z_mask)``; bit ``i`` of each mask describes site ``i``:

    (0, 0) -> I    (1, 0) -> X    (0, 1) -> Z    (1, 1) -> Y

with the convention ``Y = [[0, -i], [i, 0]]``, i.e. ``P(x, z) = i**(x & z)
X**x Z**z`` per site. Phases are never stored on strings; they live in the
complex coefficients of :class:`PauliSum`.

Multiplication phase (derived once here, tested against dense 2x2
products): writing ``P1 P2 = i**k P3`` with ``x3 = x1 ^ x2``,
``z3 = z1 ^ z2``,

    k = popcount(x1 & z1) + popcount(x2 & z2) - popcount(x3 & z3)
        + 2 * popcount(z1 & x2)          (mod 4).

Two strings commute iff ``popcount(x1 & z2) + popcount(z1 & x2)`` is even
(symplectic inner product); for anticommuting strings ``[P, Q] = 2 P Q``.

All values are immutable after construction and all operations are pure
functions, so they can be shared freely across threads.

The pairwise product accumulation is the hot loop of the nested-commutator
expansion; it is served by a compiled kernel when available, with a numpy
fallback. Set ``DACQC_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from typing import Dict, Iterable, Iterator, Tuple

import numpy as np

if os.environ.get("DACQC_PURE_PYTHON"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels_cy as _kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _kernels

KERNEL_BACKEND: str = _kernels.BACKEND

MAX_QUBITS = 64
PRUNE_TOL = 1e-12

_AXIS_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_AXIS = {v: k for k, v in _AXIS_BITS.items()}


def _check_n_qubits(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


def _check_same_size(a, b) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"operand size mismatch: {a.n_qubits} vs {b.n_qubits}")


def mul_phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent k of i**k in P1 P2 = i**k P3 (see module docstring)."""
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    k = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        - (x3 & z3).bit_count()
        + 2 * (z1 & x2).bit_count()
    )
    return k & 3


class PauliString:
    """A single Pauli string identified by its (x_mask, z_mask) pair."""

    __slots__ = ("n_qubits", "x_mask", "z_mask")

    def __init__(self, n_qubits: int, x_mask: int, z_mask: int):
        _check_n_qubits(n_qubits)
        limit = 1 << n_qubits
        if not (0 <= x_mask < limit and 0 <= z_mask < limit):
            raise ValueError("mask exceeds n_qubits bits")
        self.n_qubits = n_qubits
        self.x_mask = x_mask
        self.z_mask = z_mask

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from a site string like "IXZY" (site 0 is the first char)."""
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _AXIS_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    def to_label(self) -> str:
        return "".join(
            _BITS_AXIS[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.n_qubits)
        )

    @property
    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def commutes_with(self, other: "PauliString") -> bool:
        _check_same_size(self, other)
        k = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return k % 2 == 0

    def multiply(self, other: "PauliString") -> Tuple[complex, "PauliString"]:
        """Return (phase, R) with phase * R = self * other as matrices."""
        _check_same_size(self, other)
        k = mul_phase_exponent(self.x_mask, self.z_mask, other.x_mask, other.z_mask)
        phase = (1.0, 1.0j, -1.0, -1.0j)[k]
        return phase, PauliString(self.n_qubits, self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and self.n_qubits == other.n_qubits
            and self.x_mask == other.x_mask
            and self.z_mask == other.z_mask
        )

    def __hash__(self) -> int:
        return hash((self.n_qubits, self.x_mask, self.z_mask))

    def __repr__(self) -> str:
        return f"PauliString({self.to_label()!r})"


def multiply(p: PauliString, q: PauliString) -> Tuple[complex, PauliString]:
    """Module-level alias for :meth:`PauliString.multiply`."""
    return p.multiply(q)


def _canonicalize(xs, zs, cs, tol: float):
    """Sort by (z_mask, x_mask), merge duplicates, prune small coefficients."""
    if xs.shape[0] == 0:
        return xs, zs, cs
    order = np.lexsort((xs, zs))
    xs = xs[order]
    zs = zs[order]
    cs = cs[order]
    starts = np.empty(xs.shape[0], dtype=bool)
    starts[0] = True
    starts[1:] = (xs[1:] != xs[:-1]) | (zs[1:] != zs[:-1])
    idx = np.flatnonzero(starts)
    sums = np.add.reduceat(cs, idx)
    keep = np.abs(sums) >= tol
    return (
        np.ascontiguousarray(xs[idx][keep]),
        np.ascontiguousarray(zs[idx][keep]),
        np.ascontiguousarray(sums[keep]),
    )


class PauliSum:
    """A pruned, canonically ordered sum of Pauli strings.

    Terms are held as parallel arrays (x masks, z masks, complex
    coefficients) sorted lexicographically by (z_mask, x_mask). Instances
    are frozen after construction.
    """

    __slots__ = ("n_qubits", "_xs", "_zs", "_cs")

    def __init__(self, n_qubits: int, xs=None, zs=None, cs=None, *, _canonical: bool = False):
        _check_n_qubits(n_qubits)
        if xs is None:
            xs = np.empty(0, np.uint64)
            zs = np.empty(0, np.uint64)
            cs = np.empty(0, np.complex128)
        else:
            xs = np.asarray(xs, dtype=np.uint64)
            zs = np.asarray(zs, dtype=np.uint64)
            cs = np.asarray(cs, dtype=np.complex128)
        if not _canonical:
            xs, zs, cs = _canonicalize(xs, zs, cs, PRUNE_TOL)
        for arr in (xs, zs, cs):
            arr.setflags(write=False)
        self.n_qubits = n_qubits
        self._xs = xs
        self._zs = zs
        self._cs = cs

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[Tuple[object, complex]]) -> "PauliSum":
        """Build from (string_spec, coeff) pairs.

        ``string_spec`` may be a label like "IXZY", a PauliString, or an
        (x_mask, z_mask) pair.
        """
        xs, zs, cs = [], [], []
        for spec, coeff in terms:
            if isinstance(spec, PauliString):
                if spec.n_qubits != n_qubits:
                    raise ValueError("term size mismatch")
                x, z = spec.x_mask, spec.z_mask
            elif isinstance(spec, str):
                p = PauliString.from_label(spec)
                if p.n_qubits != n_qubits:
                    raise ValueError("term size mismatch")
                x, z = p.x_mask, p.z_mask
            else:
                x, z = spec
            xs.append(x)
            zs.append(z)
            cs.append(coeff)
        return cls(n_qubits, np.array(xs, np.uint64), np.array(zs, np.uint64), np.array(cs, np.complex128))

    # -- inspection --------------------------------------------------------

    @property
    def num_terms(self) -> int:
        return int(self._xs.shape[0])

    @property
    def x_masks(self) -> np.ndarray:
        """Read-only array of per-term X bit masks."""
        return self._xs

    @property
    def z_masks(self) -> np.ndarray:
        """Read-only array of per-term Z bit masks."""
        return self._zs

    @property
    def coefficients(self) -> np.ndarray:
        """Read-only array of per-term complex coefficients."""
        return self._cs

    def items(self) -> Iterator[Tuple[PauliString, complex]]:
        for x, z, c in zip(self._xs, self._zs, self._cs):
            yield PauliString(self.n_qubits, int(x), int(z)), complex(c)

    def coefficient(self, spec) -> complex:
        if isinstance(spec, str):
            spec = PauliString.from_label(spec)
        matches = np.flatnonzero((self._xs == np.uint64(spec.x_mask)) & (self._zs == np.uint64(spec.z_mask)))
        return complex(self._cs[matches[0]]) if matches.size else 0.0 + 0.0j

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(self._cs.imag) <= tol))

    def is_antihermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(self._cs.real) <= tol))

    def weight_histogram(self) -> Dict[int, int]:
        """Count distinct strings grouped by weight (popcount of x|z)."""
        if self.num_terms == 0:
            return {}
        w = np.bitwise_count(self._xs | self._zs)
        values, counts = np.unique(w, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def norm_hs(self) -> float:
        """sqrt(Tr{A^dag A} / 2^N) = l2 norm of the coefficient vector."""
        return float(np.linalg.norm(self._cs))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        _check_same_size(self, other)
        return PauliSum(
            self.n_qubits,
            np.concatenate([self._xs, other._xs]),
            np.concatenate([self._zs, other._zs]),
            np.concatenate([self._cs, other._cs]),
        )

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PauliSum":
        if self.num_terms == 0 or scalar == 0:
            return PauliSum.zero(self.n_qubits)
        return PauliSum(self.n_qubits, self._xs, self._zs, self._cs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def product(self, other: "PauliSum") -> "PauliSum":
        """Operator product AB as a PauliSum."""
        _check_same_size(self, other)
        xs, zs, cs = _kernels.pair_products(
            self._xs, self._zs, self._cs, other._xs, other._zs, other._cs, False
        )
        return PauliSum(self.n_qubits, xs, zs, cs)

    def commutator(self, other: "PauliSum") -> "PauliSum":
        """[A, B] = AB - BA, pruned."""
        _check_same_size(self, other)
        xs, zs, cs = _kernels.pair_products(
            self._xs, self._zs, self._cs, other._xs, other._zs, other._cs, True
        )
        return PauliSum(self.n_qubits, xs, zs, cs)

    def hs_inner(self, other: "PauliSum") -> complex:
        """Tr{A^dag B} / 2^N = sum over shared strings of conj(a) * b."""
        _check_same_size(self, other)
        if self.num_terms == 0 or other.num_terms == 0:
            return 0.0 + 0.0j
        lookup = {
            (int(z), int(x)): c
            for x, z, c in zip(other._xs, other._zs, other._cs)
        }
        total = 0.0 + 0.0j
        for x, z, c in zip(self._xs, self._zs, self._cs):
            b = lookup.get((int(z), int(x)))
            if b is not None:
                total += np.conj(c) * b
        return complex(total)

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n_qubits == other.n_qubits
            and np.array_equal(self._xs, other._xs)
            and np.array_equal(self._zs, other._zs)
            and np.array_equal(self._cs, other._cs)
        )

    def approx_eq(self, other: "PauliSum", tol: float = 1e-10) -> bool:
        return (self - other).norm_hs() <= tol

    def __repr__(self) -> str:
        parts = [f"({c:.6g})*{p.to_label()}" for p, c in list(self.items())[:4]]
        if self.num_terms > 4:
            parts.append("...")
        return f"PauliSum[{self.n_qubits}q, {self.num_terms} terms: {' + '.join(parts)}]"

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> list:
        """Canonically ordered list of {"pauli", "re", "im"} entries."""
        return [
            {"pauli": p.to_label(), "re": float(c.real), "im": float(c.imag)}
            for p, c in self.items()
        ]

    @classmethod
    def from_json_obj(cls, n_qubits: int, obj: list) -> "PauliSum":
        return cls.from_terms(
            n_qubits, [(entry["pauli"], entry["re"] + 1j * entry["im"]) for entry in obj]
        )


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return a.commutator(b)


def hs_inner(a: PauliSum, b: PauliSum) -> complex:
    return a.hs_inner(b)


def weight_histogram(a: PauliSum) -> Dict[int, int]:
    return a.weight_histogram()


def nested_commutator(h: PauliSum, dh: PauliSum, n: int) -> PauliSum:
    """n-fold bracket: level 0 is dh itself, level n is [h, level n-1]."""
    if n < 0:
        raise ValueError("bracket level must be non-negative")
    result = dh
    for _ in range(n):
        result = h.commutator(result)
    return result


def nested_commutators_upto(h: PauliSum, dh: PauliSum, n: int) -> list:
    """[C_0 ... C_n] with C_0 = dh, C_k = [h, C_{k-1}]; avoids recomputation."""
    out = [dh]
    for _ in range(n):
        out.append(h.commutator(out[-1]))
    return out
