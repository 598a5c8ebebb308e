"""Variational coefficients for approximate adiabatic gauge potentials.

The gauge potential at expansion order l is the anti-Hermitian combination
A = i * sum_k alpha_k C_{2k-1}, k = 1..l, built from nested commutators
C_0 = dH, C_n = [H, C_{n-1}]. The real coefficients alpha minimize the
Hilbert-Schmidt action of G(alpha) = C_0 + sum_k alpha_k C_{2k}, which is
a positive-definite quadratic form, so the minimizer solves the linear
system M alpha = -v with

    M[j, k] = Re <C_{2j}, C_{2k}>      v[j] = Re <C_{2j}, C_0>

in the normalized trace inner product. Parity of the commutator chain
alternates: even C_n are Hermitian, odd C_n are anti-Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .pauli import PauliSum, commutator, hs_inner


@dataclass(frozen=True)
class GeneratorSet:
    """Nested commutators C_0..C_{2l} of (H, dH) at a fixed interpolation point."""

    h: PauliSum
    dh: PauliSum
    order: int
    commutators: Tuple[PauliSum, ...]

    def c(self, n: int) -> PauliSum:
        return self.commutators[n]


def build_generator_set(h: PauliSum, dh: PauliSum, order: int) -> GeneratorSet:
    if order < 1:
        raise ValueError("expansion order must be >= 1")
    chain = [dh]
    for _ in range(2 * order):
        chain.append(commutator(h, chain[-1]))
    return GeneratorSet(h, dh, order, tuple(chain))


@dataclass(frozen=True)
class AGPResult:
    alphas: np.ndarray
    gram: np.ndarray
    rhs: np.ndarray
    action: float
    solver: str
    rank: Optional[int]

    @property
    def order(self) -> int:
        return self.alphas.size


def _real_inner(a: PauliSum, b: PauliSum) -> float:
    return hs_inner(a, b).real


def agp_coefficients(
    h: Optional[PauliSum] = None,
    dh: Optional[PauliSum] = None,
    order: int = 1,
    gen_set: Optional[GeneratorSet] = None,
) -> AGPResult:
    """Solve the action-minimization normal equations for alpha_1..alpha_l.

    The Gram matrix is symmetric positive semidefinite. A Cholesky solve is
    attempted first; if the matrix is numerically singular (degenerate or
    redundant generators) the minimum-norm least-squares solution is used
    and the reported rank drops below the order.
    """
    if gen_set is None:
        if h is None or dh is None:
            raise ValueError("need either gen_set or both h and dh")
        gen_set = build_generator_set(h, dh, order)
    ell = gen_set.order
    even = [gen_set.c(2 * k) for k in range(ell + 1)]
    gram = np.empty((ell, ell), dtype=np.float64)
    rhs = np.empty(ell, dtype=np.float64)
    for j in range(1, ell + 1):
        rhs[j - 1] = _real_inner(even[j], even[0])
        for k in range(j, ell + 1):
            gram[j - 1, k - 1] = _real_inner(even[j], even[k])
            gram[k - 1, j - 1] = gram[j - 1, k - 1]

    solver = "cholesky"
    rank: Optional[int] = None
    try:
        cho = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        alphas = scipy.linalg.cho_solve(cho, -rhs, check_finite=False)
    except scipy.linalg.LinAlgError:
        alphas, _, lstsq_rank, _ = np.linalg.lstsq(gram, -rhs, rcond=None)
        solver = "lstsq"
        rank = int(lstsq_rank)

    action = residual_action(gen_set, alphas)
    return AGPResult(alphas, gram, rhs, action, solver, rank)


def residual_operator(gen_set: GeneratorSet, alphas: Sequence[float]) -> PauliSum:
    """G(alpha) = C_0 + sum_k alpha_k C_{2k}; vanishing G means an exact potential."""
    g = gen_set.c(0)
    for k, a in enumerate(alphas, start=1):
        g = g + float(a) * gen_set.c(2 * k)
    return g


def residual_action(gen_set: GeneratorSet, alphas: Sequence[float]) -> float:
    g = residual_operator(gen_set, alphas)
    return _real_inner(g, g)


def gauge_potential(gen_set: GeneratorSet, alphas: Sequence[float]) -> PauliSum:
    """A = i sum_k alpha_k C_{2k-1}; Hermitian because odd C_n are anti-Hermitian."""
    acc = PauliSum.zero(gen_set.h.n_qubits)
    for k, a in enumerate(alphas, start=1):
        acc = acc + (1j * float(a)) * gen_set.c(2 * k - 1)
    return acc


def cd_hamiltonian(gen_set: GeneratorSet, alphas: Sequence[float], lam_dot: float) -> PauliSum:
    """Counterdiabatic drive lam_dot * A added on top of the instantaneous H."""
    return float(lam_dot) * gauge_potential(gen_set, alphas)


def single_qubit_alpha1(lam: float) -> float:
    """Closed form for the first-order coefficient of the one-qubit ramp
    H(lam) = -(1-lam) X + lam Z; equals -1/2 at the midpoint."""
    return -1.0 / (4.0 * (lam * lam + (1.0 - lam) * (1.0 - lam)))
