"""Dense reference constructions shared by the test modules.

Everything here is built directly from 2x2 site matrices with numpy kron,
independent of the package's own dense-simulation code paths.
"""

from __future__ import annotations

import numpy as np

from dacqc.pauli import PauliSum

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
SITE = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def dense_string(label: str) -> np.ndarray:
    """Kron expansion of one Pauli label, qubit 0 = least significant bit."""
    mat = np.eye(1, dtype=complex)
    for ch in reversed(label):
        mat = np.kron(mat, SITE[ch])
    return mat


def dense(op: PauliSum) -> np.ndarray:
    dim = 1 << op.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for string, coeff in op.items():
        out += coeff * dense_string(string.to_label())
    return out


def hs_trace_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Tr(A^dag B) / dim, the normalized trace inner product."""
    return complex(np.trace(a.conj().T @ b) / a.shape[0])
