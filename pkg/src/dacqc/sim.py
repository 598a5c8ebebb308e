"""Exact dense simulation at desk scale.

Statevectors are numpy arrays indexed so that qubit 0 is the least
significant bit of the basis index. Factor lists are applied in reverse
(matrix-product order, see ``circuit``): the last listed factor hits the
state first. Fast paths avoid densifying whenever the generator is a
single string, diagonal, or a rotation layer; everything else goes
through a matrix-free Taylor expansion with sub-stepping, or through a
cached eigendecomposition when a dense unitary is explicitly requested.

Caps: statevector paths at 12 qubits, dense-matrix paths at 9, both
overridable per call. Exceeding a cap raises ResourceCapError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from . import aab as aab_mod
from .agp import agp_coefficients, build_generator_set, gauge_potential
from .circuit import CircuitIR, Factor, KIND_ROTATIONS, Step, exp_factor
from .models import ModelInstance, Schedule, interpolate, schedule_eval
from .pauli import PauliSum
from .synth import default_stop_levels, step_generators, trotter_step

STATEVECTOR_CAP = 12
MATRIX_CAP = 9

_HERM_TOL = 1e-10


class ResourceCapError(Exception):
    """A requested dense object exceeds the configured qubit cap."""


def _check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise ResourceCapError(f"{what} needs {n} qubits, cap is {cap}")


# -- Pauli application -------------------------------------------------------

_I2 = np.eye(2, dtype=np.complex128)
_X2 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z2 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_SITE_MATS = (_I2, _X2, _Z2, _Y2)  # index xbit + 2*zbit


def string_matrix(n_qubits: int, x_mask: int, z_mask: int) -> np.ndarray:
    """Dense matrix of one Pauli string (qubit 0 = least significant bit)."""
    out = np.ones((1, 1), dtype=np.complex128)
    for q in range(n_qubits - 1, -1, -1):
        xb, zb = (x_mask >> q) & 1, (z_mask >> q) & 1
        out = np.kron(out, _SITE_MATS[xb + 2 * zb])
    return out


def to_matrix(ps: PauliSum, cap: int = MATRIX_CAP) -> np.ndarray:
    _check_cap(ps.n_qubits, cap, "dense operator")
    dim = 1 << ps.n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    for x, z, c in zip(ps.x_masks, ps.z_masks, ps.coefficients):
        out += c * string_matrix(ps.n_qubits, int(x), int(z))
    return out


def _apply_string(psi: np.ndarray, n: int, x: int, z: int) -> np.ndarray:
    """P|j> = i^{|x&z|} (-1)^{|z&j|} |j xor x>, vectorized over the state."""
    dim = 1 << n
    j = np.arange(dim, dtype=np.uint64)
    signs = 1.0 - 2.0 * (np.bitwise_count(j & np.uint64(z)) & 1).astype(np.float64)
    phase = 1j ** (bin(x & z).count("1") % 4)
    out = np.empty_like(psi)
    out[j ^ np.uint64(x)] = (phase * signs) * psi
    return out


def apply_pauli_sum(ps: PauliSum, psi: np.ndarray) -> np.ndarray:
    """Matrix-free A|psi> for A the given sum."""
    out = np.zeros_like(psi)
    for x, z, c in zip(ps.x_masks, ps.z_masks, ps.coefficients):
        out += c * _apply_string(psi, ps.n_qubits, int(x), int(z))
    return out


def _diagonal_vector(ps: PauliSum) -> np.ndarray:
    """Diagonal of a z-only sum as a real vector over basis states."""
    dim = 1 << ps.n_qubits
    j = np.arange(dim, dtype=np.uint64)
    d = np.zeros(dim, dtype=np.float64)
    dc = np.zeros(dim, dtype=np.complex128)
    anycomplex = bool(np.any(np.abs(ps.coefficients.imag) > 0))
    for z, c in zip(ps.z_masks, ps.coefficients):
        signs = 1.0 - 2.0 * (np.bitwise_count(j & z) & 1).astype(np.float64)
        if anycomplex:
            dc += c * signs
        else:
            d += c.real * signs
    return dc if anycomplex else d


# -- cached eigendecompositions ----------------------------------------------

_EIGH_CACHE: Dict[bytes, Tuple[np.ndarray, np.ndarray]] = {}
_DIAG_CACHE: Dict[bytes, np.ndarray] = {}


def clear_dense_caches() -> None:
    _EIGH_CACHE.clear()
    _DIAG_CACHE.clear()


def _content_key(ps: PauliSum) -> bytes:
    return (
        ps.n_qubits.to_bytes(2, "little")
        + ps.x_masks.tobytes()
        + ps.z_masks.tobytes()
        + ps.coefficients.tobytes()
    )


def hermitian_eigh(ps: PauliSum, cap: int = MATRIX_CAP) -> Tuple[np.ndarray, np.ndarray]:
    """Cached (eigenvalues, eigenvectors) of the Hermitian form of the sum.

    For an anti-Hermitian sum the decomposition is of -i*A (Hermitian);
    exp(scale*A) then equals V exp(i*scale*E) V+.
    """
    key = _content_key(ps)
    hit = _EIGH_CACHE.get(key)
    if hit is not None:
        return hit
    if ps.is_hermitian(_HERM_TOL):
        mat = to_matrix(ps, cap)
    elif ps.is_antihermitian(_HERM_TOL):
        mat = to_matrix(-1j * ps, cap)
    else:
        raise ValueError("sum is neither Hermitian nor anti-Hermitian")
    evals, evecs = np.linalg.eigh(mat)
    _EIGH_CACHE[key] = (evals, evecs)
    return evals, evecs


def unitary_of(ps: PauliSum, scale: complex, cap: int = MATRIX_CAP) -> np.ndarray:
    """Dense exp(scale * G) for anti-Hermitian scale*G, via eigendecomposition."""
    n = ps.n_qubits
    _check_cap(n, cap, "dense unitary")
    if ps.num_terms == 0:
        return np.eye(1 << n, dtype=np.complex128)
    herm = ps.is_hermitian(_HERM_TOL)
    anti = ps.is_antihermitian(_HERM_TOL)
    ok = (herm and abs(scale.real) <= 1e-12 * max(abs(scale), 1.0)) or (
        anti and abs(scale.imag) <= 1e-12 * max(abs(scale), 1.0)
    )
    if not (herm or anti) or not ok:
        raise ValueError("scale * G must be anti-Hermitian")
    evals, evecs = hermitian_eigh(ps, cap)
    # Hermitian G: exp(scale*E); anti-Hermitian G = i*B: exp(i*scale*E)
    phase = scale if herm else 1j * scale
    return (evecs * np.exp(phase * evals)) @ evecs.conj().T


# -- matrix-free exponential application --------------------------------------

def expm_apply(
    ps: PauliSum,
    scale: complex,
    psi: np.ndarray,
    tol: float = 1e-14,
    max_terms: int = 120,
) -> np.ndarray:
    """exp(scale * A)|psi> by scaling-and-Taylor, matrix-free.

    The exponent is split into enough substeps that the per-substep
    1-norm bound stays near unity, keeping the series short and stable.
    """
    if ps.num_terms == 0:
        return psi.copy()
    budget = abs(scale) * float(np.sum(np.abs(ps.coefficients)))
    nsub = max(1, int(math.ceil(budget)))
    sub = scale / nsub
    out = psi
    for _ in range(nsub):
        term = out
        acc = out.copy()
        norm_ref = np.linalg.norm(acc)
        for k in range(1, max_terms + 1):
            term = (sub / k) * apply_pauli_sum(ps, term)
            acc = acc + term
            if np.linalg.norm(term) <= tol * norm_ref:
                break
        else:
            raise ArithmeticError("exponential series failed to converge")
        out = acc
    return out


# -- rotations -----------------------------------------------------------------

_AXIS_MAT = {"x": _X2, "y": _Y2, "z": _Z2}


def _rotation_matrix(axis: str, angle: float) -> np.ndarray:
    half = 0.5 * angle
    return math.cos(half) * _I2 - 1j * math.sin(half) * _AXIS_MAT[axis]


def _apply_site_matrix(arr: np.ndarray, n: int, site: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix on one qubit of a (2^n, ...) array's first axis."""
    lead = arr.shape[1:]
    a = arr.reshape(1 << (n - site - 1), 2, (1 << site) * int(np.prod(lead, dtype=int) or 1))
    a = np.einsum("ab,hbl->hal", mat, a)
    return a.reshape(arr.shape)


def _apply_rotations(arr: np.ndarray, n: int, factor: Factor) -> np.ndarray:
    out = arr
    for site, axis, angle in reversed(factor.rotations):
        out = _apply_site_matrix(out, n, site, _rotation_matrix(axis, angle))
    return out


# -- factor application --------------------------------------------------------

def _apply_exp_factor(
    psi: np.ndarray, gen: PauliSum, scale: complex
) -> np.ndarray:
    n = gen.n_qubits
    if gen.num_terms == 0 or scale == 0:
        return psi
    if gen.num_terms == 1:
        z = scale * complex(gen.coefficients[0])
        if abs(z.real) <= 1e-12 * max(abs(z), 1.0):
            # exp(i theta P) = cos(theta) + i sin(theta) P
            theta = z.imag
            rotated = _apply_string(psi, n, int(gen.x_masks[0]), int(gen.z_masks[0]))
            return math.cos(theta) * psi + 1j * math.sin(theta) * rotated
    if not np.any(gen.x_masks):
        key = _content_key(gen)
        d = _DIAG_CACHE.get(key)
        if d is None:
            d = _diagonal_vector(gen)
            _DIAG_CACHE[key] = d
        return np.exp(scale * d) * psi
    return expm_apply(gen, scale, psi)


def apply_factors(
    factors: Sequence[Factor],
    generators: Dict[str, PauliSum],
    psi: np.ndarray,
    n_qubits: int,
) -> np.ndarray:
    """Apply a matrix-product-ordered factor list to a state."""
    out = psi
    for f in reversed(factors):
        if f.kind == KIND_ROTATIONS:
            out = _apply_rotations(out, n_qubits, f)
        else:
            out = _apply_exp_factor(out, generators[f.name], f.scale)
    return out


def factors_to_unitary(
    factors: Sequence[Factor],
    generators: Dict[str, PauliSum],
    n_qubits: int,
    cap: int = MATRIX_CAP,
) -> np.ndarray:
    """Dense product of a factor list (leftmost factor is the leftmost matrix)."""
    _check_cap(n_qubits, cap, "dense circuit")
    dim = 1 << n_qubits
    out = np.eye(dim, dtype=np.complex128)
    for f in reversed(factors):
        if f.kind == KIND_ROTATIONS:
            out = _apply_rotations(out, n_qubits, f)
        else:
            out = unitary_of(generators[f.name], f.scale, cap) @ out
    return out


def norm_error(u: np.ndarray, v: np.ndarray, kind: str = "frobenius") -> float:
    """Distance between unitaries: Frobenius norm over sqrt(dim), or spectral."""
    if u.shape != v.shape:
        raise ValueError("dimension mismatch")
    if kind == "frobenius":
        return float(np.linalg.norm(u - v) / math.sqrt(u.shape[0]))
    if kind == "spectral":
        return float(np.linalg.norm(u - v, 2))
    raise ValueError(f"unknown norm kind {kind!r}")


# -- ground states and observables ----------------------------------------------

def ground_state(
    h: PauliSum,
    vec_cap: int = STATEVECTOR_CAP,
    mat_cap: int = MATRIX_CAP,
    degeneracy_tol: float = 1e-10,
    seed: int = 7,
) -> Tuple[float, np.ndarray]:
    """Lowest eigenvalue and an orthonormal basis of its eigenspace.

    Diagonal sums are minimized by enumeration; small systems densify;
    larger ones (up to the statevector cap) use a matrix-free Lanczos
    solve with a seeded start vector.
    """
    n = h.n_qubits
    _check_cap(n, vec_cap, "ground state")
    dim = 1 << n
    if not np.any(h.x_masks):
        d = _diagonal_vector(h)
        if np.iscomplexobj(d):
            d = d.real
        emin = float(np.min(d))
        idx = np.flatnonzero(d <= emin + degeneracy_tol)
        basis = np.zeros((dim, idx.size), dtype=np.complex128)
        basis[idx, np.arange(idx.size)] = 1.0
        return emin, basis
    if n <= mat_cap:
        evals, evecs = np.linalg.eigh(to_matrix(h, mat_cap))
        emin = float(evals[0])
        sel = evals <= emin + degeneracy_tol
        return emin, evecs[:, sel]
    from scipy.sparse.linalg import LinearOperator, eigsh

    op = LinearOperator(
        (dim, dim), matvec=lambda v: apply_pauli_sum(h, v.astype(np.complex128)), dtype=np.complex128
    )
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    k = 6
    evals, evecs = eigsh(op, k=k, which="SA", v0=v0)
    order = np.argsort(evals)
    evals, evecs = evals[order], evecs[:, order]
    emin = float(evals[0])
    sel = evals <= emin + degeneracy_tol
    if int(np.sum(sel)) == k:
        evals, evecs = eigsh(op, k=min(2 * k, dim - 2), which="SA", v0=v0)
        order = np.argsort(evals)
        evals, evecs = evals[order], evecs[:, order]
        sel = evals <= emin + degeneracy_tol
    basis, _ = np.linalg.qr(evecs[:, sel])
    return emin, basis


def fidelity(psi: np.ndarray, target_basis: np.ndarray) -> float:
    """Squared projection onto the (possibly degenerate) target subspace."""
    amps = target_basis.conj().T @ psi
    return float(np.real(np.vdot(amps, amps)))


def magnetization(psi: np.ndarray) -> float:
    """Total Z expectation sum_i <Z_i>."""
    n = int(round(math.log2(psi.size)))
    j = np.arange(psi.size, dtype=np.uint64)
    weights = n - 2.0 * np.bitwise_count(j).astype(np.float64)
    return float(np.dot(np.abs(psi) ** 2, weights))


def sample_bitstrings(psi: np.ndarray, shots: int, seed: int) -> Dict[int, int]:
    """Seeded multinomial draw from |psi|^2; keys are basis indices."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.abs(psi) ** 2
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p)
    return {int(i): int(counts[i]) for i in np.flatnonzero(counts)}


# -- step construction -----------------------------------------------------------

METHODS = ("exact_cd", "pf", "aab", "digital", "aqc")


def step_factors(
    model: ModelInstance,
    lam: float,
    lam_dot: float,
    dt: float,
    method: str,
    order: int,
    ordering: str = "h_first",
    u3_mode: str = "nested",
    ab_family: Optional[str] = None,
) -> Tuple[List[Factor], Dict[str, PauliSum]]:
    """Factor list and generator table for one time step of the given method."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if order < 0:
        raise ValueError("expansion order must be >= 0")
    h, dh = interpolate(model, lam)
    if method == "aqc" or (method == "exact_cd" and order == 0):
        return [exp_factor("H", -1j * dt, "adiabatic")], {"H": h}
    if order == 0:
        # adiabatic-only product formula: one H exponential per step
        skeleton = trotter_step(dt, lam_dot, [], ordering, {})
        gen_set = None
        alphas = []
    else:
        gen_set = build_generator_set(h, dh, order)
        res = agp_coefficients(h, dh, order, gen_set=gen_set)
        alphas = res.alphas
    if method == "exact_cd":
        total = h + lam_dot * gauge_potential(gen_set, alphas)
        return [exp_factor("Hcd", -1j * dt, "exact")], {"Hcd": total}
    if method == "pf":
        factors = trotter_step(dt, lam_dot, alphas, ordering, default_stop_levels(order, u3_mode))
        return factors, step_generators(gen_set, factors)
    if order > 0:
        stops = {k: 1 for k in range(1, order + 1)}
        skeleton = trotter_step(dt, lam_dot, alphas, ordering, stops)
    if method == "aab":
        return aab_mod.lower_step_factors(model, skeleton, lam, aab_mod.MODE_AAB, ab_family=ab_family)
    table = (
        step_generators(gen_set, skeleton)
        if gen_set is not None
        else {"H": h}
    )
    return aab_mod.lower_step_factors(
        model, skeleton, lam, aab_mod.MODE_DIGITAL, generators=table, ab_family=ab_family
    )


def build_circuit(
    model: ModelInstance,
    schedule: Schedule,
    method: str,
    order: int = 1,
    ordering: str = "h_first",
    u3_mode: str = "nested",
    ab_family: Optional[str] = None,
) -> CircuitIR:
    """Full evolution circuit: one step per schedule interval, midpoint parameters."""
    circ = CircuitIR(
        n_qubits=model.n_qubits,
        method=method,
        meta={
            "model": model.kind,
            "order": order,
            "ordering": ordering,
            "u3_mode": u3_mode,
            "total_time": schedule.total_time,
            "steps": schedule.steps,
        },
    )
    for m, t_mid in enumerate(schedule.midpoints(), start=1):
        lam, lam_dot = schedule_eval(schedule, t_mid)
        factors, gens = step_factors(
            model, lam, lam_dot, schedule.dt, method, order, ordering, u3_mode, ab_family
        )
        circ.steps.append(Step(m, t_mid, lam, lam_dot, gens, factors))
    circ.validate()
    return circ


# -- evolution --------------------------------------------------------------------

@dataclass
class SimulationResult:
    times: List[float]
    lambdas: List[float]
    fidelities: List[float]
    magnetizations: List[float]
    fidelity_shots: Optional[List[float]] = None
    metadata: Dict[str, object] = field(default_factory=dict)

    def to_csv(self, dest: Union[str, TextIO]) -> None:
        close = False
        if isinstance(dest, str):
            dest = open(dest, "w", encoding="utf-8", newline="\n")
            close = True
        try:
            cols = "step,t,lambda,fidelity,magnetization"
            if self.fidelity_shots is not None:
                cols += ",fidelity_shots"
            dest.write(cols + "\n")
            for i in range(len(self.times)):
                row = (
                    f"{i + 1},{self.times[i]!r},{self.lambdas[i]!r},"
                    f"{self.fidelities[i]!r},{self.magnetizations[i]!r}"
                )
                if self.fidelity_shots is not None:
                    row += f",{self.fidelity_shots[i]!r}"
                dest.write(row + "\n")
        finally:
            if close:
                dest.close()


def evolve(
    model: ModelInstance,
    schedule: Schedule,
    method: str,
    order: int = 1,
    ordering: str = "h_first",
    u3_mode: str = "nested",
    shots: Optional[int] = None,
    seed: int = 7,
    ab_family: Optional[str] = None,
    vec_cap: int = STATEVECTOR_CAP,
) -> SimulationResult:
    """Evolve from the ground state of H0, recording per-step observables.

    Fidelity is measured against the fixed final target (ground space of
    H1) at every step midpoint. With ``shots`` set and a diagonal H1 the
    result also carries a sampled fidelity estimate (target-bitstring
    frequency from a seeded sampler).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    n = model.n_qubits
    _check_cap(n, vec_cap, "statevector evolution")
    _, init_basis = ground_state(model.h0, vec_cap=vec_cap)
    psi = init_basis[:, 0].copy()
    _, target = ground_state(model.h1, vec_cap=vec_cap)

    target_indices: Optional[np.ndarray] = None
    if shots is not None:
        if np.any(model.h1.x_masks):
            raise ValueError("sampled fidelity needs a diagonal final Hamiltonian")
        target_indices = np.flatnonzero(np.max(np.abs(target) ** 2, axis=1) > 0.5)

    times: List[float] = []
    lambdas: List[float] = []
    fids: List[float] = []
    mags: List[float] = []
    fshots: List[float] = [] if shots is not None else None
    for m, t_mid in enumerate(schedule.midpoints(), start=1):
        lam, lam_dot = schedule_eval(schedule, t_mid)
        factors, gens = step_factors(
            model, lam, lam_dot, schedule.dt, method, order, ordering, u3_mode, ab_family
        )
        psi = apply_factors(factors, gens, psi, n)
        times.append(t_mid)
        lambdas.append(lam)
        fids.append(fidelity(psi, target))
        mags.append(magnetization(psi))
        if shots is not None:
            counts = sample_bitstrings(psi, shots, seed=seed * 100003 + m)
            hit = sum(counts.get(int(i), 0) for i in target_indices)
            fshots.append(hit / shots)

    return SimulationResult(
        times=times,
        lambdas=lambdas,
        fidelities=fids,
        magnetizations=mags,
        fidelity_shots=fshots,
        metadata={
            "model": model.kind,
            "L": model.lattice.rows,
            "method": method,
            "order": order,
            "ordering": ordering,
            "u3_mode": u3_mode,
            "total_time": schedule.total_time,
            "steps": schedule.steps,
            "seed": seed,
            "shots": shots,
        },
    )
