from __future__ import annotations

import hashlib
import io
import json
import math

import numpy as np
import pytest
import scipy.linalg

from _oracles import dense, dense_string
from dacqc.circuit import KIND_ANALOG, KIND_EXP
from dacqc.models import Schedule, build_model, interpolate
from dacqc.pauli import PauliString, PauliSum
from dacqc.sim import (
    MATRIX_CAP,
    METHODS,
    STATEVECTOR_CAP,
    ResourceCapError,
    apply_factors,
    apply_pauli_sum,
    build_circuit,
    clear_dense_caches,
    evolve,
    expm_apply,
    factors_to_unitary,
    fidelity,
    ground_state,
    hermitian_eigh,
    magnetization,
    norm_error,
    sample_bitstrings,
    step_factors,
    string_matrix,
    to_matrix,
    unitary_of,
)

_CIRCUIT_DIGEST = "5c5c9576b7e10304e0830d9718a7417252c2423321d3bcf38da176d19acb8598"


def _random_sum(rng, n, terms, hermitian=True) -> PauliSum:
    entries = []
    for _ in range(terms):
        x = int(rng.integers(0, 1 << n))
        z = int(rng.integers(0, 1 << n))
        c = complex(rng.normal(), 0.0 if hermitian else rng.normal())
        entries.append((PauliString(n, x, z), c))
    return PauliSum.from_terms(n, entries)


# -- dense construction ------------------------------------------------------


def test_string_matrix_matches_kron_oracle():
    rng = np.random.default_rng(2)
    for n in (1, 2, 4, 6):
        for _ in range(4):
            x = int(rng.integers(0, 1 << n))
            z = int(rng.integers(0, 1 << n))
            label = PauliString(n, x, z).to_label()
            assert np.allclose(string_matrix(n, x, z), dense_string(label), atol=1e-15)


def test_to_matrix_matches_oracle_and_caps():
    rng = np.random.default_rng(3)
    s = _random_sum(rng, 5, 7, hermitian=False)
    assert np.allclose(to_matrix(s), dense(s), atol=1e-12)
    big = PauliSum.from_terms(10, [("X" * 10, 1.0)])
    with pytest.raises(ResourceCapError):
        to_matrix(big)


def test_apply_pauli_sum_is_matrix_free_matvec():
    rng = np.random.default_rng(4)
    s = _random_sum(rng, 4, 6, hermitian=False)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert np.allclose(apply_pauli_sum(s, psi), dense(s) @ psi, atol=1e-12)


# -- eigendecompositions -----------------------------------------------------


def test_hermitian_eigh_residual_invariant():
    rng = np.random.default_rng(5)
    s = _random_sum(rng, 4, 8, hermitian=True)
    evals, evecs = hermitian_eigh(s)
    mat = dense(s)
    assert np.linalg.norm(mat @ evecs - evecs * evals) <= 1e-10 * max(1.0, np.abs(evals).max())
    assert np.allclose(evecs.conj().T @ evecs, np.eye(16), atol=1e-12)


def test_hermitian_eigh_cache_and_antihermitian_branch():
    clear_dense_caches()
    s = PauliSum.from_terms(2, [("XY", 0.4), ("ZI", -0.3)])
    first = hermitian_eigh(s)
    again = hermitian_eigh(s)
    assert first[0] is again[0]
    anti = 1j * s
    evals, _ = hermitian_eigh(anti)
    assert np.allclose(np.sort(evals), np.sort(first[0]), atol=1e-12)
    mixed = PauliSum.from_terms(1, [("X", 1.0 + 1.0j)])
    with pytest.raises(ValueError):
        hermitian_eigh(mixed)


def test_unitary_of_diagonal_example():
    z = PauliSum.from_terms(1, [("Z", 1.0)])
    u = unitary_of(z, -0.5j * math.pi)
    assert np.allclose(u, np.diag([np.exp(-0.5j * math.pi), np.exp(0.5j * math.pi)]), atol=1e-14)


def test_unitary_of_empty_is_identity():
    assert np.allclose(unitary_of(PauliSum.zero(3), -1j), np.eye(8), atol=1e-15)


def test_unitary_of_matches_taylor_series():
    rng = np.random.default_rng(6)
    s = _random_sum(rng, 2, 5, hermitian=True)
    scale = -0.3j
    series = np.zeros((4, 4), dtype=complex)
    term = np.eye(4, dtype=complex)
    gen = scale * dense(s)
    for k in range(25):
        series += term
        term = term @ gen / (k + 1)
    u = unitary_of(s, scale)
    assert np.allclose(u, series, atol=1e-12)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


def test_unitary_of_rejects_nonunitary_exponent():
    x = PauliSum.from_terms(1, [("X", 1.0)])
    with pytest.raises(ValueError):
        unitary_of(x, 1.0)  # Hermitian generator with a real scale


def test_expm_apply_matches_dense_expm():
    rng = np.random.default_rng(7)
    s = _random_sum(rng, 3, 6, hermitian=True)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    for scale in (-0.01j, -0.8j, -5.0j):  # the last forces substepping
        expected = scipy.linalg.expm(scale * dense(s)) @ psi
        assert np.allclose(expm_apply(s, scale, psi), expected, atol=1e-11)


def test_norm_error_examples():
    eye = np.eye(4)
    assert norm_error(eye, eye) == 0.0
    assert norm_error(eye, -eye) == pytest.approx(2.0, abs=1e-14)
    assert norm_error(eye, -eye, kind="spectral") == pytest.approx(2.0, abs=1e-14)
    with pytest.raises(ValueError):
        norm_error(eye, np.eye(2))
    with pytest.raises(ValueError):
        norm_error(eye, eye, kind="nuclear")


# -- ground states and observables --------------------------------------------


def test_ground_state_transverse_field():
    h = PauliSum.from_terms(2, [("XI", -1.0), ("IX", -1.0)])
    energy, basis = ground_state(h)
    assert energy == pytest.approx(-2.0, abs=1e-12)
    assert basis.shape == (4, 1)
    plus = np.full(4, 0.5, dtype=complex)
    assert fidelity(plus, basis) == pytest.approx(1.0, abs=1e-12)


def test_ground_state_diagonal_enumeration_oracle():
    m = build_model("ising", 2, seed=7)
    energy, basis = ground_state(m.h1)
    # classical enumeration, written independently of the library
    best, arg = None, None
    for bits in range(16):
        s = [1.0 - 2.0 * ((bits >> q) & 1) for q in range(4)]
        e = sum(j_e * s[a] * s[b] for (a, b), j_e in zip(m.lattice.edges, m.couplings))
        e += sum(h_s * s[q] for q, h_s in enumerate(m.site_fields))
        if best is None or e < best - 1e-12:
            best, arg = e, bits
    assert energy == pytest.approx(best, abs=1e-12)
    assert basis.shape[1] == 1
    assert np.argmax(np.abs(basis[:, 0])) == arg


def test_ground_state_degenerate_diagonal():
    h = PauliSum.from_terms(2, [("ZZ", 1.0)])
    energy, basis = ground_state(h)
    assert energy == pytest.approx(-1.0)
    assert basis.shape == (4, 2)
    assert {int(np.argmax(np.abs(basis[:, k]))) for k in range(2)} == {1, 2}


def test_xxz_driver_ground_state_is_neel():
    m = build_model("xxz", 3, j=-1.0)
    _, basis = ground_state(m.h0)
    assert basis.shape[1] == 1
    psi = basis[:, 0]
    assert magnetization(psi) == pytest.approx(1.0, abs=1e-12)
    # bit pattern: 0 on sublattice A (Z=+1), 1 on B
    idx = int(np.argmax(np.abs(psi)))
    for s in range(9):
        expected_bit = 0 if m.lattice.in_sublattice_a[s] else 1
        assert (idx >> s) & 1 == expected_bit


def test_ground_state_lanczos_path():
    n = 10
    h = PauliSum.from_terms(n, [(PauliString(n, 1 << q, 0), -1.0) for q in range(n)])
    energy, basis = ground_state(h)
    assert energy == pytest.approx(-float(n), abs=1e-8)
    plus = np.full(1 << n, 2.0**-5, dtype=complex)
    assert fidelity(plus, basis) == pytest.approx(1.0, abs=1e-8)


def test_ground_state_cap():
    n = 13
    h = PauliSum.from_terms(n, [(PauliString(n, 1, 0), -1.0)])
    with pytest.raises(ResourceCapError):
        ground_state(h)


def test_magnetization_examples():
    zeros = np.zeros(8, dtype=complex)
    zeros[0] = 1.0
    assert magnetization(zeros) == pytest.approx(3.0)
    ones = np.zeros(8, dtype=complex)
    ones[7] = 1.0
    assert magnetization(ones) == pytest.approx(-3.0)
    rng = np.random.default_rng(8)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    total_z = sum(dense_string("".join("Z" if q == s else "I" for q in range(3))) for s in range(3))
    assert magnetization(psi) == pytest.approx(float(np.vdot(psi, total_z @ psi).real), abs=1e-12)


def test_sample_bitstrings_deterministic_and_exact_cases():
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    assert sample_bitstrings(psi, 500, seed=1) == {0: 500}
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    counts = sample_bitstrings(plus, 20000, seed=5)
    assert counts == sample_bitstrings(plus, 20000, seed=5)
    sigma = math.sqrt(0.25 / 20000)
    assert abs(counts.get(0, 0) / 20000 - 0.5) <= 3 * sigma
    with pytest.raises(ValueError):
        sample_bitstrings(psi, 0, seed=1)


# -- step construction ---------------------------------------------------------


def test_step_factors_adiabatic_methods():
    m = build_model("ising", 2, seed=7)
    h, _ = interpolate(m, 0.3)
    for method in ("aqc", "exact_cd"):
        factors, gens = step_factors(m, 0.3, 0.7, 0.01, method, 0)
        assert len(factors) == 1
        assert factors[0].tag == "adiabatic"
        assert gens["H"] == h


def test_step_factors_exact_cd_bundles_drive():
    m = build_model("ising", 2, seed=7)
    factors, gens = step_factors(m, 0.5, 1.0, 0.01, "exact_cd", 1)
    assert [f.tag for f in factors] == ["exact"]
    gen = gens["Hcd"]
    assert gen.is_hermitian(tol=1e-10)
    h, _ = interpolate(m, 0.5)
    assert gen.weight_histogram() != h.weight_histogram()  # drive strings added


def test_step_factors_method_shapes():
    m = build_model("ising", 2, seed=7)
    pf_factors, _ = step_factors(m, 0.5, 1.0, 0.01, "pf", 1)
    assert [f.name for f in pf_factors] == ["H", "dH", "H", "dH", "H"][: len(pf_factors)]
    aab_factors, _ = step_factors(m, 0.5, 1.0, 0.01, "aab", 1)
    assert any(f.kind == KIND_ANALOG for f in aab_factors)
    dig_factors, dig_table = step_factors(m, 0.5, 1.0, 0.01, "digital", 1)
    assert all(f.kind == KIND_EXP for f in dig_factors)
    assert all(dig_table[f.name].num_terms == 1 for f in dig_factors)
    with pytest.raises(ValueError):
        step_factors(m, 0.5, 1.0, 0.01, "floquet", 1)
    with pytest.raises(ValueError):
        step_factors(m, 0.5, 1.0, 0.01, "pf", -1)


def test_method_enum_is_closed():
    assert METHODS == ("exact_cd", "pf", "aab", "digital", "aqc")


# -- circuits -------------------------------------------------------------------


def test_build_circuit_structure_and_golden_digest():
    m = build_model("ising", 2, seed=7)
    circ = build_circuit(m, Schedule(0.8, 3), "pf", order=1)
    circ.validate()
    assert len(circ.steps) == 3
    assert circ.exp_tally() == {"H": 9, "dH": 6}
    payload = json.dumps(circ.to_json_obj(), sort_keys=True, separators=(",", ":"))
    assert hashlib.sha256(payload.encode()).hexdigest() == _CIRCUIT_DIGEST


def test_circuit_json_round_trip():
    m = build_model("xxz", 2, j=-1.0)
    circ = build_circuit(m, Schedule(0.5, 2), "aab", order=1)
    obj = circ.to_json_obj()
    back = type(circ).from_json_obj(obj)
    assert back.n_qubits == circ.n_qubits
    assert back.method == circ.method
    assert len(back.steps) == len(circ.steps)
    for s1, s2 in zip(circ.steps, back.steps):
        assert s1.factors == s2.factors
        assert s1.generators == s2.generators
    assert back.to_json_obj() == obj


def test_analog_block_counts_in_circuit():
    m = build_model("ising", 3, seed=7)
    circ = build_circuit(m, Schedule(0.8, 2), "aab", order=2)
    assert circ.analog_block_count() == 2 * 17


# -- evolution -------------------------------------------------------------------


def test_slow_adiabatic_sweep_reaches_target():
    m = build_model("ising", 2, seed=7)
    res = evolve(m, Schedule(50.0, 5000), "aqc", order=0)
    assert res.fidelities[-1] >= 0.99
    assert res.metadata["method"] == "aqc"


def test_evolution_preserves_norm():
    m = build_model("ising", 2, seed=7)
    circ = build_circuit(m, Schedule(0.8, 100), "pf", order=2)
    _, basis = ground_state(m.h0)
    psi = basis[:, 0].copy()
    for step in circ.steps:
        psi = apply_factors(step.factors, step.generators, psi, 4)
    assert abs(np.linalg.norm(psi) - 1.0) <= 1e-10


def test_lowered_methods_agree_with_exact_drive():
    m = build_model("ising", 2, seed=7)
    sched = Schedule(0.8, 800)  # dt = 1e-3
    finals = {}
    for method in ("exact_cd", "pf", "aab"):
        finals[method] = evolve(m, sched, method, order=1).fidelities[-1]
    assert abs(finals["pf"] - finals["exact_cd"]) < 1e-2
    assert abs(finals["aab"] - finals["exact_cd"]) < 1e-2


def test_xxz_conserves_total_magnetization():
    m = build_model("xxz", 2, j=-1.0)
    res = evolve(m, Schedule(0.8, 50), "aab", order=1)
    mags = np.array(res.magnetizations)
    assert np.max(np.abs(mags - mags[0])) <= 1e-8


def test_fidelities_are_probabilities():
    m = build_model("xxz", 2, j=-1.0)
    res = evolve(m, Schedule(0.8, 40), "pf", order=1)
    assert all(-1e-10 <= f <= 1 + 1e-10 for f in res.fidelities)


def test_sampled_fidelity_tracks_exact():
    m = build_model("ising", 2, seed=7)
    res = evolve(m, Schedule(0.8, 20), "aab", order=1, shots=20000, seed=3)
    again = evolve(m, Schedule(0.8, 20), "aab", order=1, shots=20000, seed=3)
    assert res.fidelity_shots == again.fidelity_shots
    for exact, sampled in zip(res.fidelities, res.fidelity_shots):
        sigma = math.sqrt(max(exact * (1 - exact), 1e-12) / 20000)
        assert abs(sampled - exact) <= 3 * sigma + 1e-9


def test_sampling_requires_diagonal_target():
    m = build_model("xxz", 2, j=-1.0)
    with pytest.raises(ValueError):
        evolve(m, Schedule(0.8, 5), "pf", order=1, shots=100)


def test_evolve_respects_vector_cap():
    m = build_model("ising", 2, seed=7)
    with pytest.raises(ResourceCapError):
        evolve(m, Schedule(0.8, 5), "pf", order=1, vec_cap=3)


def test_result_csv_format():
    m = build_model("ising", 2, seed=7)
    res = evolve(m, Schedule(0.8, 4), "pf", order=1, shots=100)
    buf = io.StringIO()
    res.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "step,t,lambda,fidelity,magnetization,fidelity_shots"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[0] == "1"
    assert float(first[1]) == pytest.approx(0.1)
    # repr round-trip: parsing the text reproduces the stored floats
    assert float(first[3]) == res.fidelities[0]

    plain = evolve(m, Schedule(0.8, 4), "pf", order=1)
    buf2 = io.StringIO()
    plain.to_csv(buf2)
    assert buf2.getvalue().splitlines()[0] == "step,t,lambda,fidelity,magnetization"


def test_factors_to_unitary_matches_state_application():
    m = build_model("ising", 2, seed=7)
    factors, gens = step_factors(m, 0.5, 1.0, 0.05, "aab", 1)
    u = factors_to_unitary(factors, gens, 4)
    assert np.allclose(u.conj().T @ u, np.eye(16), atol=1e-12)
    rng = np.random.default_rng(9)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    assert np.allclose(u @ psi, apply_factors(factors, gens, psi, 4), atol=1e-12)
