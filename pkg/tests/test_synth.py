from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from _oracles import dense
from dacqc.agp import agp_coefficients, build_generator_set
from dacqc.circuit import (
    Factor,
    exp_factor,
    inverse_rotation_layer,
    rotation_layer,
)
from dacqc.models import build_model, interpolate
from dacqc.pauli import PauliSum
from dacqc.synth import (
    U3_MODES,
    commutator_exp,
    default_stop_levels,
    gamma_tally,
    generator_name,
    step_generators,
    synth_block,
    synth_u1,
    synth_u3,
    trotter_step,
)

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _one_qubit_tables(lam: float):
    h = PauliSum.from_terms(1, [("X", -(1.0 - lam)), ("Z", lam)])
    dh = PauliSum.from_terms(1, [("X", 1.0), ("Z", 1.0)])
    gen_set = build_generator_set(h, dh, 2)
    names = {"H": h, "dH": gen_set.c(0), "C1": gen_set.c(1), "C2": gen_set.c(2), "C3": gen_set.c(3)}
    return gen_set, {k: dense(v) for k, v in names.items()}


def _realize(factors, dense_table) -> np.ndarray:
    """Dense product via scipy expm only; independent of the simulator."""
    dim = next(iter(dense_table.values())).shape[0]
    out = np.eye(dim, dtype=complex)
    for f in reversed(factors):
        out = scipy.linalg.expm(f.scale * dense_table[f.name]) @ out
    return out


def _spectral_gap(u, v) -> float:
    return float(np.linalg.norm(u - v, 2))


# -- group-commutator building block --------------------------------------


def test_group_commutator_identity_when_operands_equal():
    a = scipy.linalg.expm(-0.3j * _X)
    prod = a @ a @ np.linalg.inv(a) @ np.linalg.inv(a)
    assert _spectral_gap(prod, np.eye(2)) <= 1e-14


def test_group_commutator_cubic_error():
    # e^{Ax} e^{Bx} e^{-Ax} e^{-Bx} tracks e^{[A,B] x^2} with O(x^3) error
    a_gen, b_gen = -1j * _X, -1j * _Z
    bracket = a_gen @ b_gen - b_gen @ a_gen

    def deviation(x: float) -> np.ndarray:
        prod = (
            scipy.linalg.expm(x * a_gen)
            @ scipy.linalg.expm(x * b_gen)
            @ scipy.linalg.expm(-x * a_gen)
            @ scipy.linalg.expm(-x * b_gen)
        )
        return prod - scipy.linalg.expm(bracket * x * x)

    d1 = deviation(0.1)
    d2 = deviation(0.05)
    assert np.max(np.abs(d1)) <= 2e-3
    assert np.linalg.norm(d1, 2) <= 3e-3
    ratio = np.linalg.norm(d1, 2) / np.linalg.norm(d2, 2)
    assert ratio == pytest.approx(8.0, rel=0.15)


# -- factor-list structure -------------------------------------------------


def test_u1_factor_pattern_positive_theta():
    theta = 0.04
    s = np.sqrt(theta)
    factors = synth_u1(theta)
    assert [f.name for f in factors] == ["H", "dH", "H", "dH"]
    assert [f.scale for f in factors] == [-1j * s, 1j * s, 1j * s, -1j * s]
    assert all(f.tag == "cd" for f in factors)


def test_u1_factor_pattern_negative_theta_swaps_roles():
    factors = synth_u1(-0.04)
    assert [f.name for f in factors] == ["dH", "H", "dH", "H"]


def test_u1_zero_theta_is_empty():
    assert synth_u1(0.0) == []
    assert synth_u3(0.0, "flat") == []


def test_u3_mode_factor_counts():
    theta = 0.01
    assert len(synth_u3(theta, "flat")) == 4
    assert len(synth_u3(theta, "nested")) == 10
    assert len(synth_u3(theta, "nested_full")) == 22
    assert set(U3_MODES) == {"flat", "nested", "nested_full"}


def test_u3_mode_tallies():
    theta = 0.01
    assert gamma_tally(synth_u3(theta, "flat")) == {"H": 2, "C2": 2}
    assert gamma_tally(synth_u3(theta, "nested")) == {"H": 6, "C1": 4}
    assert gamma_tally(synth_u3(theta, "nested_full")) == {"H": 14, "dH": 8}


def test_full_descent_tally_doubling_law():
    # descending d levels costs 2(2^d - 1) H factors and 2^d leaves
    for depth in (1, 2, 3):
        scale = 0.01 if depth % 2 else 0.01j
        tally = gamma_tally(commutator_exp(depth, scale, 0))
        assert tally["H"] == 2 * (2**depth - 1)
        assert tally["dH"] == 2**depth


def test_generator_names():
    assert generator_name(0) == "dH"
    assert generator_name(3) == "C3"
    with pytest.raises(ValueError):
        generator_name(-1)


def test_commutator_exp_parity_validation():
    with pytest.raises(ValueError):
        commutator_exp(2, 0.1, 0)  # even level needs imaginary exponent
    with pytest.raises(ValueError):
        commutator_exp(1, 0.1j, 0)  # odd level needs real exponent
    with pytest.raises(ValueError):
        commutator_exp(1, 0.1, 5)
    with pytest.raises(ValueError):
        synth_block(0, 0.1)
    with pytest.raises(ValueError):
        synth_u3(0.1, "cascade")


# -- realized unitaries ----------------------------------------------------


def test_u1_approximates_drive_exponential():
    gen_set, table = _one_qubit_tables(0.5)
    theta = 1e-4
    target = scipy.linalg.expm(theta * table["C1"])
    wrong = scipy.linalg.expm(-theta * table["C1"])
    realized = _realize(synth_u1(theta), table)
    err = _spectral_gap(realized, target)
    assert err < 1e-3
    assert err < _spectral_gap(realized, wrong)


def test_u1_negative_theta_tracks_negative_target():
    gen_set, table = _one_qubit_tables(0.5)
    theta = -1e-4
    realized = _realize(synth_u1(theta), table)
    target = scipy.linalg.expm(theta * table["C1"])
    wrong = scipy.linalg.expm(-theta * table["C1"])
    assert _spectral_gap(realized, target) < _spectral_gap(realized, wrong)


def test_u1_error_exponent_on_one_qubit():
    _, table = _one_qubit_tables(0.5)
    thetas = np.logspace(-6, -3, 7)
    errs = []
    for theta in thetas:
        realized = _realize(synth_u1(float(theta)), table)
        errs.append(_spectral_gap(realized, scipy.linalg.expm(theta * table["C1"])))
    slope = np.polyfit(np.log(thetas), np.log(errs), 1)[0]
    assert 1.4 <= slope <= 1.6


def test_u3_modes_all_track_target():
    # deeper descent converges in a weaker power of theta: each level
    # halves the error exponent, so the three modes get mode-sized budgets
    _, table = _one_qubit_tables(0.3)
    theta = 1e-5
    budgets = {"flat": 1e-6, "nested": 1e-5, "nested_full": 0.5}
    min_slope = {"flat": 1.4, "nested": 0.75, "nested_full": 0.3}
    for mode in U3_MODES:
        gaps = []
        for th in (theta, theta / 16):
            realized = _realize(synth_u3(th, mode), table)
            gaps.append(_spectral_gap(realized, scipy.linalg.expm(th * table["C3"])))
        assert gaps[0] < budgets[mode], mode
        assert gaps[1] < gaps[0], mode
        slope = np.log(gaps[0] / gaps[1]) / np.log(16.0)
        assert slope >= min_slope[mode], mode


def test_factor_products_are_unitary():
    m = build_model("ising", 2, seed=7)
    h, dh = interpolate(m, 0.5)
    gen_set = build_generator_set(h, dh, 2)
    table = {
        "H": dense(h),
        "dH": dense(gen_set.c(0)),
        "C1": dense(gen_set.c(1)),
        "C2": dense(gen_set.c(2)),
    }
    for factors in (synth_u1(0.3), synth_u3(0.2, "nested"), synth_u3(0.2, "flat")):
        u = _realize(factors, table)
        assert np.allclose(u.conj().T @ u, np.eye(16), atol=1e-12)


def test_inverse_composition_cancels():
    _, table = _one_qubit_tables(0.4)
    factors = synth_u3(0.05, "nested")
    inverse = [exp_factor(f.name, -f.scale, f.tag) for f in reversed(factors)]
    u = _realize(factors, table)
    v = _realize(inverse, table)
    assert _spectral_gap(v @ u, np.eye(2)) <= 1e-12


# -- step assembly ---------------------------------------------------------


def test_default_stop_levels_by_mode():
    assert default_stop_levels(1) == {1: 0}
    assert default_stop_levels(2, "nested") == {1: 0, 2: 1}
    assert default_stop_levels(2, "flat") == {1: 0, 2: 2}
    assert default_stop_levels(2, "nested_full") == {1: 0, 2: 0}


def test_trotter_step_ordering_places_adiabatic_factor():
    alphas = [-0.5]
    h_first = trotter_step(0.01, 1.0, alphas, "h_first")
    cd_first = trotter_step(0.01, 1.0, alphas, "cd_first")
    assert h_first[0].tag == "adiabatic"
    assert h_first[0].name == "H"
    assert h_first[0].scale == -0.01j
    assert cd_first[-1].tag == "adiabatic"
    assert [f.name for f in h_first[1:]] == [f.name for f in cd_first[:-1]]
    with pytest.raises(ValueError):
        trotter_step(0.01, 1.0, alphas, "sandwich")


def test_trotter_step_zero_drive_is_adiabatic_only():
    factors = trotter_step(0.02, 0.0, [0.7, 0.1])
    assert len(factors) == 1
    assert factors[0].tag == "adiabatic"


def test_trotter_step_bare_exponential_stop():
    factors = trotter_step(0.02, 1.0, [0.7], stop_levels={1: 1})
    cd = [f for f in factors if f.tag == "cd"]
    assert [f.name for f in cd] == ["C1"]
    assert cd[0].scale == pytest.approx(0.02 * 0.7)


def test_step_generators_resolves_all_names():
    m = build_model("ising", 2, seed=7)
    h, dh = interpolate(m, 0.5)
    gen_set = build_generator_set(h, dh, 2)
    factors = trotter_step(0.01, 1.0, [-0.4, 0.03], stop_levels=default_stop_levels(2))
    table = step_generators(gen_set, factors)
    assert set(table) == {"H", "dH", "C1"}
    assert table["H"] == h
    assert table["C1"] == gen_set.c(1)
    bogus = [exp_factor("Q7", 0.1j)]
    with pytest.raises(ValueError):
        step_generators(gen_set, bogus)


def test_step_matches_exact_step_at_small_dt():
    m = build_model("ising", 2, seed=7)
    h, dh = interpolate(m, 0.5)
    gen_set = build_generator_set(h, dh, 1)
    res = agp_coefficients(gen_set=gen_set)
    dt = 1e-3
    factors = trotter_step(dt, 1.0, res.alphas)
    table = {"H": dense(h), "dH": dense(gen_set.c(0))}
    realized = _realize(factors, table)
    exact_gen = -1j * dt * dense(h) + dt * float(res.alphas[0]) * dense(gen_set.c(1))
    exact = scipy.linalg.expm(exact_gen)
    assert _spectral_gap(realized, exact) <= 1e-2


# -- rotation-layer helpers -------------------------------------------------


def test_rotation_layer_inverse_reverses_and_negates():
    layer = rotation_layer([(0, "x", 0.3), (1, "z", -0.7)])
    inv = inverse_rotation_layer(layer)
    assert inv.rotations == ((1, "z", 0.7), (0, "x", -0.3))
    with pytest.raises(ValueError):
        inverse_rotation_layer(exp_factor("H", 1j))


def test_factor_validation():
    with pytest.raises(ValueError):
        Factor("wiggle", "H")
    with pytest.raises(ValueError):
        rotation_layer([(0, "q", 0.1)])
    with pytest.raises(ValueError):
        rotation_layer([(-1, "x", 0.1)])
