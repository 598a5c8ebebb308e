"""Group-commutator product formulas for nested-commutator exponentials.

The building block approximates e^{[A,B]} by e^A e^B e^(-A) e^(-B). A
counterdiabatic drive term at expansion order k is the exponential of
theta * C_(2k-1) (theta real, C_n the nested commutator chain of
``agp.build_generator_set``). Writing C_n = [H, C_(n-1)] and descending
one commutator level per application, the block unwinds into exponentials
of H and of C_(stop_level) only. Factor lists are in matrix-product order
(see ``circuit``).

Level parity fixes the exponent type: even C_n are Hermitian, so their
unitary exponentials carry purely imaginary scales; odd C_n are
anti-Hermitian and carry real scales. Each descent takes a square root of
the scale magnitude, which is why a depth-d block costs 2(2^d - 1)
H-exponentials and 2^d leaf exponentials.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Dict, List, Optional, Sequence

from .agp import GeneratorSet
from .circuit import Factor, exp_factor
from .pauli import PauliSum

H_NAME = "H"


def generator_name(level: int) -> str:
    """dH for level 0, Cn above; H itself is named separately."""
    if level < 0:
        raise ValueError("negative commutator level")
    return "dH" if level == 0 else f"C{level}"


def _h(scale: complex, tag: str) -> Factor:
    return exp_factor(H_NAME, scale, tag)


def _leaf(level: int, scale: complex, tag: str) -> Factor:
    return exp_factor(generator_name(level), scale, tag)


def commutator_exp(
    n: int,
    scale: complex,
    stop_level: int = 0,
    tag: str = "cd",
    _top: bool = True,
) -> List[Factor]:
    """Factor list approximating e^{scale * C_n}, descending to stop_level.

    The recursion pattern depends on level parity and exponent sign. The
    sign-reversed top-level variant for n >= 3 conjugates the inner blocks
    the opposite way instead of swapping operands, matching the derivation
    the nested formulas come from; inner negative exponentials swap the
    roles of the two operands.
    """
    if not 0 <= stop_level <= n:
        raise ValueError("stop_level must lie in [0, n]")
    if scale == 0:
        return []
    even = n % 2 == 0
    if even and abs(scale.real) > 1e-15 * abs(scale):
        raise ValueError("even-level exponent must be purely imaginary")
    if not even and abs(scale.imag) > 1e-15 * abs(scale):
        raise ValueError("odd-level exponent must be purely real")
    if n == stop_level:
        return [_leaf(n, scale, tag)]

    mag = abs(scale)
    s = math.sqrt(mag)
    rec = lambda sub_scale: commutator_exp(n - 1, sub_scale, stop_level, tag, _top=False)
    if even:
        if scale.imag > 0:
            # e^{+ix C_n} = e^{+is H} e^{+s C_(n-1)} e^{-is H} e^{-s C_(n-1)}
            return [_h(1j * s, tag), *rec(s), _h(-1j * s, tag), *rec(-s)]
        # e^{-ix C_n} = e^{+s C_(n-1)} e^{+is H} e^{-s C_(n-1)} e^{-is H}
        return [*rec(s), _h(1j * s, tag), *rec(-s), _h(-1j * s, tag)]
    if scale.real > 0:
        # e^{+t C_n} = e^{-is H} e^{+is C_(n-1)} e^{+is H} e^{-is C_(n-1)}
        return [_h(-1j * s, tag), *rec(1j * s), _h(1j * s, tag), *rec(-1j * s)]
    if _top and n >= 3:
        # sign-reversed top level: conjugating H-exponentials flip instead
        return [_h(1j * s, tag), *rec(1j * s), _h(-1j * s, tag), *rec(-1j * s)]
    # e^{-t C_n} = e^{-is C_(n-1)} e^{+is H} e^{+is C_(n-1)} e^{-is H}
    return [*rec(-1j * s), _h(1j * s, tag), *rec(1j * s), _h(-1j * s, tag)]


def synth_block(k: int, theta: float, stop_level: Optional[int] = None, tag: str = "cd") -> List[Factor]:
    """Drive block for order k: e^{theta * C_(2k-1)} via group commutators.

    Default stop_level is k-1. stop_level = 2k-1 emits the bare
    exponential as a single factor (no product formula).
    """
    if k < 1:
        raise ValueError("block order must be >= 1")
    level = 2 * k - 1
    stop = k - 1 if stop_level is None else stop_level
    return commutator_exp(level, complex(theta), stop, tag)


def synth_u1(theta: float, tag: str = "cd") -> List[Factor]:
    """First-order drive factor: 4 exponentials of H and dH (empty if theta=0)."""
    return synth_block(1, theta, 0, tag)


U3_MODES = {"flat": 2, "nested": 1, "nested_full": 0}


def synth_u3(theta: float, mode: str = "nested", tag: str = "cd") -> List[Factor]:
    """Second-order drive factor e^{theta * C_3}.

    flat keeps C_2 exponentials (4 factors); nested descends them to C_1
    (10 factors); nested_full descends to dH (22 factors).
    """
    if mode not in U3_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {sorted(U3_MODES)}")
    return synth_block(2, theta, U3_MODES[mode], tag)


def gamma_tally(factors: Sequence[Factor]) -> Counter:
    """Exponential counts per generator name (rotation layers excluded)."""
    return Counter(f.name for f in factors if f.kind != "rotations")


def default_stop_levels(order: int, u3_mode: str = "nested") -> Dict[int, int]:
    stops = {k: k - 1 for k in range(1, order + 1)}
    if order >= 2:
        stops[2] = U3_MODES[u3_mode]
    return stops


def trotter_step(
    dt: float,
    lam_dot: float,
    alphas: Sequence[float],
    ordering: str = "h_first",
    stop_levels: Optional[Dict[int, int]] = None,
) -> List[Factor]:
    """One first-order step: adiabatic factor plus one drive block per order.

    ordering h_first puts e^{-i dt H} leftmost (so the drive factors act
    on the state first); cd_first reverses that. Drive blocks are listed
    in ascending order k. stop_levels maps k to its descent stop; the
    entry 2k-1 keeps block k as a bare exponential.
    """
    if ordering not in ("h_first", "cd_first"):
        raise ValueError(f"unknown ordering {ordering!r}")
    stops = stop_levels or default_stop_levels(len(alphas))
    cd: List[Factor] = []
    for k, alpha_k in enumerate(alphas, start=1):
        theta = dt * lam_dot * float(alpha_k)
        cd.extend(synth_block(k, theta, stops.get(k, k - 1)))
    adiabatic = [_h(-1j * dt, "adiabatic")]
    return adiabatic + cd if ordering == "h_first" else cd + adiabatic


def step_generators(gen_set: GeneratorSet, factors: Sequence[Factor]) -> Dict[str, PauliSum]:
    """Generator table covering every name the factor list references."""
    table: Dict[str, PauliSum] = {}
    for f in factors:
        if f.kind == "rotations" or f.name in table:
            continue
        if f.name == H_NAME:
            table[f.name] = gen_set.h
        elif f.name == "dH":
            table[f.name] = gen_set.c(0)
        elif f.name.startswith("C"):
            table[f.name] = gen_set.c(int(f.name[1:]))
        else:
            raise ValueError(f"cannot resolve generator {f.name!r}")
    return table
