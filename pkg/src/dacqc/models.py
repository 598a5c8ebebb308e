"""Model instances (Ising spin glass, XXZ) on open square lattices, plus
the smooth annealing schedule.

Site indexing is row-major: site(r, c) = r * cols + c. Edges are
enumerated row-major per site, east neighbor before south neighbor; this
fixed order also fixes the coupling draw order (edges first, then sites),
so instances are reproducible bit-for-bit from the seed. Each edge is
stored as (a, b) with a on sublattice A (checkerboard parity of r + c
even) and b on sublattice B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .pauli import PauliSum
from .rng import Xoshiro256PP

KIND_ISING = "ising"
KIND_XXZ = "xxz"
MODEL_KINDS = (KIND_ISING, KIND_XXZ)

_KIND_ALIASES = {
    "ising": KIND_ISING,
    "isingspinglass": KIND_ISING,
    "ising_spin_glass": KIND_ISING,
    "xxz": KIND_XXZ,
}


@dataclass(frozen=True)
class LatticeSpec:
    rows: int
    cols: int
    edges: Tuple[Tuple[int, int], ...]
    in_sublattice_a: Tuple[bool, ...]

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols


def square_lattice(rows: int, cols: int) -> LatticeSpec:
    # 1 x k chains are allowed (useful for single-edge checks); build_model
    # itself insists on L x L with L >= 2.
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("invalid lattice: need at least 2 sites")
    in_a = tuple((r + c) % 2 == 0 for r in range(rows) for c in range(cols))
    edges = []
    for r in range(rows):
        for c in range(cols):
            s = r * cols + c
            if c + 1 < cols:
                edges.append((s, s + 1))
            if r + 1 < rows:
                edges.append((s, s + cols))
    # orient each edge A-site first
    oriented = tuple((a, b) if in_a[a] else (b, a) for a, b in edges)
    return LatticeSpec(rows, cols, oriented, in_a)


@dataclass(frozen=True, eq=False)
class ModelInstance:
    kind: str
    lattice: LatticeSpec
    couplings: Tuple[float, ...]
    site_fields: Optional[Tuple[float, ...]]
    delta: Optional[float]
    j: float
    h: Optional[float]
    seed: int
    h0: PauliSum = field(repr=False)
    h1: PauliSum = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_sites


def _site_term(n: int, axis: str, site: int) -> Tuple[int, int]:
    x = 1 << site if axis in ("X", "Y") else 0
    z = 1 << site if axis in ("Z", "Y") else 0
    return x, z


def _edge_term(n: int, axis_a: str, a: int, axis_b: str, b: int) -> Tuple[int, int]:
    xa, za = _site_term(n, axis_a, a)
    xb, zb = _site_term(n, axis_b, b)
    return xa | xb, za | zb


def build_model(
    kind: str,
    L: int,
    j: float = 1.0,
    h: float = 1.0,
    delta: float = 0.5,
    seed: int = 7,
    random_xxz_couplings: bool = False,
) -> ModelInstance:
    """Construct a deterministic L x L model instance for the given seed."""
    norm = _KIND_ALIASES.get(kind.strip().lower())
    if norm is None:
        raise ValueError(f"unknown model kind {kind!r}")
    if L < 2:
        raise ValueError("model lattices start at 2x2")
    lattice = square_lattice(L, L)
    n = lattice.n_sites
    rng = Xoshiro256PP(seed)

    if norm == KIND_ISING:
        if j <= 0 or h <= 0:
            raise ValueError("Ising sampling ranges need j > 0 and h > 0")
        couplings = tuple(rng.uniform(-j, j) for _ in lattice.edges)
        site_fields = tuple(rng.uniform(-h, h) for _ in range(n))
        h0 = PauliSum.from_terms(n, [(_site_term(n, "X", a), -1.0) for a in range(n)])
        terms = [
            (_edge_term(n, "Z", a, "Z", b), J_ab)
            for (a, b), J_ab in zip(lattice.edges, couplings)
        ]
        terms += [(_site_term(n, "Z", a), h_a) for a, h_a in enumerate(site_fields)]
        h1 = PauliSum.from_terms(n, terms)
        return ModelInstance(norm, lattice, couplings, site_fields, None, j, h, seed, h0, h1)

    # XXZ
    if random_xxz_couplings:
        scale = abs(j)
        couplings = tuple(rng.uniform(-scale, scale) for _ in lattice.edges)
    else:
        couplings = tuple(j for _ in lattice.edges)
    h0 = PauliSum.from_terms(
        n,
        [
            (_site_term(n, "Z", a), -1.0 if lattice.in_sublattice_a[a] else 1.0)
            for a in range(n)
        ],
    )
    terms = []
    for (a, b), J_ab in zip(lattice.edges, couplings):
        terms.append((_edge_term(n, "X", a, "X", b), J_ab))
        terms.append((_edge_term(n, "Y", a, "Y", b), J_ab))
        terms.append((_edge_term(n, "Z", a, "Z", b), J_ab * delta))
    h1 = PauliSum.from_terms(n, terms)
    return ModelInstance(norm, lattice, couplings, None, delta, j, None, seed, h0, h1)


def interpolate(model: ModelInstance, lam: float) -> Tuple[PauliSum, PauliSum]:
    """H(lam) = (1-lam) H0 + lam H1 and its lam-derivative dH = H1 - H0."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return (1.0 - lam) * model.h0 + lam * model.h1, model.h1 - model.h0


@dataclass(frozen=True)
class Schedule:
    total_time: float
    steps: int
    kind: str = "trig_smooth"

    def __post_init__(self):
        if self.total_time <= 0 or self.steps < 1:
            raise ValueError("schedule needs total_time > 0 and steps >= 1")
        if self.kind != "trig_smooth":
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps

    def midpoints(self):
        return [(m - 0.5) * self.dt for m in range(1, self.steps + 1)]


def schedule_eval(schedule: Schedule, t: float) -> Tuple[float, float]:
    """Smooth ramp lam(t) = sin^2((pi/2) sin^2(pi t / 2T)) and its rate.

    Both endpoints have lam_dot = 0; lam rises monotonically from 0 to 1.
    """
    T = schedule.total_time
    if not 0.0 <= t <= T * (1 + 1e-12):
        raise ValueError(f"t must lie in [0, {T}], got {t}")
    inner = math.sin(math.pi * t / (2.0 * T)) ** 2
    lam = math.sin(0.5 * math.pi * inner) ** 2
    lam_dot = (
        (math.pi ** 2 / (4.0 * T))
        * math.sin(math.pi * inner)
        * math.sin(math.pi * t / T)
    )
    return lam, lam_dot
