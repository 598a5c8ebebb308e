"""Intermediate representation for synthesized evolution circuits.

A circuit is a list of time steps; each step carries a generator table
(name -> PauliSum) and an ordered factor list. Factor lists are written
in matrix-product order: factors[0] is the leftmost operator of the
written product, so it acts on the state LAST. Simulators must apply a
factor list in reverse. Rotation tuples inside a rotations factor follow
the same convention.

Factor kinds:
  exp        U = exp(scale * G) for a named generator G
  analog     same semantics, but flagged as one hardware analog block
  rotations  product of single-qubit rotations R_axis(angle)
             = exp(-i * angle/2 * sigma_axis) at the listed sites
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .pauli import PauliSum

KIND_EXP = "exp"
KIND_ANALOG = "analog"
KIND_ROTATIONS = "rotations"

_AXES = ("x", "y", "z")

Rotation = Tuple[int, str, float]


@dataclass(frozen=True)
class Factor:
    kind: str
    name: str
    scale: complex = 0j
    rotations: Tuple[Rotation, ...] = ()
    tag: str = ""

    def __post_init__(self):
        if self.kind not in (KIND_EXP, KIND_ANALOG, KIND_ROTATIONS):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == KIND_ROTATIONS:
            for site, axis, _ in self.rotations:
                if axis not in _AXES:
                    raise ValueError(f"bad rotation axis {axis!r}")
                if site < 0:
                    raise ValueError("negative site index")


def exp_factor(name: str, scale: complex, tag: str = "") -> Factor:
    return Factor(KIND_EXP, name, complex(scale), (), tag)


def analog_factor(name: str, scale: complex, tag: str = "") -> Factor:
    return Factor(KIND_ANALOG, name, complex(scale), (), tag)


def rotation_layer(rotations: Iterable[Rotation], name: str = "rot", tag: str = "") -> Factor:
    rots = tuple((int(s), a, float(th)) for s, a, th in rotations)
    return Factor(KIND_ROTATIONS, name, 0j, rots, tag)


def inverse_rotation_layer(layer: Factor, name: Optional[str] = None) -> Factor:
    """Adjoint of a rotation layer: reversed order, negated angles."""
    if layer.kind != KIND_ROTATIONS:
        raise ValueError("not a rotation layer")
    rots = tuple((s, a, -th) for s, a, th in reversed(layer.rotations))
    return Factor(KIND_ROTATIONS, name or layer.name + "_dag", 0j, rots, layer.tag)


@dataclass
class Step:
    index: int
    t_mid: float
    lam: float
    lam_dot: float
    generators: Dict[str, PauliSum] = field(default_factory=dict)
    factors: List[Factor] = field(default_factory=list)

    def exp_tally(self) -> Counter:
        """Exponential-factor counts per generator name (exp and analog kinds)."""
        return Counter(f.name for f in self.factors if f.kind != KIND_ROTATIONS)

    def analog_block_count(self) -> int:
        return sum(1 for f in self.factors if f.kind == KIND_ANALOG)


@dataclass
class CircuitIR:
    n_qubits: int
    method: str
    meta: Dict[str, object] = field(default_factory=dict)
    steps: List[Step] = field(default_factory=list)

    def validate(self) -> None:
        for step in self.steps:
            for gen in step.generators.values():
                if gen.n_qubits != self.n_qubits:
                    raise ValueError("generator qubit count mismatch")
            for f in step.factors:
                if f.kind != KIND_ROTATIONS and f.name not in step.generators:
                    raise ValueError(f"factor references unknown generator {f.name!r}")
                if f.kind == KIND_ROTATIONS:
                    for site, _, _ in f.rotations:
                        if site >= self.n_qubits:
                            raise ValueError("rotation site out of range")

    def exp_tally(self) -> Counter:
        total: Counter = Counter()
        for step in self.steps:
            total.update(step.exp_tally())
        return total

    def analog_block_count(self) -> int:
        return sum(step.analog_block_count() for step in self.steps)

    def to_json_obj(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "method": self.method,
            "meta": dict(sorted(self.meta.items())),
            "steps": [_step_to_json(s) for s in self.steps],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CircuitIR":
        circ = cls(int(obj["n_qubits"]), str(obj["method"]), dict(obj.get("meta", {})))
        for sobj in obj["steps"]:
            gens = {
                name: PauliSum.from_json_obj(int(obj["n_qubits"]), terms)
                for name, terms in sobj["generators"].items()
            }
            factors = [_factor_from_json(fobj) for fobj in sobj["factors"]]
            circ.steps.append(
                Step(
                    int(sobj["index"]),
                    float(sobj["t_mid"]),
                    float(sobj["lam"]),
                    float(sobj["lam_dot"]),
                    gens,
                    factors,
                )
            )
        circ.validate()
        return circ


def _factor_to_json(f: Factor) -> dict:
    obj = {"kind": f.kind, "name": f.name, "tag": f.tag}
    if f.kind == KIND_ROTATIONS:
        obj["rotations"] = [[s, a, th] for s, a, th in f.rotations]
    else:
        obj["scale"] = {"re": f.scale.real, "im": f.scale.imag}
    return obj


def _factor_from_json(obj: dict) -> Factor:
    kind = obj["kind"]
    if kind == KIND_ROTATIONS:
        return rotation_layer(
            [(int(s), str(a), float(th)) for s, a, th in obj["rotations"]],
            name=obj["name"],
            tag=obj.get("tag", ""),
        )
    scale = complex(obj["scale"]["re"], obj["scale"]["im"])
    maker = exp_factor if kind == KIND_EXP else analog_factor
    return maker(obj["name"], scale, tag=obj.get("tag", ""))


def _step_to_json(s: Step) -> dict:
    return {
        "index": s.index,
        "t_mid": s.t_mid,
        "lam": s.lam,
        "lam_dot": s.lam_dot,
        "generators": {
            name: s.generators[name].to_json_obj() for name in sorted(s.generators)
        },
        "factors": [_factor_to_json(f) for f in s.factors],
    }
