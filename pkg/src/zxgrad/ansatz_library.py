"""Benchmark ansätze: the Sim family, the IQP family and a small two-gadget example.

Layouts (one layer; ``q`` runs over all qubits, wire 0 on top):

``sim1``   RX(q), RZ(q)
``sim2``   RX(q), RZ(q), then CNOT(q+1 -> q) from the bottom pair upwards
``sim9``   H(q), CZ(q, q+1) from the bottom pair upwards, RX(q)
``sim10``  RY(q), CZ ring (bottom pair upwards, then CZ(0, n-1)), RY(q)
``sim11``  RY(q), RZ(q), CNOT(2k+1 -> 2k), then on wires 1..n-2
           RY, RZ and CNOT(2k+2 -> 2k+1)
``sim12``  as ``sim11`` with CZ in place of CNOT
``sim15``  RY(q), CNOT ring with stride +1 (n-1 -> 0 first), RY(q),
           CNOT ring with stride -1 (n-1 -> n-2 first)

IQP circuits repeat a block (Hadamard column, diagonal block) ``layers``
times and finish with one Hadamard column.  Diagonal blocks:

``iqp1``   one phase gadget on all wires
``iqp2``   phase gadgets on pairs (0,1), (2,3), ...; even ``n`` only
``iqp3``   RZ on every wire and phase gadgets on neighbours (q, q+1)
``iqp4``   CRZ(2 theta) on neighbours (q, q+1), so every parameter drives
           two spiders

``intro`` is Hadamards, a full-width gadget, Hadamards and a second gadget.

Phase gadgets are ``exp(-i theta Z..Z / 2)``.  Parameters are numbered
layer by layer, then by the topmost wire of the gate, then left to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .param_unitaries import ParamCircuit
from .paulis import PauliHamiltonian, parse_hamiltonian

__all__ = [
    "AnsatzSpec",
    "AnsatzError",
    "FAMILIES",
    "build",
    "parse_hamiltonian",
    "hamiltonian_for",
    "random_circuit",
    "PauliHamiltonian",
]


class AnsatzError(ValueError):
    """Invalid (family, n, layers) combination."""


# A layer is described as a list of entries: ("const", name, targets) or
# ("rot", name, targets, mult); rotation entries receive fresh parameters.
Entry = tuple
LayerFn = Callable[[int], list[Entry]]


def _col(name: str, n: int, qubits=None) -> list[Entry]:
    return [("rot", name, (q,), 1.0) for q in (range(n) if qubits is None else qubits)]


def _consts(name: str, pairs) -> list[Entry]:
    return [("const", name, p) for p in pairs]


def _ladder_up(n: int) -> list[tuple[int, int]]:
    """Neighbour pairs from the bottom of the register upwards: (n-1, n-2), ..., (1, 0)."""
    return [(q + 1, q) for q in range(n - 2, -1, -1)]


def _sim1(n):
    return _col("RX", n) + _col("RZ", n)


def _sim2(n):
    return _sim1(n) + _consts("CNOT", _ladder_up(n))


def _sim9(n):
    return [("const", "H", (q,)) for q in range(n)] + _consts("CZ", _ladder_up(n)) + _col("RX", n)


def _sim10(n):
    ring = _ladder_up(n) + ([(0, n - 1)] if n > 2 else [])
    return _col("RY", n) + _consts("CZ", ring) + _col("RY", n)


def _sim11_like(gate: str):
    def layer(n):
        first = [(2 * k + 1, 2 * k) for k in range(n // 2)]
        second = [(2 * k + 2, 2 * k + 1) for k in range((n - 1) // 2)]
        mid = range(1, n - 1)
        return (
            _col("RY", n)
            + _col("RZ", n)
            + _consts(gate, first)
            + _col("RY", n, mid)
            + _col("RZ", n, mid)
            + _consts(gate, second)
        )

    return layer


def _sim15(n):
    if n < 2:
        return _col("RY", n) + _col("RY", n)
    ring1 = [(n - 1, 0)] + [(q - 1, q) for q in range(n - 1, 0, -1)]
    ring2 = [(n - 1, n - 2), (0, n - 1)] + [(q, q - 1) for q in range(1, n - 1)]
    return _col("RY", n) + _consts("CNOT", ring1) + _col("RY", n) + _consts("CNOT", ring2)


def _gadget(q: tuple[int, ...]) -> Entry:
    return ("gadget", "Z" * len(q), q, 1.0)


def _iqp_block(pairs_fn) -> LayerFn:
    def layer(n):
        return [("const", "H", (q,)) for q in range(n)] + pairs_fn(n)

    return layer


def _iqp1(n):
    return [_gadget(tuple(range(n)))]


def _iqp2(n):
    return [_gadget((2 * k, 2 * k + 1)) for k in range(n // 2)]


def _iqp3(n):
    return _col("RZ", n) + [_gadget((q, q + 1)) for q in range(n - 1)]


def _iqp4(n):
    return [("rot", "CRZ", (q, q + 1), 2.0) for q in range(n - 1)]


@dataclass(frozen=True)
class _Family:
    layer: LayerFn
    min_n: int = 1
    even_only: bool = False
    closing_h: bool = False
    fixed_layers: int | None = None


FAMILIES: dict[str, _Family] = {
    "sim1": _Family(_sim1),
    "sim2": _Family(_sim2),
    "sim9": _Family(_sim9),
    "sim10": _Family(_sim10),
    "sim11": _Family(_sim11_like("CNOT"), min_n=2),
    "sim12": _Family(_sim11_like("CZ"), min_n=2),
    "sim15": _Family(_sim15),
    "iqp1": _Family(_iqp_block(_iqp1), closing_h=True),
    "iqp2": _Family(_iqp_block(_iqp2), min_n=2, even_only=True, closing_h=True),
    "iqp3": _Family(_iqp_block(_iqp3), min_n=2, closing_h=True),
    "iqp4": _Family(_iqp_block(_iqp4), min_n=2, closing_h=True),
    "intro": _Family(_iqp_block(_iqp1), fixed_layers=2),
}


@dataclass(frozen=True)
class AnsatzSpec:
    family: str
    n: int
    layers: int = 1

    def __post_init__(self) -> None:
        key = self.family.lower()
        object.__setattr__(self, "family", key)
        if key not in FAMILIES:
            raise AnsatzError(f"unknown ansatz family {self.family!r}; choose from {sorted(FAMILIES)}")
        fam = FAMILIES[key]
        if self.n < fam.min_n:
            raise AnsatzError(f"{key} needs at least {fam.min_n} qubits")
        if fam.even_only and self.n % 2:
            raise AnsatzError(f"{key} is only defined for an even number of qubits")
        if self.layers < 1:
            raise AnsatzError("layers must be positive")
        if fam.fixed_layers is not None and self.layers not in (1, fam.fixed_layers):
            raise AnsatzError(f"{key} has a fixed depth")


def build(spec: AnsatzSpec) -> ParamCircuit:
    fam = FAMILIES[spec.family]
    n = spec.n
    layers = fam.fixed_layers or spec.layers
    pid = 0
    gates = []
    for _ in range(layers):
        entries = fam.layer(n)
        rots = [(min(e[2]), k) for k, e in enumerate(entries) if e[0] != "const"]
        ids = {k: pid + rank for rank, (_, k) in enumerate(sorted(rots))}
        pid += len(rots)
        gates.append((entries, ids))
    c = ParamCircuit(n, pid)
    for entries, ids in gates:
        for k, e in enumerate(entries):
            if e[0] == "const":
                c = c.const(e[1], *e[2])
            elif e[0] == "gadget":
                c = c.gadget(e[1], e[2], ids[k], mult=e[3])
            else:
                c = c.rot(e[1], e[2], ids[k], mult=e[3])
    if fam.closing_h:
        for q in range(n):
            c = c.const("H", q)
    return c


def hamiltonian_for(pattern: str, n: int) -> PauliHamiltonian:
    """Hamiltonian from a ``--h`` style pattern (``Z^n``, ``(YX)^(n/2)``, sums...)."""
    return parse_hamiltonian(pattern, n)


_RANDOM_ROTATIONS = ("RX", "RY", "RZ", "gadget", "CU1")
_RANDOM_CONSTS = ("H", "S", "CNOT", "CZ")


def random_circuit(
    rng: np.random.Generator,
    max_qubits: int = 3,
    max_params: int = 4,
    occurrences: int = 1,
    mults: tuple[float, ...] = (1.0, -1.0, 2.0),
) -> ParamCircuit:
    """Random circuit for cross-checks.

    Every parameter drives ``occurrences`` rotations drawn from RX, RY, RZ,
    Pauli gadgets and CU1, each with a random multiplier and offset.  Short
    runs of constant gates (H, S, CNOT, CZ) are interleaved so that the
    expectation values are rarely trivial.
    """
    n = int(rng.integers(1, max_qubits + 1))
    m = int(rng.integers(1, max_params + 1))
    c = ParamCircuit(n, m)
    slots = [p for p in range(m) for _ in range(occurrences)]
    for p in rng.permutation(slots):
        for _ in range(int(rng.integers(0, 3))):
            name = str(rng.choice(_RANDOM_CONSTS if n > 1 else _RANDOM_CONSTS[:2]))
            arity = 2 if name in ("CNOT", "CZ") else 1
            c = c.const(name, *(int(q) for q in rng.choice(n, arity, replace=False)))
        kind = str(rng.choice(_RANDOM_ROTATIONS if n > 1 else _RANDOM_ROTATIONS[:4]))
        mult = float(rng.choice(mults))
        offset = float(rng.uniform(-np.pi, np.pi))
        if kind == "gadget":
            k = int(rng.integers(1, n + 1))
            targets = [int(q) for q in rng.choice(n, k, replace=False)]
            c = c.gadget("".join(rng.choice(list("XYZ"), k)), targets, int(p), mult, offset)
        elif kind == "CU1":
            c = c.rot("CU1", [int(q) for q in rng.choice(n, 2, replace=False)], int(p), mult, offset)
        else:
            c = c.rot(kind, int(rng.integers(n)), int(p), mult, offset)
    return c
