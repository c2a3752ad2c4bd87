"""Parametrised unitaries ``U(theta) = exp(i theta H)`` and their diagrams.

The eigen-decomposition convention is ``H = V diag(lambda) V^dagger`` with
eigenvalues sorted ascending, so ``U(theta) = V diag(exp(i theta lambda)) V^dagger``
and computational basis index ``j`` of the middle diagonal block labels the
``j``-th eigenvector.

Circuits (:class:`ParamCircuit`) are gate lists over ``n`` qubits.  A
parametrised gate carries a generator ``G`` and an affine binding
``phi = mult * theta[param] + offset`` and acts as ``exp(i phi G)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import zxw_core as zx
from .paulis import PAULI, pauli_matrix, strings_commute
from .zxw_core import Binding, Diagram, DiagramError, Node

__all__ = [
    "HermitianGenerator",
    "eig_decompose",
    "exp_unitary",
    "rz_gen",
    "rx_gen",
    "ry_gen",
    "crz_gen",
    "cu1_gen",
    "pauli_gen",
    "repr_naive",
    "repr_two",
    "pauli_exp",
    "pauli_exp_diagram",
    "strings_commute",
    "DerivativeDiagram",
    "derivative_diagram",
    "crz_sim_diagram",
    "Gate",
    "ParamCircuit",
    "CONSTANT_GATES",
    "PARAM_GATES",
    "circuit_diagram",
    "gate_diagram",
]


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HermitianGenerator:
    """Hermitian matrix with a grouped eigen-decomposition.

    ``groups`` lists ``(eigenvalue, indices)`` with indices into the sorted
    eigenvalue array.  ``pauli`` is set when the generator is known to be
    ``coeff * P`` for a Pauli string ``P``; diagram builders use it to emit
    phase gadgets instead of dense basis changes.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray
    groups: tuple[tuple[float, tuple[int, ...]], ...]
    pauli: tuple[float, str] | None = None

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.matrix.shape[0]))

    @property
    def distinct(self) -> list[float]:
        return [lam for lam, _ in self.groups]

    def nonzero_groups(self, tol: float = 1e-8) -> list[tuple[float, tuple[int, ...]]]:
        return [(lam, idx) for lam, idx in self.groups if abs(lam) > tol]

    def spread(self) -> float:
        """Largest eigenvalue gap ``lambda_max - lambda_min``."""
        return float(self.eigenvalues[-1] - self.eigenvalues[0])


def eig_decompose(H: np.ndarray, degeneracy_tol: float = 1e-8, *, pauli: tuple[float, str] | None = None) -> HermitianGenerator:
    """Diagonalise a Hermitian matrix, grouping near-equal eigenvalues."""
    M = np.asarray(H, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] & (M.shape[0] - 1):
        raise ValueError("generator must be a square 2^q x 2^q matrix")
    if np.max(np.abs(M - M.conj().T), initial=0.0) > 1e-10:
        raise ValueError("generator is not Hermitian")
    lam, V = np.linalg.eigh(M)
    groups: list[list] = []
    for j, x in enumerate(lam):
        if groups and abs(x - groups[-1][0][-1]) <= degeneracy_tol:
            groups[-1][0].append(x)
            groups[-1][1].append(j)
        else:
            groups.append([[x], [j]])
    # snap each group to its mean so that degenerate eigenvalues are exactly equal
    snapped = lam.copy()
    out = []
    for vals, idx in groups:
        mean = float(np.mean(vals))
        if abs(mean) <= degeneracy_tol:
            mean = 0.0
        snapped[idx] = mean
        out.append((mean, tuple(idx)))
    return HermitianGenerator(M, snapped, V, tuple(out), pauli)


def exp_unitary(H: HermitianGenerator, theta: float) -> np.ndarray:
    V = H.eigenbasis
    return (V * np.exp(1j * theta * H.eigenvalues)) @ V.conj().T


def pauli_gen(P: str, coeff: float = -0.5) -> HermitianGenerator:
    """``coeff * P``; the default makes ``exp(i theta G)`` the Pauli exponential ``P(theta)``."""
    return eig_decompose(coeff * pauli_matrix(P), pauli=(coeff, P))


def rz_gen() -> HermitianGenerator:
    return pauli_gen("Z")


def rx_gen() -> HermitianGenerator:
    return pauli_gen("X")


def ry_gen() -> HermitianGenerator:
    return pauli_gen("Y")


def crz_gen() -> HermitianGenerator:
    return eig_decompose(np.diag([0.0, 0.0, -0.5, 0.5]))


def cu1_gen() -> HermitianGenerator:
    return eig_decompose(np.diag([0.0, 0.0, 0.0, 1.0]))


# ---------------------------------------------------------------------------
# Diagram representations
# ---------------------------------------------------------------------------


def _scaled(b: Binding, k: float) -> Binding:
    return Binding(b.param, b.mult * k, b.offset * k)


def _indicator_diagram(
    H: HermitianGenerator, groups: list[tuple[float, float, tuple[int, ...]]], binding: Binding
) -> Diagram:
    """``V . prod_j [phase lambda_j * phi on f_j] . V^dagger`` as one diagram.

    Each wire of the middle block is copied by a green spider into one
    function box per group; each box output ends in a one-legged green
    spider whose phase is bound to ``mult_j * phi``.  ``groups`` holds
    ``(mult_j, eigenvalue_j, sorted indices_j)``.
    """
    q = H.n_qubits
    m = len(groups)
    nodes: list[Node] = []
    counter = iter(range(10**9))
    inputs = tuple(next(counter) for _ in range(q))
    cur = list(inputs)
    frame = _frame(H)
    if frame is None:
        V = H.eigenbasis
        labels = [set(idx) for _, _, idx in groups]
        new = [next(counter) for _ in range(q)]
        nodes.append(Node(zx.MatrixBox(V.conj().T), tuple(cur), tuple(new)))
        cur = new
    else:
        # diagonal generator: work in the computational basis directly
        labels = [{x for x in range(2**q) if abs(frame[x] - lam) <= 1e-8} for _, lam, _ in groups]
    if m:
        taps: list[list[int]] = [[] for _ in range(m)]
        new = []
        for w in cur:
            out = next(counter)
            legs = [next(counter) for _ in range(m)]
            nodes.append(Node(zx.GreenSpider(0.0), (w,), (out,) + tuple(legs)))
            new.append(out)
            for j in range(m):
                taps[j].append(legs[j])
        cur = new
        for j, (mult, _, _) in enumerate(groups):
            table = [1 if x in labels[j] else 0 for x in range(2**q)]
            f_out = next(counter)
            nodes.append(Node(zx.FunctionBox(table, q, 1), tuple(taps[j]), (f_out,)))
            nodes.append(Node(zx.GreenSpider(0.0), (f_out,), (), _scaled(binding, mult)))
    if frame is None:
        new = [next(counter) for _ in range(q)]
        nodes.append(Node(zx.MatrixBox(V), tuple(cur), tuple(new)))
        cur = new
    return Diagram(tuple(nodes), inputs, tuple(cur))


def _frame(H: HermitianGenerator) -> np.ndarray | None:
    """Diagonal of ``H`` when ``H`` is diagonal, else ``None``."""
    M = H.matrix
    if np.max(np.abs(M - np.diag(np.diag(M))), initial=0.0) > 1e-12:
        return None
    return np.diag(M).real


def repr_naive(H: HermitianGenerator, binding: Binding = Binding(0)) -> Diagram:
    """One bound spider per non-zero eigenvalue, fed by its indicator function."""
    return _indicator_diagram(H, [(lam, lam, idx) for lam, idx in H.nonzero_groups()], binding)


def _two_split(H: HermitianGenerator) -> tuple[float, tuple[int, ...], float]:
    if len(H.groups) != 2:
        raise ValueError(f"generator has {len(H.groups)} distinct eigenvalues, expected 2")
    (la, ia), (lb, ib) = H.groups
    # lambda_2 is the more degenerate eigenvalue (ties: the smaller one), so
    # CU1 needs no global phase and RZ reads exp(-i theta/2) times a spider
    if len(ia) >= len(ib):
        return lb, ib, la
    return la, ia, lb


def repr_two(H: HermitianGenerator, binding: Binding = Binding(0)) -> Diagram:
    """Single bound spider with phase ``(lambda_1 - lambda_2) phi`` and global phase ``exp(i lambda_2 phi)``."""
    l1, idx1, l2 = _two_split(H)
    d = _indicator_diagram(H, [(l1 - l2, l1, idx1)], binding)
    if abs(l2) > 0:
        d = d.with_phase(_scaled(binding, l2))
    return d


def pauli_exp_diagram(P: str, binding: Binding) -> Diagram:
    """Diagram of ``exp(-i alpha P / 2)`` with ``alpha`` given by ``binding``.

    Each wire in the support of ``P`` is rotated into the Z basis, copied
    into a pink parity spider, and the parity is fed to a one-legged green
    spider bound to ``alpha``.  The ``exp(-i alpha / 2)`` prefactor is kept as
    a global phase term.  The scalar is exactly one.
    """
    if not P or any(ch not in PAULI for ch in P):
        raise ValueError(f"not a Pauli string: {P!r}")
    n = len(P)
    support = [k for k, ch in enumerate(P) if ch != "I"]
    if not support:
        return zx.identity(n).with_phase(_scaled(binding, -0.5))
    counter = iter(range(10**9))
    inputs = tuple(next(counter) for _ in range(n))
    cur = list(inputs)
    nodes: list[Node] = []

    def single(gens: list[zx.Gen], k: int) -> None:
        for g in gens:
            w = next(counter)
            nodes.append(Node(g, (cur[k],), (w,)))
            cur[k] = w

    # basis change C with P = C^dagger Z C per site: X -> H, Y -> H S^dagger
    to_z = {"X": [zx.Hadamard()], "Y": [zx.GreenSpider(-np.pi / 2), zx.Hadamard()], "Z": []}
    from_z = {"X": [zx.Hadamard()], "Y": [zx.Hadamard(), zx.GreenSpider(np.pi / 2)], "Z": []}
    for k in support:
        single(to_z[P[k]], k)
    taps = []
    for k in support:
        out, tap = next(counter), next(counter)
        nodes.append(Node(zx.GreenSpider(0.0), (cur[k],), (out, tap)))
        cur[k] = out
        taps.append(tap)
    par_out = next(counter)
    nodes.append(Node(zx.PinkSpider(0.0), tuple(taps), (par_out,)))
    nodes.append(Node(zx.GreenSpider(0.0), (par_out,), (), binding))
    for k in support:
        single(from_z[P[k]], k)
    return Diagram(tuple(nodes), inputs, tuple(cur)).with_phase(_scaled(binding, -0.5))


def pauli_exp(P: str, alpha: float) -> tuple[np.ndarray, Diagram]:
    """``exp(-i alpha P / 2)`` as a dense matrix and as a parameter-free diagram."""
    if not P:
        raise ValueError("empty Pauli string")
    M = pauli_matrix(P)
    U = np.cos(alpha / 2) * np.eye(M.shape[0]) - 1j * np.sin(alpha / 2) * M
    b = Binding(0, 0.0, float(alpha))
    d = pauli_exp_diagram(P, b)
    # resolve the (constant) bindings into plain phases
    return U, _freeze(d, [0.0])


def _freeze(d: Diagram, theta: Sequence[float]) -> Diagram:
    nodes = []
    for nd in d.nodes:
        if nd.binding is not None:
            nodes.append(Node(zx.Gen(nd.gen.kind, value=nd.binding.phase(theta)), nd.ins, nd.outs))
        else:
            nodes.append(nd)
    scalar = d.scalar
    for b in d.phase_terms:
        scalar *= np.exp(1j * b.phase(theta))
    return Diagram(tuple(nodes), d.inputs, d.outputs, scalar)


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeDiagram:
    """Doubled diagram with exposed spider legs wired into a differentiation gadget.

    ``diagram`` already includes ``scale`` in its scalar; evaluating it at
    ``theta`` gives the entrywise derivative of the doubled diagram.
    """

    base: Diagram
    gadget_legs: int
    scale: complex
    diagram: Diagram


def derivative_diagram(d: Diagram, param: int) -> DerivativeDiagram:
    """Derivative of ``double(d)`` with respect to ``theta[param]`` as one diagram.

    Every spider bound to ``param`` gets an extra leg in both halves of the
    doubled diagram.  A pink pi state feeds a W spider with one leg per
    spider; leg ``j`` passes a box labelled with the spider's multiplier and
    a splitter ``N`` sending ``|0> -> |++>`` and ``|1> -> |01> - |10>`` into the
    two exposed legs.  The overall scale is ``-i 2^(n-1)``.
    """
    D = zx.double(d)
    half = len(d.nodes)
    targets = [k for k, nd in enumerate(d.nodes) if nd.binding is not None and nd.binding.param == param]
    for nd in d.nodes:
        if nd.binding is not None and nd.binding.param == param and nd.gen.kind != "green":
            raise DiagramError("parameter occurs inside a non-green construct; rewrite it as a green spider")
    n = len(targets)
    if n == 0:
        return DerivativeDiagram(D, 0, 0.0, D.scaled(0.0))
    next_id = D.max_wire() + 1
    nodes = list(D.nodes)
    legs: list[tuple[int, int]] = []
    for k in targets:
        pair = []
        for idx in (k, k + half):
            nd = nodes[idx]
            w = next_id
            next_id += 1
            nodes[idx] = Node(nd.gen, nd.ins, nd.outs + (w,), nd.binding)
            pair.append(w)
        legs.append((pair[0], pair[1]))
    # the exposed legs become extra outputs of the base diagram
    exposed = tuple(w for pair in legs for w in pair)
    base = Diagram(tuple(nodes), D.inputs, D.outputs + exposed, D.scalar, D.phase_terms)
    # gadget
    g: list[Node] = []
    src = next_id
    next_id += 1
    g.append(Node(zx.PinkSpider(np.pi), (), (src,)))
    w_outs = tuple(range(next_id, next_id + n))
    next_id += n
    g.append(Node(zx.WBranch(), (src,), w_outs))
    for j, k in enumerate(targets):
        mult = d.nodes[k].binding.mult
        b_out = next_id
        next_id += 1
        g.append(Node(zx.GreenBox(mult), (w_outs[j],), (b_out,)))
        # splitter N = (H (x) H)(I (x) Z) W(1->2)
        w1, w2, z2 = next_id, next_id + 1, next_id + 2
        next_id += 3
        g.append(Node(zx.WBranch(), (b_out,), (w1, w2)))
        g.append(Node(zx.GreenSpider(np.pi), (w2,), (z2,)))
        a, c = legs[j]
        g.append(Node(zx.Hadamard(), (w1,), (a,)))
        g.append(Node(zx.Hadamard(), (z2,), (c,)))
    scale = -1j * 2.0 ** (n - 1)
    full = Diagram(tuple(nodes) + tuple(g), D.inputs, D.outputs, D.scalar * scale, D.phase_terms)
    return DerivativeDiagram(base, n, scale, full)


def crz_sim_diagram(H: HermitianGenerator, lam: float | None = None) -> Diagram:
    """CRZ(theta) simulated by a gate whose generator has eigenvalues ``-lam, 0, lam``.

    Two control wires are copied by green spiders; one copy is encoded by a
    function box into an eigenbasis label, runs through ``U(theta / (2 lam))``
    in its diagonal frame, and is decoded again into the other copy.
    """
    distinct = H.distinct
    if lam is None:
        lam = max(abs(x) for x in distinct)
    if len(distinct) != 3 or not np.allclose(sorted(distinct), [-lam, 0.0, lam], atol=1e-8):
        raise ValueError("generator must have eigenvalues -lam, 0, lam")
    q = H.n_qubits
    idx = {lam_: ids[0] for lam_, ids in H.groups}
    x_m = idx[min(idx)]
    x_p = idx[max(idx)]
    x_0 = [ids[0] for lam_, ids in H.groups if abs(lam_) < 1e-8][0]
    table = [x_0, x_0, x_m, x_p]
    enc = zx.FunctionBox(table, 2, q)
    enc_m = zx.generator_matrix(enc, 2, q)
    # middle: V^dagger U V is diagonal; represent it by the naive construction
    # with the identity basis and the parameter rescaled by 1 / (2 lam)
    diag_gen = eig_decompose(np.diag(H.eigenvalues))
    middle = repr_naive(diag_gen, Binding(0, 1.0 / (2 * lam)))
    counter = iter(range(10**9))
    nodes: list[Node] = []
    ins = (next(counter), next(counter))
    outs = (next(counter), next(counter))
    to_enc = (next(counter), next(counter))
    from_dec = (next(counter), next(counter))
    for k in range(2):
        nodes.append(Node(zx.GreenSpider(0.0), (ins[k], from_dec[k]), (outs[k], to_enc[k])))
    off = 10**6
    mid = middle.relabel(lambda w: w + off)
    nodes.append(Node(enc, to_enc, mid.inputs))
    nodes.extend(mid.nodes)
    nodes.append(Node(zx.MatrixBox(enc_m.T), mid.outputs, from_dec))
    return Diagram(tuple(nodes), ins, outs)


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------

_S = np.diag([1, 1j])
CONSTANT_GATES: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "X": PAULI["X"],
    "Y": PAULI["Y"],
    "Z": PAULI["Z"],
    "S": _S.astype(complex),
    "SDG": _S.conj().astype(complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

PARAM_GATES = {
    "RX": rx_gen,
    "RY": ry_gen,
    "RZ": rz_gen,
    "CRZ": crz_gen,
    "CU1": cu1_gen,
}


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit gate: either ``matrix`` (constant) or ``generator`` with ``binding``."""

    name: str
    targets: tuple[int, ...]
    matrix: np.ndarray | None = None
    generator: HermitianGenerator | None = None
    binding: Binding | None = None

    @property
    def parametrised(self) -> bool:
        return self.generator is not None

    def unitary(self, theta: Sequence[float]) -> np.ndarray:
        if self.generator is None:
            return self.matrix
        return exp_unitary(self.generator, self.binding.phase(theta))


@dataclass(frozen=True)
class ParamCircuit:
    """Ordered gate list on ``qubits`` wires with ``n_params`` parameters."""

    qubits: int
    n_params: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for g in self.gates:
            if len(set(g.targets)) != len(g.targets) or any(not 0 <= t < self.qubits for t in g.targets):
                raise ValueError(f"gate {g.name} has invalid targets {g.targets}")
            dim = 2 ** len(g.targets)
            m = g.matrix if g.generator is None else g.generator.matrix
            if m.shape != (dim, dim):
                raise ValueError(f"gate {g.name} acts on {len(g.targets)} wires but has shape {m.shape}")
            if g.generator is not None and not 0 <= g.binding.param < self.n_params:
                raise ValueError(f"gate {g.name} binds parameter {g.binding.param} of {self.n_params}")

    # -- builders -----------------------------------------------------------
    def add(self, gate: Gate) -> "ParamCircuit":
        return replace(self, gates=self.gates + (gate,))

    def const(self, name: str, *targets: int) -> "ParamCircuit":
        return self.add(Gate(name.upper(), tuple(targets), matrix=CONSTANT_GATES[name.upper()]))

    def rot(self, name: str, targets: int | Sequence[int], param: int, mult: float = 1.0, offset: float = 0.0) -> "ParamCircuit":
        """Named rotation (RX, RY, RZ, CRZ, CU1) or ``exp:<Pauli string>``."""
        tg = (targets,) if isinstance(targets, (int, np.integer)) else tuple(targets)
        return self.add(Gate(name, tg, generator=generator_by_name(name), binding=Binding(param, mult, offset)))

    def gadget(self, P: str, targets: Sequence[int], param: int, mult: float = 1.0, offset: float = 0.0) -> "ParamCircuit":
        """Pauli exponential ``exp(-i phi P / 2)`` on ``targets``."""
        return self.rot(f"exp:{P}", targets, param, mult, offset)

    # -- inspection -----------------------------------------------------------
    def occurrences(self, param: int) -> list[int]:
        return [k for k, g in enumerate(self.gates) if g.generator is not None and g.binding.param == param]

    def unitary(self, theta: Sequence[float]) -> np.ndarray:
        """Dense ``2^n x 2^n`` unitary (test oracle; wire 0 is the MSB)."""
        n = self.qubits
        U = np.eye(2**n, dtype=complex)
        for g in self.gates:
            U = embed(g.unitary(theta), g.targets, n) @ U
        return U

    # -- serialisation -------------------------------------------------------------
    def to_json(self) -> str:
        gates = []
        for g in self.gates:
            entry = {"name": g.name, "targets": list(g.targets)}
            if g.binding is not None:
                entry["bind"] = {"param": g.binding.param, "mult": g.binding.mult, "offset": g.binding.offset}
            gates.append(entry)
        return json.dumps({"qubits": self.qubits, "params": self.n_params, "gates": gates}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ParamCircuit":
        obj = json.loads(text)
        try:
            c = cls(int(obj["qubits"]), int(obj.get("params", 0)))
            for entry in obj["gates"]:
                name = str(entry["name"])
                targets = [int(t) for t in entry["targets"]]
                if "bind" in entry:
                    b = entry["bind"]
                    c = c.rot(name, targets, int(b["param"]), float(b.get("mult", 1.0)), float(b.get("offset", 0.0)))
                else:
                    if name.upper() not in CONSTANT_GATES:
                        raise ValueError(f"unknown constant gate {name!r}")
                    c = c.const(name, *targets)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed circuit description: {exc}") from exc
        return c


def generator_by_name(name: str) -> HermitianGenerator:
    key = name.upper()
    if key in PARAM_GATES:
        return PARAM_GATES[key]()
    if key.startswith("EXP:"):
        return pauli_gen(key[4:])
    raise ValueError(f"unknown parametrised gate {name!r}")


def embed(m: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Lift a ``k``-qubit matrix on ``targets`` to the full ``n``-qubit space."""
    k = len(targets)
    rest = [q for q in range(n) if q not in targets]
    order = list(targets) + rest
    full = np.kron(m, np.eye(2 ** (n - k)))
    t = full.reshape((2,) * (2 * n))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    return t.reshape(2**n, 2**n)


_CONST_DIAGRAMS = {
    "H": lambda: zx.atom(zx.Hadamard()),
    "X": lambda: zx.pink(np.pi, 1, 1),
    "Z": lambda: zx.green(np.pi, 1, 1),
    "Y": lambda: zx.seq(zx.green(np.pi, 1, 1), zx.pink(np.pi, 1, 1)).scaled(1j),
    "S": lambda: zx.green(np.pi / 2, 1, 1),
    "SDG": lambda: zx.green(-np.pi / 2, 1, 1),
    "CNOT": zx.cnot,
    "CZ": zx.cz,
    "SWAP": lambda: zx.atom(zx.Swap()),
}


def gate_diagram(g: Gate) -> Diagram:
    """Diagram of one gate on its own target wires."""
    if g.generator is None:
        if g.name in _CONST_DIAGRAMS:
            return _CONST_DIAGRAMS[g.name]()
        return zx.atom(zx.MatrixBox(g.matrix))
    G = g.generator
    if G.pauli is not None:
        coeff, P = G.pauli
        # exp(i phi coeff P) = exp(-i alpha P / 2) with alpha = -2 coeff phi
        return pauli_exp_diagram(P, _scaled(g.binding, -2.0 * coeff))
    if len(G.groups) == 2:
        return repr_two(G, g.binding)
    return repr_naive(G, g.binding)


def circuit_diagram(c: ParamCircuit) -> Diagram:
    """Whole circuit as a diagram with bound spiders (wire ``k`` is qubit ``k``)."""
    d = zx.identity(c.qubits)
    for g in c.gates:
        gd = gate_diagram(g)
        off = d.max_wire() + 1
        gd = gd.relabel(lambda w: w + off)
        outs = list(d.outputs)
        link = {gd.inputs[j]: outs[t] for j, t in enumerate(g.targets)}
        gd = gd.relabel(lambda w: link.get(w, w))
        for j, t in enumerate(g.targets):
            outs[t] = gd.outputs[j]
        d = Diagram(d.nodes + gd.nodes, d.inputs, tuple(outs), d.scalar * gd.scalar, d.phase_terms + gd.phase_terms)
    return d
