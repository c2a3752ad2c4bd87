"""ZXW diagrams as tensor networks.

A :class:`Diagram` is a bag of generator nodes whose legs are labelled by
integer wire ids.  Every wire id occurs exactly twice across node legs and
the ordered boundary, so "only connectivity matters" holds by construction:
evaluation contracts the network and never looks at node order.

Conventions
-----------
* Wire 0 of a boundary is the most significant bit of a basis index.
* A node with ``n_in`` inputs and ``n_out`` outputs stands for a
  ``2**n_out x 2**n_in`` matrix; as a tensor its axes are ordered
  ``(outputs..., inputs...)``.
* Phases of green and red spiders may be *bound* to a circuit parameter via
  an affine :class:`Binding`; bound phases are resolved when a parameter
  vector is passed to :func:`evaluate`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "Binding",
    "Gen",
    "GreenBox",
    "GreenSpider",
    "PinkSpider",
    "RedSpider",
    "Hadamard",
    "WBranch",
    "Triangle",
    "TriangleInverse",
    "Cup",
    "Cap",
    "Swap",
    "Wire",
    "FunctionBox",
    "MatrixBox",
    "Node",
    "Diagram",
    "DiagramError",
    "generator_matrix",
    "atom",
    "identity",
    "empty",
    "compose_seq",
    "compose_par",
    "seq",
    "par",
    "evaluate",
    "conjugate",
    "double",
    "check_equal",
    "contract_network",
    "permute_inputs",
    "permute_outputs",
    "green",
    "box",
    "pink",
    "red",
    "w_spider",
    "hadamards",
    "connect",
    "basis_state",
    "basis_effect",
    "cnot",
    "cz",
    "pauli_box",
    "w_decomposition",
    "RuleResult",
    "rule_cases",
    "rule_suite",
]

SQRT2 = np.sqrt(2.0)
HAD = np.array([[1.0, 1.0], [1.0, -1.0]]) / SQRT2


class DiagramError(ValueError):
    """Raised for malformed diagrams or illegal generator arities."""


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Binding:
    """Affine parameter binding ``phase = mult * theta[param] + offset``."""

    param: int
    mult: float = 1.0
    offset: float = 0.0

    def phase(self, theta: Sequence[float]) -> float:
        return self.mult * float(theta[self.param]) + self.offset

    def negated(self) -> "Binding":
        return Binding(self.param, -self.mult, -self.offset)


@dataclass(frozen=True, eq=False)
class Gen:
    """A generator kind together with its data.

    ``kind`` is one of ``green_box, green, red, pink, had, w, tri, tri_inv,
    cup, cap, swap, wire, func, matrix``.  Use the constructor helpers
    (:func:`GreenBox`, :func:`GreenSpider`, ...) rather than building this
    directly.
    """

    kind: str
    value: complex = 0.0
    sign: int = 1
    table: tuple | None = None
    arity: tuple | None = None
    matrix: np.ndarray | None = None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        extra = ""
        if self.kind in ("green_box", "green", "red", "pink"):
            extra = f"({self.value:.4g})"
        return f"Gen<{self.kind}{extra}>"


def GreenBox(a: complex) -> Gen:
    return Gen("green_box", value=complex(a))


def GreenSpider(phase: float) -> Gen:
    return Gen("green", value=float(phase))


def RedSpider(phase: float) -> Gen:
    return Gen("red", value=float(phase))


def PinkSpider(phase: float) -> Gen:
    """Rescaled red spider; only phases 0 and pi are defined."""
    ph = float(phase) % (2 * np.pi)
    if np.isclose(ph, 0.0, atol=1e-12) or np.isclose(ph, 2 * np.pi, atol=1e-12):
        return Gen("pink", value=0.0)
    if np.isclose(ph, np.pi, atol=1e-12):
        return Gen("pink", value=np.pi)
    raise DiagramError(f"pink spider phase must be 0 or pi, got {phase}")


def Hadamard() -> Gen:
    return Gen("had")


def WBranch() -> Gen:
    """Black triangle / W spider (``1 -> k`` or its input-legged ``k -> 1`` form)."""
    return Gen("w")


def Triangle(sign: int = 1) -> Gen:
    """``[[1, sign], [0, 1]]``; ``sign=-1`` gives its inverse."""
    return Gen("tri", sign=int(np.sign(sign)) or 1)


def TriangleInverse(sign: int = 1) -> Gen:
    """``[[1, 0], [sign, 1]]``; the transpose of :func:`Triangle`."""
    return Gen("tri_inv", sign=int(np.sign(sign)) or 1)


def Cup() -> Gen:
    return Gen("cup")


def Cap() -> Gen:
    return Gen("cap")


def Swap() -> Gen:
    return Gen("swap")


def Wire() -> Gen:
    return Gen("wire")


def FunctionBox(f: Callable[[tuple], tuple] | Sequence[int], k: int, m: int) -> Gen:
    """Boolean function ``{0,1}^k -> {0,1}^m`` as a permutation-like box.

    ``f`` is either a callable on bit tuples returning a bit tuple, or a
    lookup table of output indices (one per input index, wire 0 = MSB).
    """
    if callable(f):
        table = []
        for x in range(2**k):
            bits = tuple((x >> (k - 1 - j)) & 1 for j in range(k))
            out = tuple(int(b) for b in f(bits))
            if len(out) != m or any(b not in (0, 1) for b in out):
                raise DiagramError("function box must return m bits")
            table.append(int("".join(map(str, out)) or "0", 2))
    else:
        table = [int(v) for v in f]
    if len(table) != 2**k or any(not 0 <= v < 2**m for v in table):
        raise DiagramError("function box table has the wrong shape")
    return Gen("func", table=tuple(table), arity=(k, m))


def MatrixBox(matrix: np.ndarray) -> Gen:
    """Opaque dense box (used for eigenbasis changes ``V``)."""
    m = np.asarray(matrix, dtype=complex)
    r, c = m.shape
    if r & (r - 1) or c & (c - 1):
        raise DiagramError("matrix box dimensions must be powers of two")
    return Gen("matrix", matrix=m, arity=(int(np.log2(c)), int(np.log2(r))))


_FIXED_ARITY = {
    "had": (1, 1),
    "tri": (1, 1),
    "tri_inv": (1, 1),
    "cup": (0, 2),
    "cap": (2, 0),
    "swap": (2, 2),
    "wire": (1, 1),
}
_SPIDERS = ("green_box", "green", "red", "pink")


def _check_arity(gen: Gen, n_in: int, n_out: int) -> None:
    if n_in < 0 or n_out < 0:
        raise DiagramError("negative arity")
    if gen.kind in _FIXED_ARITY and (n_in, n_out) != _FIXED_ARITY[gen.kind]:
        raise DiagramError(f"{gen.kind} requires arity {_FIXED_ARITY[gen.kind]}, got {(n_in, n_out)}")
    if gen.kind == "w" and not ((n_in == 1 and n_out >= 1) or (n_out == 1 and n_in >= 1)):
        raise DiagramError("W spider is built for 1 -> k or k -> 1")
    if gen.kind in ("func", "matrix") and (n_in, n_out) != gen.arity:
        raise DiagramError(f"{gen.kind} box requires arity {gen.arity}")


def _spider_diag(a: complex, legs: int) -> np.ndarray:
    """Green box as a flat vector over all legs."""
    v = np.zeros(2**legs, dtype=complex)
    v[0] += 1.0
    v[-1] += a
    return v


def generator_matrix(gen: Gen, n_in: int, n_out: int, phase: float | None = None) -> np.ndarray:
    """Defining ``2**n_out x 2**n_in`` matrix of a generator.

    ``phase`` overrides the stored phase of green/red spiders (used for bound
    spiders).
    """
    _check_arity(gen, n_in, n_out)
    k = gen.kind
    if k in _SPIDERS:
        if k == "green_box":
            return _spider_diag(gen.value, n_in + n_out).reshape(2**n_out, 2**n_in)
        if k == "pink":
            # integer parity tensor: entry 1 where the legs' XOR equals the phase bit
            legs = n_in + n_out
            bit = int(round(gen.value / np.pi)) % 2
            if legs == 0:
                return np.full((1, 1), 1.0 - bit, dtype=complex)
            idx = np.arange(2**legs)
            parity = np.array([bin(i).count("1") % 2 for i in idx])
            return (parity == bit).astype(complex).reshape(2**n_out, 2**n_in)
        ph = gen.value if phase is None else phase
        green = _spider_diag(np.exp(1j * ph), n_in + n_out).reshape(2**n_out, 2**n_in)
        if k == "green":
            return green
        return _kron_power(HAD, n_out) @ green @ _kron_power(HAD, n_in)
    if k == "had":
        return HAD.astype(complex)
    if k == "w":
        if n_in == 1:
            m = np.zeros((2**n_out, 2), dtype=complex)
            m[0, 0] = 1.0
            for j in range(n_out):
                m[1 << (n_out - 1 - j), 1] = 1.0
            return m
        return generator_matrix(gen, 1, n_in).T.copy()
    if k == "tri":
        return np.array([[1, gen.sign], [0, 1]], dtype=complex)
    if k == "tri_inv":
        return np.array([[1, 0], [gen.sign, 1]], dtype=complex)
    if k == "cup":
        return np.array([[1], [0], [0], [1]], dtype=complex)
    if k == "cap":
        return np.array([[1, 0, 0, 1]], dtype=complex)
    if k == "swap":
        return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    if k == "wire":
        return np.eye(2, dtype=complex)
    if k == "func":
        kk, mm = gen.arity
        m = np.zeros((2**mm, 2**kk), dtype=complex)
        for x, y in enumerate(gen.table):
            m[y, x] = 1.0
        return m
    if k == "matrix":
        return gen.matrix.copy()
    raise DiagramError(f"unknown generator kind {k}")


def _kron_power(m: np.ndarray, k: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(k):
        out = np.kron(out, m)
    return out


# ---------------------------------------------------------------------------
# Diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    gen: Gen
    ins: tuple[int, ...]
    outs: tuple[int, ...]
    binding: Binding | None = None


@dataclass(frozen=True)
class Diagram:
    """Network of generator nodes with ordered boundary wires.

    ``phase_terms`` are parameter-dependent global phases
    ``exp(i * (mult * theta[param] + offset))`` multiplied into the scalar.
    """

    nodes: tuple[Node, ...] = ()
    inputs: tuple[int, ...] = ()
    outputs: tuple[int, ...] = ()
    scalar: complex = 1.0
    phase_terms: tuple[Binding, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        counts: dict[int, int] = {}
        for w in itertools.chain(
            self.inputs, self.outputs, *(n.ins + n.outs for n in self.nodes)
        ):
            counts[w] = counts.get(w, 0) + 1
        bad = [w for w, c in counts.items() if c != 2]
        if bad:
            raise DiagramError(f"wires {bad[:5]} are not connected exactly twice")
        if len(set(self.inputs)) != len(self.inputs) or len(set(self.outputs)) != len(self.outputs):
            raise DiagramError("boundary wires must be distinct")
        for n in self.nodes:
            _check_arity(n.gen, len(n.ins), len(n.outs))
            if n.binding is not None and n.gen.kind not in ("green", "red"):
                raise DiagramError("only green and red spiders can carry a parameter binding")

    # -- convenience -------------------------------------------------------
    @property
    def n_in(self) -> int:
        return len(self.inputs)

    @property
    def n_out(self) -> int:
        return len(self.outputs)

    def scaled(self, c: complex) -> "Diagram":
        return replace(self, scalar=self.scalar * c)

    def with_phase(self, b: Binding) -> "Diagram":
        return replace(self, phase_terms=self.phase_terms + (b,))

    def bound_nodes(self) -> list[int]:
        """Indices of nodes carrying a parameter binding."""
        return [i for i, n in enumerate(self.nodes) if n.binding is not None]

    def params(self) -> set[int]:
        ps = {n.binding.param for n in self.nodes if n.binding is not None}
        return ps | {b.param for b in self.phase_terms}

    def max_wire(self) -> int:
        ws = list(self.inputs) + list(self.outputs)
        for n in self.nodes:
            ws.extend(n.ins)
            ws.extend(n.outs)
        return max(ws, default=-1)

    def relabel(self, mapping: Callable[[int], int]) -> "Diagram":
        nodes = tuple(
            Node(n.gen, tuple(map(mapping, n.ins)), tuple(map(mapping, n.outs)), n.binding)
            for n in self.nodes
        )
        return Diagram(
            nodes,
            tuple(map(mapping, self.inputs)),
            tuple(map(mapping, self.outputs)),
            self.scalar,
            self.phase_terms,
        )

    def __matmul__(self, other: "Diagram") -> "Diagram":
        """``a @ b`` is ``a`` after ``b`` (matrix-product order)."""
        return compose_seq(other, self)


def atom(gen: Gen, n_in: int | None = None, n_out: int | None = None, binding: Binding | None = None) -> Diagram:
    """Diagram made of a single generator."""
    if n_in is None or n_out is None:
        if gen.kind in _FIXED_ARITY:
            n_in, n_out = _FIXED_ARITY[gen.kind]
        elif gen.arity is not None:
            n_in, n_out = gen.arity
        else:
            raise DiagramError(f"arity required for {gen.kind}")
    ins = tuple(range(n_in))
    outs = tuple(range(n_in, n_in + n_out))
    return Diagram((Node(gen, ins, outs, binding),), ins, outs)


def identity(k: int = 1) -> Diagram:
    ws = tuple(range(k))
    return Diagram((), ws, ws)


def empty() -> Diagram:
    return Diagram()


def compose_seq(d1: Diagram, d2: Diagram) -> Diagram:
    """``d1`` followed by ``d2``; evaluates to ``M2 @ M1``."""
    if d1.n_out != d2.n_in:
        raise DiagramError(f"cannot compose: {d1.n_out} outputs vs {d2.n_in} inputs")
    off = d1.max_wire() + 1
    link = {d2.inputs[k] + off: d1.outputs[k] for k in range(d2.n_in)}
    d2s = d2.relabel(lambda w: link.get(w + off, w + off))
    return Diagram(
        d1.nodes + d2s.nodes,
        d1.inputs,
        d2s.outputs,
        d1.scalar * d2.scalar,
        d1.phase_terms + d2.phase_terms,
    )


def compose_par(d1: Diagram, d2: Diagram) -> Diagram:
    """Tensor product ``d1 (x) d2`` (``d1`` wires come first)."""
    off = d1.max_wire() + 1
    d2s = d2.relabel(lambda w: w + off)
    return Diagram(
        d1.nodes + d2s.nodes,
        d1.inputs + d2s.inputs,
        d1.outputs + d2s.outputs,
        d1.scalar * d2.scalar,
        d1.phase_terms + d2.phase_terms,
    )


def seq(*ds: Diagram) -> Diagram:
    """Sequential composition, first argument applied first."""
    out = ds[0]
    for d in ds[1:]:
        out = compose_seq(out, d)
    return out


def par(*ds: Diagram) -> Diagram:
    out = empty()
    for d in ds:
        out = compose_par(out, d)
    return out


def permute_outputs(d: Diagram, order: Sequence[int]) -> Diagram:
    """Reorder boundary outputs: new output ``k`` is old output ``order[k]``."""
    return replace(d, outputs=tuple(d.outputs[i] for i in order))


def permute_inputs(d: Diagram, order: Sequence[int]) -> Diagram:
    return replace(d, inputs=tuple(d.inputs[i] for i in order))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _node_tensors(node: Node, theta, fresh: Iterable[int]) -> list[tuple[np.ndarray, list[int]]]:
    """Tensors for one node; spiders with more than three legs become chains."""
    gen = node.gen
    legs = list(node.outs) + list(node.ins)
    phase = None
    if node.binding is not None:
        if theta is None:
            raise DiagramError("diagram has bound phases; pass a parameter vector")
        phase = node.binding.phase(theta)
    if gen.kind in _SPIDERS and len(legs) > 3:
        parts: list[tuple[np.ndarray, list[int]]] = []
        first = True
        rest = legs
        prev = None
        while rest:
            if prev is None:
                take, rest = rest[:2], rest[2:]
                here = take
            elif len(rest) <= 2:
                here = [prev] + rest
                rest = []
            else:
                here = [prev, rest[0]]
                rest = rest[1:]
            if rest:
                link = next(fresh)
                here = here + [link]
                prev = link
            g = gen if first else _neutral(gen)
            ph = phase if first else None
            t = generator_matrix(g, 0, len(here), ph).reshape((2,) * len(here))
            parts.append((t, here))
            first = False
        return parts
    m = generator_matrix(gen, len(node.ins), len(node.outs), phase)
    return [(m.reshape((2,) * len(legs)), legs)]


def _neutral(gen: Gen) -> Gen:
    if gen.kind == "green_box":
        return GreenBox(1.0)
    if gen.kind == "green":
        return GreenSpider(0.0)
    if gen.kind == "red":
        return RedSpider(0.0)
    return PinkSpider(0.0)


def _trace_self_loops(t: np.ndarray, labels: list[int]) -> tuple[np.ndarray, list[int]]:
    while True:
        seen: dict[int, int] = {}
        dup = None
        for i, l in enumerate(labels):
            if l in seen:
                dup = (seen[l], i)
                break
            seen[l] = i
        if dup is None:
            return t, labels
        i, j = dup
        t = np.trace(t, axis1=i, axis2=j)
        labels = [l for k, l in enumerate(labels) if k not in (i, j)]


def contract_network(tensors: list[tuple[np.ndarray, list[int]]], open_labels: Sequence[int]) -> np.ndarray:
    """Greedy pairwise contraction; returns a tensor with axes ``open_labels``."""
    tensors = [_trace_self_loops(t, list(l)) for t, l in tensors]
    alive = dict(enumerate(tensors))
    where: dict[int, set[int]] = {}
    for i, (_, ls) in alive.items():
        for l in ls:
            where.setdefault(l, set()).add(i)
    nxt = len(tensors)
    while len(alive) > 1:
        best = None
        for l, owners in where.items():
            if len(owners) != 2:
                continue
            i, j = sorted(owners)
            li, lj = alive[i][1], alive[j][1]
            shared = set(li) & set(lj)
            size = len(li) + len(lj) - 2 * len(shared)
            key = (size, i, j)
            if best is None or key < best[0]:
                best = (key, i, j)
        if best is None:
            # no shared labels left: outer product of the two smallest
            order = sorted(alive, key=lambda k: (alive[k][0].ndim, k))
            i, j = order[0], order[1]
        else:
            _, i, j = best
        (a, la), (b, lb) = alive.pop(i), alive.pop(j)
        shared = [l for l in la if l in lb]
        ax_a = [la.index(l) for l in shared]
        ax_b = [lb.index(l) for l in shared]
        c = np.tensordot(a, b, axes=(ax_a, ax_b))
        lc = [l for l in la if l not in shared] + [l for l in lb if l not in shared]
        for l in la + lb:
            s = where.get(l)
            if s is not None:
                s.discard(i)
                s.discard(j)
        for l in shared:
            where.pop(l, None)
        for l in lc:
            where.setdefault(l, set()).add(nxt)
        alive[nxt] = (c, lc)
        nxt += 1
    if not alive:
        t, labels = np.ones(()), []
    else:
        t, labels = next(iter(alive.values()))
    if sorted(labels) != sorted(open_labels):
        raise DiagramError("contraction left unexpected open wires")
    perm = [labels.index(l) for l in open_labels]
    return np.transpose(t, perm) if perm else t


def evaluate(d: Diagram, theta: Sequence[float] | None = None) -> np.ndarray:
    """Dense ``2**n_out x 2**n_in`` matrix of a diagram."""
    outputs = list(d.outputs)
    base = d.max_wire() + 1
    fresh = itertools.count(base)
    tensors: list[tuple[np.ndarray, list[int]]] = []
    ins = set(d.inputs)
    for k, w in enumerate(outputs):
        if w in ins:
            new = next(fresh)
            outputs[k] = new
            tensors.append((np.eye(2, dtype=complex), [new, w]))
    for node in d.nodes:
        tensors.extend(_node_tensors(node, theta, fresh))
    open_labels = outputs + list(d.inputs)
    t = contract_network(tensors, open_labels)
    scalar = complex(d.scalar)
    for b in d.phase_terms:
        if theta is None:
            raise DiagramError("diagram has bound phases; pass a parameter vector")
        scalar *= np.exp(1j * b.phase(theta))
    return scalar * np.asarray(t, dtype=complex).reshape(2 ** d.n_out, 2 ** d.n_in)


def conjugate(d: Diagram) -> Diagram:
    """Entrywise complex conjugate: conjugate boxes, negate phases."""
    nodes = []
    for n in d.nodes:
        g = n.gen
        if g.kind == "green_box":
            g = GreenBox(np.conj(g.value))
        elif g.kind in ("green", "red"):
            g = Gen(g.kind, value=-g.value)
        elif g.kind == "matrix":
            g = MatrixBox(np.conj(g.matrix))
        b = n.binding.negated() if n.binding is not None else None
        nodes.append(Node(g, n.ins, n.outs, b))
    return Diagram(
        tuple(nodes),
        d.inputs,
        d.outputs,
        np.conj(d.scalar),
        tuple(b.negated() for b in d.phase_terms),
    )


def double(d: Diagram) -> Diagram:
    """``d (x) conj(d)``; global phases cancel."""
    return compose_par(d, conjugate(d))


def check_equal(
    m1: np.ndarray, m2: np.ndarray, tol: float = 1e-10, up_to_global_phase: bool = False
) -> bool:
    """Max-entry comparison, optionally after fitting a unit global phase."""
    a = np.asarray(m1, dtype=complex)
    b = np.asarray(m2, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if up_to_global_phase:
        k = int(np.argmax(np.abs(b)))
        ak, bk = a.flat[k], b.flat[k]
        if abs(ak) > 0 and abs(bk) > 0:
            a = a * (bk / ak) / abs(bk / ak)
    return bool(np.max(np.abs(a - b), initial=0.0) <= tol)


# ---------------------------------------------------------------------------
# Small named diagrams
# ---------------------------------------------------------------------------


def green(phase: float, n_in: int, n_out: int, binding: Binding | None = None) -> Diagram:
    return atom(GreenSpider(phase), n_in, n_out, binding)


def box(a: complex, n_in: int, n_out: int) -> Diagram:
    return atom(GreenBox(a), n_in, n_out)


def pink(phase: float, n_in: int, n_out: int) -> Diagram:
    return atom(PinkSpider(phase), n_in, n_out)


def red(phase: float, n_in: int, n_out: int) -> Diagram:
    return atom(RedSpider(phase), n_in, n_out)


def w_spider(n_in: int, n_out: int) -> Diagram:
    return atom(WBranch(), n_in, n_out)


def hadamards(k: int = 1) -> Diagram:
    return par(*[atom(Hadamard())] * k)


def connect(top: Diagram, bottom: Diagram, k: int) -> Diagram:
    """Join the last ``k`` outputs of ``top`` to the first ``k`` inputs of ``bottom``.

    Free outputs of ``top`` precede those of ``bottom``; free inputs of
    ``bottom`` follow the inputs of ``top``.
    """
    left = compose_par(top, identity(bottom.n_in - k))
    right = compose_par(identity(top.n_out - k), bottom)
    return compose_seq(left, right)


def basis_state(bits: Sequence[int]) -> Diagram:
    """Computational basis state as a row of pink dots."""
    return par(*[pink(np.pi * b, 0, 1) for b in bits])


def basis_effect(bits: Sequence[int]) -> Diagram:
    return par(*[pink(np.pi * b, 1, 0) for b in bits])


def cnot() -> Diagram:
    """CNOT with control on wire 0: green copy on the control, pink XOR on the target."""
    return seq(compose_par(green(0, 1, 2), identity()), compose_par(identity(), pink(0, 2, 1)))


def cz() -> Diagram:
    """CZ as two green spiders joined by a Hadamard edge, with a sqrt(2) scalar."""
    d = seq(
        compose_par(green(0, 1, 2), identity()),
        par(identity(), atom(Hadamard()), identity()),
        compose_par(identity(), green(0, 2, 1)),
    )
    return d.scaled(SQRT2)


def pauli_box(P: str) -> Diagram:
    """Pauli box as a ``(wire, control) -> wire`` diagram.

    Plugging a green pi state into the control leg gives the Pauli matrix
    and a green phase-0 state gives the identity.
    """
    P = P.upper()
    if P == "I":
        return compose_par(identity(), pink(0, 1, 0))
    if P == "Z":
        return green(0, 2, 1)
    if P == "X":
        return seq(compose_par(atom(Hadamard()), identity()), green(0, 2, 1), atom(Hadamard()))
    if P == "Y":
        return seq(
            compose_par(green(-np.pi / 2, 1, 1), identity()),
            pauli_box("X"),
            green(np.pi / 2, 1, 1),
        )
    raise DiagramError(f"unknown Pauli {P!r}")


def w_decomposition() -> Diagram:
    """W (1 -> 2) as an XOR copy whose two outputs may not both be 1.

    The constraint ``[[1, 1], [1, 0]]``, a pink pi followed by a triangle,
    joins green copies of the two outputs.
    """
    link = seq(pink(np.pi, 1, 1), atom(Triangle()))
    return seq(
        pink(0, 1, 2),
        par(green(0, 1, 2), green(0, 1, 2)),
        par(identity(), atom(Swap()), identity()),
        par(identity(2), seq(compose_par(link, identity()), atom(Cap()))),
    )


# ---------------------------------------------------------------------------
# Rule verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RuleResult:
    name: str
    passed: bool
    max_deviation: float
    cases: int


def _prod(ds: list[Diagram]) -> Diagram:
    return par(*ds) if ds else empty()


def rule_cases(seed: int = 0, draws: int = 25) -> dict[str, list[tuple[np.ndarray, np.ndarray]]]:
    """Both sides of every checked rule and lemma as matrix pairs.

    Phases run over a fixed grid plus ``draws`` uniform samples; box labels
    over a fixed list plus ``draws`` complex Gaussian samples.
    """
    rng = np.random.default_rng(seed)
    grid = [0.0, np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2, -0.7]
    phases = grid + list(rng.uniform(-np.pi, np.pi, size=draws))
    boxes = [0.0, 1.0, -1.0, 2.0, 0.5j] + list(rng.normal(size=draws) + 1j * rng.normal(size=draws))
    E = evaluate
    I2 = np.eye(2)
    cases: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}

    def add(name: str, lhs, rhs) -> None:
        if isinstance(lhs, Diagram):
            lhs = E(lhs)
        if isinstance(rhs, Diagram):
            rhs = E(rhs)
        cases.setdefault(name, []).append((np.asarray(lhs, complex), np.asarray(rhs, complex)))

    arities = [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (0, 3), (1, 3), (3, 1)]
    pi_pair = (0.0, np.pi)

    # -- rewrite rules ----------------------------------------------------
    for a, b in zip(boxes, boxes[3:] + boxes[:3]):
        for n1, m1, n2, m2, k in [(1, 1, 1, 1, 1), (2, 2, 2, 1, 2), (1, 3, 3, 1, 3), (0, 2, 2, 0, 1)]:
            add("sf", connect(box(a, n1, m1), box(b, n2, m2), k), box(a * b, n1 + n2 - k, m1 + m2 - k))
    for a, b in zip(phases, phases[1:]):
        add("sf", connect(green(a, 2, 2), green(b, 2, 1), 2), green(a + b, 2, 1))
        add("sf", connect(green(a, 1, 2), green(b, 1, 3), 1), green(a + b, 1, 4))

    add("id", box(1.0, 1, 1), I2)
    add("id", green(0, 1, 1), I2)
    add("id", pink(0, 1, 1), I2)

    add("id'", green(0, 0, 2), atom(Cup()))
    add("id'", green(0, 2, 0), atom(Cap()))
    add("id'", pink(0, 0, 2), atom(Cup()))
    add("id'", pink(0, 2, 0), atom(Cap()))

    for m in (1, 2, 3):
        for x in (0, 1):
            add("b1", seq(basis_state([x]), green(0, 1, m)), basis_state([x] * m))

    add(
        "b2",
        seq(pink(0, 2, 1), green(0, 1, 2)),
        seq(par(green(0, 1, 2), green(0, 1, 2)), par(identity(), atom(Swap()), identity()), par(pink(0, 2, 1), pink(0, 2, 1))),
    )

    for m in (2, 3):
        add("b3", seq(w_spider(1, m), green(0, m, 1)), seq(pink(0, 1, 0), pink(0, 0, 1)))

    add("ety", empty(), np.ones((1, 1)))
    add("ety", pink(0, 0, 0), np.ones((1, 1)))

    for a in boxes:
        for n, m in [(1, 1), (1, 2), (2, 1), (0, 2)]:
            add("brk", box(a, n, m), seq(compose_par(identity(n), box(a, 0, 1)), box(1.0, n + 1, m)))

    for a in boxes:
        add("suc", seq(box(a, 0, 1), atom(TriangleInverse())), box(a + 1, 0, 1))

    for n, m in [(1, 1), (2, 1), (1, 3), (2, 2), (0, 2)]:
        add("zero", box(0.0, n, m), seq(_prod([pink(0, 1, 0)] * n), _prod([pink(0, 0, 1)] * m)))

    add("tri1", seq(basis_state([0]), atom(Triangle())), basis_state([0]))
    add("tri2", seq(basis_state([1]), atom(Triangle())), green(0, 0, 1))

    for s in (1, -1):
        add("inv", seq(atom(Triangle(s)), atom(Triangle(-s))), I2)
        add("inv", seq(atom(TriangleInverse(s)), atom(TriangleInverse(-s))), I2)

    euler = par(green(-np.pi / 2, 0, 0), seq(green(np.pi / 2, 1, 1), red(np.pi / 2, 1, 1), green(np.pi / 2, 1, 1)))
    add("eu", atom(Hadamard()).scaled(SQRT2), euler)

    for m in (2, 3):
        add("sym", seq(w_spider(1, m), par(atom(Swap()), identity(m - 2))), w_spider(1, m))
    add("aso", seq(w_spider(1, 2), par(w_spider(1, 2), identity())), seq(w_spider(1, 2), par(identity(), w_spider(1, 2))))

    for m in (1, 2, 3):
        add("pcy", seq(basis_state([0]), w_spider(1, m)), basis_state([0] * m))

    add("wdc", w_spider(1, 2), w_decomposition())

    add("wf", connect(w_spider(1, 2), w_spider(1, 2), 1), w_spider(1, 3))
    add("wf", seq(w_spider(1, 2), par(identity(), w_spider(1, 2))), w_spider(1, 3))
    add("wf", connect(w_spider(1, 3), w_spider(1, 2), 1), w_spider(1, 4))

    # -- lemmas -------------------------------------------------------------
    add("hh", seq(atom(Hadamard()), atom(Hadamard())), I2)

    for n, m in arities + [(0, 2), (2, 0), (3, 0)]:
        for tau in pi_pair:
            lhs = seq(hadamards(n), green(tau, n, m), hadamards(m)) if n else seq(green(tau, 0, m), hadamards(m))
            add("cc", lhs, pink(tau, n, m).scaled(2.0 ** (-(n + m - 2) / 2)))
            lhs = seq(hadamards(n), pink(tau, n, m), hadamards(m)) if n else seq(pink(tau, 0, m), hadamards(m))
            add("cc", lhs, green(tau, n, m).scaled(2.0 ** ((n + m - 2) / 2)))
    for tau in pi_pair:
        add("cc", seq(atom(Hadamard()), green(tau, 1, 1), atom(Hadamard())), pink(tau, 1, 1))
        add("cc", seq(atom(Hadamard()), pink(tau, 1, 1), atom(Hadamard())), green(tau, 1, 1))

    for k in (1, 2, 3):
        for a, b in [(0.0, 0.0), (0.0, np.pi), (np.pi, np.pi)]:
            add("sf-pink", connect(pink(a, 1, k), pink(b, k, 1), k), pink(a + b, 1, 1).scaled(2.0 ** (k - 1)))
            add("sf-pink", connect(pink(a, 2, k + 1), pink(b, k, 2), k), pink(a + b, 2, 3).scaled(2.0 ** (k - 1)))

    for n, m in [(1, 1), (2, 1), (1, 2), (0, 3)]:
        add("box-zero", box(0.0, n, m), seq(_prod([pink(0, 1, 0)] * n), _prod([pink(0, 0, 1)] * m)))

    for n, m in [(1, 1), (1, 2), (2, 2), (0, 3), (3, 0)]:
        plus = seq(_prod([green(0, 1, 0)] * n), _prod([green(0, 0, 1)] * m))
        minus = seq(_prod([green(np.pi, 1, 0)] * n), _prod([green(np.pi, 0, 1)] * m))
        add("pink-decompose", pink(0, n, m), 0.5 * (E(plus) + E(minus)))
        add("pink-decompose", pink(np.pi, n, m), 0.5 * (E(plus) - E(minus)))

    for a in phases[:6]:
        add("ho", seq(green(a, 1, 2), pink(0, 2, 1)), seq(green(a, 1, 0), pink(0, 0, 1)))

    add(
        "sc",
        seq(pink(0, 2, 1), green(0, 1, 3)),
        seq(
            par(green(0, 1, 3), green(0, 1, 3)),
            _bipartite(2, 3),
            par(pink(0, 2, 1), pink(0, 2, 1), pink(0, 2, 1)),
        ),
    )

    for a in phases:
        for m in (1, 2, 3):
            lhs = seq(pink(np.pi, 1, 1), green(a, 1, m))
            rhs = seq(green(-a, 1, m), _prod([pink(np.pi, 1, 1)] * m)).scaled(np.exp(1j * a))
            add("pi", lhs, rhs)

    for a in boxes[:12]:
        for x in (0, 1):
            for m in (1, 2):
                add("cp", seq(basis_state([x]), box(a, 1, m)), basis_state([x] * m).scaled(a**x))
    for x in (0, 1):
        for y in (0, 1):
            add("cp", seq(basis_state([x]), green(np.pi * y, 1, 0)), np.full((1, 1), (-1.0) ** (x * y)))

    add("tri-pi-transpose", seq(pink(np.pi, 1, 1), atom(Triangle()), pink(np.pi, 1, 1)), atom(TriangleInverse()))
    add("tri-pi-transpose", seq(pink(np.pi, 1, 1), atom(Triangle(-1)), pink(np.pi, 1, 1)), atom(TriangleInverse(-1)))

    add("tri", seq(basis_state([0]), atom(Triangle())), basis_state([0]))
    add("tri", seq(basis_state([1]), atom(Triangle())), green(0, 0, 1))
    add("tri", seq(basis_state([0]), atom(TriangleInverse())), green(0, 0, 1))
    add("tri", seq(basis_state([1]), atom(TriangleInverse())), basis_state([1]))

    for m in (1, 2, 3, 4):
        name = "W2-act" if m == 2 else "w"
        add(name, seq(basis_state([0]), w_spider(1, m)), basis_state([0] * m))
        ones = sum(E(basis_state([int(k == j) for k in range(m)])) for j in range(m))
        add(name, seq(basis_state([1]), w_spider(1, m)), ones)

    for m in (2, 3, 4):
        name = "W2-plug-leg" if m == 2 else "W-plug-leg"
        add(name, seq(w_spider(1, m), compose_par(identity(m - 1), pink(0, 1, 0))), w_spider(1, m - 1))
        add(name, seq(compose_par(identity(m - 1), basis_state([0])), w_spider(m, 1)), w_spider(m - 1, 1))

    for a, b, c in zip(boxes, boxes[4:], boxes[9:]):
        add("W2-add", seq(w_spider(1, 2), par(box(a, 1, 0), box(b, 1, 0))), box(a + b, 1, 0))
        add("W2-add", seq(par(box(a, 0, 1), box(b, 0, 1)), w_spider(2, 1)), box(a + b, 0, 1))
        add("W-add", seq(w_spider(1, 3), par(box(a, 1, 0), box(b, 1, 0), box(c, 1, 0))), box(a + b + c, 1, 0))

    for a in phases[:8]:
        for x in (0, 1):
            for y in (0, 1):
                lhs = seq(green(a, 1, 2), par(pink(np.pi * x, 1, 1), pink(np.pi * y, 1, 1)), pink(0, 2, 1))
                rhs = seq(green(a, 1, 0), basis_state([(x + y) % 2]))
                add("pi-cycle", lhs, rhs)

    for a, b in zip(phases, phases[2:]):
        lhs = seq(green(a, 1, 1), pink(np.pi, 1, 1), green(b, 1, 2))
        rhs = seq(pink(np.pi, 1, 1), green(b - a, 1, 2)).scaled(np.exp(1j * a))
        add("pi-connect", lhs, rhs)
    for k in (1, 2, 3):
        lhs = seq(pink(0, 1, k), _prod([pink(np.pi, 1, 1)] * k), pink(0, k, 1))
        add("pi-connect", lhs, pink(np.pi * k, 1, 1).scaled(2.0 ** (k - 1)))

    for a in phases[:8]:
        for x in (0, 1):
            for m in (1, 2, 3):
                lhs = seq(basis_state([x]), atom(Hadamard()), green(a, 1, m))
                add("pi-copy", lhs, green(a + np.pi * x, 0, m).scaled(1 / SQRT2))

    add("hopf-had", seq(pink(0, 1, 2), hadamards(2), pink(0, 2, 1)), seq(pink(0, 1, 0), pink(0, 0, 1)).scaled(2.0))

    return cases


def _bipartite(a: int, b: int) -> Diagram:
    """Wire permutation taking ``a`` groups of ``b`` wires to ``b`` groups of ``a``."""
    n = a * b
    ws = tuple(range(n))
    outs = tuple(i * b + j for j in range(b) for i in range(a))
    return Diagram((), ws, outs)


def rule_suite(tol: float = 1e-10, seed: int = 0, draws: int = 25) -> dict[str, RuleResult]:
    """Check every rule and lemma as a matrix identity; failures are reported, not raised."""
    report: dict[str, RuleResult] = {}
    for name, pairs in rule_cases(seed, draws).items():
        dev = 0.0
        for lhs, rhs in pairs:
            if lhs.shape != rhs.shape:
                dev = np.inf
                break
            dev = max(dev, float(np.max(np.abs(lhs - rhs), initial=0.0)))
        report[name] = RuleResult(name, dev <= tol, dev, len(pairs))
    return report
