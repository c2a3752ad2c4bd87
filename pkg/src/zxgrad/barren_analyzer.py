"""Gradient variances under uniform parameters on ``[-pi, pi]``.

Three independent numerical methods and a set of closed forms:

* :func:`variance_quadrature` averages the squared gradient over a tensor
  grid of equispaced angles.  The squared gradient is a trigonometric
  polynomial in every parameter, so a grid with more points than twice its
  degree integrates it exactly.
* :func:`variance_mc` is a plain Monte Carlo estimate.
* :func:`variance_diagram` contracts a single four-copy diagram in which
  every parameter's spiders are joined by a small cycle tensor.
* :func:`sim1_closed`, :func:`iqp_closed` and :func:`v_recurrence` give
  exact values for the benchmark ansätze.

Work is split into fixed chunks and reduced in chunk order, so results do not
depend on the number of worker processes (``ZXGRAD_WORKERS``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import gradient_engine as ge
from . import zxw_core as zx
from .ansatz_library import AnsatzSpec, build, hamiltonian_for
from .param_unitaries import ParamCircuit, _CONST_DIAGRAMS, circuit_diagram
from .paulis import PauliHamiltonian, expand_pattern
from .zxw_core import Diagram, Node

__all__ = [
    "VarianceReport",
    "SweepSpec",
    "BudgetExceeded",
    "QuadratureError",
    "UnsupportedInput",
    "OutOfScope",
    "frequency_audit",
    "variance_quadrature",
    "variance_mc",
    "variance_diagram",
    "variance_diagram_network",
    "sim1_closed",
    "iqp_closed",
    "v_recurrence",
    "v_closed",
    "v_magnitude",
    "ClosedFormTable",
    "CLOSED_FORMS",
    "sweep",
    "pauli_bits",
    "default_workers",
]

DEFAULT_BUDGET = 10**7
CHUNK = 4096


class BudgetExceeded(RuntimeError):
    """The quadrature grid needs more gradient evaluations than allowed."""


class QuadratureError(ValueError):
    """Grid too coarse, or frequencies that an equispaced grid cannot integrate."""


class UnsupportedInput(ValueError):
    """Input outside the scope of the diagram method."""


class OutOfScope(ValueError):
    """No closed form is known for this (ansatz, Hamiltonian, parameter)."""


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ZXGRAD_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class VarianceReport:
    ansatz: str
    n: int
    layers: int
    param: int
    method: str
    value: float | None
    stderr: float | str = "exact"

    def __post_init__(self) -> None:
        if self.value is not None and self.value < -1e-12:
            raise ArithmeticError(f"negative variance {self.value}")

    def row(self) -> list[str]:
        value = "" if self.value is None else repr(float(self.value))
        err = self.stderr if isinstance(self.stderr, str) else repr(float(self.stderr))
        return [self.ansatz, str(self.n), str(self.layers), str(self.param), self.method, value, err]


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def frequency_audit(c: ParamCircuit) -> list[int]:
    """Largest frequency of ``<H>`` in each parameter (sum of |mult| * spread).

    Raises :class:`QuadratureError` if some occurrence produces a
    non-integer frequency, since the cost is then not ``2 pi``-periodic.
    """
    freq = [0.0] * c.n_params
    for g in c.gates:
        if g.generator is None or g.binding.mult == 0:
            continue
        lam = g.generator.eigenvalues
        diffs = (lam - lam[0]) * g.binding.mult
        if np.max(np.abs(diffs - np.round(diffs)), initial=0.0) > 1e-9:
            raise QuadratureError(f"gate {g.name} has non-integer frequencies in parameter {g.binding.param}")
        freq[g.binding.param] += abs(g.binding.mult) * g.generator.spread()
    return [int(round(f)) for f in freq]


def _grid_points(c: ParamCircuit, points: int | None) -> list[int]:
    freq = frequency_audit(c)
    if points is None:
        return [2 * f + 1 for f in freq]
    for j, f in enumerate(freq):
        if points <= 2 * f:
            raise QuadratureError(f"{points} points cannot integrate frequency {2 * f} in parameter {j}")
    return [points if f else 1 for f in freq]


def _grid_chunk(args) -> tuple[float, float]:
    c, H, param, sizes, start, stop = args
    idx = np.array(np.unravel_index(np.arange(start, stop), sizes)).T
    theta = 2 * np.pi * idx / np.asarray(sizes)[None, :]
    g = ge.gradients(c, theta, param, H)
    return float(np.sum(g)), float(np.sum(g * g))


def _map(fn: Callable, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def variance_quadrature(
    c: ParamCircuit,
    H: PauliHamiltonian,
    param: int,
    points_per_param: int | None = None,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = None,
) -> float:
    """Exact ``E[(d<H>/d theta_param)^2]`` on a tensor grid.

    By default each parameter gets ``2F + 1`` points where ``F`` comes from
    :func:`frequency_audit`; an explicit ``points_per_param`` must exceed
    ``2F`` for every parameter.  The grid mean of the gradient is checked to
    vanish.
    """
    if not 0 <= param < c.n_params:
        raise ValueError(f"parameter {param} out of range")
    if not c.occurrences(param):
        return 0.0
    sizes = _grid_points(c, points_per_param)
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceeded(f"grid needs {total} gradient evaluations, budget is {budget}")
    tasks = [(c, H, param, tuple(sizes), s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    parts = _map(_grid_chunk, tasks, workers or default_workers())
    s1 = sum(p[0] for p in parts) / total
    s2 = sum(p[1] for p in parts) / total
    if abs(s1) >= 1e-9:
        raise QuadratureError(f"grid mean of the gradient is {s1:.3g}, expected 0")
    return float(max(s2, 0.0))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _mc_chunk(args) -> np.ndarray:
    c, H, param, theta = args
    return ge.gradients(c, theta, param, H)


def variance_mc(
    c: ParamCircuit,
    H: PauliHamiltonian,
    param: int,
    samples: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
) -> tuple[float, float]:
    """Unbiased sample variance of the gradient and its standard error."""
    if samples < 2:
        raise ValueError("need at least two samples")
    if not 0 <= param < c.n_params:
        raise ValueError(f"parameter {param} out of range")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi, size=(samples, c.n_params))
    tasks = [(c, H, param, theta[s : s + CHUNK]) for s in range(0, samples, CHUNK)]
    g = np.concatenate(_map(_mc_chunk, tasks, workers or default_workers()))
    est = float(np.var(g, ddof=1))
    dev2 = (g - g.mean()) ** 2
    err = float(np.std(dev2, ddof=1) / math.sqrt(samples))
    return est, err


# ---------------------------------------------------------------------------
# Variance diagram
# ---------------------------------------------------------------------------


def _cycle_tensor(mult: int, differentiated: bool) -> np.ndarray:
    """Average of ``e^{i m theta (x1 - x2 + x3 - x4)}`` (times derivative factors)."""
    t = np.zeros((2, 2, 2, 2), dtype=complex)
    for x1, x2, x3, x4 in np.ndindex(2, 2, 2, 2):
        if x1 - x2 + x3 - x4 != 0:
            continue
        if differentiated:
            t[x1, x2, x3, x4] = -(mult**2) * (x1 - x2) * (x3 - x4)
        else:
            t[x1, x2, x3, x4] = 1.0
    return t


def _with_state(c: ParamCircuit) -> Diagram:
    """``U |0...0>`` as a diagram without inputs."""
    d = circuit_diagram(c)
    prep = zx.basis_state([0] * c.qubits)
    return zx.compose_seq(prep, d)


def _pauli_layer(s: str) -> Diagram:
    parts = [(_CONST_DIAGRAMS[ch]() if ch != "I" else zx.identity(1)) for ch in s]
    return zx.par(*parts)


def _expose(d: Diagram, start: int) -> tuple[Diagram, dict[int, int], int]:
    """Replace every bound spider by an unbound one with a fresh extra leg.

    The spider keeps the binding's offset as its phase; the leg is returned
    in a map ``param -> wire`` (one occurrence per parameter is assumed).
    """
    nodes = []
    legs: dict[int, int] = {}
    w = start
    for nd in d.nodes:
        if nd.binding is None:
            nodes.append(nd)
            continue
        if nd.gen.kind != "green":
            raise UnsupportedInput("bound spiders must be green")
        nodes.append(Node(zx.GreenSpider(nd.binding.offset), nd.ins, nd.outs + (w,)))
        legs[nd.binding.param] = w
        w += 1
    return Diagram(tuple(nodes), d.inputs, d.outputs + tuple(legs.values()), d.scalar), legs, w


def variance_diagram_network(c: ParamCircuit, P: str, Q: str, param: int) -> Diagram:
    """Closed four-copy diagram whose value is the ``(P, Q)`` term of the variance.

    Copies 1 and 3 are ``P U|0>`` and ``Q U|0>``; copies 2 and 4 are the
    conjugate ``U|0>``.  Outputs of copy 1 meet copy 2 and outputs of copy 3
    meet copy 4.  Each parameter contributes one four-leg cycle tensor on the
    legs exposed from its spider in the four copies.
    """
    base = _with_state(c)
    counts: dict[int, int] = {}
    mults: dict[int, float] = {}
    for nd in base.nodes:
        if nd.binding is not None:
            counts[nd.binding.param] = counts.get(nd.binding.param, 0) + 1
            mults[nd.binding.param] = nd.binding.mult
    multi = sorted(p for p, k in counts.items() if k > 1)
    if multi:
        raise UnsupportedInput(f"parameters {multi} occur in more than one spider")
    for p, m in mults.items():
        if abs(m - round(m)) > 1e-12 or round(m) == 0:
            raise UnsupportedInput(f"parameter {p} has non-integer multiplier {m}")
    copies = [
        zx.compose_seq(base, _pauli_layer(P)),
        zx.conjugate(base),
        zx.compose_seq(base, _pauli_layer(Q)),
        zx.conjugate(base),
    ]
    nodes: list[Node] = []
    scalar = 1.0 + 0j
    legs: list[dict[int, int]] = []
    outs: list[tuple[int, ...]] = []
    nxt = 0
    for d in copies:
        d = d.relabel(lambda w, off=nxt: w + off)
        nxt = d.max_wire() + 1
        d, lg, nxt = _expose(d, nxt)
        nodes.extend(d.nodes)
        scalar *= d.scalar
        legs.append(lg)
        outs.append(d.outputs[: c.qubits])
    # join copy 1 with copy 2 and copy 3 with copy 4 by renaming the second copy's output wires
    rename = {}
    for a, b in ((0, 1), (2, 3)):
        rename.update({wb: wa for wa, wb in zip(outs[a], outs[b])})
    nodes = [Node(nd.gen, tuple(rename.get(w, w) for w in nd.ins), tuple(rename.get(w, w) for w in nd.outs), nd.binding) for nd in nodes]
    for p in sorted(mults):
        t = _cycle_tensor(int(round(mults[p])), p == param)
        nodes.append(Node(zx.MatrixBox(t.reshape(16, 1)), (), tuple(lg[p] for lg in legs)))
    return Diagram(tuple(nodes), (), (), scalar)


def variance_diagram(c: ParamCircuit, H: PauliHamiltonian, param: int) -> float:
    """Variance by contracting the four-copy diagram (single-occurrence parameters only)."""
    if not 0 <= param < c.n_params:
        raise ValueError(f"parameter {param} out of range")
    total = 0.0 + 0j
    for ck, P in H.terms:
        for cl, Q in H.terms:
            d = variance_diagram_network(c, P, Q, param)
            total += ck * cl * zx.evaluate(d)[0, 0]
    if abs(total.imag) > 1e-9:
        raise ArithmeticError(f"variance diagram has imaginary part {total.imag:.3g}")
    return float(total.real)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def pauli_bits(s: str) -> tuple[list[int], list[int]]:
    """``(a, b)`` with ``a_j = 1`` for a Z component and ``b_j = 1`` for an X component."""
    a = [1 if ch in "ZY" else 0 for ch in s]
    b = [1 if ch in "XY" else 0 for ch in s]
    return a, b


def _single_string(H: PauliHamiltonian | str) -> str:
    if isinstance(H, str):
        return H
    if len(H.terms) != 1 or H.terms[0][0] != 1.0:
        raise OutOfScope("closed forms need a single Pauli string with coefficient 1")
    return H.terms[0][1]


def sim1_closed(H: PauliHamiltonian | str, qubit: int, kind: int) -> float:
    """Single-layer Sim1 variance for the ``kind``-th rotation (1 = RX, 2 = RZ) on ``qubit``.

    Every other wire contributes ``1/4`` for X or Y, ``2/4`` for Z and
    ``4/4`` for I; the differentiated wire contributes the derivative's
    factor.
    """
    s = _single_string(H)
    if kind not in (1, 2):
        raise ValueError("kind must be 1 (RX) or 2 (RZ)")
    if not 0 <= qubit < len(s):
        raise ValueError("qubit out of range")
    other = {"X": 1, "Y": 1, "Z": 2, "I": 4}
    own = {1: {"X": 1, "Y": 1, "Z": 2, "I": 0}, 2: {"X": 1, "Y": 1, "Z": 0, "I": 0}}[kind]
    num = own[s[qubit]] * math.prod(other[ch] for j, ch in enumerate(s) if j != qubit)
    return num / 4 ** len(s)


def _v_odd(l: int, ke: int, ko: int) -> Fraction:
    if (ke, ko) == (0, 0):
        return Fraction(0)
    if l == 1:
        return Fraction(1, 2) if ko else Fraction(0)
    if (ke, ko) == (1, 1):
        return _v_odd(l, 0, 1)
    p01, p10 = _v_odd(l - 2, 0, 1), _v_odd(l - 2, 1, 0)
    if (ke, ko) == (0, 1):
        return (3 * p01 - p10) / 4
    return (p10 - p01) / 2


def v_recurrence(l: int, ke: int, ko: int) -> Fraction:
    """Signed ``V_l(k_e, k_o)`` (sign convention ``c = 0``) from the layer recurrence."""
    if l < 1:
        raise ValueError("l must be at least 1")
    ke, ko = ke % 2, ko % 2
    if l % 2:
        return _v_odd(l, ke, ko)
    if (ke, ko) == (0, 0):
        return Fraction(0)
    if (ke, ko) == (0, 1):
        return _v_odd(l - 1, 0, 1)
    if (ke, ko) == (1, 0):
        return _v_odd(l + 1, 1, 0)
    return (_v_odd(l - 1, 0, 1) - _v_odd(l - 1, 1, 0)) / 2


def v_closed(l: int, ke: int, ko: int) -> Fraction:
    """Signed closed form of ``V_l`` (``c = 0``), matching :func:`v_recurrence`."""
    ke, ko = ke % 2, ko % 2
    if (ke, ko) == (0, 0):
        return Fraction(0)
    if l % 2:
        q = Fraction(4) ** (l // 2)
        if ko:
            return (2 * q + 1) / (6 * q)
        return -(q - 1) / (3 * q)
    if (ke, ko) == (0, 1):
        q = Fraction(4) ** (l // 2 - 1)
        return (2 * q + 1) / (6 * q)
    q = Fraction(2) ** l
    return (q - 1) / (3 * q) if (ke, ko) == (1, 1) else -(q - 1) / (3 * q)


def v_magnitude(l: int, ke: int, ko: int) -> Fraction:
    """Unsigned closed forms as usually tabulated (odd and even layer counts)."""
    ke, ko = ke % 2, ko % 2
    if (ke, ko) == (0, 0):
        return Fraction(0)
    if l % 2:
        q = Fraction(4) ** (l // 2)
        return (2 * q + 1) / (6 * q) if ko else (q - 1) / (3 * q)
    if (ke, ko) == (0, 1):
        q = Fraction(4) ** (l // 2 - 1)
        return (2 * q + 1) / (6 * q)
    q = Fraction(2) ** l
    return (q - 1) / (3 * q)


def _iqp1(n: int, layers: int, s: str, param: int) -> Fraction:
    a, b = pauli_bits(s)
    if param != 0:
        raise OutOfScope("the multilayer formula covers the first-layer parameter only")
    if layers > 1 and n % 2 == 0:
        raise OutOfScope("the multilayer formula assumes an odd number of qubits")
    sign_ab = (-1) ** (sum(x * y for x, y in zip(a, b)) % 2)
    if layers % 2 == 0:
        if len(set(a)) != 1:
            return Fraction(0)
        c = a[0]
        v = v_recurrence(layers, sum(a), sum(b))
    else:
        if len(set(b)) != 1:
            return Fraction(0)
        c = b[0]
        v = v_recurrence(layers, sum(b), sum(a))
    return sign_ab * (-1) ** c * v


def iqp_closed(family: str, n: int, layers: int, H: PauliHamiltonian | str, param: int = 0) -> float:
    """Closed-form variance for the IQP family (see module docs of :mod:`ansatz_library`)."""
    fam = family.lower()
    s = _single_string(H)
    if len(s) != n:
        raise ValueError("Hamiltonian length does not match n")
    if fam == "iqp1":
        return float(_iqp1(n, layers, s, param))
    if layers != 1:
        raise OutOfScope(f"no multilayer closed form for {fam}")
    yx = ("YX" * n)[:n]
    if fam == "iqp2":
        if n % 2:
            raise OutOfScope("iqp2 needs even n")
        if s != yx:
            raise OutOfScope("iqp2 closed form covers H = (Y X)^(n/2)")
        return 1.0 / 2 ** (n // 2)
    if fam == "iqp3":
        if s != expand_pattern("(YX)^(n/2)", n):
            raise OutOfScope("iqp3 closed form covers H = (Y X)^(n/2)")
        if n % 2:
            return 0.0
        # a parameter whose gate meets an even number of Z-type factors of H
        # drops out of <H> altogether
        c = build(AnsatzSpec("iqp3", n))
        if not 0 <= param < c.n_params:
            raise ValueError(f"parameter {param} out of range")
        (k,) = c.occurrences(param)
        a = sum(s[q] in "ZY" for q in c.gates[k].targets)
        return 1.0 / 2**n if a % 2 else 0.0
    if fam == "iqp4":
        if s != "Z" * n:
            raise OutOfScope("iqp4 closed form covers H = Z^n")
        return 1.0 / 2 ** (n - 1)
    raise OutOfScope(f"unknown IQP family {family!r}")


@dataclass(frozen=True)
class ClosedFormTable:
    """Dispatch from an ansatz instance to the closed form that covers it."""

    def value(self, spec: AnsatzSpec, H: PauliHamiltonian, param: int) -> float:
        fam = spec.family
        if fam == "sim1":
            if spec.layers != 1:
                raise OutOfScope("sim1 closed form is single-layer")
            return sim1_closed(H, param // 2, 1 + param % 2)
        if fam.startswith("iqp"):
            return iqp_closed(fam, spec.n, spec.layers, H, param)
        if fam == "intro":
            s = _single_string(H)
            if s != "X" * spec.n:
                raise OutOfScope("intro closed form covers H = X^n")
            return 0.25
        raise OutOfScope(f"no closed form for {fam}")

    def v_table(self, max_layers: int) -> dict[tuple[int, int, int], Fraction]:
        return {(l, ke, ko): v_recurrence(l, ke, ko) for l in range(1, max_layers + 1) for ke in (0, 1) for ko in (0, 1)}


CLOSED_FORMS = ClosedFormTable()


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

METHODS = ("quadrature", "monte_carlo", "diagram", "closed_form")


@dataclass(frozen=True)
class SweepSpec:
    ansatz: str = "sim1"
    n_values: tuple[int, ...] = ()
    layer_values: tuple[int, ...] = (1,)
    hamiltonian: str = "Z^n"
    params: tuple[int, ...] | None = (0,)  # None means every parameter
    methods: tuple[str, ...] = ("quadrature",)
    samples: int = 100_000
    seed: int | None = None
    points: int | None = None
    budget: int = DEFAULT_BUDGET
    workers: int | None = None

    def __post_init__(self) -> None:
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {METHODS}")
        if "monte_carlo" in self.methods and self.seed is None:
            raise ValueError("a seed is required for monte_carlo")


def _instance_rows(spec: SweepSpec, n: int, layers: int) -> Iterable[VarianceReport]:
    aspec = AnsatzSpec(spec.ansatz, n, layers)
    c = build(aspec)
    H = hamiltonian_for(spec.hamiltonian, n)
    params = range(c.n_params) if spec.params is None else [p for p in spec.params if p < c.n_params]
    for p in params:
        for method in spec.methods:
            key = (aspec.family, n, layers, p, method)
            if method == "quadrature":
                try:
                    v = variance_quadrature(c, H, p, spec.points, spec.budget, spec.workers)
                    yield VarianceReport(*key, v, "exact")
                except BudgetExceeded:
                    yield VarianceReport(*key, None, "skipped:budget")
            elif method == "monte_carlo":
                v, e = variance_mc(c, H, p, spec.samples, spec.seed, spec.workers)
                yield VarianceReport(*key, v, e)
            elif method == "diagram":
                try:
                    yield VarianceReport(*key, variance_diagram(c, H, p), "exact")
                except UnsupportedInput:
                    continue
            else:
                try:
                    yield VarianceReport(*key, CLOSED_FORMS.value(aspec, H, p), "exact")
                except OutOfScope:
                    continue


def sweep(spec: SweepSpec) -> list[VarianceReport]:
    """Rows for every (n, layers, param, method) of ``spec``, in that order."""
    rows: list[VarianceReport] = []
    for n in spec.n_values:
        for layers in spec.layer_values:
            rows.extend(_instance_rows(spec, n, layers))
    return rows
