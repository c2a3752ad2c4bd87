"""Parameter-shift rules, the sine system behind them, and an ancilla recipe.

A :class:`ShiftRule` evaluates ``scale * sum(coeff * <H>(theta + shift))``
where the shift is applied to one parameter (and therefore to every gate
bound to it).  Symmetric rules store both ``(+a, +x)`` and ``(-a, -x)``.

For a cost whose dependence on the parameter is a trigonometric polynomial
with integer frequencies ``1..n``, the coefficients ``xi`` of a symmetric rule
with angles ``alpha`` solve ``sum_j xi_j sin(k alpha_j) = k / 2`` for
``k = 1..n``; :class:`SineSystem` holds that system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import gradient_engine as ge
from .param_unitaries import ParamCircuit
from .paulis import PauliHamiltonian

__all__ = [
    "ShiftRule",
    "SineSystem",
    "ShiftRuleError",
    "AncillaError",
    "two_term",
    "four_term",
    "solve_system",
    "general_equidistant",
    "apply_rule",
    "dst1",
    "nogo_residual",
    "nogo_two_angle",
    "nogo_sweep",
    "TwoAngleCheck",
    "d_gate",
    "ancilla_state",
    "ancilla_gradient",
]

DENOMINATOR_CUTOFF = 1e-12
CONDITION_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-9


class ShiftRuleError(ValueError):
    """Forbidden angles, singular systems and other unusable rule requests."""


class AncillaError(ValueError):
    """The parameter occurs in a gate that is not a single phase spider."""


@dataclass(frozen=True)
class ShiftRule:
    terms: tuple[tuple[float, float], ...]
    scale: float = 1.0

    def __post_init__(self) -> None:
        # phases move by scale * shift, so distinctness is judged on that scale
        shifts = [math.remainder(self.scale * s, 2 * math.pi) for s, _ in self.terms]
        for i, a in enumerate(shifts):
            for b in shifts[i + 1 :]:
                if abs(math.remainder(a - b, 2 * math.pi)) < 1e-12:
                    raise ShiftRuleError(f"shifts {a} and {b} coincide modulo 2pi")
        if not all(math.isfinite(c) for _, c in self.terms) or not math.isfinite(self.scale):
            raise ShiftRuleError("rule coefficients must be finite")

    @classmethod
    def symmetric(cls, alphas: Sequence[float], xis: Sequence[float], scale: float = 1.0) -> "ShiftRule":
        terms = []
        for a, x in zip(alphas, xis):
            terms += [(float(a), float(x)), (-float(a), -float(x))]
        return cls(tuple(terms), float(scale))

    @property
    def half(self) -> tuple[tuple[float, float], ...]:
        """The positive-shift half of a symmetric rule."""
        return tuple((s, c) for s, c in self.terms if s > 0)

    def __str__(self) -> str:
        body = ", ".join(f"({s:+.10g}, {c:+.10g})" for s, c in self.terms)
        return f"scale={self.scale:.10g} terms=[{body}]"


@dataclass(frozen=True)
class SineSystem:
    """``S xi = tau / 2`` with ``S[k-1, j] = sin(k alpha_j)`` and ``tau = (1, ..., n)``."""

    n: int
    alphas: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ShiftRuleError("the system needs at least one row")
        if not self.alphas:
            raise ShiftRuleError("the system needs at least one angle")

    @classmethod
    def square(cls, alphas: Sequence[float]) -> "SineSystem":
        return cls(len(alphas), tuple(float(a) for a in alphas))

    @property
    def matrix(self) -> np.ndarray:
        k = np.arange(1, self.n + 1)[:, None]
        return np.sin(k * np.asarray(self.alphas)[None, :])

    @property
    def rhs(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / 2.0

    def residual(self, xi: Sequence[float]) -> float:
        return float(np.max(np.abs(self.matrix @ np.asarray(xi) - self.rhs)))


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


def two_term(lam1: float, lam2: float, alpha: float) -> ShiftRule:
    """Rule for a generator with two eigenvalues ``lam1, lam2``."""
    d = lam1 - lam2
    s = math.sin(d * alpha)
    if abs(s) <= DENOMINATOR_CUTOFF:
        raise ShiftRuleError(f"forbidden shift: sin({d} * {alpha}) vanishes")
    return ShiftRule.symmetric([alpha], [d / (2 * s)])


def four_term(lam: float, alpha1: float, alpha2: float) -> ShiftRule:
    """Rule for a generator with eigenvalues ``-lam, 0, lam``.

    The coefficients come from the two-row sine system at angles
    ``lam * alpha``, so the returned rule carries ``scale = lam``.
    """
    if abs(math.remainder(alpha1 - alpha2, 2 * math.pi)) <= DENOMINATOR_CUTOFF:
        raise ShiftRuleError("the two shift angles must differ")
    a, b = lam * alpha1, lam * alpha2
    det = math.sin(a) * math.sin(2 * b) - math.sin(2 * a) * math.sin(b)
    if abs(det) <= DENOMINATOR_CUTOFF:
        raise ShiftRuleError("vanishing denominator for these shift angles")
    xi1 = (math.sin(2 * b) - 2 * math.sin(b)) / (2 * det)
    xi2 = (2 * math.sin(a) - math.sin(2 * a)) / (2 * det)
    return ShiftRule.symmetric([alpha1, alpha2], [xi1, xi2], scale=lam)


def solve_system(system: SineSystem) -> np.ndarray:
    """Solve a square sine system, refusing ill-conditioned instances."""
    S = system.matrix
    if S.shape[0] != S.shape[1]:
        raise ShiftRuleError(f"system is {S.shape[0]}x{S.shape[1]}, expected square")
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond >= CONDITION_LIMIT:
        raise ShiftRuleError(f"sine system is singular or ill-conditioned (cond={cond:.3g})")
    xi = np.linalg.solve(S, system.rhs)
    res = system.residual(xi)
    if res > RESIDUAL_LIMIT:
        raise ShiftRuleError(f"solution residual {res:.3g} exceeds {RESIDUAL_LIMIT}")
    return xi


def dst1(x: Sequence[float]) -> np.ndarray:
    """Type-I discrete sine transform ``y_k = sum_j x_j sin(pi k j / (n + 1))``."""
    v = np.asarray(x, dtype=float)
    n = v.shape[0]
    k = np.arange(1, n + 1)
    return np.sin(np.pi * np.outer(k, k) / (n + 1)) @ v


def equidistant_angles(n: int) -> np.ndarray:
    return np.arange(1, n + 1) * np.pi / (n + 1)


def general_equidistant(n: int, gap: float = 1.0) -> ShiftRule:
    """``2n``-term rule with angles ``j pi / (n + 1)`` and DST-I coefficients.

    Exact for costs whose frequencies are integer multiples of ``gap`` up to
    ``n * gap``; shifts are divided by ``gap`` and the result scaled by it.
    """
    if n < 1:
        raise ShiftRuleError("need at least one leg")
    if gap <= 0:
        raise ShiftRuleError("gap must be positive")
    xi = dst1(np.arange(1, n + 1)) / (n + 1)
    return ShiftRule.symmetric(equidistant_angles(n) / gap, xi, scale=gap)


def apply_rule(rule: ShiftRule, c: ParamCircuit, theta: Sequence[float], param: int, H: PauliHamiltonian) -> float:
    if not 0 <= param < c.n_params:
        raise ValueError(f"parameter {param} out of range")
    t = np.asarray(theta, dtype=float)
    coeffs = np.array([cf for _, cf in rule.terms])
    if not rule.terms or not np.any(coeffs):
        return 0.0
    grid = np.repeat(t[None, :], len(rule.terms), axis=0)
    grid[:, param] += [s for s, _ in rule.terms]
    return float(rule.scale * (coeffs @ ge.expectations(c, grid, H)))


# ---------------------------------------------------------------------------
# Three-term no-go
# ---------------------------------------------------------------------------


def _distinct(*angles: float) -> bool:
    for i, a in enumerate(angles):
        for b in angles[i + 1 :]:
            if abs(math.remainder(a - b, 2 * math.pi)) < 1e-9:
                return False
    return True


def nogo_residual(alpha: float, beta: float, gamma: float) -> float:
    """Largest ``|Im xi_j|`` of the unique solution of the three-angle system.

    With ``a, b, c = exp(i alpha), ...`` the system is
    ``[1 1 1; a b c; a^2 b^2 c^2] xi = (0, i, 2i)``.  A real solution would
    give a three-term rule; a positive return value certifies there is none
    for these angles.
    """
    if not _distinct(alpha, beta, gamma):
        raise ShiftRuleError("angles must be pairwise distinct modulo 2pi; use nogo_two_angle")
    a, b, c = np.exp(1j * np.array([alpha, beta, gamma]))
    xi = (
        -1j * (b + c - 2) / ((a - b) * (a - c)),
        -1j * (a + c - 2) / ((b - a) * (b - c)),
        -1j * (a + b - 2) / ((c - a) * (c - b)),
    )
    return float(max(abs(x.imag) for x in xi))


class TwoAngleCheck(NamedTuple):
    cos_gap: float  # max(|cos a - cos b|, |cos 2a - cos 2b|)
    residual: float  # best achievable violation of the two shift equations


def nogo_two_angle(alpha: float, beta: float) -> TwoAngleCheck:
    """Branch for only two distinct angles, where ``xi_2 = -xi_1`` is forced.

    The remaining equations ``xi_1 (a - b) = i`` and ``xi_1 (a^2 - b^2) = 2i``
    are solved in the least-squares sense over real ``xi_1``; the returned
    residual is the worst equation violation at that optimum.
    """
    a, b = np.exp(1j * alpha), np.exp(1j * beta)
    gap = max(abs(math.cos(alpha) - math.cos(beta)), abs(math.cos(2 * alpha) - math.cos(2 * beta)))
    u = np.array([a - b, a * a - b * b])
    rhs = np.array([1j, 2j])
    den = float(np.sum(np.abs(u) ** 2))
    x = float(np.real(np.vdot(u, rhs)) / den) if den > 0 else 0.0
    return TwoAngleCheck(gap, float(np.max(np.abs(x * u - rhs))))


def nogo_sweep(trials: int = 1000, seed: int = 0) -> np.ndarray:
    """Residuals for ``trials`` seeded uniform triples of distinct angles."""
    rng = np.random.default_rng(seed)
    out = np.empty(trials)
    k = 0
    while k < trials:
        t = rng.uniform(-np.pi, np.pi, size=3)
        if _distinct(*t):
            out[k] = nogo_residual(*t)
            k += 1
    return out


# ---------------------------------------------------------------------------
# Ancilla recipe
# ---------------------------------------------------------------------------


def d_gate(p: float) -> np.ndarray:
    """``RY(2 arccos sqrt(p))``, which sends ``|0>`` to ``sqrt(p)|0> + sqrt(1-p)|1>``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    h = math.acos(math.sqrt(p))
    return np.array([[math.cos(h), -math.sin(h)], [math.sin(h), math.cos(h)]], dtype=complex)


def ancilla_state(weights: Sequence[float]) -> np.ndarray:
    """Prepare ``w_0|0..0> + sum_j w_j|e_j>`` on ``m`` ancillae with a D-gate cascade.

    ``weights`` has ``m + 1`` non-negative entries (normalised here).  Ancilla
    ``j`` receives ``D(p_j)`` controlled on all earlier ancillae being ``0``,
    so the one-hot structure is built one qubit at a time.  With all weights
    equal and ``m = 2`` this is ``D(2/3)`` followed by a controlled ``D(1/2)``.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 2 or np.any(w < 0) or not np.any(w):
        raise ValueError("need at least two non-negative weights, not all zero")
    w = w / np.linalg.norm(w)
    m = w.size - 1
    psi = ge.initial_states(1, m)
    remaining = 1.0
    for j in range(m):
        p = 1.0 - w[j + 1] ** 2 / remaining if remaining > 0 else 1.0
        p = min(max(p, 0.0), 1.0)
        remaining -= w[j + 1] ** 2
        # controlled on ancillae 0..j-1 all zero: identity elsewhere
        dim = 2 ** (j + 1)
        M = np.eye(dim, dtype=complex)
        M[:2, :2] = d_gate(p)
        psi = ge.apply_matrix(psi, M, list(range(j + 1)))
    return psi.reshape(-1)


def _spider_data(g) -> tuple[float, np.ndarray]:
    """Eigenvalue gap and reflection ``I - 2P`` for a two-eigenvalue generator."""
    G = g.generator
    if len(G.groups) != 2:
        raise AncillaError(f"gate {g.name} has {len(G.groups)} distinct eigenvalues; need a single phase spider")
    (lo, idx_lo), (hi, idx_hi) = G.groups[0], G.groups[1]
    V = G.eigenbasis
    P = V[:, list(idx_hi)] @ V[:, list(idx_hi)].conj().T
    return hi - lo, np.eye(P.shape[0]) - 2 * P


def ancilla_gradient(c: ParamCircuit, theta: Sequence[float], param: int, H: PauliHamiltonian) -> float:
    """Gradient from two post-selected expectations on ``n + m`` qubits.

    Each of the ``m`` occurrences of ``param`` is a spider ``P0 + e^{i w phi} P1``.
    Its derivative is ``(i w / 2)`` times the spider minus the spider with an
    extra ``pi``, which is the reflection ``I - 2 P1`` placed next to the gate.
    One ancilla per occurrence controls that reflection (a CZ for an ``RZ``).
    The ancillae start in ``|0..0> +- i sum_j w_j |e_j>`` (weights by D-gates,
    the ``+-i`` by phase gates) and are post-selected on ``|+>``.  Writing
    ``E+`` and ``E-`` for the two unnormalised post-selected expectations,
    the gradient is ``(E- - E+) / (4 K^2)`` where ``K`` is the known amplitude
    scale of the post-selected branch.
    """
    if not 0 <= param < c.n_params:
        raise ValueError(f"parameter {param} out of range")
    t = np.asarray(theta, dtype=float)
    occ = c.occurrences(param)
    if not occ:
        return 0.0
    data = {k: _spider_data(c.gates[k]) for k in occ}
    eff = np.array([c.gates[k].binding.mult * data[k][0] for k in occ])
    if not np.any(eff):
        return 0.0
    n, m = c.qubits, len(occ)
    weights = np.concatenate([[1.0], np.abs(eff)])
    norm = float(np.linalg.norm(weights))
    base = ancilla_state(weights)
    plus = np.ones(2**m) / 2 ** (m / 2)
    Hbig = PauliHamiltonian(tuple((cf, s + "I" * m) for cf, s in H.terms))
    results = []
    for sign in (+1, -1):
        phases = np.ones(2**m, dtype=complex)
        for j in range(m):
            phases[1 << (m - 1 - j)] = sign * 1j * np.sign(eff[j])
        anc = (base * phases).reshape((1,) + (2,) * m)
        sysv = ge.initial_states(1, n)
        psi = np.tensordot(sysv, anc[0], axes=0).reshape((1,) + (2,) * (n + m))
        for k, g in enumerate(c.gates):
            if g.generator is None:
                psi = ge.apply_matrix(psi, g.matrix, g.targets)
                continue
            phi = np.array([g.binding.phase(t)])
            psi, _ = ge._apply_param(psi, g, phi)
            if k in data:
                R = data[k][1]
                dim = R.shape[0]
                CR = np.eye(2 * dim, dtype=complex)
                CR[dim:, dim:] = R
                psi = ge.apply_matrix(psi, CR, [n + occ.index(k)] + list(g.targets))
        # post-select ancillae on |+...+>, keeping the ancilla wires as |0..0> placeholders
        flat = psi.reshape(2**n, 2**m) @ plus.conj()
        post = np.zeros((2**n, 2**m), dtype=complex)
        post[:, 0] = flat
        results.append(float(ge.pauli_expectations(post.reshape((1,) + (2,) * (n + m)), Hbig)[0].real))
    e_plus, e_minus = results
    K = 1.0 / (norm * 2 ** (m / 2))
    return (e_minus - e_plus) / (4 * K * K)
