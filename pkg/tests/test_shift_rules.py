"""Shift-rule synthesis, the three-term no-go and the ancilla recipe."""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import random_hermitian
from zxgrad import gradient_engine as ge
from zxgrad import shift_rules as sr
from zxgrad.ansatz_library import random_circuit
from zxgrad.param_unitaries import Gate, ParamCircuit, eig_decompose
from zxgrad.paulis import PauliHamiltonian
from zxgrad.zxw_core import Binding

SQ3 = math.sqrt(3)


def random_h(rng, n):
    return PauliHamiltonian(tuple((float(rng.uniform(-1, 1)), "".join(rng.choice(list("IXYZ"), n))) for _ in range(3)))


def spectrum_circuit(rng, spectrum, q):
    """Random basis change, one generator with the given spectrum, another basis change."""
    n = q + 1
    G = eig_decompose(random_hermitian(rng, 2**q, spectrum))
    c = ParamCircuit(n, 2)
    for w in range(n):
        c = c.rot("RY", w, 1, offset=float(rng.uniform(-3, 3))).const("H", w)
    c = c.const("CNOT", 0, n - 1)
    c = c.add(Gate("G", tuple(range(q)), generator=G, binding=Binding(0, 1.0, float(rng.uniform(-3, 3)))))
    c = c.const("CZ", 0, n - 1)
    for w in range(n):
        c = c.rot("RX", w, 1)
    return c


# -- two and four term ---------------------------------------------------------


def test_two_term_examples():
    rule = sr.two_term(0.5, -0.5, math.pi / 2)
    assert rule.half == ((math.pi / 2, 0.5),)
    assert dict(rule.terms)[-math.pi / 2] == -0.5
    assert sr.two_term(1, -1, math.pi / 4).half[0][1] == pytest.approx(1.0)


def test_two_term_rejects_forbidden_angle():
    with pytest.raises(sr.ShiftRuleError):
        sr.two_term(0.5, -0.5, 2 * math.pi)


@pytest.mark.parametrize("gate,targets", [("RZ", 0), ("RX", 0), ("RY", 1), ("CU1", [0, 1])])
def test_two_term_gradients(gate, targets, rng):
    c = ParamCircuit(2, 2).const("H", 0).rot("RY", 1, 1).rot(gate, targets, 0).const("CNOT", 0, 1).rot("RX", 0, 1)
    G = c.gates[c.occurrences(0)[0]].generator
    lo, hi = G.distinct
    H = random_h(rng, 2)
    for alpha in (math.pi / 2, 0.3, 1.1, 2.0, -0.7):
        rule = sr.two_term(hi, lo, alpha)
        for _ in range(10):
            t = rng.uniform(-np.pi, np.pi, 2)
            assert sr.apply_rule(rule, c, t, 0, H) == pytest.approx(ge.grad_exact(c, t, 0, H), abs=1e-10)


def test_four_term_coefficients():
    rule = sr.four_term(0.5, math.pi / 2, math.pi)
    (s1, x1), (s2, x2) = rule.half
    assert (s1, s2) == (math.pi / 2, math.pi)
    assert x1 == pytest.approx(1.0, abs=1e-12)
    assert x2 == pytest.approx((1 - math.sqrt(2)) / 2, abs=1e-12)
    assert rule.scale == 0.5
    # the same numbers from the generic solver at the scaled angles
    xi = sr.solve_system(sr.SineSystem.square([math.pi / 4, math.pi / 2]))
    assert np.allclose(xi, [x1, x2], atol=1e-12)


@given(st.floats(0.2, 2.9), st.floats(0.2, 2.9))
def test_four_term_is_exact_for_crz(a1, a2):
    assume(abs(a1 - a2) > 0.1)
    a, b = a1 / 2, a2 / 2
    assume(abs(math.sin(a) * math.sin(2 * b) - math.sin(2 * a) * math.sin(b)) > 1e-2)
    rng = np.random.default_rng(0)
    c = ParamCircuit(2, 1).const("H", 0).const("H", 1).rot("CRZ", [0, 1], 0).const("H", 1).const("S", 0).const("H", 0)
    H = random_h(rng, 2)
    rule = sr.four_term(0.5, a1, a2)
    for t in rng.uniform(-np.pi, np.pi, 5):
        assert sr.apply_rule(rule, c, [t], 0, H) == pytest.approx(ge.grad_exact(c, [t], 0, H), abs=1e-9)


def test_four_term_errors():
    with pytest.raises(sr.ShiftRuleError):
        sr.four_term(0.5, 1.0, 1.0)
    with pytest.raises(sr.ShiftRuleError):
        sr.four_term(0.5, 2 * math.pi, 4 * math.pi)


def test_shift_rule_validation():
    with pytest.raises(sr.ShiftRuleError):
        sr.ShiftRule(((0.1, 1.0), (0.1 + 2 * math.pi, 1.0)))
    with pytest.raises(sr.ShiftRuleError):
        sr.ShiftRule(((0.1, math.inf),))
    # pi and -pi coincide at scale 1 but not at scale 1/2
    sr.ShiftRule(((math.pi, 1.0), (-math.pi, -1.0)), scale=0.5)
    with pytest.raises(sr.ShiftRuleError):
        sr.ShiftRule(((math.pi, 1.0), (-math.pi, -1.0)))


# -- sine systems --------------------------------------------------------------


def test_solve_system_examples():
    assert sr.solve_system(sr.SineSystem.square([math.pi / 6]))[0] == pytest.approx(1.0)
    xi = sr.solve_system(sr.SineSystem.square([math.pi / 3, 2 * math.pi / 3]))
    assert np.allclose(xi, [SQ3 / 2, -SQ3 / 6], atol=1e-12)
    with pytest.raises(sr.ShiftRuleError):
        sr.solve_system(sr.SineSystem.square([math.pi / 3, math.pi / 3]))
    with pytest.raises(sr.ShiftRuleError):
        sr.solve_system(sr.SineSystem(2, (0.3, 0.5, 0.9)))


def test_general_equidistant_examples():
    ((shift, xi),) = sr.general_equidistant(1).half
    assert (shift, xi) == pytest.approx((math.pi / 2, 0.5))
    assert [x for _, x in sr.general_equidistant(2).half] == pytest.approx([SQ3 / 2, -SQ3 / 6])
    assert sr.general_equidistant(3).half[0][1] == pytest.approx((1 + math.sqrt(2)) / 2)


@pytest.mark.parametrize("n", range(1, 9))
def test_general_equidistant_matches_solver(n):
    rule = sr.general_equidistant(n)
    alphas = [s for s, _ in rule.half]
    assert np.allclose([x for _, x in rule.half], sr.solve_system(sr.SineSystem.square(alphas)), atol=1e-10)


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=9))
def test_dst1_is_an_involution_up_to_scale(x):
    n = len(x)
    assert np.allclose(sr.dst1(sr.dst1(x)) * 2 / (n + 1), x, atol=1e-10)


def test_dst1_matches_explicit_sum():
    x = np.array([0.3, -1.0, 2.0, 0.5])
    n = len(x)
    expect = [sum(x[j - 1] * math.sin(math.pi * k * j / (n + 1)) for j in range(1, n + 1)) for k in range(1, n + 1)]
    assert np.allclose(sr.dst1(x), expect)


@pytest.mark.parametrize("n,q", [(1, 1), (2, 2), (3, 2), (4, 3)])
def test_general_equidistant_exact_on_spectrum_gates(n, q, rng):
    spectrum = list(range(n + 1)) + [n] * (2**q - n - 1)
    c = spectrum_circuit(rng, spectrum, q)
    H = random_h(rng, c.qubits)
    rule = sr.general_equidistant(n)
    for _ in range(20):
        t = rng.uniform(-np.pi, np.pi, 2)
        assert sr.apply_rule(rule, c, t, 0, H) == pytest.approx(ge.grad_exact(c, t, 0, H), abs=1e-8)


def test_gap_rescaling(rng):
    c = spectrum_circuit(rng, [0.0, 0.75, 1.5, 1.5], 2)
    H = random_h(rng, c.qubits)
    rule = sr.general_equidistant(2, gap=0.75)
    t = rng.uniform(-1, 1, 2)
    assert sr.apply_rule(rule, c, t, 0, H) == pytest.approx(ge.grad_exact(c, t, 0, H), abs=1e-10)


def test_apply_rule_edge_cases(rng):
    c = ParamCircuit(1, 1).rot("RZ", 0, 0).const("H", 0)
    X = PauliHamiltonian.single("Z")
    assert sr.apply_rule(sr.ShiftRule(((0.3, 0.0), (0.5, 0.0))), c, [0.2], 0, X) == 0.0
    with pytest.raises(ValueError):
        sr.apply_rule(sr.general_equidistant(1), c, [0.2], 3, X)


def test_two_term_on_rz_with_x_observable(rng):
    c = ParamCircuit(1, 1).const("H", 0).rot("RZ", 0, 0)
    X = PauliHamiltonian.single("X")
    rule = sr.two_term(0.5, -0.5, math.pi / 2)
    for t in rng.uniform(-np.pi, np.pi, 5):
        assert sr.apply_rule(rule, c, [t], 0, X) == pytest.approx(ge.grad_exact(c, [t], 0, X), abs=1e-10)


# -- no-go ---------------------------------------------------------------------


def test_nogo_quarter_turns():
    assert sr.nogo_residual(math.pi / 2, math.pi, 3 * math.pi / 2) > 1e-3


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_nogo_residual_is_positive_and_symmetric(a, b, c):
    for x, y in ((a, b), (b, c), (a, c)):
        assume(abs(math.remainder(x - y, 2 * math.pi)) > 1e-3)
    r = sr.nogo_residual(a, b, c)
    assert r > 1e-9
    assert sr.nogo_residual(-a, -b, -c) == pytest.approx(r, abs=1e-12)


def test_nogo_sweep():
    res = sr.nogo_sweep(1000, seed=7)
    assert res.shape == (1000,)
    assert res.min() > 1e-6


def test_nogo_rejects_coincident_angles():
    with pytest.raises(sr.ShiftRuleError):
        sr.nogo_residual(0.4, 0.4 + 2 * math.pi, 1.0)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_two_angle_branch_has_no_real_solution(a, b):
    assume(abs(math.remainder(a - b, 2 * math.pi)) > 1e-3)
    check = sr.nogo_two_angle(a, b)
    assert check.residual > 1e-9


# -- ancilla -------------------------------------------------------------------


def test_d_gate():
    assert np.allclose(sr.d_gate(2 / 3) @ [1, 0], [math.sqrt(2 / 3), math.sqrt(1 / 3)])
    with pytest.raises(ValueError):
        sr.d_gate(1.5)


def test_ancilla_state_for_two_occurrences():
    expect = np.array([1, 1, 1, 0]) / SQ3
    assert np.allclose(sr.ancilla_state([1, 1, 1]), expect, atol=1e-12)


@given(st.lists(st.floats(0.01, 5), min_size=2, max_size=5))
def test_ancilla_state_is_one_hot(weights):
    psi = sr.ancilla_state(weights)
    m = len(weights) - 1
    w = np.array(weights) / np.linalg.norm(weights)
    expect = np.zeros(2**m)
    expect[0] = w[0]
    for j in range(m):
        expect[1 << (m - 1 - j)] = w[j + 1]
    assert np.allclose(psi, expect, atol=1e-12)


def test_ancilla_two_rz_example(rng):
    c = (
        ParamCircuit(2, 1)
        .const("H", 0)
        .const("H", 1)
        .rot("RZ", 0, 0)
        .const("CNOT", 0, 1)
        .rot("RZ", 1, 0)
        .const("H", 0)
    )
    for H in (PauliHamiltonian.single("XY"), PauliHamiltonian.single("ZX"), random_h(rng, 2)):
        for t in rng.uniform(-np.pi, np.pi, 5):
            assert sr.ancilla_gradient(c, [t], 0, H) == pytest.approx(ge.grad_exact(c, [t], 0, H), abs=1e-9)


def test_ancilla_random_circuits():
    rng = np.random.default_rng(99)
    for _ in range(10):
        c = random_circuit(rng, max_params=1, occurrences=int(rng.integers(1, 4)))
        H = random_h(rng, c.qubits)
        t = rng.uniform(-np.pi, np.pi, 1)
        assert sr.ancilla_gradient(c, t, 0, H) == pytest.approx(ge.grad_exact(c, t, 0, H), abs=1e-9)


def test_ancilla_needs_two_eigenvalue_spiders():
    c = ParamCircuit(2, 1).rot("CRZ", [0, 1], 0)
    with pytest.raises(sr.AncillaError):
        sr.ancilla_gradient(c, [0.1], 0, PauliHamiltonian.single("ZZ"))
