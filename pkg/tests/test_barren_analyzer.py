"""Variance methods against each other and against closed forms."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zxgrad import barren_analyzer as ba
from zxgrad import gradient_engine as ge
from zxgrad.ansatz_library import AnsatzSpec, build, hamiltonian_for, random_circuit
from zxgrad.param_unitaries import ParamCircuit
from zxgrad.paulis import PauliHamiltonian

seeds = st.integers(0, 100_000)


def random_h(rng, n, terms=2):
    return PauliHamiltonian(tuple((float(rng.uniform(-1, 1)), "".join(rng.choice(list("XYZ"), n))) for _ in range(terms)))


def brute_variance(c, H, param, points):
    """Plain grid average written without the chunking machinery."""
    axes = [np.arange(points) * 2 * np.pi / points] * c.n_params
    grid = np.array(list(itertools.product(*axes)))
    g = ge.gradients(c, grid, param, H)
    return float(np.mean(g**2))


# -- numerical methods ---------------------------------------------------------


@settings(max_examples=15)
@given(seeds)
def test_quadrature_matches_diagram(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, max_qubits=3, max_params=3)
    H = random_h(rng, c.qubits)
    p = int(rng.integers(c.n_params))
    assert ba.variance_quadrature(c, H, p) == pytest.approx(ba.variance_diagram(c, H, p), abs=1e-9)


@settings(max_examples=10)
@given(seeds)
def test_quadrature_matches_brute_force_grid(seed):
    rng = np.random.default_rng(seed)
    c = random_circuit(rng, max_qubits=2, max_params=3, occurrences=2)
    H = random_h(rng, c.qubits)
    F = max(ba.frequency_audit(c))
    assert ba.variance_quadrature(c, H, 0) == pytest.approx(brute_variance(c, H, 0, 2 * F + 2), abs=1e-12)


def test_more_points_give_the_same_value(rng):
    c = build(AnsatzSpec("sim2", 2))
    H = hamiltonian_for("Z^n", 2)
    base = ba.variance_quadrature(c, H, 1)
    assert ba.variance_quadrature(c, H, 1, points_per_param=7) == pytest.approx(base, abs=1e-14)


def test_monte_carlo_within_three_sigma():
    c = build(AnsatzSpec("sim9", 3))
    H = hamiltonian_for("Z^n", 3)
    exact = ba.variance_quadrature(c, H, 0)
    est, err = ba.variance_mc(c, H, 0, samples=20_000, seed=3)
    assert abs(est - exact) < 3 * err
    assert err > 0


def test_monte_carlo_is_deterministic_per_seed():
    c = build(AnsatzSpec("sim1", 2))
    H = hamiltonian_for("Z^n", 2)
    assert ba.variance_mc(c, H, 0, 5000, seed=1) == ba.variance_mc(c, H, 0, 5000, seed=1)
    assert ba.variance_mc(c, H, 0, 5000, seed=1) != ba.variance_mc(c, H, 0, 5000, seed=2)


def test_worker_count_does_not_change_results():
    c = build(AnsatzSpec("sim1", 4))
    H = hamiltonian_for("Z^n", 4)
    one = ba.variance_quadrature(c, H, 0, workers=1)
    two = ba.variance_quadrature(c, H, 0, workers=2)
    assert one == two
    assert ba.variance_mc(c, H, 0, 9000, seed=0, workers=1) == ba.variance_mc(c, H, 0, 9000, seed=0, workers=2)


def test_worker_env_variable(monkeypatch):
    monkeypatch.setenv("ZXGRAD_WORKERS", "3")
    assert ba.default_workers() == 3
    monkeypatch.delenv("ZXGRAD_WORKERS")
    assert ba.default_workers() >= 1


def test_zero_variance_is_exact():
    c = build(AnsatzSpec("sim1", 3))
    ident = PauliHamiltonian.single("III")
    assert ba.variance_quadrature(c, ident, 0) == 0.0
    assert ba.variance_mc(c, ident, 0, 100, seed=0) == (0.0, 0.0)
    unused = ParamCircuit(1, 2).rot("RX", 0, 0)
    assert ba.variance_quadrature(unused, PauliHamiltonian.single("Z"), 1) == 0.0


def test_quadrature_errors():
    c = build(AnsatzSpec("sim1", 3))
    H = hamiltonian_for("Z^n", 3)
    with pytest.raises(ba.BudgetExceeded):
        ba.variance_quadrature(c, H, 0, budget=10)
    with pytest.raises(ba.QuadratureError):
        ba.variance_quadrature(c, H, 0, points_per_param=2)
    half = ParamCircuit(1, 1).rot("RX", 0, 0, mult=0.5)
    with pytest.raises(ba.QuadratureError):
        ba.variance_quadrature(half, PauliHamiltonian.single("Z"), 0)
    with pytest.raises(ValueError):
        ba.variance_quadrature(c, H, 99)


def test_frequency_audit():
    c = ParamCircuit(2, 3).rot("RX", 0, 0).rot("RZ", 1, 0, mult=-2).rot("CU1", [0, 1], 1)
    assert ba.frequency_audit(c) == [3, 1, 0]


def test_diagram_refusals():
    with pytest.raises(ba.UnsupportedInput):
        ba.variance_diagram(build(AnsatzSpec("iqp4", 3)), hamiltonian_for("Z^n", 3), 0)
    with pytest.raises(ba.UnsupportedInput):
        ba.variance_diagram(ParamCircuit(1, 1).rot("RX", 0, 0, mult=0.5), PauliHamiltonian.single("Z"), 0)


# -- closed forms --------------------------------------------------------------


@pytest.mark.parametrize("s", ["".join(p) for p in itertools.product("IXYZ", repeat=2)][1:] + ["XZY", "ZZZ", "YIX"])
def test_sim1_closed_form(s):
    n = len(s)
    c = build(AnsatzSpec("sim1", n))
    H = PauliHamiltonian.single(s)
    for p in range(c.n_params):
        assert ba.sim1_closed(H, p // 2, 1 + p % 2) == pytest.approx(ba.variance_quadrature(c, H, p), abs=1e-12)


@pytest.mark.parametrize("layers", [1, 2, 3])
def test_iqp1_closed_form_for_all_strings(layers):
    c = build(AnsatzSpec("iqp1", 3, layers))
    for letters in itertools.product("IXYZ", repeat=3):
        s = "".join(letters)
        if s == "III":
            continue
        H = PauliHamiltonian.single(s)
        got = ba.iqp_closed("iqp1", 3, layers, s, 0)
        assert got == pytest.approx(ba.variance_quadrature(c, H, 0), abs=1e-12), s


def test_iqp1_single_layer_rule():
    # non-zero exactly for an odd number of Z-type factors and uniform X-type factors
    assert ba.iqp_closed("iqp1", 4, 1, "ZIII") == 0.5
    assert ba.iqp_closed("iqp1", 4, 1, "ZZII") == 0.0
    assert ba.iqp_closed("iqp1", 4, 1, "YXXX") == 0.5
    assert ba.iqp_closed("iqp1", 4, 1, "YXXI") == 0.0


@pytest.mark.parametrize("n", [2, 4])
def test_iqp2_and_iqp4_closed_forms(n):
    for fam, pattern in (("iqp2", "(YX)^(n/2)"), ("iqp4", "Z^n")):
        spec = AnsatzSpec(fam, n)
        H = hamiltonian_for(pattern, n)
        c = build(spec)
        for p in range(c.n_params):
            assert ba.CLOSED_FORMS.value(spec, H, p) == pytest.approx(ba.variance_quadrature(c, H, p), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_iqp3_single_layer_values_are_shared(n):
    spec = AnsatzSpec("iqp3", n)
    c = build(spec)
    H = hamiltonian_for("(YX)^(n/2)", n)
    values = {round(ba.variance_quadrature(c, H, p), 12) for p in range(c.n_params)}
    expect = {0.0, 1 / 2**n} if n % 2 == 0 else {0.0}
    assert values == {round(v, 12) for v in expect}


def test_closed_form_scope():
    with pytest.raises(ba.OutOfScope):
        ba.CLOSED_FORMS.value(AnsatzSpec("sim9", 3), hamiltonian_for("Z^n", 3), 0)
    with pytest.raises(ba.OutOfScope):
        ba.CLOSED_FORMS.value(AnsatzSpec("sim1", 2), PauliHamiltonian(((0.5, "ZZ"), (0.5, "XX"))), 0)
    with pytest.raises(ba.OutOfScope):
        ba.iqp_closed("iqp1", 4, 2, "ZZZZ")
    with pytest.raises(ba.OutOfScope):
        ba.iqp_closed("iqp2", 4, 1, "ZZZZ")


def test_intro_example():
    for n in (3, 5):
        spec = AnsatzSpec("intro", n)
        c = build(spec)
        H = hamiltonian_for("X^n", n)
        for p in (0, 1):
            assert ba.variance_quadrature(c, H, p) == pytest.approx(0.25, abs=1e-12)
            assert ba.variance_diagram(c, H, p) == pytest.approx(0.25, abs=1e-12)
            assert ba.CLOSED_FORMS.value(spec, H, p) == 0.25


# -- the layer recurrence ------------------------------------------------------


@pytest.mark.parametrize("l", range(1, 16))
def test_v_recurrence_closed_form_identity(l):
    for ke, ko in itertools.product((0, 1), repeat=2):
        r = ba.v_recurrence(l, ke, ko)
        assert isinstance(r, Fraction)
        assert r == ba.v_closed(l, ke, ko)
        assert abs(r) == ba.v_magnitude(l, ke, ko)


def test_v_values():
    # Z^3 on three qubits reads (k_e, k_o) = (0, 1) for odd and (1, 0) for even layer counts
    seq = [abs(ba.v_recurrence(l, l % 2 == 0, l % 2)) for l in range(1, 5)]
    assert seq == [Fraction(1, 2), Fraction(1, 4), Fraction(3, 8), Fraction(5, 16)]
    assert ba.v_recurrence(2, 1, 0) < 0
    assert abs(float(ba.v_recurrence(15, 0, 1)) - 1 / 3) < 1e-3
    assert ba.v_recurrence(7, 0, 0) == 0
    with pytest.raises(ValueError):
        ba.v_recurrence(0, 0, 1)


# -- reports and sweeps --------------------------------------------------------


def test_report_rows():
    r = ba.VarianceReport("sim1", 2, 1, 0, "quadrature", 0.25)
    assert r.row() == ["sim1", "2", "1", "0", "quadrature", "0.25", "exact"]
    skipped = ba.VarianceReport("sim1", 9, 1, 0, "quadrature", None, "skipped:budget")
    assert skipped.row()[5:] == ["", "skipped:budget"]
    with pytest.raises(ArithmeticError):
        ba.VarianceReport("sim1", 2, 1, 0, "quadrature", -0.1)


def test_sweep_rows_and_skips():
    spec = ba.SweepSpec(
        ansatz="sim1",
        n_values=(2, 3),
        hamiltonian="Z^n",
        methods=("quadrature", "closed_form", "diagram"),
        budget=200,
    )
    rows = ba.sweep(spec)
    assert [(r.n, r.method) for r in rows] == [
        (2, "quadrature"), (2, "closed_form"), (2, "diagram"),
        (3, "quadrature"), (3, "closed_form"), (3, "diagram"),
    ]  # fmt: skip
    assert rows[3].stderr == "skipped:budget" and rows[3].value is None
    assert rows[0].value == pytest.approx(rows[1].value) == pytest.approx(rows[2].value)


def test_sweep_skips_out_of_scope_methods():
    rows = ba.sweep(ba.SweepSpec("iqp4", (3,), methods=("quadrature", "diagram", "closed_form")))
    assert [r.method for r in rows] == ["quadrature", "closed_form"]


def test_sweep_validation():
    with pytest.raises(ValueError):
        ba.SweepSpec("sim1", (2,), methods=("monte_carlo",))
    with pytest.raises(ValueError):
        ba.SweepSpec("sim1", (2,), methods=("guess",))
    assert ba.sweep(ba.SweepSpec("sim1", ())) == []
