"""Command-line front end.

Subcommands::

    zxgrad rules --legs 2
    zxgrad rules --eigs -0.5,0,0.5 --alphas 1.5707963,3.1415926
    zxgrad verify {zxw-rules,gradients,nogo} [--trials N] [--seed S]
    zxgrad variance --ansatz sim1 --n 4 --h Z^n --param 0
    zxgrad variance --circuit circ.json --h ZZ --param 1
    zxgrad sweep --ansatz iqp1 --n 3 --layers 1..6 --h Z^n --format csv

Exit status is 0 on success, 1 when a verification check fails and 2 on
usage errors (bad flags, unknown ansatz, unparsable Hamiltonian).  The
worker count for quadrature and Monte Carlo comes from ``ZXGRAD_WORKERS``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import barren_analyzer as ba
from . import gradient_engine as ge
from . import shift_rules as sr
from .ansatz_library import AnsatzError, AnsatzSpec, build, random_circuit
from .param_unitaries import ParamCircuit
from .paulis import HamiltonianParseError, PauliHamiltonian, parse_hamiltonian
from .zxw_core import rule_suite

HEADER = ("ansatz", "n", "layers", "param", "method", "value", "stderr")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------


def parse_range(text: str) -> tuple[int, ...]:
    """``"2..6"`` (inclusive), ``"3"`` or ``"2,4,6"``; ``"5..4"`` is empty."""
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def parse_floats(text: str) -> list[float]:
    return [float(eval_angle(t)) for t in text.split(",") if t.strip()]


def eval_angle(token: str) -> float:
    """A float, optionally written with ``pi`` (``pi/2``, ``3*pi/4``, ``-pi``)."""
    t = token.strip().lower().replace("π", "pi")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    num = num.replace("*", "").replace("pi", "")
    factor = -1.0 if num == "-" else 1.0 if num in ("", "+") else float(num)
    return factor * math.pi / (float(den) if den else 1.0)


class RangeType(click.ParamType):
    name = "range"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_range(value)
        except ValueError:
            self.fail(f"{value!r} is not a range like 2..6 or a list like 2,4", param, ctx)


class FloatListType(click.ParamType):
    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return parse_floats(value)
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)


RANGE = RangeType()
FLOATS = FloatListType()


@dataclass(frozen=True)
class RunConfig:
    """Everything a variance run needs; validated on construction."""

    ansatz: str
    n_values: tuple[int, ...]
    layer_values: tuple[int, ...]
    hamiltonian: str
    params: tuple[int, ...] | None
    methods: tuple[str, ...]
    samples: int
    seed: int | None
    points: int | None
    budget: int
    fmt: str = "csv"
    output: str | None = None

    def sweep_spec(self) -> ba.SweepSpec:
        return ba.SweepSpec(
            ansatz=self.ansatz,
            n_values=self.n_values,
            layer_values=self.layer_values,
            hamiltonian=self.hamiltonian,
            params=self.params,
            methods=self.methods,
            samples=self.samples,
            seed=self.seed,
            points=self.points,
            budget=self.budget,
        )


def _methods(text: str) -> tuple[str, ...]:
    methods = tuple(m.strip().replace("-", "_") for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in ba.METHODS]
    if bad or not methods:
        raise click.BadParameter(f"unknown methods {bad}; choose from {', '.join(ba.METHODS)}", param_hint="--methods")
    return methods


def _params(text: str) -> tuple[int, ...] | None:
    if text.strip().lower() == "all":
        return None
    try:
        return parse_range(text)
    except ValueError:
        raise click.BadParameter(f"{text!r} is not 'all' or a range", param_hint="--params") from None


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def render(rows: list[ba.VarianceReport], fmt: str) -> str:
    if fmt == "json":
        records = [
            {
                "ansatz": r.ansatz,
                "n": r.n,
                "layers": r.layers,
                "param": r.param,
                "method": r.method,
                "value": None if r.value is None else float(r.value),
                "stderr": r.stderr if isinstance(r.stderr, str) else float(r.stderr),
            }
            for r in rows
        ]
        return json.dumps(records, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckLine:
    name: str
    passed: bool
    detail: str

    def __str__(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def zxw_checks(seed: int = 0) -> list[CheckLine]:
    return [
        CheckLine(r.name, r.passed, f"max deviation {r.max_deviation:.2e} over {r.cases} cases")
        for r in rule_suite(seed=seed).values()
    ]


def gradient_checks(trials: int = 20, seed: int = 0) -> list[CheckLine]:
    """Compare analytic, finite-difference, shift-rule and ancilla gradients.

    Each random circuit is differentiated in every parameter.  The shift
    rule is the equidistant rule sized by the parameter's largest
    frequency; the ancilla recipe is tried when every occurrence qualifies.
    """
    rng = np.random.default_rng(seed)
    lines = []
    for t in range(trials):
        c = random_circuit(rng, occurrences=1 + t % 2)
        terms = tuple((float(rng.uniform(-1, 1)), "".join(rng.choice(list("IXYZ"), c.qubits))) for _ in range(2))
        H = PauliHamiltonian(terms)
        theta = rng.uniform(-np.pi, np.pi, c.n_params)
        freqs = ba.frequency_audit(c)
        worst = {"fd": 0.0, "shift": 0.0, "ancilla": 0.0}
        for p in range(c.n_params):
            exact = ge.grad_exact(c, theta, p, H)
            worst["fd"] = max(worst["fd"], abs(ge.grad_fd(c, theta, p, H) - exact))
            if freqs[p]:
                rule = sr.general_equidistant(freqs[p])
                worst["shift"] = max(worst["shift"], abs(sr.apply_rule(rule, c, theta, p, H) - exact))
            try:
                worst["ancilla"] = max(worst["ancilla"], abs(sr.ancilla_gradient(c, theta, p, H) - exact))
            except sr.AncillaError:
                pass
        ok = worst["fd"] < 1e-6 and worst["shift"] < 1e-9 and worst["ancilla"] < 1e-9
        detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        lines.append(CheckLine(f"circuit {t} ({c.qubits} qubits, {c.n_params} params)", ok, detail))
    return lines


def nogo_checks(trials: int = 1000, seed: int = 7) -> list[CheckLine]:
    res = sr.nogo_sweep(trials, seed)
    worst = float(res.min()) if res.size else math.inf
    return [CheckLine("three-term no-go", worst > 1e-6, f"min residual {worst:.4g} over {trials} triples")]


SUITES = {"zxw-rules": zxw_checks, "gradients": gradient_checks, "nogo": nogo_checks}


# ---------------------------------------------------------------------------
# Rule synthesis
# ---------------------------------------------------------------------------


def rule_residual(rule: sr.ShiftRule, freqs) -> float:
    """Worst mismatch of the rule on ``exp(i w theta)`` over the given frequencies."""
    worst = 0.0
    for w in freqs:
        got = rule.scale * sum(cf * np.exp(1j * w * s) for s, cf in rule.terms)
        worst = max(worst, abs(got - 1j * w))
    return float(worst)


def synthesize(legs: int | None, eigs: list[float] | None, alphas: list[float] | None) -> tuple[sr.ShiftRule, list[float]]:
    """Pick the rule family for the request; returns the rule and the frequencies it must handle."""
    if legs is not None:
        freqs = [float(k) for k in range(1, legs + 1)]
        if alphas:
            if len(alphas) != legs:
                raise sr.ShiftRuleError("--alphas needs one angle per leg")
            xi = sr.solve_system(sr.SineSystem.square(alphas))
            return sr.ShiftRule.symmetric(alphas, xi), freqs
        return sr.general_equidistant(legs), freqs
    spectrum = sorted(set(round(e, 12) for e in eigs))
    freqs = sorted({round(b - a, 12) for i, a in enumerate(spectrum) for b in spectrum[i + 1 :]})
    if not freqs:
        raise sr.ShiftRuleError("a single eigenvalue has zero derivative; nothing to synthesise")
    if len(spectrum) == 2:
        d = spectrum[1] - spectrum[0]
        alpha = alphas[0] if alphas else math.pi / (2 * d)
        return sr.two_term(spectrum[1], spectrum[0], alpha), freqs
    centred = [e - (spectrum[0] + spectrum[-1]) / 2 for e in spectrum]
    if len(spectrum) == 3 and abs(centred[1]) < 1e-12 and alphas and len(alphas) == 2:
        return sr.four_term(centred[2], alphas[0], alphas[1]), freqs
    gap = freqs[0]
    ratios = [f / gap for f in freqs]
    if any(abs(r - round(r)) > 1e-9 for r in ratios):
        raise sr.ShiftRuleError("eigenvalue differences are not multiples of a common gap")
    top = int(round(ratios[-1]))
    if alphas:
        if len(alphas) != top:
            raise sr.ShiftRuleError(f"--alphas needs {top} angles for this spectrum")
        xi = sr.solve_system(sr.SineSystem.square([gap * a for a in alphas]))
        return sr.ShiftRule.symmetric(alphas, xi, scale=gap), freqs
    return sr.general_equidistant(top, gap), freqs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Gradients, shift rules and gradient-variance analysis for parametrised circuits."""


@main.command()
@click.option("--legs", type=click.IntRange(min=1), help="Number of parametrised legs (frequencies 1..N).")
@click.option("--eigs", type=FLOATS, help="Generator eigenvalues, comma separated.")
@click.option("--alphas", type=FLOATS, help="Shift angles; 'pi/2' style values are accepted.")
def rules(legs, eigs, alphas) -> None:
    """Synthesise a parameter-shift rule and report its residual."""
    if (legs is None) == (eigs is None):
        raise click.UsageError("give exactly one of --legs and --eigs")
    try:
        rule, freqs = synthesize(legs, eigs, alphas)
    except sr.ShiftRuleError as exc:
        raise click.UsageError(str(exc)) from None
    click.echo(f"rule: {rule}")
    for s, cf in rule.half:
        click.echo(f"  shift {s:+.10f}  coefficient {cf:+.12f}")
    click.echo(f"residual: {rule_residual(rule, freqs):.3e}")


@main.command()
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@click.option("--trials", type=click.IntRange(min=1), default=None, help="Number of random instances.")
@click.option("--seed", type=int, default=None, help="Seed for the random instances.")
def verify(suite, trials, seed) -> None:
    """Run a verification suite; exit status 1 if any check fails."""
    kwargs = {}
    if trials is not None:
        kwargs["trials"] = trials
    if seed is not None:
        kwargs["seed"] = seed
    if suite == "zxw-rules" and trials is not None:
        raise click.UsageError("zxw-rules takes no --trials")
    lines = SUITES[suite](**kwargs)
    for line in lines:
        click.echo(str(line))
    failed = sum(not line.passed for line in lines)
    click.echo(f"{len(lines) - failed}/{len(lines)} checks passed")
    if failed:
        sys.exit(EXIT_FAIL)


def _common_variance_options(f):
    opts = [
        click.option("--h", "hamiltonian", default="Z^n", show_default=True, help="Hamiltonian pattern or explicit sum."),
        click.option("--methods", default="quadrature", show_default=True, help="Comma list of " + ", ".join(ba.METHODS) + "."),
        click.option("--samples", type=click.IntRange(min=2), default=100_000, show_default=True),
        click.option("--seed", type=int, default=None, help="Required with monte_carlo."),
        click.option("--points", type=click.IntRange(min=1), default=None, help="Quadrature points per parameter."),
        click.option("--budget", type=click.IntRange(min=1), default=int(ba.DEFAULT_BUDGET), show_default=True),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
        click.option("--output", "-o", default=None, help="Output file (stdout if omitted)."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _run(config: RunConfig) -> None:
    try:
        rows = ba.sweep(config.sweep_spec())
    except (AnsatzError, HamiltonianParseError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None
    _emit(render(rows, config.fmt), config.output)


@main.command()
@click.option("--ansatz", default="sim1", show_default=True, help="Ansatz family.")
@click.option("--n", "n_values", type=RANGE, required=True, help="Qubit counts, e.g. 2..6.")
@click.option("--layers", "layer_values", type=RANGE, default="1", show_default=True)
@click.option("--params", default="0", show_default=True, help="Parameter indices or 'all'.")
@_common_variance_options
def sweep(ansatz, n_values, layer_values, params, hamiltonian, methods, samples, seed, points, budget, fmt, output) -> None:
    """Variance rows over ranges of qubit counts and layers."""
    config = RunConfig(
        ansatz, n_values, layer_values, hamiltonian, _params(params), _methods(methods), samples, seed, points, budget, fmt, output
    )
    if "monte_carlo" in config.methods and seed is None:
        raise click.UsageError("--seed is required with monte_carlo")
    _run(config)


@main.command()
@click.option("--ansatz", default=None, help="Ansatz family (or use --circuit).")
@click.option("--circuit", "circuit_file", type=click.Path(exists=True, dir_okay=False), default=None, help="Circuit JSON file.")
@click.option("--n", type=click.IntRange(min=1), default=None, help="Qubit count for --ansatz.")
@click.option("--layers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--param", "params", default="0", show_default=True, help="Parameter indices or 'all'.")
@_common_variance_options
def variance(ansatz, circuit_file, n, layers, params, hamiltonian, methods, samples, seed, points, budget, fmt, output) -> None:
    """Variance of one ansatz instance or of a circuit read from JSON."""
    ms = _methods(methods)
    if "monte_carlo" in ms and seed is None:
        raise click.UsageError("--seed is required with monte_carlo")
    if (ansatz is None) == (circuit_file is None):
        raise click.UsageError("give exactly one of --ansatz and --circuit")
    if ansatz is not None:
        if n is None:
            raise click.UsageError("--n is required with --ansatz")
        _run(RunConfig(ansatz, (n,), (layers,), hamiltonian, _params(params), ms, samples, seed, points, budget, fmt, output))
        return
    try:
        c = ParamCircuit.from_json(Path(circuit_file).read_text())
        H = parse_hamiltonian(hamiltonian, c.qubits)
    except (ValueError, KeyError, TypeError) as exc:
        raise click.UsageError(f"cannot load circuit: {exc}") from None
    chosen = range(c.n_params) if _params(params) is None else [p for p in _params(params) if p < c.n_params]
    rows = []
    name = Path(circuit_file).stem
    for p in chosen:
        for m in ms:
            key = (name, c.qubits, 1, p, m)
            try:
                if m == "quadrature":
                    rows.append(ba.VarianceReport(*key, ba.variance_quadrature(c, H, p, points, budget)))
                elif m == "monte_carlo":
                    rows.append(ba.VarianceReport(*key, *ba.variance_mc(c, H, p, samples, seed)))
                elif m == "diagram":
                    rows.append(ba.VarianceReport(*key, ba.variance_diagram(c, H, p)))
            except ba.BudgetExceeded:
                rows.append(ba.VarianceReport(*key, None, "skipped:budget"))
            except (ba.UnsupportedInput, ba.QuadratureError) as exc:
                click.echo(f"{m} skipped for param {p}: {exc}", err=True)
    _emit(render(rows, fmt), output)


if __name__ == "__main__":  # pragma: no cover
    main()
