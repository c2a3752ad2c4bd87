"""Pauli strings and real Pauli-sum Hamiltonians.

Text forms accepted by :func:`parse_hamiltonian`::

    ZZZ                      a single string, coefficient 1
    0.5*XY + 0.5*YX          a weighted sum; '-' also separates terms
    Z^n                      'Z' repeated n times (n supplied by the caller)
    (YX)^2                   group repetition, here YXYX
    (YX)^(n/2)               YX repeated n // 2 times; for odd n the
                             group's last letter is appended once more,
                             so n = 3 gives YXX

A repetition count is an integer, ``n`` or ``n/2`` (optionally in
parentheses).  A caret binds to the single letter or parenthesised group
immediately before it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "PAULI",
    "PauliHamiltonian",
    "HamiltonianParseError",
    "expand_pattern",
    "parse_hamiltonian",
    "pauli_matrix",
    "strings_commute",
]

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class HamiltonianParseError(ValueError):
    """Bad token or inconsistent string lengths in a Hamiltonian descriptor."""


def pauli_matrix(s: str) -> np.ndarray:
    """Dense matrix of a Pauli string (character 0 acts on the MSB wire)."""
    if not s or any(ch not in PAULI for ch in s):
        raise HamiltonianParseError(f"not a Pauli string: {s!r}")
    return reduce(np.kron, (PAULI[ch] for ch in s))


def strings_commute(p: str, q: str) -> bool:
    """Two Pauli strings commute iff they anticommute on an even number of sites."""
    if len(p) != len(q):
        raise ValueError("Pauli strings must have equal length")
    clashes = sum(1 for a, b in zip(p, q) if a != "I" and b != "I" and a != b)
    return clashes % 2 == 0


@dataclass(frozen=True)
class PauliHamiltonian:
    """Real linear combination of equal-length Pauli strings."""

    terms: tuple[tuple[float, str], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise HamiltonianParseError("empty Hamiltonian")
        lengths = {len(s) for _, s in self.terms}
        if len(lengths) != 1:
            raise HamiltonianParseError(f"inconsistent string lengths {sorted(lengths)}")
        for c, s in self.terms:
            pauli_matrix(s)
            if not np.isfinite(c) or np.iscomplexobj(c):
                raise HamiltonianParseError(f"coefficient must be real, got {c!r}")

    @classmethod
    def single(cls, s: str, coeff: float = 1.0) -> "PauliHamiltonian":
        return cls(((float(coeff), s),))

    @property
    def n(self) -> int:
        return len(self.terms[0][1])

    def matrix(self) -> np.ndarray:
        return sum(c * pauli_matrix(s) for c, s in self.terms)

    def __str__(self) -> str:
        return " + ".join(f"{c:g}*{s}" for c, s in self.terms)


_GROUP = re.compile(r"\(([IXYZ]+)\)|([IXYZ])")
_EXP = re.compile(r"\^\(?\s*(n/2|n|\d+)\s*\)?")


def _count(token: str, n: int | None) -> tuple[int, bool]:
    """Repetition count and whether an odd-n half repetition was requested."""
    if token.isdigit():
        return int(token), False
    if n is None:
        raise HamiltonianParseError(f"pattern uses '{token}' but no qubit count was given")
    if token == "n":
        return n, False
    return n // 2, n % 2 == 1


def expand_pattern(text: str, n: int | None = None) -> str:
    """Expand a compact Pauli-string pattern such as ``Z^n`` or ``(YX)^(n/2)``."""
    s = text.replace(" ", "").upper().replace("N", "n")
    out: list[str] = []
    pos = 0
    while pos < len(s):
        m = _GROUP.match(s, pos)
        if not m:
            raise HamiltonianParseError(f"bad token at {text[pos:]!r}")
        unit = m.group(1) or m.group(2)
        pos = m.end()
        e = _EXP.match(s, pos)
        if e:
            reps, pad = _count(e.group(1), n)
            out.append(unit * reps + (unit[-1] if pad else ""))
            pos = e.end()
        else:
            out.append(unit)
    result = "".join(out)
    if not result:
        raise HamiltonianParseError("empty Pauli pattern")
    return result


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


def parse_hamiltonian(text: str, n: int | None = None) -> PauliHamiltonian:
    """Parse ``"coeff*STRING + ..."`` (patterns allowed) into a Hamiltonian.

    When ``n`` is given every string must have length ``n``.
    """
    body = text.strip()
    if not body:
        raise HamiltonianParseError("empty Hamiltonian")
    # split on + or - that start a new term (not inside exponents like e-3)
    pieces = re.split(r"(?<![eE*^(])\s*(?=[+-])", body)
    terms: list[tuple[float, str]] = []
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        sign = 1.0
        while piece and piece[0] in "+-":
            if piece[0] == "-":
                sign = -sign
            piece = piece[1:].strip()
        coeff = 1.0
        m = re.fullmatch(rf"({_NUM})\s*\*\s*(.+)", piece)
        if m:
            coeff = float(m.group(1))
            piece = m.group(2)
        string = expand_pattern(piece, n)
        terms.append((sign * coeff, string))
    ham = PauliHamiltonian(tuple(terms))
    if n is not None and ham.n != n:
        raise HamiltonianParseError(f"strings have length {ham.n}, expected {n}")
    return ham
