"""Polynomial potentials and their large-|x| behaviour.

Grammar accepted by :func:`parse_potential`::

    expr  := ['+'|'-'] term (('+'|'-') term)*
    term  := [rational '*'] ['i' '*'] 'x' ['^' nat] | [rational '*'] 'i' | rational
    rational := digits ['/' digits] | digits '.' digits

Coefficients stay exact (``Fraction``) so parity and asymptotic analysis
never involve a floating-point tolerance.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import PotentialParseError, UnsupportedPotentialError

MAX_EXPONENT = 64


class Parity(enum.Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


def _clean(coeffs) -> dict[int, Fraction]:
    return {int(p): Fraction(c) for p, c in sorted(coeffs.items(), reverse=True) if c != 0}


@dataclass(frozen=True)
class Potential:
    real_coeffs: dict[int, Fraction] = field(default_factory=dict)
    imag_coeffs: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "real_coeffs", _clean(self.real_coeffs))
        object.__setattr__(self, "imag_coeffs", _clean(self.imag_coeffs))
        for p in (*self.real_coeffs, *self.imag_coeffs):
            if p < 0 or p > MAX_EXPONENT:
                raise UnsupportedPotentialError(f"exponent {p} outside 0..{MAX_EXPONENT}")
        if self.degree < 1:
            raise UnsupportedPotentialError("potential must have degree >= 1")
        if self.is_real and self.real_coeffs[self.degree] <= 0:
            raise UnsupportedPotentialError("leading coefficient of a real potential must be positive")

    def __hash__(self):
        return hash((tuple(self.real_coeffs.items()), tuple(self.imag_coeffs.items())))

    @property
    def degree(self) -> int:
        return max((*self.real_coeffs, *self.imag_coeffs), default=0)

    @property
    def is_real(self) -> bool:
        return not self.imag_coeffs

    def parity(self) -> Parity:
        return parity_of(self)

    def __call__(self, x):
        """Evaluate at ``x`` (any number type supporting ``**``)."""
        total = sum(c * x**p for p, c in self.real_coeffs.items())
        if self.imag_coeffs:
            total = total + 1j * sum(c * x**p for p, c in self.imag_coeffs.items())
        return total

    def to_expr(self) -> str:
        """Canonical expression; ``parse_potential(V.to_expr()) == V``."""
        terms = [(p, c, False) for p, c in self.real_coeffs.items()]
        terms += [(p, c, True) for p, c in self.imag_coeffs.items()]
        terms.sort(key=lambda t: (-t[0], t[2]))
        out = []
        for p, c, imag in terms:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = []
            if mag != 1 or (p == 0 and not imag):
                factors.append(str(mag))
            if imag:
                factors.append("i")
            if p == 1:
                factors.append("x")
            elif p > 1:
                factors.append(f"x^{p}")
            out.append((sign, "*".join(factors)))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += sign + body
        return text

    def __str__(self):
        return self.to_expr()


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+|/\d+)?)|(?P<sym>[-+*^]|x|i))")


def _tokens(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PotentialParseError(f"unexpected character {text[start]!r}", text, start)
        kind = "num" if m.group("num") else m.group("sym")
        val = m.group("num") or m.group("sym")
        toks.append((kind, val, m.start(m.lastindex)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


def parse_potential(text: str) -> Potential:
    toks = _tokens(text)
    i = 0
    real: dict[int, Fraction] = {}
    imag: dict[int, Fraction] = {}

    def peek():
        return toks[i][0]

    def take(kind):
        nonlocal i
        tok = toks[i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise PotentialParseError(f"expected {kind!r}, found {what}", text, tok[2])
        i += 1
        return tok

    if peek() == "end":
        raise PotentialParseError("empty expression", text, 0)
    sign = 1
    if peek() in "+-":
        sign = -1 if take(peek())[1] == "-" else 1
    while True:
        coeff = Fraction(1)
        is_imag = False
        power = None
        if peek() == "num":
            coeff = Fraction(take("num")[1])
            if peek() == "*":
                take("*")
                if peek() not in ("x", "i"):
                    raise PotentialParseError("expected 'x' or 'i' after '*'", text, toks[i][2])
            else:
                power = 0
        if power is None and peek() == "i":
            take("i")
            is_imag = True
            if peek() == "*":
                take("*")
                if peek() != "x":
                    raise PotentialParseError("expected 'x' after 'i*'", text, toks[i][2])
            else:
                power = 0
        if power is None:
            take("x")
            power = 1
            if peek() == "^":
                take("^")
                tok = take("num")
                if not tok[1].isdigit():
                    raise PotentialParseError("exponent must be a non-negative integer", text, tok[2])
                power = int(tok[1])
                if power > MAX_EXPONENT:
                    raise PotentialParseError(f"exponent exceeds {MAX_EXPONENT}", text, tok[2])
        target = imag if is_imag else real
        target[power] = target.get(power, Fraction(0)) + sign * coeff
        if peek() == "end":
            break
        if peek() not in "+-":
            tok = toks[i]
            raise PotentialParseError(f"unexpected {tok[1]!r}", text, tok[2])
        sign = -1 if take(peek())[1] == "-" else 1
    try:
        return Potential(real, imag)
    except UnsupportedPotentialError as exc:
        raise PotentialParseError(str(exc), text, 0) from exc


def parity_of(V: Potential) -> Parity:
    exps = (*V.real_coeffs, *V.imag_coeffs)
    return Parity.SYMMETRIC if all(p % 2 == 0 for p in exps) else Parity.ASYMMETRIC


@dataclass(frozen=True)
class AsymptoticForm:
    """Decay exponent S_k(x) = sqrt(a)/(k+1) * x^(k+1) for V ~ a x^(2k)."""

    k: int
    a: Fraction = Fraction(1)

    def __post_init__(self):
        if self.k < 1:
            raise UnsupportedPotentialError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "a", Fraction(self.a))
        if self.a <= 0:
            raise UnsupportedPotentialError(f"a must be positive, got {self.a}")

    def sqrt_a(self, ctx):
        return ctx.mp.sqrt(ctx.real(self.a))

    def S(self, x, ctx):
        """S_k(x) evaluated at a context real (x >= 0 on the half line)."""
        return self.sqrt_a(ctx) / (self.k + 1) * x ** (self.k + 1)

    def describe(self) -> str:
        coef = "" if self.a == 1 else f"sqrt({self.a})*"
        return f"S_{self.k}(x) = {coef}x^{self.k + 1}/{self.k + 1}"


def analyze_asymptotics(V: Potential) -> AsymptoticForm:
    if not V.is_real:
        raise UnsupportedPotentialError(
            "complex potentials have no real asymptotic form; use the harmonic-oscillator basis"
        )
    d = V.degree
    lead = V.real_coeffs[d]
    if d % 2:
        raise UnsupportedPotentialError(f"odd leading degree {d}: V is not confining on both sides")
    if lead <= 0:
        raise UnsupportedPotentialError("leading coefficient must be positive")
    return AsymptoticForm(d // 2, lead)
