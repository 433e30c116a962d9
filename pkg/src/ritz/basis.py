"""Nonorthogonal basis sets with a prescribed exponential tail.

All functions are stored by their restriction to the half line x >= 0,

    F(x) = (sum_p c_p x^p) * exp(-S_k(x)),

together with a reflection sign ``r`` so that the full-line function is
f(x) = F(x) for x >= 0 and f(-y) = r * F(y).  This covers |x|^j, x|x|^j and
x^j factors alike without ever evaluating |x| inside an integral.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import BasisSpecError
from .model import AsymptoticForm, Parity, Potential, analyze_asymptotics, parity_of


class Family(enum.Enum):
    K_EVEN = "k-even"
    K_ODD = "k-odd"
    ASYMMETRIC = "asymmetric"
    HARMONIC_OSC = "harmonic-oscillator"


class Sector(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    ALL = "all"


@dataclass(frozen=True)
class BasisSpec:
    family: Family
    sector: Sector
    size: int
    decay: AsymptoticForm | None = None
    literal_indices: bool = False  # even sector of K_EVEN with j = 0, 2, 3, ...
    scale: object = 1  # harmonic-oscillator length scale

    def __post_init__(self):
        if self.size < 1:
            raise BasisSpecError(f"basis size must be positive, got {self.size}")
        if self.family is Family.HARMONIC_OSC:
            if self.sector is not Sector.ALL:
                raise BasisSpecError("the harmonic-oscillator basis is not split by parity")
            return
        if self.decay is None:
            raise BasisSpecError(f"{self.family.value} basis needs a decay form")
        if self.family is Family.K_EVEN and self.decay.k % 2:
            raise BasisSpecError(f"K_EVEN basis needs even k, got k={self.decay.k}")
        if self.family is Family.K_ODD and self.decay.k % 2 == 0:
            raise BasisSpecError(f"K_ODD basis needs odd k, got k={self.decay.k}")
        if self.family is Family.ASYMMETRIC and self.sector is not Sector.ALL:
            raise BasisSpecError("the asymmetric basis covers both parities (sector ALL)")
        if self.family in (Family.K_EVEN, Family.K_ODD) and self.sector is Sector.ALL:
            raise BasisSpecError("parity families need an EVEN or ODD sector")


@dataclass(frozen=True)
class PolyExpFunction:
    terms: tuple  # ((power, coefficient), ...) with context-real coefficients
    decay: AsymptoticForm
    reflection: int  # f(-y) = reflection * f(y)
    ctx: object

    def __post_init__(self):
        if self.reflection not in (1, -1):
            raise BasisSpecError("reflection sign must be +1 or -1")
        self.ctx.check(*(c for _, c in self.terms))

    @classmethod
    def monomial(cls, power: int, decay: AsymptoticForm, reflection: int, ctx):
        return cls(((power, ctx.real(1)),), decay, reflection, ctx)

    @property
    def powers(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.terms)

    def half_line(self, x):
        """F(x) for x >= 0."""
        ctx = self.ctx
        x = ctx.real(x)
        poly = ctx.mp.fsum(c * x**p for p, c in self.terms)
        return poly * ctx.mp.exp(-self.decay.S(x, ctx))

    def __call__(self, x):
        """Full-line value via the reflection rule."""
        x = self.ctx.real(x)
        if x >= 0:
            return self.half_line(x)
        return self.reflection * self.half_line(-x)


def differentiate(f: PolyExpFunction) -> PolyExpFunction:
    """d/dx on x > 0: x^p e^{-S} -> (p x^{p-1} - sqrt(a) x^{p+k}) e^{-S}."""
    ctx, k = f.ctx, f.decay.k
    sa = f.decay.sqrt_a(ctx)
    acc: dict[int, object] = {}
    for p, c in f.terms:
        if p:
            acc[p - 1] = acc.get(p - 1, 0) + p * c
        acc[p + k] = acc.get(p + k, 0) - sa * c
    terms = tuple((p, ctx.real(c)) for p, c in sorted(acc.items()) if c != 0)
    return PolyExpFunction(terms, f.decay, -f.reflection, ctx)


def _index_set(spec: BasisSpec) -> list[int]:
    if spec.literal_indices and spec.family is Family.K_EVEN and spec.sector is Sector.EVEN:
        return [0] + list(range(2, spec.size + 1))
    return list(range(spec.size))


def build_basis(spec: BasisSpec, ctx) -> list[PolyExpFunction]:
    if spec.family is Family.HARMONIC_OSC:
        raise BasisSpecError("harmonic-oscillator functions are handled by operator algebra")
    js = _index_set(spec)
    if spec.family is Family.K_EVEN:
        # |x|^j e^{-|S|} (even) and x|x|^j e^{-|S|} (odd)
        if spec.sector is Sector.EVEN:
            return [PolyExpFunction.monomial(j, spec.decay, 1, ctx) for j in js]
        return [PolyExpFunction.monomial(j + 1, spec.decay, -1, ctx) for j in js]
    if spec.family is Family.K_ODD:
        s = 0 if spec.sector is Sector.EVEN else 1
        r = 1 if s == 0 else -1
        return [PolyExpFunction.monomial(2 * j + s, spec.decay, r, ctx) for j in js]
    return [PolyExpFunction.monomial(j, spec.decay, (-1) ** j, ctx) for j in js]


BASIS_NAMES = ("auto", "s1", "s2", "s3", "ho")


def decay_for(V: Potential, name: str) -> AsymptoticForm | None:
    """Resolve a basis name: ``auto`` follows V, ``sK`` forces S_K with a = 1."""
    if name == "auto":
        return analyze_asymptotics(V)
    if name == "ho":
        return None
    if len(name) >= 2 and name[0] == "s" and name[1:].isdigit():
        return AsymptoticForm(int(name[1:]), 1)
    raise BasisSpecError(f"unknown basis {name!r}; expected one of auto, sK, ho")


def specs_for(V: Potential, name: str, size: int, sectors=(Sector.EVEN, Sector.ODD),
              scale=1, literal_indices: bool = False) -> list[BasisSpec]:
    """Basis specs (one per solved block) for ``V`` with the named decay.

    Symmetric potentials are split by parity and ``size`` counts functions per
    sector; asymmetric potentials use a single full-line set of ``size``
    functions.
    """
    decay = decay_for(V, name)
    if decay is None:
        return [BasisSpec(Family.HARMONIC_OSC, Sector.ALL, size, scale=scale)]
    if parity_of(V) is Parity.ASYMMETRIC:
        return [BasisSpec(Family.ASYMMETRIC, Sector.ALL, size, decay)]
    family = Family.K_EVEN if decay.k % 2 == 0 else Family.K_ODD
    return [BasisSpec(family, s, size, decay, literal_indices=literal_indices) for s in sectors]
