"""Arbitrary-precision scalar layer.

Every scalar in the package is an ``mpf``/``mpc`` belonging to one
``mpmath.MPContext``.  A :class:`PrecisionContext` owns exactly one such
context, so the precision of a value can always be traced back to the
context that created it.  Contexts are cached per digit count, which makes
``with_precision(60) is with_precision(60)`` hold and lets values created
at the same precision mix freely.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import ConfigurationError, ContextMismatchError, DomainError

MIN_DIGITS = 30


@dataclass(frozen=True, eq=False)
class PrecisionContext:
    """Working precision shared by all scalars created through it.

    The wrapped ``MPContext`` is never mutated after construction.  mpmath
    functions raise the working precision of their context temporarily, so a
    context must not be shared between threads that call special functions
    concurrently; processes are the unit of parallelism in this package.
    """

    decimal_digits: int
    mp: mpmath.ctx_mp.MPContext = field(repr=False)

    @property
    def eps(self):
        return self.mp.mpf(10) ** (-self.decimal_digits)

    def real(self, value) -> "mpmath.mpf":
        """Convert ints, Fractions, decimal strings or foreign mpf to this context."""
        if isinstance(value, Fraction):
            return self.mp.mpf(value.numerator) / value.denominator
        return self.mp.mpf(value)

    def complex(self, re, im=0) -> "mpmath.mpc":
        if isinstance(re, Fraction):
            re = self.real(re)
        if isinstance(im, Fraction):
            im = self.real(im)
        return self.mp.mpc(re, im)

    def check(self, *values) -> None:
        """Fail fast if any value belongs to a different precision context."""
        for v in values:
            ctx = getattr(v, "context", None)
            if ctx is not None and ctx is not self.mp:
                raise ContextMismatchError(
                    f"value carries {ctx.dps} digits, context expects {self.decimal_digits}"
                )

    def owns(self, value) -> bool:
        return getattr(value, "context", None) is self.mp

    def doubled(self) -> "PrecisionContext":
        return with_precision(2 * self.decimal_digits)


@functools.lru_cache(maxsize=None)
def with_precision(digits: int) -> PrecisionContext:
    """Return the (cached) context carrying ``digits`` significant decimal digits."""
    if isinstance(digits, bool) or not isinstance(digits, int):
        raise ConfigurationError(f"precision must be an integer, got {digits!r}")
    if digits < MIN_DIGITS:
        raise ConfigurationError(f"precision {digits} is below the floor of {MIN_DIGITS} digits")
    mp = mpmath.MPContext()
    mp.dps = digits
    return PrecisionContext(digits, mp)


def gamma(z, ctx: PrecisionContext):
    """Gamma function for positive real argument, correct to the context precision."""
    x = ctx.real(z) if not ctx.owns(z) else z
    if x <= 0:
        raise DomainError(f"gamma is only defined here for z > 0, got {ctx.mp.nstr(x, 10)}")
    return ctx.mp.gamma(x)


def parse_real(text: str, ctx: PrecisionContext):
    """Parse a decimal string (``"-3.4101427612…"``) into a context real."""
    s = text.strip()
    try:
        return ctx.mp.mpf(s)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"not a decimal number: {text!r}") from exc


def format_real(x, ctx: PrecisionContext, digits: int | None = None) -> str:
    """Serialize with enough digits to round-trip exactly, or to ``digits`` digits."""
    n = mpmath.libmp.repr_dps(ctx.mp.prec) if digits is None else digits
    return ctx.mp.nstr(x, n, strip_zeros=False, min_fixed=-6, max_fixed=8)


def format_number(x, ctx: PrecisionContext, digits: int | None = None) -> str:
    """Like :func:`format_real` but accepts complex values (``a+bj`` / ``a-bj``)."""
    if isinstance(x, ctx.mp.mpc):
        im = x.imag
        sign = "-" if im < 0 else "+"
        return f"{format_real(x.real, ctx, digits)}{sign}{format_real(abs(im), ctx, digits)}j"
    return format_real(x, ctx, digits)


def split_complex(text: str) -> tuple[str, str | None]:
    """``"a+bj"`` -> ``("a", "+b")``; a plain real gives ``(text, None)``."""
    s = text.strip()
    if not s.endswith("j"):
        return s, None
    body = s[:-1]
    # split at the last sign that is not part of an exponent
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE":
            return body[:i], body[i:]
    raise ValueError(f"not a complex number: {text!r}")


def parse_number(text: str, ctx: PrecisionContext):
    """Inverse of :func:`format_number`."""
    re, im = split_complex(text)
    if im is None:
        return parse_real(re, ctx)
    return ctx.mp.mpc(parse_real(re, ctx), parse_real(im, ctx))


def context_for_repr(text: str) -> PrecisionContext:
    """Context whose exact-round-trip serialization has as many digits as ``text``.

    Falls back to a context with that many digits when no precision maps to
    the count exactly.
    """
    mant = text.strip().lstrip("+-").split("e")[0].split("E")[0].replace(".", "").lstrip("0")
    count = max(len(mant), MIN_DIGITS)
    for digits in range(max(MIN_DIGITS, count - 12), count + 1):
        if mpmath.libmp.repr_dps(mpmath.libmp.dps_to_prec(digits)) == count:
            return with_precision(digits)
    return with_precision(count)
