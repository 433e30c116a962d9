"""Half-line moments M(n) = int_0^inf x^n exp(-2 S_k(x)) dx.

With u = c x^(k+1), c = 2 sqrt(a)/(k+1):

    M(n) = Gamma((n+1)/(k+1)) / ((k+1) c^((n+1)/(k+1)))

The double-exponential quadrature below is the independent check used by
the test suite; production assembly only touches the closed form.
"""
from __future__ import annotations

import functools
from collections.abc import Callable, Sequence

from .errors import QuadratureError
from .model import AsymptoticForm
from .mpkernel import PrecisionContext, gamma, with_precision


def moment(n: int, decay: AsymptoticForm, ctx: PrecisionContext):
    if n < 0:
        raise ValueError(f"moment order must be non-negative, got {n}")
    return _moment(n, decay.k, decay.a, ctx.decimal_digits)


@functools.lru_cache(maxsize=1 << 16)
def _moment(n, k, a, digits):
    ctx = with_precision(digits)
    mp = ctx.mp
    c = 2 * mp.sqrt(ctx.real(a)) / (k + 1)
    z = mp.mpf(n + 1) / (k + 1)
    return gamma(z, ctx) / ((k + 1) * c**z)


class MomentTable:
    """Contiguous cache of M(0..max_n) for one decay at one precision."""

    def __init__(self, decay: AsymptoticForm, ctx: PrecisionContext, max_n: int = 0):
        self.decay = decay
        self.ctx = ctx
        self.values: list = []
        self.extend(max_n)

    def extend(self, max_n: int) -> None:
        for n in range(len(self.values), max_n + 1):
            self.values.append(moment(n, self.decay, self.ctx))

    def __getitem__(self, n: int):
        if n < 0:
            raise IndexError(n)
        if n >= len(self.values):
            self.extend(n)
        return self.values[n]

    def __len__(self):
        return len(self.values)


# Quadrature oracle ---------------------------------------------------------
#
# tanh-sinh on u in (-1, 1) composed with x = (1+u)/(1-u) maps onto (0, inf):
# x(t) = exp(pi sinh t), dx/dt = pi cosh t * x(t).


@functools.lru_cache(maxsize=64)
def _nodes(digits: int, level: int):
    """Nodes/weights (t = m h, odd m only for level > 0) for step h = 2^-level."""
    ctx = with_precision(digits)
    mp = ctx.mp
    h = mp.mpf(2) ** (-level)
    # left tail: the weight x(t) * pi cosh t falls below 10^-(2 digits)
    t_max = mp.asinh(2 * digits * mp.ln(10) / mp.pi) + 1
    m_max = int(t_max / h) + 1
    step = 1 if level == 0 else 2
    start = 0 if level == 0 else 1
    pos, neg = [], []
    for m in range(start, m_max + 1, step):
        t = m * h
        sh, ch = mp.sinh(t), mp.cosh(t)
        for sign, out in ((1, pos), (-1, neg)):
            if m == 0 and sign == -1:
                continue
            x = mp.exp(sign * mp.pi * sh)
            out.append((x, mp.pi * ch * x))
    return pos, neg


def _level_sum(f, digits, level, width):
    ctx = with_precision(digits)
    mp = ctx.mp
    tiny = mp.mpf(10) ** (-2 * digits)
    pos, neg = _nodes(digits, level)
    acc = [mp.zero] * width
    for nodes in (pos, neg):
        small = 0
        for x, w in nodes:
            vals = f(x)
            peak = mp.zero
            for i, v in enumerate(vals):
                term = w * v
                acc[i] += term
                if abs(term) > peak:
                    peak = abs(term)
            scale = max(abs(a) for a in acc) if acc else mp.zero
            # stop once contributions are negligible on the outward side
            if peak <= tiny * scale or w == 0:
                small += 1
                if small >= 4 and nodes is pos:
                    break
            else:
                small = 0
    return acc


def quadrature_oracle(f: Callable, ctx: PrecisionContext, *, target_digits: int | None = None,
                      max_level: int = 12, vector: bool = False):
    """Double-exponential quadrature of int_0^inf f(x) dx at twice ``ctx``'s precision.

    ``f`` receives a real of the doubled context.  With ``vector=True`` it
    returns a sequence and a list of integrals is returned.  Levels halve the
    step until two successive levels agree to ``target_digits`` (default: the
    working digits of ``ctx``).
    """
    work = ctx.doubled()
    mp = work.mp
    target = ctx.decimal_digits if target_digits is None else target_digits
    tol = mp.mpf(10) ** (-target)
    g = f if vector else (lambda x: (f(x),))
    width = len(g(mp.one))

    h = mp.one
    raw = _level_sum(g, work.decimal_digits, 0, width)
    prev = [h * s for s in raw]
    for level in range(1, max_level + 1):
        h /= 2
        extra = _level_sum(g, work.decimal_digits, level, width)
        raw = [a + b for a, b in zip(raw, extra)]
        cur = [h * s for s in raw]
        floor = mp.mpf(10) ** (-work.decimal_digits)
        done = all(abs(c - p) <= tol * max(abs(c), floor) for c, p in zip(cur, prev))
        if level >= 3 and done:
            out = [ctx.real(c) for c in cur]
            return out if vector else out[0]
        prev = cur
    raise QuadratureError(f"no agreement to {target} digits after {max_level} levels")


def moments_oracle(ns: Sequence[int], decay: AsymptoticForm, ctx: PrecisionContext, **kw):
    """Quadrature values of M(n) for all ``ns`` in one pass."""
    def integrand(x):
        w = x.context.exp(-2 * decay.S(x, with_precision(x.context.dps)))
        return [x**n * w for n in ns]
    return quadrature_oracle(integrand, ctx, vector=True, **kw)
