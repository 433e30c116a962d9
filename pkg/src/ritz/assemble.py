"""Hamiltonian and overlap matrices for H = p^2 + V(x).

Polynomial-exponential bases
    Entries are half of the full-line integrals.  With reflection signs
    r_i, r_j and a potential monomial x^m, the negative half line contributes
    r_i r_j (-1)^m times the positive one, so an entry is

        (1 + r_i r_j (-1)^m) / 2 * int_0^inf F_i F_j x^m dx,

    which equals the plain half-line integral inside a parity sector.  For
    the x^j exp(-|S|) set this reproduces int x^n exp(-2|S|) = (1+(-1)^n) M(n).  The
    kinetic term is int f_i' f_j' (first-derivative form), which stays valid
    for |x|^j factors with a cusp at the origin.

Harmonic-oscillator basis
    Eigenfunctions of p^2 + x^2 (optionally with x -> x/scale).  Powers of
    the tridiagonal position matrix are formed at a padded dimension and
    truncated.
"""
from __future__ import annotations

from dataclasses import dataclass

from .basis import BasisSpec, Family, PolyExpFunction, Sector, build_basis, differentiate
from .errors import AssemblyError, BasisSpecError
from .model import Parity, Potential, parity_of
from .moments import MomentTable
from .mpkernel import PrecisionContext

MAX_MOMENT_ORDER = 4096


@dataclass(frozen=True)
class MatrixPair:
    H: tuple  # tuple of row tuples
    S: tuple
    basis_spec: BasisSpec | None
    ctx: PrecisionContext
    is_complex: bool = False

    @property
    def size(self) -> int:
        return len(self.H)

    def s_is_identity(self) -> bool:
        n = self.size
        return all(self.S[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def _pair_integral(fi: PolyExpFunction, fj: PolyExpFunction, table: MomentTable, shift: int = 0):
    """(1/2) full-line integral of f_i f_j x^shift."""
    ctx = table.ctx
    # (1 + r_i r_j (-1)^shift) / 2 is 1 or 0
    if fi.reflection * fj.reflection * (-1 if shift % 2 else 1) != 1:
        return ctx.mp.zero
    parts = []
    for p, c in fi.terms:
        for q, d in fj.terms:
            n = p + q + shift
            if n > MAX_MOMENT_ORDER:
                raise AssemblyError(f"moment order {n} exceeds {MAX_MOMENT_ORDER}")
            parts.append(c * d * table[n])
    return ctx.mp.fsum(parts)


def assemble_polyexp(V: Potential, basis: list[PolyExpFunction], spec: BasisSpec | None = None,
                     ctx: PrecisionContext | None = None) -> MatrixPair:
    if not basis:
        raise AssemblyError("empty basis")
    if not V.is_real:
        raise BasisSpecError("complex potentials need the harmonic-oscillator basis")
    decay = basis[0].decay
    ctx = ctx or basis[0].ctx
    if any(f.decay != decay for f in basis):
        raise AssemblyError("all basis functions must share one decay form")
    if any(f.ctx is not ctx for f in basis):
        raise AssemblyError("basis functions were built in a different precision context")
    if spec is not None and spec.family in (Family.K_EVEN, Family.K_ODD):
        if parity_of(V) is not Parity.SYMMETRIC:
            raise BasisSpecError(f"{spec.family.value} basis requires a parity-invariant potential")

    max_p = max(max(f.powers) for f in basis)
    table = MomentTable(decay, ctx, 2 * max_p + max(V.degree, 2 * decay.k))
    derivs = [differentiate(f) for f in basis]
    coeffs = [(m, ctx.real(c)) for m, c in V.real_coeffs.items()]

    n = len(basis)
    H = [[None] * n for _ in range(n)]
    S = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = _pair_integral(basis[i], basis[j], table)
            t = _pair_integral(derivs[i], derivs[j], table)
            v = ctx.mp.fsum(c * _pair_integral(basis[i], basis[j], table, m) for m, c in coeffs)
            S[i][j] = S[j][i] = s
            H[i][j] = H[j][i] = t + v
    return MatrixPair(tuple(map(tuple, H)), tuple(map(tuple, S)), spec, ctx)


def assemble_spec(V: Potential, spec: BasisSpec, ctx: PrecisionContext) -> MatrixPair:
    """Dispatch on the basis family."""
    if spec.family is Family.HARMONIC_OSC:
        return assemble_harmonic_osc(V, spec.size, ctx, scale=spec.scale, spec=spec)
    return assemble_polyexp(V, build_basis(spec, ctx), spec, ctx)


def position_matrix(size: int, ctx: PrecisionContext) -> list[list]:
    """<m|x|n> for eigenfunctions of p^2 + x^2: X[n][n+1] = sqrt((n+1)/2)."""
    mp = ctx.mp
    X = [[mp.zero] * size for _ in range(size)]
    for i in range(size - 1):
        X[i][i + 1] = X[i + 1][i] = mp.sqrt(mp.mpf(i + 1) / 2)
    return X


def _banded_product(A, B, bw_a, bw_b, mp):
    """Product of two banded square matrices with half-bandwidths bw_a, bw_b."""
    n = len(A)
    C = [[mp.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(max(0, i - bw_a - bw_b), min(n, i + bw_a + bw_b + 1)):
            lo = max(0, i - bw_a, j - bw_b)
            hi = min(n, i + bw_a + 1, j + bw_b + 1)
            if lo < hi:
                C[i][j] = mp.fdot((A[i][l], B[l][j]) for l in range(lo, hi))
    return C


def position_powers(max_power: int, size: int, ctx: PrecisionContext, padding: int | None = None):
    """[X^0, X^1, ..., X^max_power] truncated to ``size`` from a padded product."""
    mp = ctx.mp
    dim = size + (max_power + 1 if padding is None else padding)
    X = position_matrix(dim, ctx)
    eye = [[mp.one if i == j else mp.zero for j in range(dim)] for i in range(dim)]
    powers = [eye]
    for m in range(1, max_power + 1):
        powers.append(_banded_product(powers[-1], X, m - 1, 1, mp))
    return [[row[:size] for row in P[:size]] for P in powers]


def assemble_harmonic_osc(V: Potential, N: int, ctx: PrecisionContext, scale=1,
                          spec: BasisSpec | None = None) -> MatrixPair:
    """H = p^2/scale^2 + sum_m c_m scale^m X^m (+ i times the imaginary part), S = 1."""
    if N < 1:
        raise AssemblyError("basis size must be positive")
    mp = ctx.mp
    lam = ctx.real(scale)
    d = max(V.degree, 2)
    Xp = position_powers(d, N, ctx, padding=d + 1)
    X2 = Xp[2]
    P2 = [[((2 * i + 1 if i == j else 0) - X2[i][j]) / lam**2 for j in range(N)] for i in range(N)]

    def combo(coeffs):
        out = [[mp.zero] * N for _ in range(N)]
        for m, c in coeffs.items():
            w = ctx.real(c) * lam**m
            Pm = Xp[m]
            for i in range(N):
                for j in range(i, N):
                    if Pm[i][j]:
                        out[i][j] += w * Pm[i][j]
        return out

    re = combo(V.real_coeffs)
    im = combo(V.imag_coeffs)
    cplx = not V.is_real
    # upper triangle only, mirrored, so H is exactly symmetric
    H = [[None] * N for _ in range(N)]
    for i in range(N):
        for j in range(i, N):
            a = P2[i][j] + re[i][j]
            H[i][j] = H[j][i] = mp.mpc(a, im[i][j]) if cplx else a
    S = tuple(tuple(mp.one if i == j else mp.zero for j in range(N)) for i in range(N))
    spec = spec or BasisSpec(Family.HARMONIC_OSC, Sector.ALL, N, scale=scale)
    return MatrixPair(tuple(map(tuple, H)), S, spec, ctx, is_complex=cplx)


def dump_matrix(M, ctx: PrecisionContext) -> str:
    """Plain text, one row per line, full-precision entries."""
    from .mpkernel import format_number
    return "\n".join(" ".join(format_number(x, ctx) for x in row) for row in M) + "\n"
