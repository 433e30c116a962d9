"""Dense arbitrary-precision eigensolvers for the secular problem (H - E S) C = 0.

Real path
    Diagonal equilibration, Cholesky S = L L^T, A = L^-1 H L^-T, Householder
    tridiagonalization and implicit-shift QL (the EISPACK tred2/tql2 scheme).

Complex path (S = 1)
    Householder reduction to Hessenberg form, single-shift complex QR with
    Wilkinson shifts for the eigenvalues, inverse iteration on the Hessenberg
    matrix for the eigenvectors.

Matrices are plain lists of rows of context scalars.
"""
from __future__ import annotations

import functools
import math
import os
from collections.abc import Callable
from dataclasses import dataclass, field

from .assemble import MatrixPair
from .errors import (
    ConfigurationError,
    ConvergenceError,
    OverlapNotPositiveDefinite,
    PrecisionExhaustedError,
)
from .mpkernel import MIN_DIGITS, PrecisionContext, with_precision

SWEEPS_PER_DIM = 50


@dataclass
class Spectrum:
    eigenvalues: list
    eigenvectors: list | None  # eigenvectors[n] is the coefficient vector of eigenvalue n
    residual_norms: list
    overlap_condition_estimate: object
    ctx: PrecisionContext
    is_complex: bool = False
    real_flags: list = field(default_factory=list)

    @property
    def digits(self) -> int:
        return self.ctx.decimal_digits

    @property
    def certified_digits(self) -> int:
        """Working digits left after the overlap conditioning is paid for."""
        cond = self.overlap_condition_estimate
        lost = 0 if cond is None or cond <= 1 else int(math.ceil(float(self.ctx.mp.log10(cond))))
        return max(self.digits - lost, 0)

    def max_residual(self):
        return max(self.residual_norms) if self.residual_norms else self.ctx.mp.zero

    def real_levels(self) -> list:
        """Eigenvalues flagged as real, in ascending order (complex path)."""
        if not self.is_complex:
            return list(self.eigenvalues)
        return [e for e, ok in zip(self.eigenvalues, self.real_flags) if ok]


# helpers -------------------------------------------------------------------

def _mat(M):
    return [list(row) for row in M]


def _transpose(M):
    return [list(col) for col in zip(*M)]


def _matmul(A, B, mp):
    Bt = _transpose(B)
    return [[mp.fdot(row, col) for col in Bt] for row in A]


def _matvec(A, v, mp):
    return [mp.fdot(row, v) for row in A]


def _norm(v, mp):
    return mp.sqrt(mp.fsum(abs(x) ** 2 for x in v))


def _fro(M, mp):
    return mp.sqrt(mp.fsum(abs(x) ** 2 for row in M for x in row))


def _is_symmetric(M):
    n = len(M)
    return all(M[i][j] == M[j][i] for i in range(n) for j in range(i))


def cholesky(S, ctx: PrecisionContext):
    """Lower-triangular L with S = L L^T; nonpositive pivot -> OverlapNotPositiveDefinite."""
    mp = ctx.mp
    n = len(S)
    L = [[mp.zero] * n for _ in range(n)]
    for j in range(n):
        piv = S[j][j] - mp.fdot(L[j][:j], L[j][:j])
        if piv <= 0:
            raise OverlapNotPositiveDefinite(j, piv, ctx.decimal_digits)
        ljj = mp.sqrt(piv)
        L[j][j] = ljj
        for i in range(j + 1, n):
            L[i][j] = (S[i][j] - mp.fdot(L[i][:j], L[j][:j])) / ljj
    return L


def lower_inverse(L, mp):
    n = len(L)
    X = [[mp.zero] * n for _ in range(n)]
    for j in range(n):
        X[j][j] = 1 / L[j][j]
        for i in range(j + 1, n):
            X[i][j] = -mp.fdot((L[i][k], X[k][j]) for k in range(j, i)) / L[i][i]
    return X


def reduce_to_standard(pair: MatrixPair):
    """Return (A, D, Linv, cond): A = Linv (D H D) Linv^T with D S D = L L^T.

    ``cond`` bounds the condition number of the equilibrated overlap
    ||D S D||_F * ||L^-1||_F^2 (within a factor N of the 2-norm value).
    """
    ctx = pair.ctx
    mp = ctx.mp
    n = pair.size
    D = []
    for i in range(n):
        if pair.S[i][i] <= 0:
            raise OverlapNotPositiveDefinite(i, pair.S[i][i], ctx.decimal_digits)
        D.append(1 / mp.sqrt(pair.S[i][i]))
    Ss = [[pair.S[i][j] * D[i] * D[j] for j in range(n)] for i in range(n)]
    Hs = [[pair.H[i][j] * D[i] * D[j] for j in range(n)] for i in range(n)]
    L = cholesky(Ss, ctx)
    Li = lower_inverse(L, mp)
    W = _matmul(Li, Hs, mp)
    A = _matmul(W, _transpose(Li), mp)
    for i in range(n):
        for j in range(i):
            A[i][j] = A[j][i] = (A[i][j] + A[j][i]) / 2
    cond = _fro(Ss, mp) * _fro(Li, mp) ** 2
    return A, D, Li, cond


def standard_pair(pair: MatrixPair) -> MatrixPair:
    """The S-reduced problem (A, identity) with the same eigenvalues."""
    A, _, _, _ = reduce_to_standard(pair)
    mp = pair.ctx.mp
    n = pair.size
    eye = tuple(tuple(mp.one if i == j else mp.zero for j in range(n)) for i in range(n))
    return MatrixPair(tuple(map(tuple, A)), eye, pair.basis_spec, pair.ctx)


def tridiagonalize(A, mp, vectors=True):
    """Householder reduction (tred2).  Returns (d, e, V) with A = V T V^T."""
    n = len(A)
    V = _mat(A)
    d = list(V[n - 1])
    e = [mp.zero] * n
    for i in range(n - 1, 0, -1):
        scale = mp.fsum(abs(d[k]) for k in range(i))
        h = mp.zero
        if scale == 0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = V[i - 1][j]
                V[i][j] = mp.zero
                V[j][i] = mp.zero
        else:
            for k in range(i):
                d[k] /= scale
            h = mp.fdot(d[:i], d[:i])
            f = d[i - 1]
            g = mp.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h -= f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = mp.zero
            for j in range(i):
                f = d[j]
                V[j][i] = f
                g = e[j] + V[j][j] * f
                for k in range(j + 1, i):
                    g += V[k][j] * d[k]
                    e[k] += V[k][j] * f
                e[j] = g
            f = mp.zero
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    V[k][j] -= f * e[k] + g * d[k]
                d[j] = V[i - 1][j]
                V[i][j] = mp.zero
        d[i] = h
    if not vectors:
        # the diagonal of T sits on the diagonal of V before accumulation
        e[0] = mp.zero
        return [V[i][i] for i in range(n)], e, None
    for i in range(n - 1):
        V[n - 1][i] = V[i][i]
        V[i][i] = mp.one
        h = d[i + 1]
        if h != 0:
            for k in range(i + 1):
                d[k] = V[k][i + 1] / h
            for j in range(i + 1):
                g = mp.fdot((V[k][i + 1], V[k][j]) for k in range(i + 1))
                for k in range(i + 1):
                    V[k][j] -= g * d[k]
        for k in range(i + 1):
            V[k][i + 1] = mp.zero
    for j in range(n):
        d[j] = V[n - 1][j]
        V[n - 1][j] = mp.zero
    V[n - 1][n - 1] = mp.one
    e[0] = mp.zero
    return d, e, V


def tql2(d, e, V, mp, eps, max_sweeps):
    """Implicit QL on the tridiagonal (d, e); rotations accumulate into V if given."""
    n = len(d)
    d = list(d)
    e = list(e[1:]) + [mp.zero]
    f = mp.zero
    tst1 = mp.zero
    sweeps = 0
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1 and abs(e[m]) > eps * tst1:
            m += 1
        if m > l:
            while True:
                sweeps += 1
                if sweeps > max_sweeps:
                    raise ConvergenceError(f"QL iteration exceeded {max_sweeps} sweeps")
                g = d[l]
                p = (d[l + 1] - g) / (2 * e[l])
                r = mp.hypot(p, 1)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f += h
                p = d[m]
                c = c2 = c3 = mp.one
                el1 = e[l + 1]
                s = s2 = mp.zero
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = mp.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    if V is not None:
                        for row in V:
                            h = row[i + 1]
                            row[i + 1] = s * row[i] + c * h
                            row[i] = c * row[i] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] += f
        e[l] = mp.zero
    return d, V


def symmetric_eigen(A, ctx: PrecisionContext, vectors=True):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric A."""
    mp = ctx.mp
    n = len(A)
    if n == 1:
        return [A[0][0]], ([[mp.one]] if vectors else None)
    d, e, V = tridiagonalize(A, mp, vectors)
    eps = mp.mpf(2) ** (-mp.prec)
    vals, V = tql2(d, e, V, mp, eps, SWEEPS_PER_DIM * n)
    order = sorted(range(n), key=lambda i: vals[i])
    vals = [vals[i] for i in order]
    vecs = [[V[r][i] for r in range(n)] for i in order] if vectors else None
    return vals, vecs


def solve_generalized_symmetric(pair: MatrixPair, ctx: PrecisionContext | None = None,
                                vectors: bool = True) -> Spectrum:
    ctx = ctx or pair.ctx
    if ctx is not pair.ctx:
        raise ConfigurationError("matrix pair was assembled in a different precision context")
    if pair.is_complex:
        raise ConfigurationError("complex matrices need solve_dense_complex")
    mp = ctx.mp
    n = pair.size
    if not (_is_symmetric(pair.H) and _is_symmetric(pair.S)):
        raise ConfigurationError("H and S must be symmetric")
    A, D, Li, cond = reduce_to_standard(pair)
    vals, Z = symmetric_eigen(A, ctx, vectors=True)

    Hs = [[pair.H[i][j] * D[i] * D[j] for j in range(n)] for i in range(n)]
    Ss = [[pair.S[i][j] * D[i] * D[j] for j in range(n)] for i in range(n)]
    LiT = _transpose(Li)
    residuals, coeffs = [], []
    for E, z in zip(vals, Z):
        c = _matvec(LiT, z, mp)  # equilibrated-basis coefficients
        hc = _matvec(Hs, c, mp)
        sc = _matvec(Ss, c, mp)
        residuals.append(_norm([a - E * b for a, b in zip(hc, sc)], mp) / _norm(c, mp))
        coeffs.append([D[i] * c[i] for i in range(n)])
    return Spectrum(vals, coeffs if vectors else None, residuals, cond, ctx,
                    real_flags=[True] * n)


# complex path ----------------------------------------------------------------

def hessenberg(A, mp):
    """Householder reduction; returns (Hh, reflectors) with A = Q Hh Q^H."""
    n = len(A)
    H = [[mp.mpc(x) for x in row] for row in A]
    refl = []
    for k in range(n - 2):
        x = [H[i][k] for i in range(k + 1, n)]
        alpha = _norm(x, mp)
        if alpha == 0 or all(v == 0 for v in x[1:]):
            refl.append(None)
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else mp.mpc(1)
        v = list(x)
        v[0] += phase * alpha
        beta = 2 / mp.fsum(abs(t) ** 2 for t in v)
        vc = [mp.conj(t) for t in v]
        # left: rows k+1.., columns k..
        for j in range(k, n):
            s = beta * mp.fdot(vc, (H[i][j] for i in range(k + 1, n)))
            for t, i in enumerate(range(k + 1, n)):
                H[i][j] -= v[t] * s
        # right: all rows, columns k+1..
        for i in range(n):
            row = H[i]
            s = beta * mp.fdot(v, row[k + 1:])
            for t, j in enumerate(range(k + 1, n)):
                row[j] -= s * vc[t]
        H[k + 1][k] = -phase * alpha
        for i in range(k + 2, n):
            H[i][k] = mp.zero
        refl.append((k, v, beta))
    return H, refl


def _apply_q(refl, y, mp):
    """Q y with Q = P_0 P_1 ... P_{n-3}."""
    y = list(y)
    for item in reversed(refl):
        if item is None:
            continue
        k, v, beta = item
        seg = y[k + 1:]
        s = beta * mp.fdot([mp.conj(t) for t in v], seg)
        for t in range(len(v)):
            y[k + 1 + t] -= v[t] * s
    return y


def _wilkinson(a, b, c, d, mp):
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    tr = (a + d) / 2
    disc = mp.sqrt(((a - d) / 2) ** 2 + b * c)
    l1, l2 = tr + disc, tr - disc
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def hessenberg_qr_eigenvalues(Hh, ctx: PrecisionContext, max_sweeps: int):
    mp = ctx.mp
    A = [list(r) for r in Hh]
    n = len(A)
    eps = mp.mpf(2) ** (-mp.prec)
    norm = _fro(A, mp) or mp.one
    eig = [None] * n
    hi = n - 1
    its = sweeps = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = A[0][0]
            break
        l = hi
        while l > 0:
            s = abs(A[l - 1][l - 1]) + abs(A[l][l])
            if s == 0:
                s = norm
            if abs(A[l][l - 1]) <= eps * s:
                A[l][l - 1] = mp.zero
                break
            l -= 1
        if l == hi:
            eig[hi] = A[hi][hi]
            hi -= 1
            its = 0
            continue
        sweeps += 1
        its += 1
        if sweeps > max_sweeps:
            raise ConvergenceError(f"complex QR exceeded {max_sweeps} sweeps")
        if its % 11 == 10:
            shift = A[hi][hi] + abs(A[hi][hi - 1]) * mp.mpc(mp.mpf("0.75"), mp.mpf("0.4375"))
        else:
            shift = _wilkinson(A[hi - 1][hi - 1], A[hi - 1][hi], A[hi][hi - 1], A[hi][hi], mp)
        for i in range(l, hi + 1):
            A[i][i] -= shift
        rots = []
        for k in range(l, hi):
            a, b = A[k][k], A[k + 1][k]
            r = mp.sqrt(abs(a) ** 2 + abs(b) ** 2)
            if r == 0:
                c, s = mp.mpc(1), mp.mpc(0)
            else:
                c, s = a / r, b / r
            cc, sc = mp.conj(c), mp.conj(s)
            rk, rk1 = A[k], A[k + 1]
            for j in range(k, hi + 1):
                x, y = rk[j], rk1[j]
                rk[j] = cc * x + sc * y
                rk1[j] = c * y - s * x
            rots.append((c, s, cc, sc))
        for k, (c, s, cc, sc) in zip(range(l, hi), rots):
            for i in range(l, min(k + 2, hi) + 1):
                row = A[i]
                x, y = row[k], row[k + 1]
                row[k] = c * x + s * y
                row[k + 1] = cc * y - sc * x
        for i in range(l, hi + 1):
            A[i][i] += shift
    return eig


def _hessenberg_solve(Hh, mu, b, mp, tiny):
    """Solve (Hh - mu I) y = b by Gaussian elimination with adjacent-row pivoting."""
    n = len(Hh)
    M = [list(r) for r in Hh]
    for i in range(n):
        M[i][i] -= mu
    b = list(b)
    for k in range(n - 1):
        if abs(M[k + 1][k]) > abs(M[k][k]):
            M[k], M[k + 1] = M[k + 1], M[k]
            b[k], b[k + 1] = b[k + 1], b[k]
        if M[k][k] == 0:
            M[k][k] = tiny
        f = M[k + 1][k] / M[k][k]
        if f != 0:
            rk, rk1 = M[k], M[k + 1]
            for j in range(k, n):
                rk1[j] -= f * rk[j]
            b[k + 1] -= f * b[k]
    if M[n - 1][n - 1] == 0:
        M[n - 1][n - 1] = tiny
    y = [mp.zero] * n
    for i in range(n - 1, -1, -1):
        y[i] = (b[i] - mp.fdot(M[i][i + 1:], y[i + 1:])) / M[i][i]
    return y


def _sort_key(tol):
    def cmp(a, b):
        ra, rb = a[1].real, b[1].real
        if abs(ra - rb) <= tol * max(1, abs(ra), abs(rb)):
            ia, ib = a[1].imag, b[1].imag
            return -1 if ia < ib else (1 if ia > ib else 0)
        return -1 if ra < rb else 1
    return functools.cmp_to_key(cmp)


def solve_dense_complex(pair: MatrixPair, ctx: PrecisionContext | None = None,
                        vectors: bool = True, imag_tolerance=None) -> Spectrum:
    """Eigenpairs of H (S must be the identity), ascending real part.

    ``real_flags[n]`` marks eigenvalues with |Im E| <= imag_tolerance * max(1, |E|)
    (default 10^-(digits/2)); nothing is discarded.
    """
    ctx = ctx or pair.ctx
    if ctx is not pair.ctx:
        raise ConfigurationError("matrix pair was assembled in a different precision context")
    if not pair.s_is_identity():
        raise ConfigurationError("solve_dense_complex expects S = identity; reduce the pair first")
    mp = ctx.mp
    n = pair.size
    A = [[mp.mpc(x) for x in row] for row in pair.H]
    Hh, refl = hessenberg(A, mp)
    vals = hessenberg_qr_eigenvalues(Hh, ctx, SWEEPS_PER_DIM * n)

    tol = mp.mpf(10) ** (-(ctx.decimal_digits // 2))
    order = sorted(enumerate(vals), key=_sort_key(tol))
    vals = [v for _, v in order]

    norm = _fro(A, mp) or mp.one
    eps = mp.mpf(2) ** (-mp.prec)
    vecs, residuals = [], []
    for lam in vals:
        mu = lam + eps * norm * mp.mpc(1, 1)
        y = [mp.mpc(1)] * n
        for _ in range(3):
            y = _hessenberg_solve(Hh, mu, y, mp, eps * norm)
            ny = _norm(y, mp)
            y = [t / ny for t in y]
        v = _apply_q(refl, y, mp)
        nv = _norm(v, mp)
        v = [t / nv for t in v]
        Av = _matvec(A, v, mp)
        residuals.append(_norm([a - lam * b for a, b in zip(Av, v)], mp))
        vecs.append(v)

    itol = tol if imag_tolerance is None else ctx.real(imag_tolerance)
    flags = [abs(v.imag) <= itol * max(1, abs(v)) for v in vals]
    return Spectrum(vals, vecs if vectors else None, residuals, None, ctx,
                    is_complex=True, real_flags=flags)


# precision management ------------------------------------------------------

def precision_cap(base_digits: int) -> int:
    cap = 8 * base_digits
    env = os.environ.get("RITZ_MAX_PRECISION")
    if env:
        try:
            cap = min(cap, int(env))
        except ValueError as exc:
            raise ConfigurationError(f"RITZ_MAX_PRECISION must be an integer, got {env!r}") from exc
    return cap


def certify(spec: Spectrum, required_digits: int) -> bool:
    mp = spec.ctx.mp
    bound = mp.mpf(10) ** (-(spec.digits // 2))
    if spec.max_residual() > bound:
        return False
    return spec.is_complex or spec.certified_digits >= required_digits


def auto_precision_solve(builder: Callable[[PrecisionContext], MatrixPair], N: int,
                         base_digits: int, *, required_digits: int | None = None,
                         max_digits: int | None = None, start_digits: int | None = None,
                         vectors: bool = True) -> Spectrum:
    """Solve at ``base_digits``, doubling precision until the result is certified.

    A result is certified when every residual is below 10^-(digits/2) and, on
    the real path, at least ``required_digits`` (default base_digits/2) digits
    survive the overlap conditioning.  ``start_digits`` skips levels already
    known to be insufficient; the cap stays 8 * base_digits.
    """
    if base_digits < MIN_DIGITS:
        raise ConfigurationError(f"base precision {base_digits} is below {MIN_DIGITS} digits")
    required = base_digits // 2 if required_digits is None else required_digits
    cap = precision_cap(base_digits) if max_digits is None else max_digits
    digits = base_digits
    while start_digits is not None and digits < start_digits and 2 * digits <= cap:
        digits *= 2
    last_cond = None
    while digits <= cap:
        ctx = with_precision(digits)
        pair = builder(ctx)
        if pair.size != N:
            raise ConfigurationError(f"builder returned size {pair.size}, expected {N}")
        try:
            if pair.is_complex:
                spec = solve_dense_complex(pair, ctx, vectors=vectors)
            else:
                spec = solve_generalized_symmetric(pair, ctx, vectors=vectors)
        except OverlapNotPositiveDefinite:
            last_cond = None
        else:
            last_cond = spec.overlap_condition_estimate
            if certify(spec, required):
                return spec
        digits *= 2
    cond = "unknown" if last_cond is None else with_precision(MIN_DIGITS).mp.nstr(last_cond, 5)
    raise PrecisionExhaustedError(
        f"no certified spectrum for N={N} up to {cap} digits (overlap condition ~ {cond})",
        condition_estimate=last_cond, digits=cap,
    )
