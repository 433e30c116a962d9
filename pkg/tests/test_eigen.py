import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ritz.assemble import MatrixPair, assemble_harmonic_osc, assemble_polyexp, assemble_spec
from ritz.basis import BasisSpec, Family, PolyExpFunction, Sector, specs_for
from ritz.errors import OverlapNotPositiveDefinite, PrecisionExhaustedError
from ritz.eigen import (
    auto_precision_solve,
    solve_dense_complex,
    solve_generalized_symmetric,
    standard_pair,
)
from ritz.model import AsymptoticForm, parse_potential
from ritz.mpkernel import with_precision


def pair_of(H, S, ctx, cplx=False):
    conv = ctx.mp.mpc if cplx else ctx.real
    return MatrixPair(tuple(tuple(conv(x) for x in r) for r in H),
                      tuple(tuple(ctx.real(x) for x in r) for r in S), None, ctx, is_complex=cplx)


def test_one_by_one(ctx):
    assert solve_generalized_symmetric(pair_of([[2]], [[1]], ctx)).eigenvalues == [2]


def test_diagonal(ctx):
    vals = solve_generalized_symmetric(pair_of([[5, 0], [0, 2]], [[1, 0], [0, 1]], ctx)).eigenvalues
    assert vals == [2, 5]


def quadratic_oracle(H, S, mp):
    # det(H - E S) = a E^2 + b E + c, roots by mpmath.polyroots at the caller's precision
    a = S[0][0] * S[1][1] - S[0][1] ** 2
    b = -(H[0][0] * S[1][1] + H[1][1] * S[0][0] - 2 * H[0][1] * S[0][1])
    c = H[0][0] * H[1][1] - H[0][1] ** 2
    return sorted(mp.re(r) for r in mp.polyroots([a, b, c], maxsteps=200, extraprec=400))


def test_two_by_two_vq_even_sector(ctx):
    V = parse_potential("x^4-5*x^2")
    pair = assemble_spec(V, specs_for(V, "s2", 2, sectors=(Sector.EVEN,))[0], ctx)
    got = solve_generalized_symmetric(pair).eigenvalues
    want = quadratic_oracle(pair.H, pair.S, ctx.mp)
    for g, w in zip(got, want):
        assert abs(g - w) <= ctx.mp.mpf(10) ** -(ctx.decimal_digits - 3) * max(1, abs(w))


def test_indefinite_overlap_reports_pivot(ctx):
    with pytest.raises(OverlapNotPositiveDefinite) as info:
        solve_generalized_symmetric(pair_of([[1, 0], [0, 1]], [[1, 2], [2, 1]], ctx))
    assert info.value.pivot_index == 1
    assert "120" in str(info.value)  # hint: retry at twice the digits


def test_complex_diagonal(ctx):
    vals = solve_dense_complex(pair_of([[3, 0], [0, 1]], [[1, 0], [0, 1]], ctx, cplx=True)).eigenvalues
    assert vals == [1, 3]


def test_complex_plus_minus_i(ctx):
    mp = ctx.mp
    H = [[0, mp.mpc(0, 1)], [mp.mpc(0, 1), 0]]
    sp = solve_dense_complex(pair_of(H, [[1, 0], [0, 1]], ctx, cplx=True))
    # equal real parts: ascending imaginary part breaks the tie
    assert abs(sp.eigenvalues[0] - mp.mpc(0, -1)) <= ctx.eps
    assert abs(sp.eigenvalues[1] - mp.mpc(0, 1)) <= ctx.eps
    assert sp.real_flags == [False, False]


def charpoly_roots(H, ctx):
    """Faddeev-LeVerrier coefficients and polyroots, both at twice the precision."""
    work = ctx.doubled()
    mp = work.mp
    n = len(H)
    A = mp.matrix([[mp.mpc(x) for x in row] for row in H])
    M = mp.zeros(n, n)
    coeffs = [mp.one]
    for k in range(1, n + 1):
        M = A * M + coeffs[-1] * mp.eye(n)
        AM = A * M
        coeffs.append(-sum(AM[i, i] for i in range(n)) / k)
    return mp.polyroots(coeffs, maxsteps=400, extraprec=4 * work.mp.prec)


def test_ix3_n4_against_characteristic_polynomial(ctx):
    pair = assemble_harmonic_osc(parse_potential("i*x^3"), 4, ctx)
    got = solve_dense_complex(pair).eigenvalues
    roots = list(charpoly_roots(pair.H, ctx))
    for e in got:
        best = min(roots, key=lambda r: abs(r - e))
        assert abs(ctx.mp.mpc(best) - e) <= ctx.mp.mpf(10) ** -(ctx.decimal_digits - 5) * max(1, abs(e))
        roots.remove(best)


def test_ix3_flags_and_residuals(ctx):
    sp = solve_dense_complex(assemble_harmonic_osc(parse_potential("i*x^3"), 20, ctx))
    tol = ctx.mp.mpf(10) ** -(ctx.decimal_digits // 2)
    assert sp.max_residual() <= tol
    levels = sp.real_levels()
    assert levels and all(abs(e.imag) <= tol * max(1, abs(e)) for e in levels)
    assert abs(levels[0].real - ctx.real("1.156267071988")) < ctx.real("1e-3")  # N=20 truncation
    # discarded ones come in complex-conjugate pairs
    odd = [e for e, f in zip(sp.eigenvalues, sp.real_flags) if not f]
    for e in odd:
        assert min(abs(e.conjugate() - o) for o in odd) <= tol * max(1, abs(e))


def vq_pair(N, ctx, basis="s2", sector=Sector.EVEN):
    V = parse_potential("x^4-5*x^2")
    return assemble_spec(V, specs_for(V, basis, N, sectors=(sector,))[0], ctx)


def test_residual_and_s_orthonormality():
    ctx = with_precision(120)
    pair = vq_pair(16, ctx)
    sp = solve_generalized_symmetric(pair)
    mp = ctx.mp
    tol = mp.mpf(10) ** -(ctx.decimal_digits // 2)
    n = pair.size
    for E, c in zip(sp.eigenvalues, sp.eigenvectors):
        hc = [mp.fdot(pair.H[i], c) for i in range(n)]
        sc = [mp.fdot(pair.S[i], c) for i in range(n)]
        res = mp.sqrt(mp.fsum((a - E * b) ** 2 for a, b in zip(hc, sc))) / mp.sqrt(mp.fsum(x**2 for x in c))
        assert res <= tol * max(1, abs(E))
    C = sp.eigenvectors
    for a in range(n):
        for b in range(n):
            g = mp.fsum(C[a][i] * pair.S[i][j] * C[b][j] for i in range(n) for j in range(n))
            assert abs(g - (1 if a == b else 0)) <= tol


def test_complex_path_matches_real_path():
    ctx = with_precision(60)
    pair = vq_pair(10, ctx, sector=Sector.ODD)
    real = solve_generalized_symmetric(pair).eigenvalues
    cplx = solve_dense_complex(standard_pair(pair)).eigenvalues
    for r, c in zip(real, cplx):
        assert abs(c - r) <= ctx.mp.mpf(10) ** -(ctx.decimal_digits - 10) * max(1, abs(r))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))))
def test_random_pencils_against_mpmath(mats):
    Hraw, B = mats
    n = len(Hraw)
    ctx = with_precision(40)
    H = [[Hraw[i][j] + Hraw[j][i] for j in range(n)] for i in range(n)]
    S = [[sum(B[k][i] * B[k][j] for k in range(n)) + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    got = solve_generalized_symmetric(pair_of(H, S, ctx)).eigenvalues
    mp = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.MPContext()
    mp.dps = 80
    vals = mp.eigsy(mp.cholesky(mp.matrix(S)) ** -1 * mp.matrix(H) * (mp.cholesky(mp.matrix(S)) ** -1).T)[0]
    want = sorted(vals[i] for i in range(n))
    for g, w in zip(got, want):
        assert abs(g - ctx.real(w)) <= ctx.mp.mpf(10) ** -30 * max(1, abs(w))


def test_auto_precision_small_case_stays_at_base():
    sp = auto_precision_solve(lambda c: vq_pair(2, c), 2, 60)
    assert sp.digits == 60


def test_auto_precision_escalates_and_is_stable():
    sp = auto_precision_solve(lambda c: vq_pair(40, c), 40, 50)
    assert sp.digits > 50
    higher = solve_generalized_symmetric(vq_pair(40, with_precision(2 * sp.digits))).eigenvalues
    mp = sp.ctx.mp
    for a, b in zip(sp.eigenvalues[:4], higher[:4]):
        assert abs(a - sp.ctx.real(b)) <= mp.mpf(10) ** -(sp.certified_digits - 2) * max(1, abs(a))


def test_duplicated_basis_function_exhausts_precision():
    V = parse_potential("x^4-5*x^2")
    decay = AsymptoticForm(2)

    def builder(c):
        fs = [PolyExpFunction.monomial(p, decay, 1, c) for p in (0, 1, 1)]
        return assemble_polyexp(V, fs, ctx=c)

    with pytest.raises(PrecisionExhaustedError):
        auto_precision_solve(builder, 3, 30, max_digits=120)


def test_env_cap_is_honored(monkeypatch):
    monkeypatch.setenv("RITZ_MAX_PRECISION", "60")
    with pytest.raises(PrecisionExhaustedError) as info:
        auto_precision_solve(lambda c: vq_pair(40, c), 40, 60)
    assert info.value.digits == 60
    assert info.value.condition_estimate is not None


def test_variational_monotonicity():
    ctx = with_precision(60)
    prev = None
    tol = ctx.mp.mpf(10) ** -(ctx.decimal_digits - 10)
    for N in range(2, 14):
        vals = solve_generalized_symmetric(vq_pair(N, ctx, basis="s1")).eigenvalues
        if prev is not None:
            for a, b in zip(prev, vals):
                assert b <= a + tol
        prev = vals
