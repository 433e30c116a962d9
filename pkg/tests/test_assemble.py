import pytest

from ritz.assemble import (
    assemble_harmonic_osc,
    assemble_polyexp,
    assemble_spec,
    dump_matrix,
    position_powers,
)
from ritz.basis import BasisSpec, Family, PolyExpFunction, Sector, build_basis, specs_for
from ritz.benchmark import oracle_matrices
from ritz.errors import BasisSpecError
from ritz.model import AsymptoticForm, parse_potential
from ritz.mpkernel import parse_number


def test_harmonic_ground_state_in_span(ctx):
    V = parse_potential("x^2")
    spec = BasisSpec(Family.K_ODD, Sector.EVEN, 1, AsymptoticForm(1))
    pair = assemble_spec(V, spec, ctx)
    mp = ctx.mp
    s = mp.sqrt(mp.pi)
    assert abs(pair.S[0][0] - s / 2) <= ctx.eps
    assert abs(pair.H[0][0] - s / 2) <= ctx.eps  # T = V-term = sqrt(pi)/4
    assert abs(pair.H[0][0] / pair.S[0][0] - 1) <= ctx.eps


def test_vq_even_sector_entries_match_quadrature(ctx):
    V = parse_potential("x^4-5*x^2")
    spec = specs_for(V, "s2", 2, sectors=(Sector.EVEN,))[0]
    pair = assemble_spec(V, spec, ctx)
    Ho, So = oracle_matrices(V, spec, ctx)
    tol = ctx.mp.mpf(10) ** -(ctx.decimal_digits - 8)
    for M, O in ((pair.H, Ho), (pair.S, So)):
        for i in range(2):
            for j in range(2):
                assert abs(M[i][j] - O[i][j]) <= tol * max(1, abs(O[i][j]))


@pytest.mark.parametrize("expr,basis", [("x^6-4*x^2", "s1"), ("x^4-5*x^2", "s3"), ("x^4+x^3", "auto")])
def test_entries_match_quadrature_n4(ctx, expr, basis):
    V = parse_potential(expr)
    for spec in specs_for(V, basis, 4):
        pair = assemble_spec(V, spec, ctx)
        Ho, So = oracle_matrices(V, spec, ctx)
        tol = ctx.mp.mpf(10) ** -(ctx.decimal_digits - 8)
        for M, O in ((pair.H, Ho), (pair.S, So)):
            for i in range(4):
                for j in range(4):
                    assert abs(M[i][j] - O[i][j]) <= tol * max(1, abs(O[i][j]))


def test_asymmetric_odd_moments_cancel(ctx):
    V = parse_potential("x^4+x^3")
    pair = assemble_spec(V, specs_for(V, "auto", 2)[0], ctx)
    assert pair.S[0][1] == 0
    assert pair.H[0][1] != 0  # the x^3 term couples the two parities


def test_matrices_exactly_symmetric(ctx):
    V = parse_potential("x^6-4*x^2")
    for spec in specs_for(V, "s2", 7):
        pair = assemble_spec(V, spec, ctx)
        for i in range(7):
            for j in range(7):
                assert pair.H[i][j] == pair.H[j][i] and pair.S[i][j] == pair.S[j][i]


def test_parity_decoupling(ctx):
    V = parse_potential("x^4-5*x^2")
    decay = AsymptoticForm(2)
    mixed = (build_basis(BasisSpec(Family.K_EVEN, Sector.EVEN, 3, decay), ctx)
             + build_basis(BasisSpec(Family.K_EVEN, Sector.ODD, 3, decay), ctx))
    pair = assemble_polyexp(V, mixed, ctx=ctx)
    for i in range(3):
        for j in range(3, 6):
            assert pair.H[i][j] == 0 and pair.S[i][j] == 0
    assert pair.S[0][3] == 0 and pair.S[1][4] == 0


def test_parity_family_rejects_asymmetric_potential(ctx):
    spec = BasisSpec(Family.K_EVEN, Sector.EVEN, 2, AsymptoticForm(2))
    with pytest.raises(BasisSpecError):
        assemble_spec(parse_potential("x^4+x^3"), spec, ctx)
    with pytest.raises(BasisSpecError):
        assemble_polyexp(parse_potential("i*x^3"), build_basis(spec, ctx))


# harmonic-oscillator path -------------------------------------------------

def ladder_matrix(power, N, ctx):
    """<m| ((a + a^dagger)/sqrt 2)^power |n> by acting on occupation-number vectors."""
    mp = ctx.mp
    M = [[mp.zero] * N for _ in range(N)]
    for n in range(N):
        state = {n: mp.one}
        for _ in range(power):
            nxt = {}
            for q, c in state.items():
                if q > 0:
                    nxt[q - 1] = nxt.get(q - 1, 0) + c * mp.sqrt(q) / mp.sqrt(2)
                nxt[q + 1] = nxt.get(q + 1, 0) + c * mp.sqrt(q + 1) / mp.sqrt(2)
            state = nxt
        for m in range(N):
            M[m][n] = state.get(m, mp.zero)
    return M


def test_ho_ground_state_moments(ctx):
    X = position_powers(2, 3, ctx)
    assert X[2][0][0] == ctx.real(1) / 2
    pair = assemble_harmonic_osc(parse_potential("x^2"), 1, ctx)
    assert pair.H[0][0] == 1  # (p^2)_00 = (x^2)_00 = 1/2
    p2 = ctx.real(1) - X[2][0][0]
    assert p2 == ctx.real(1) / 2


@pytest.mark.parametrize("power", [1, 2, 3, 4, 6])
def test_position_powers_match_ladder_algebra(ctx, power):
    N = 6
    X = position_powers(power, N, ctx)[power]
    L = ladder_matrix(power, N, ctx)
    for i in range(N):
        for j in range(N):
            assert abs(X[i][j] - L[i][j]) <= 10 * ctx.eps * max(1, abs(L[i][j]))


def test_padding_exactness(ctx):
    for m in (2, 3, 5):
        short = position_powers(m, 8, ctx, padding=m)
        long = position_powers(m, 8, ctx, padding=m + 12)
        assert short[m] == long[m]


def test_ho_harmonic_hamiltonian_is_diagonal(ctx):
    pair = assemble_harmonic_osc(parse_potential("x^2"), 8, ctx)
    for i in range(8):
        for j in range(8):
            expected = 2 * i + 1 if i == j else 0
            assert abs(pair.H[i][j] - expected) <= 10 * ctx.eps
    assert pair.s_is_identity()


def test_ho_scale(ctx):
    # with length scale l the x^2 oscillator gives diag((2n+1)(1/l^2 + l^2)/2) + off-diagonal terms
    pair = assemble_harmonic_osc(parse_potential("x^2"), 4, ctx, scale=2)
    assert abs(pair.H[0][0] - (ctx.real(1) / 4 + 4) / 2) <= 10 * ctx.eps


def test_ho_complex_potential(ctx):
    pair = assemble_harmonic_osc(parse_potential("i*x^3"), 6, ctx)
    assert pair.is_complex
    L = ladder_matrix(3, 6, ctx)
    for i in range(6):
        for j in range(6):
            assert abs(pair.H[i][j].imag - L[i][j]) <= 10 * ctx.eps * max(1, abs(L[i][j]))
            assert pair.H[i][j] == pair.H[j][i]  # complex symmetric


def test_dump_matrix_round_trip(ctx):
    V = parse_potential("x^4-5*x^2")
    pair = assemble_spec(V, specs_for(V, "s2", 3)[0], ctx)
    text = dump_matrix(pair.H, ctx)
    rows = [[parse_number(t, ctx) for t in line.split()] for line in text.splitlines()]
    assert rows == [list(r) for r in pair.H]
