from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ritz.errors import PotentialParseError, UnsupportedPotentialError
from ritz.model import AsymptoticForm, Parity, Potential, analyze_asymptotics, parity_of, parse_potential


def test_parse_benchmark_potentials():
    assert parse_potential("x^4-5*x^2").real_coeffs == {4: 1, 2: -5}
    assert parse_potential("x^6-4*x^2").real_coeffs == {6: 1, 2: -4}
    v = parse_potential("i*x^3")
    assert v.imag_coeffs == {3: 1} and v.real_coeffs == {} and not v.is_real


def test_parse_misc_forms():
    v = parse_potential(" 1/2*x^2 + 0.25*x^4 - 3 ")
    assert v.real_coeffs == {4: Fraction(1, 4), 2: Fraction(1, 2), 0: -3}
    assert parse_potential("x^2+x^2").real_coeffs == {2: 2}
    assert parse_potential("x^2 + 2*i*x").imag_coeffs == {1: 2}


@pytest.mark.parametrize("text,pos", [
    ("x^4-5*x^^2", 8),
    ("x^4 + sin(x)", 6),
    ("x^-2", 2),
    ("x^2.5", 2),
    ("", 0),
    ("x^4 5", 4),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(PotentialParseError) as info:
        parse_potential(text)
    assert info.value.position == pos


def test_parse_rejects_nonconfining():
    with pytest.raises(PotentialParseError):
        parse_potential("-x^2")
    with pytest.raises(PotentialParseError):
        parse_potential("7")


def test_parity_examples():
    assert parity_of(parse_potential("x^4-5*x^2")) is Parity.SYMMETRIC
    assert parity_of(parse_potential("x^4+x^3")) is Parity.ASYMMETRIC
    assert parity_of(parse_potential("i*x^3")) is Parity.ASYMMETRIC


@pytest.mark.parametrize("text,k,S", [
    ("x^4-5*x^2", 2, "S_2(x) = x^3/3"),
    ("x^6-4*x^2", 3, "S_3(x) = x^4/4"),
    ("x^2", 1, "S_1(x) = x^2/2"),
])
def test_asymptotics_examples(text, k, S):
    form = analyze_asymptotics(parse_potential(text))
    assert form == AsymptoticForm(k, 1)
    assert form.describe() == S


@pytest.mark.parametrize("text", ["i*x^3", "x^3", "x^5+x^4"])
def test_asymptotics_rejects(text):
    with pytest.raises(UnsupportedPotentialError):
        analyze_asymptotics(parse_potential(text))


def test_decay_value(ctx):
    form = AsymptoticForm(2, 4)
    x = ctx.real(3)
    assert form.S(x, ctx) == 2 * 27 / ctx.real(3)


coeff = st.fractions(min_value=-50, max_value=50, max_denominator=20)


@given(st.integers(1, 8), st.fractions(min_value=Fraction(1, 20), max_value=50, max_denominator=20),
       st.lists(coeff, min_size=16, max_size=16))
def test_asymptotics_recovers_k_and_a(k, a, lower):
    coeffs = {p: c for p, c in enumerate(lower[: 2 * k])}
    coeffs[2 * k] = a
    form = analyze_asymptotics(Potential(coeffs))
    assert (form.k, form.a) == (k, a)


@given(st.dictionaries(st.integers(0, 12), coeff, min_size=1), st.dictionaries(st.integers(0, 12), coeff))
def test_serialize_parse_identity(real, imag):
    try:
        v = Potential(real, imag)
    except UnsupportedPotentialError:
        return
    text = v.to_expr()
    assert parse_potential(text) == v
    assert parse_potential(text).to_expr() == text


def test_potential_evaluation():
    v = parse_potential("x^4-5*x^2")
    assert v(2) == 16 - 20
    assert parse_potential("i*x^3")(2) == 8j
