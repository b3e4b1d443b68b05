import random
from fractions import Fraction

import pytest

from conedeform.cech import normalize, p1p1_diagonal
from conedeform.parsing import (ParseError, parse_cone_deck, parse_laurent,
                                parse_polynomial, parse_potential,
                                parse_transition_deck)
from conedeform.poly import Polynomial, format_poly
from conedeform.rational import GaussianRational


def test_parse_cubic_form():
    p = parse_polynomial("z1^3+z2^3+z3^3+z4^3")
    assert p.nvars == 4
    assert p.is_homogeneous(3)
    assert p.coefficient((3, 0, 0, 0)) == 1


def test_parse_rational_coefficients():
    p = parse_polynomial("1/2*z1*z2 - z3^2")
    assert p.coefficient((1, 1, 0)) == Fraction(1, 2)
    assert p.coefficient((0, 0, 2)) == -1


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_polynomial("z1^")
    assert exc.value.column == 4
    with pytest.raises(ParseError):
        parse_polynomial("z1 + + z2")
    with pytest.raises(ParseError):
        parse_polynomial("1/0*z1")


def test_parse_constant_and_signs():
    p = parse_polynomial("-3/7 + z1 - 2", nvars=1)
    assert p.coefficient((0,)) == Fraction(-3, 7) - 2
    assert p.coefficient((1,)) == 1


def test_roundtrip_random_polynomials():
    """Pretty-printed polynomials re-parse to equal values."""
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(1, 4)
        terms = {}
        for _ in range(rng.randint(1, 6)):
            e = tuple(rng.randint(0, 3) for _ in range(n))
            terms[e] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        p = Polynomial(n, terms)
        if p.is_zero():
            continue
        assert parse_polynomial(format_poly(p), nvars=n) == p


def test_parse_cone_deck():
    deck = parse_cone_deck("""
[defining]
z1^2+z2^2+z3^2+z4^2
[perturbation]
z1+2 ; e=1
[params] n=3 alpha=3 compact=false
""")
    assert deck.cone.ambient_dim == 4
    assert deck.cone.degrees() == [2]
    assert deck.perturbation.declared_degrees == (1,)
    assert deck.n == 3 and deck.alpha == 3 and deck.compact is False


def test_deck_rejects_inhomogeneous_defining():
    with pytest.raises(ParseError):
        parse_cone_deck("[defining]\nz1^2+z2\n")


def test_deck_degree_declaration_mismatch():
    with pytest.raises(ParseError):
        parse_cone_deck("[defining]\nz1^2+z2^2 ; d=3\n")
    with pytest.raises(ParseError):
        parse_cone_deck("[defining]\nz1^2+z2^2\n[perturbation]\nz1^2 ; e=1\n")


def test_parse_laurent_negative_exponents():
    p = parse_laurent("-z^-2 + 3/2*z^4 - 5")
    assert p.coefficient(-2) == GaussianRational(-1)
    assert p.coefficient(4) == GaussianRational(Fraction(3, 2))
    assert p.coefficient(0) == GaussianRational(-5)


def test_parse_transition_deck_matches_builtin():
    text = """
[normal-degree] d=2
[y-series]
a1: -z^-2
a2: -z^-3
a3: -z^-4
a4: -z^-5
[z-series]
a0: z^-1
"""
    t = parse_transition_deck(text)
    assert t == p1p1_diagonal(4)
    res = normalize(t, 3)
    assert res.m_comfortable == 2


def test_transition_deck_degree_mismatch():
    with pytest.raises(ParseError):
        parse_transition_deck("[normal-degree] d=3\n[y-series]\na1: -z^-2\n")


def test_parse_potential_expressions():
    pot = parse_potential("1+|z|^2")
    assert pot.dimD == 1
    assert pot.value((0.0,)) == 1.0
    assert pot.value((1.0,)) == 2.0
    pot2 = parse_potential("2 - 1/3*z1*zbar1 + |z2|^2")
    assert pot2.dimD == 2
    assert pot2.value((0.0, 1.0)) == 3.0
    with pytest.raises(ValueError):
        parse_potential("z1 + zbar2")   # not real-valued -> validation error


def test_parse_potential_odd_abs_power():
    with pytest.raises(ParseError):
        parse_potential("|z|^3")
