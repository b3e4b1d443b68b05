import random
from fractions import Fraction

import pytest

from conedeform.laurent import LaurentPoly, YSeries, invert_chart_map
from conedeform.rational import GaussianRational


def _rand_laurent(rng, lo=-4, hi=4, terms=3):
    c = {}
    for _ in range(terms):
        c[rng.randint(lo, hi)] = GaussianRational(
            Fraction(rng.randint(-5, 5), rng.randint(1, 3)),
            Fraction(rng.randint(-2, 2)))
    return LaurentPoly(c)


def test_laurent_ring_ops():
    rng = random.Random(1)
    for _ in range(30):
        a, b, c = (_rand_laurent(rng) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        assert a * b == b * a
    z = LaurentPoly.monomial(1)
    zi = LaurentPoly.monomial(-1)
    assert z * zi == LaurentPoly.monomial(0)


def test_laurent_shift_and_monomial_data():
    p = LaurentPoly({-2: Fraction(3), 1: Fraction(1)})
    assert p.shift(2).coefficient(0) == 3
    m = LaurentPoly.monomial(-4, Fraction(2, 3))
    assert m.monomial_data() == (-4, Fraction(2, 3))
    with pytest.raises(ValueError):
        p.monomial_data()


def test_yseries_mul_and_truncation():
    one = LaurentPoly.monomial(0)
    S = YSeries(3, [one, one])           # 1 + y
    P = S * S * S                        # (1+y)^3 truncated at y^3
    assert [c.coefficient(0) for c in P.coeffs] == [1, 3, 3, 1]
    Q = S ** 5
    assert Q.coeffs[3].coefficient(0) == 10   # C(5,3)


def test_yseries_inverse():
    rng = random.Random(2)
    K = 5
    for _ in range(10):
        lead = LaurentPoly.monomial(rng.randint(-2, 2),
                                    GaussianRational(Fraction(rng.choice([1, 2, -1, 3]))))
        coeffs = [lead] + [_rand_laurent(rng, -2, 2, 2) for _ in range(K)]
        S = YSeries(K, coeffs)
        assert S * S.inverse() == YSeries.const(K, LaurentPoly.monomial(0))


def test_compose_laurent_on_identity():
    K = 4
    Z = YSeries.identity_z(K)
    L = LaurentPoly({-2: Fraction(3), 0: Fraction(1), 2: Fraction(-1)})
    out = Z.compose_laurent(L)
    assert out.coeffs[0] == L


def test_substitute_identity():
    rng = random.Random(3)
    K = 4
    coeffs = [LaurentPoly.zero()] + [_rand_laurent(rng) for _ in range(K)]
    S = YSeries(K, coeffs)
    assert S.substitute(YSeries.identity_z(K), YSeries.identity_y(K)) == S


def test_invert_chart_map_roundtrip():
    """Forward-composing the inverse must give the identity."""
    rng = random.Random(4)
    K = 5
    for _ in range(6):
        p = LaurentPoly({0: GaussianRational(Fraction(rng.randint(-2, 2))),
                         1: GaussianRational(Fraction(rng.randint(-2, 2)))})
        q = LaurentPoly({0: GaussianRational(Fraction(rng.randint(-2, 2)))})
        k = rng.randint(1, 2)
        Z, Y = invert_chart_map(p, q, k, K)
        # forward map applied to (Z, Y): z + p(z) y^k, y + q(z) y^(k+1)
        zf = Z + Z.compose_laurent(p) * (Y ** k)
        yf = Y + Z.compose_laurent(q) * (Y ** (k + 1))
        assert zf == YSeries.identity_z(K)
        assert yf == YSeries.identity_y(K)


def test_invert_chart_map_rejects_negative_support():
    with pytest.raises(ValueError):
        invert_chart_map(LaurentPoly.monomial(-1), LaurentPoly.zero(), 1, 3)
