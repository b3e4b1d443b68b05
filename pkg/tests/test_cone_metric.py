import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conedeform.cone_metric import (ConeChart, NotNormalizedChart,
                                    Potential, TENSOR_TYPES, TensorType,
                                    calabi_exponent, christoffels_fd,
                                    curvature_check, empirical_scaling_slope,
                                    fubini_study_potential, metric_at,
                                    metric_field, normalize_chart,
                                    random_normalized_chart, scaling_exponent,
                                    tensor_norm, tian_yau_exponent,
                                    basis_tensor, JetPotential)
from conedeform.jets import Jet


def test_calabi_exponent_values():
    assert calabi_exponent(2, 1) == 1                    # flat C^2 model
    assert tian_yau_exponent(Fraction(2), 2) == Fraction(1, 2)
    assert tian_yau_exponent(Fraction(3, 2), 2) == Fraction(1, 4)
    assert calabi_exponent(1, 1) == Fraction(1, 2)
    with pytest.raises(ValueError):
        calabi_exponent(0, 1)
    with pytest.raises(ValueError):
        tian_yau_exponent(1, 2)


def test_metric_at_flat_point():
    ch = ConeChart(Fraction(1), 1, (0,), 1.0, fubini_study_potential(1))
    m = metric_at(ch)
    assert np.allclose(m.g, np.eye(2))
    assert m.christoffels[1, 1, 0] == pytest.approx(-1)
    assert m.christoffels[0, 0, 0] == pytest.approx(-2)
    assert m.r == pytest.approx(1.0)


def test_metric_fiber_scaling():
    pot = fubini_study_potential(1)
    d = Fraction(1, 3)
    g1 = metric_at(ConeChart(d, 1, (0,), 1.0, pot)).g
    t = 1.7 - 0.4j
    g2 = metric_at(ConeChart(d, 1, (0,), t, pot)).g
    df = float(d)
    assert g2[0, 0] == pytest.approx(g1[0, 0] * abs(t) ** (-2 * (df + 1)))
    assert g2[1, 1] == pytest.approx(g1[1, 1] * abs(t) ** (-2 * df))


def test_frame_norm_formula():
    ch = ConeChart(Fraction(1, 2), 1, (0,), 2.0, fubini_study_potential(1))
    m = metric_at(ch)
    assert m.frame_norms["dxi"] == pytest.approx(2 * 2 ** 1.5)
    # cross-check against the inverse metric entry
    assert m.frame_norms["dxi"] == pytest.approx(
        1 / math.sqrt(m.g[0, 0].real))
    assert m.frame_norms["dz"] == pytest.approx(
        1 / math.sqrt(m.g[1, 1].real))


def test_metric_at_rejects_unnormalized():
    pot = Potential.from_terms(1, {(0, 0): 1})   # constant: a_11bar = 0 != a
    with pytest.raises(NotNormalizedChart):
        metric_at(ConeChart(Fraction(1), 1, (0,), 1.0, pot))


def test_christoffels_fd_matches_closed_form():
    rng = random.Random(12)
    for _ in range(8):
        ch = random_normalized_chart(rng, 1)
        m = metric_at(ch)
        fd = christoffels_fd(ch, h=1e-5)
        assert np.max(np.abs(fd - m.christoffels)) < 1e-6


def test_christoffels_fd_dim2():
    rng = random.Random(13)
    ch = random_normalized_chart(rng, 2)
    m = metric_at(ch)
    fd = christoffels_fd(ch, h=1e-5)
    assert np.max(np.abs(fd - m.christoffels)) < 1e-6


def test_scaling_exponents_closed_form():
    d = Fraction(1, 2)
    assert scaling_exponent(TENSOR_TYPES["vh"], d) == 1
    assert scaling_exponent(TENSOR_TYPES["hv"], d) == -1
    assert scaling_exponent(TensorType(), d) == 0
    assert scaling_exponent(TensorType(p_h=2, q_v=1), d) == 2 * d - (d + 1)


def test_scaling_slopes_match_prediction():
    ch = ConeChart(Fraction(1, 2), 1, (0,), 1.0, fubini_study_potential(1))
    for kind, ttype in TENSOR_TYPES.items():
        pred = float(scaling_exponent(ttype, Fraction(1, 2)))
        slope = empirical_scaling_slope(ch, kind)
        assert abs(slope - pred) <= max(0.01, 0.01 * abs(pred)) + 1e-12


def test_curvature_flat_cone():
    rep = curvature_check(fubini_study_potential(1), 1, 2,
                          full_riemann=True, h=1e-4)
    assert rep.max_riemann < 1e-6
    assert rep.ricci_defect < 1e-6


def test_curvature_einstein_proportionality():
    rep = curvature_check(fubini_study_potential(1), Fraction(1, 2), 2,
                          h=1e-4)
    assert rep.ricci_defect < 1e-5


def test_curvature_degenerate_base():
    pot = Potential.from_terms(1, {(0, 0): 2})
    rep = curvature_check(pot, Fraction(1, 3), 1, h=1e-2)
    assert rep.ricci_defect < 1e-8
    assert any("degenerate" in n for n in rep.notes)


def test_radial_function_eikonal():
    """|dr| = 1 for the cone radius r = h^(delta/2).

    Convention: |dr|^2 = 4 g^(I Jbar) dr_I dr_Jbar for the real function r,
    calibrated so the flat model gives exactly 1."""
    rng = random.Random(14)
    for _ in range(5):
        ch = random_normalized_chart(rng, 1)
        d = float(ch.delta)
        gfun = metric_field(ch)
        n = ch.dimD
        coords = list(ch.z) + [ch.xi]

        def r_of(ws):
            a = ch.potential.jet(ws[:n], 0).value().real
            return a ** (d / 2) * abs(ws[n]) ** (-d)

        h = 1e-6
        grad = []
        for k in range(n + 1):
            def f(t, k=k):
                ws = list(coords)
                ws[k] = ws[k] + t
                return r_of(ws)
            fx = (f(h) - f(-h)) / (2 * h)
            fy = (f(1j * h) - f(-1j * h)) / (2 * h)
            grad.append(0.5 * (fx - 1j * fy))
        grad = np.array(grad)
        # reorder to (fiber, base) = index 0 first
        grad = np.concatenate([[grad[-1]], grad[:-1]])
        g = gfun(ch.z, ch.xi)
        ginv = np.linalg.inv(g)
        val = 4 * np.einsum("ij,i,j->", ginv.conj(), grad, grad.conj())
        assert abs(val.real - 1.0) < 1e-6


def test_derivative_norm_law_bounded():
    """|grad d_xi| * r / |d_xi| is xi-independent and bounded by 4 for the
    exponents exercised here (repository convention C <= 4)."""
    for delta in (Fraction(1, 2), Fraction(1)):
        ch0 = ConeChart(delta, 1, (0,), 1.0, fubini_study_potential(1))
        vals = []
        for k in range(0, 12):
            xi = 2.0 ** (-k)
            ch = ConeChart(delta, 1, (0,), xi, fubini_study_potential(1))
            m = metric_at(ch)
            # |nabla d_xi| via the closed Christoffels
            T = np.zeros((2, 2), dtype=complex)
            T[0, 0] = m.christoffels[0, 0, 0]
            T[1, 1] = m.christoffels[1, 1, 0]
            num = tensor_norm(T, m.g)
            den = math.sqrt(m.g[0, 0].real)
            vals.append(num * m.r / den)
        assert max(vals) <= 4.0
        assert min(vals) >= 1 / 4.0
        assert max(vals) / min(vals) < 1.0001


def test_normalize_chart_helper():
    """An off-normal potential is brought to normalized form."""
    pot = Potential.from_terms(1, {
        (0, 0): 2, (1, 0): Fraction(1, 3), (0, 1): Fraction(1, 3),
        (1, 1): 1, (2, 0): Fraction(1, 5), (0, 2): Fraction(1, 5),
        (2, 1): Fraction(1, 7), (1, 2): Fraction(1, 7), (2, 2): Fraction(1, 2),
    })
    raw = ConeChart(Fraction(1, 2), 1, (0,), 1.0, pot)
    with pytest.raises(NotNormalizedChart):
        metric_at(raw)
    fixed, change = normalize_chart(raw)
    m = metric_at(fixed)        # must validate now
    assert m.g[0, 0] != 0
    assert change.base_linear.shape == (1, 1)


def test_jet_potential_reexpansion():
    """JetPotential expands consistently at displaced points."""
    pot = fubini_study_potential(1)
    jp = JetPotential(1, pot.jet((0.0,), 4))
    z1 = (0.05 + 0.02j,)
    direct = pot.jet(z1, 2)
    moved = jp.jet(z1, 4)
    for e in [(0, 0), (1, 0), (1, 1)]:
        assert abs(direct.partial(e) - moved.partial(e)) < 1e-12


def test_jet_arithmetic():
    j = Jet(2, 4, {(0, 0): 2.0, (1, 0): 1.0, (0, 1): 1.0})
    p = j.power_real(0.5)
    assert p.value() == pytest.approx(math.sqrt(2))
    assert (p * p).partial((1, 0)) == pytest.approx(1.0)
    lg = j.log()
    assert lg.value() == pytest.approx(math.log(2))
    assert lg.partial((1, 0)) == pytest.approx(0.5)
    inv = j.inverse()
    assert (inv * j).value() == pytest.approx(1.0)
    assert abs((inv * j).partial((1, 1))) < 1e-14


def test_curvature_convergence_diagnostic():
    pot = fubini_study_potential(1)
    good = curvature_check(pot, Fraction(1, 2), 2, h=1e-4,
                           diagnose_convergence=True)
    assert good.converged
    # absurdly large step: the two-step estimates disagree and the report
    # carries the convergence-not-reached diagnostic
    bad = curvature_check(pot, Fraction(1, 2), 2, h=0.2, richardson=False,
                          diagnose_convergence=True)
    assert not bad.converged
    assert any("convergence not reached" in n for n in bad.notes)
