"""Operator lab: atom algebra, z-transforms, the (p,q) model, and its identities."""

import cmath
import math
import random

import pytest

from qmink.oplab import (Const, ExpLin, PositivityError, ShiftMultiplierOperator,
                         Sqrt, adjoint, build_Q, build_pq_pair, check_QQstar,
                         check_def_mu2, check_symbolic_consistency, check_twrs,
                         compose, gaussian_bump, op_equal, op_norm_sample,
                         pq_from_pair_label, z_transform)

PAIRS = ((1.0, 1.0), (2.0, 3.0), (0.5, math.e))


def test_model_parameters():
    m = build_pq_pair(2.0, 3.0)
    assert m.a == math.log(2.0 / 3.0)
    assert m.c == -math.log(6.0)
    m1 = build_pq_pair(1.0, 1.0)
    assert m1.a == 0.0 and m1.c == 0.0


def test_model_requires_positive_parameters():
    with pytest.raises(ValueError):
        build_pq_pair(-1.0, 2.0)


def test_compose_of_r_and_s_is_a_single_atom():
    m = build_pq_pair(2.0, 3.0)
    rs = compose(m.R, m.S)
    assert set(rs.atoms) == {(m.a, m.c)}
    f = rs.atoms[(m.a, m.c)]
    x, y = 0.37, -1.21
    assert abs(f(x, y) - math.exp(x) * math.exp(y - m.c)) < 1e-12 * math.exp(x + y - m.c)


def test_compose_with_identity():
    m = build_pq_pair(2.0, 3.0)
    assert op_equal(compose(m.R, ShiftMultiplierOperator.identity()), m.R,
                    samples=64, seed=0) == 0.0


def test_compose_of_multipliers_multiplies():
    f = ShiftMultiplierOperator.multiplier(ExpLin(1.0, 0.0))
    g = ShiftMultiplierOperator.multiplier(ExpLin(0.0, 2.0))
    fg = compose(f, g)
    assert set(fg.atoms) == {(0.0, 0.0)}
    assert abs(fg.atoms[(0.0, 0.0)](1.0, 1.0) - math.exp(1.0) * math.exp(2.0)) < 1e-12


def test_adjoint_of_r():
    m = build_pq_pair(2.0, 3.0)
    rstar = adjoint(m.R)
    assert set(rstar.atoms) == {(0.0, -m.c)}
    # multiplier stays e^x: independent of the shifted direction
    assert rstar.atoms[(0.0, -m.c)](1.5, 0.0) == pytest.approx(math.exp(1.5))


def test_adjoint_is_an_involution():
    m = build_pq_pair(0.5, math.e)
    assert op_equal(adjoint(adjoint(m.S)), m.S, samples=64, seed=1) == 0.0


def test_adjoint_reverses_composition():
    m = build_pq_pair(2.0, 3.0)
    lhs = adjoint(compose(m.R, m.S))
    rhs = compose(adjoint(m.S), adjoint(m.R))
    assert op_equal(lhs, rhs, samples=200, seed=2) < 1e-13


def test_adjoint_of_unimodular_multiplier():
    op = ShiftMultiplierOperator.multiplier(ExpLin(1j, 0.0))
    conj = adjoint(op).atoms[(0.0, 0.0)]
    assert abs(conj(0.7, 0.0) - cmath.exp(-0.7j)) < 1e-15


def test_normality_is_exact_in_the_model():
    for p, q in PAIRS:
        m = build_pq_pair(p, q)
        for op in (m.R, m.S, z_transform(m.R), z_transform(m.S)):
            assert op_equal(compose(adjoint(op), op), compose(op, adjoint(op)),
                            samples=100, seed=3) == 0.0


# -- z-transform ---------------------------------------------------------------


def test_z_transform_multiplier_value_at_origin():
    m = build_pq_pair(2.0, 3.0)
    z = z_transform(m.R)
    assert set(z.atoms) == {(0.0, m.c)}
    assert z.atoms[(0.0, m.c)](0.0, 0.0) == pytest.approx(1.0 / math.sqrt(2.0))


def test_z_transform_of_zero_is_zero():
    assert z_transform(ShiftMultiplierOperator.zero(), 2.0).is_zero()


def test_z_transform_requires_diagonal_modulus():
    m = build_pq_pair(2.0, 3.0)
    with pytest.raises(ValueError):
        z_transform(m.R + m.S)


def test_z_transform_scale_must_be_positive():
    m = build_pq_pair(2.0, 3.0)
    with pytest.raises(ValueError):
        z_transform(m.R, 0.0)


def test_z_transform_is_a_contraction():
    for p, q in PAIRS:
        m = build_pq_pair(p, q)
        for op in (m.R, m.S):
            for scale in (1.0, p * q, q / p):
                assert op_norm_sample(z_transform(op, scale),
                                      samples=500, seed=5) < 1.0


def test_sqrt_positivity_guard():
    bad = Sqrt(Const(-1.0))
    with pytest.raises(PositivityError):
        bad(0.0, 0.0)


# -- operator equality -----------------------------------------------------------


def test_op_equal_is_zero_on_identical_operators():
    m = build_pq_pair(2.0, 3.0)
    assert op_equal(m.R, m.R, samples=50, seed=0) == 0.0


def test_op_equal_flags_distinct_shifts():
    m = build_pq_pair(2.0, 3.0)
    assert op_equal(m.R, m.S, samples=50, seed=0) > 0.5


def test_commutation_constant_via_op_equal():
    for p, q in PAIRS:
        m = build_pq_pair(p, q)
        r = op_equal(compose(m.R, m.S), compose(m.S, m.R).scaled(p * p),
                     samples=500, seed=11)
        assert r < 1e-12


# -- identity suites ---------------------------------------------------------------


def test_def_mu2_residuals():
    for p, q in PAIRS + ((math.e, 1.0),):
        m = build_pq_pair(p, q)
        result = check_def_mu2(m, samples=500, seed=7)
        assert result.max_residual < 1e-12
        if p == q == 1.0:
            assert result.max_residual == 0.0


def test_Q_matrix_entries():
    m = build_pq_pair(2.0, 3.0)
    Q = build_Q(m)
    assert op_equal(Q[1][0], compose(z_transform(m.R), z_transform(m.S)),
                    samples=100, seed=0) == 0.0
    m1 = build_pq_pair(1.0, 1.0)
    Q1 = build_Q(m1)
    assert Q1[0][0].atoms[(0.0, 0.0)](0.0, 0.0) == pytest.approx(0.5)


def test_QQstar_diagonal_value_at_origin():
    # (1 + AB) / ((1+A)(1+B)) with B = 1 equals 1/2 for any A
    for p, q in PAIRS:
        m = build_pq_pair(p, q)
        Q = build_Q(m)
        P00 = compose(Q[0][0], adjoint(Q[0][0])) + compose(Q[0][1], adjoint(Q[0][1]))
        assert P00.atoms[(0.0, 0.0)](0.0, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_QQstar_residuals():
    for p, q in PAIRS:
        m = build_pq_pair(p, q)
        result = check_QQstar(m, samples=500, seed=7)
        assert result.max_residual < 1e-12
        named = dict(result.residuals)
        if p == q == 1.0:
            assert named["(QQ*)_12 = 0"] == 0.0
            assert named["(QQ*)_21 = 0"] == 0.0


def test_QQstar_closed_form_is_plain_at_equal_parameters():
    """At p = q the (QQ*)_11 closed form is literally
    (1+|R|^2|S|^2)/((1+|R|^2)(1+|S|^2)) with |R|^2 = e^{2x}, |S|^2 = e^{2y}."""
    m = build_pq_pair(1.7, 1.7)
    Q = build_Q(m)
    P00 = compose(Q[0][0], adjoint(Q[0][0])) + compose(Q[0][1], adjoint(Q[0][1]))
    f = P00.atoms[(0.0, 0.0)]
    rng = random.Random(9)
    for _ in range(200):
        x, y = rng.uniform(-4, 4), rng.uniform(-4, 4)
        rr, ss = math.exp(2 * x), math.exp(2 * y)
        want = (1 + rr * ss) / ((1 + rr) * (1 + ss))
        assert abs(f(x, y) - want) < 1e-12


def test_twrs_residuals():
    for p, q in PAIRS:
        m = build_pq_pair(p, q)
        result = check_twrs(m, samples=500, seed=7)
        assert result.max_residual < 1e-12
        if p == q == 1.0:
            assert result.max_residual == 0.0


def test_twrs_on_a_gaussian_bump():
    m = build_pq_pair(2.0, 3.0)
    bump = gaussian_bump()
    lhs = compose(m.R, m.S)
    rhs = compose(m.S, m.R).scaled(m.p ** 2)
    rng = random.Random(13)
    for _ in range(1000):
        pt = (rng.uniform(-4, 4), rng.uniform(-4, 4))
        u = lhs.apply(bump, pt)
        v = rhs.apply(bump, pt)
        assert abs(u - v) <= 1e-12 * max(1.0, abs(u), abs(v))


# -- bridge to the symbolic layer -----------------------------------------------


def test_pair_label_conventions():
    t = 0.25
    p, q = pq_from_pair_label(1 / t, t, "plain")
    assert (p * p, q * q) == pytest.approx((1 / t, t))
    p, q = pq_from_pair_label(1 / t, t, "squared")
    assert (p, q) == (1 / t, t)
    with pytest.raises(ValueError):
        pq_from_pair_label(1.0, 1.0, "cubed")


def test_symbolic_consistency_plain():
    for s in (0.3, 0.7, 1.1):
        result = check_symbolic_consistency(s, samples=300, seed=3)
        assert result.max_residual < 1e-12
        assert result.convention == "plain"


def test_symbolic_consistency_squared_convention():
    result = check_symbolic_consistency(0.3, convention="squared",
                                        samples=300, seed=3)
    assert result.max_residual < 1e-12


def test_identities_across_a_wider_parameter_sweep():
    for p, q in ((0.5, 10.0), (10.0, 0.5), (10.0, 10.0), (math.e, 10.0),
                 (1.0, 10.0)):
        m = build_pq_pair(p, q)
        assert check_def_mu2(m, samples=200, seed=17).max_residual < 1e-12
        assert check_QQstar(m, samples=200, seed=17).max_residual < 1e-12
        assert check_twrs(m, samples=200, seed=17).max_residual < 1e-12


def test_sampled_function_vector():
    from qmink.oplab import SampledFunction
    m = build_pq_pair(2.0, 3.0)
    pt = (0.25, -1.5)
    shifted = (pt[0] - m.a, pt[1])
    phi = SampledFunction({pt: 1.0 + 0.5j, shifted: -2.0})
    got = m.S.apply(phi, pt)
    assert got == pytest.approx(math.exp(pt[1]) * (-2.0))
    with pytest.raises(KeyError):
        m.R.apply(phi, pt)  # R needs a different shifted sample


def test_wrong_shift_in_the_model_is_caught():
    """A model built with the wrong shift must fail the commuting-pair
    identities: the numeric residuals are sensitive to the construction."""
    from qmink.oplab import PQModel
    p, q = 2.0, 3.0
    wrong_a = math.log(p * q)  # should be log(p / q)
    R = ShiftMultiplierOperator({(0.0, -math.log(p * q)): ExpLin(1.0, 0.0)})
    S = ShiftMultiplierOperator({(wrong_a, 0.0): ExpLin(0.0, 1.0)})
    broken = PQModel(p, q, wrong_a, -math.log(p * q), R, S)
    assert check_def_mu2(broken, samples=200, seed=5).max_residual > 1e-3
    assert check_twrs(broken, samples=200, seed=5).max_residual > 1e-3
