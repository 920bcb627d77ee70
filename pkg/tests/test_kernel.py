"""Time-operator symbol, relaxation kernels, and convolution weights.

The Mittag-Leffler reference values were frozen from tools/ml_reference.py
(mpmath power series at 250 digits, cross-checked against the
exp(x^2)*erfc(-x) closed form for exponent one half).
"""

import math

import numpy as np
import pytest

from fracpos import kernel
from fracpos.errors import BranchCut, DomainError, InvalidParameter
from fracpos.kernel import FracOperator

ML_REFERENCE = {
    (0.5, -1.0): 0.427583576155807,
    (0.5, -4.0): 0.13699945762506139,
    (0.5, -16.0): 0.035193377824930838,
    (0.75, -1.0): 0.39310830281575406,
    (0.75, -5.0): 0.067923974332643942,
    (0.75, -16.0): 0.018401473802565136,
    (0.25, -2.0): 0.2981017936936576,
    (1.0, -2.0): 0.13533528323661269,
}

SINGLE = FracOperator.single_term(0.5)
MULTI = FracOperator.multi_term((0.5, 0.2))
DIST = FracOperator.distributed("exp")
ALL_OPS = (SINGLE, MULTI, DIST)


# operator construction


def test_labels():
    assert SINGLE.label == "single(0.5)"
    assert MULTI.label == "multi(0.5,0.2)"
    assert DIST.label == "dist(exp,64)"


def test_multi_term_default_weights_are_ones():
    assert MULTI.weights == (1.0, 1.0)


def test_constructor_rejections():
    with pytest.raises(InvalidParameter):
        FracOperator.single_term(1.5)
    with pytest.raises(InvalidParameter):
        FracOperator.single_term(0.0)
    with pytest.raises(InvalidParameter):
        FracOperator.multi_term((0.2, 0.5))  # must decrease
    with pytest.raises(InvalidParameter):
        FracOperator.multi_term((0.5, 0.5))  # strictly
    with pytest.raises(InvalidParameter):
        FracOperator.multi_term((0.5, 0.2), (2.0, 1.0))  # leading weight 1
    with pytest.raises(InvalidParameter):
        FracOperator.multi_term((0.5, 0.2), (1.0, -1.0))
    with pytest.raises(InvalidParameter):
        FracOperator.distributed("cauchy")
    with pytest.raises(InvalidParameter):
        FracOperator.distributed(lambda a: a)  # vanishes at zero
    with pytest.raises(InvalidParameter):
        FracOperator.distributed("exp", quad_order=8)


def test_heat_limit_exponent_allowed():
    op = FracOperator.single_term(1.0)
    assert kernel.char_fn(op, 3.0) == pytest.approx(3.0)


# symbol evaluation


def test_char_fn_single():
    assert kernel.char_fn(SINGLE, 4.0) == pytest.approx(2.0, rel=1e-14)


def test_char_fn_multi():
    assert kernel.char_fn(MULTI, 1.0) == pytest.approx(2.0, rel=1e-14)


def test_char_fn_distributed_closed_form():
    # int_0^1 exp(a) * e^a da = (e^2 - 1) / 2
    want = (math.e**2 - 1.0) / 2.0
    assert kernel.char_fn(DIST, math.e) == pytest.approx(want, rel=1e-12)


def test_char_fn_branch_cut():
    for op in ALL_OPS:
        with pytest.raises(BranchCut):
            kernel.char_fn(op, -1.0)
        with pytest.raises(BranchCut):
            kernel.char_fn(op, 0.0)


def test_char_fn_complex_argument():
    z = 1.0 + 2.0j
    val = kernel.char_fn(SINGLE, z)
    assert val == pytest.approx(z**0.5, rel=1e-14)


def test_contour_spec_validation():
    with pytest.raises(InvalidParameter):
        kernel.ContourSpec(node_count=15)
    with pytest.raises(InvalidParameter):
        kernel.ContourSpec(node_count=10)
    with pytest.raises(InvalidParameter):
        kernel.ContourSpec(angle=2.0)


# Mittag-Leffler


def test_mittag_leffler_reference_values():
    for (alpha, x), want in ML_REFERENCE.items():
        assert kernel.mittag_leffler(alpha, x) == pytest.approx(want, rel=1e-9)


def test_mittag_leffler_edges():
    assert kernel.mittag_leffler(0.5, 0.0) == 1.0
    assert kernel.mittag_leffler(1.0, -2.0) == pytest.approx(math.exp(-2.0))
    with pytest.raises(DomainError):
        kernel.mittag_leffler(1.5, -1.0)
    with pytest.raises(DomainError):
        kernel.mittag_leffler(0.5, 1.0)


# relaxation kernel


def test_u_lambda_matches_mittag_leffler():
    for (alpha, x), want in ML_REFERENCE.items():
        if alpha in (0.25, 1.0):
            continue
        op = FracOperator.single_term(alpha)
        # u_lambda(t) = E_alpha(-lambda t^alpha); take t = 1, lambda = -x
        assert kernel.u_lambda(op, -x, 1.0) == pytest.approx(want, rel=1e-8)


def test_u_lambda_time_scaling():
    # with lambda = 16, t = 0.25: x = -16 * 0.5 = -8; against t = 1, lam = 8
    a = kernel.u_lambda(SINGLE, 16.0, 0.25)
    b = kernel.u_lambda(SINGLE, 8.0, 1.0)
    assert a == pytest.approx(b, rel=1e-10)


def test_u_lambda_at_zero_time():
    for op in ALL_OPS:
        assert kernel.u_lambda(op, 7.0, 0.0) == 1.0
    np.testing.assert_array_equal(
        kernel.u_lambda_many(SINGLE, [1.0, 2.0], 0.0), [1.0, 1.0]
    )


def test_u_lambda_tiny_time_stays_near_one():
    for op in ALL_OPS:
        val = kernel.u_lambda(op, 1.0, 1e-12)
        assert abs(val - 1.0) < 2e-6


def test_u_lambda_monotone_and_bounded():
    grid = np.geomspace(1e-6, 1e3, 40)
    for op in ALL_OPS:
        for lam in (1.0, 10.0, 100.0):
            vals = kernel.u_lambda_many(op, np.full(grid.shape, lam), 1.0)
            # same lambda at one time must be constant across the array
            assert np.ptp(vals) < 1e-14
            curve = np.array([kernel.u_lambda(op, lam, t) for t in grid])
            assert np.all(curve > -1e-12)
            assert np.all(curve < 1.0 + 1e-12)
            assert np.all(np.diff(curve) < 1e-12)


def test_u_lambda_many_matches_scalar():
    lams = np.array([1.0, 16.0, 250.0])
    many = kernel.u_lambda_many(MULTI, lams, 0.3)
    each = [kernel.u_lambda(MULTI, lam, 0.3) for lam in lams]
    np.testing.assert_allclose(many, each, rtol=1e-13)


def test_u_lambda_rejections():
    with pytest.raises(InvalidParameter):
        kernel.u_lambda(SINGLE, -1.0, 1.0)
    with pytest.raises(DomainError):
        kernel.u_lambda(SINGLE, 1.0, -2.0)


# asymptotic scale functions


def test_beta0_single():
    want = 1e-2 / math.gamma(1.5)
    assert kernel.beta0(SINGLE, 1e-4) == pytest.approx(want, rel=1e-14)
    assert want == pytest.approx(0.011283791670955126, rel=1e-15)


def test_beta0_multi_uses_leading_exponent():
    assert kernel.beta0(MULTI, 0.01) == pytest.approx(
        kernel.beta0(SINGLE, 0.01), rel=1e-14
    )


def test_beta0_distributed():
    # t * log(1/t) / mu(1) at t = 1/e gives e^-2
    assert kernel.beta0(DIST, math.exp(-1.0)) == pytest.approx(
        math.exp(-2.0), rel=1e-14
    )
    with pytest.raises(DomainError):
        kernel.beta0(DIST, 1.0)
    with pytest.raises(DomainError):
        kernel.beta0(SINGLE, 0.0)


def test_beta_inf_single():
    want = 100.0 ** -0.5 / math.gamma(0.5)
    assert kernel.beta_inf(SINGLE, 100.0) == pytest.approx(want, rel=1e-14)
    assert want == pytest.approx(0.05641895835477563, rel=1e-15)


def test_beta_inf_multi_uses_trailing_exponent():
    want = 1e5 ** -0.2 / math.gamma(0.8)
    assert kernel.beta_inf(MULTI, 1e5) == pytest.approx(want, rel=1e-14)


def test_beta_inf_distributed():
    # mu(0) / log(t) at t = e^2 gives one half
    assert kernel.beta_inf(DIST, math.exp(2.0)) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(DomainError):
        kernel.beta_inf(DIST, 1.0)


def test_beta_inf_heat_limit_vanishes():
    assert kernel.beta_inf(FracOperator.single_term(1.0), 10.0) == 0.0


# convolution quadrature weights


def test_cq_weights_first_three():
    np.testing.assert_allclose(
        kernel.cq_weights(SINGLE, 1.0, 2), [1.0, -0.5, -0.125], rtol=1e-14
    )


def test_cq_weights_tau_scaling():
    w1 = kernel.cq_weights(SINGLE, 1.0, 5)
    w2 = kernel.cq_weights(SINGLE, 0.25, 5)
    np.testing.assert_allclose(w2, 2.0 * w1, rtol=1e-13)


def test_cq_weight_signs():
    for op in ALL_OPS:
        w = kernel.cq_weights(op, 0.7, 50)
        assert w[0] > 0.0
        assert np.all(w[1:] < 0.0)


def test_cq_leading_weight_is_symbol_value():
    for op in ALL_OPS:
        w = kernel.cq_weights(op, 0.2, 0)
        assert w[0] == pytest.approx(kernel.char_fn(op, 5.0), rel=1e-12)


def test_cq_partial_sums_positive():
    for op in ALL_OPS:
        for tau in (0.1, 1.0):
            sums = np.cumsum(kernel.cq_weights(op, tau, 1000))
            assert np.all(sums > 0.0)


def test_cq_partial_sums_single_term_closed_form():
    # sum_{j<=n} omega_j = -(n+1) omega_{n+1} / alpha
    for alpha in (0.5, 0.75):
        op = FracOperator.single_term(alpha)
        for tau in (0.1, 1.0):
            w = kernel.cq_weights(op, tau, 1001)
            sums = np.cumsum(w[:-1])
            n = np.arange(1001, dtype=float)
            np.testing.assert_allclose(sums, -(n + 1.0) * w[1:] / alpha, rtol=1e-12)


def test_cq_partial_sums_against_gamma_ratio():
    # independent form tau^-a * Gamma(n+1-a) / (Gamma(1-a) Gamma(n+1));
    # the recurrence weights carry ~n*eps roundoff that the cancellation in
    # the partial sums amplifies to a couple of 1e-12 by n = 1000
    alpha, tau = 0.5, 1.0
    sums = np.cumsum(kernel.cq_weights(FracOperator.single_term(alpha), tau, 1000))
    want = np.exp(
        [
            math.lgamma(k + 1.0 - alpha)
            - math.lgamma(1.0 - alpha)
            - math.lgamma(k + 1.0)
            for k in range(1001)
        ]
    )
    np.testing.assert_allclose(sums, want, rtol=5e-12)


def test_cq_generating_function():
    xi, tau, n = 0.3, 0.37, 400
    powers = xi ** np.arange(n + 1)
    for op in ALL_OPS:
        total = kernel.cq_weights(op, tau, n) @ powers
        assert total == pytest.approx(
            kernel.char_fn(op, (1.0 - xi) / tau), rel=1e-10
        )


def test_cq_rejections():
    with pytest.raises(InvalidParameter):
        kernel.cq_weights(SINGLE, 0.0, 4)
    with pytest.raises(InvalidParameter):
        kernel.cq_weights(SINGLE, 1.0, -1)


# discrete relaxation kernel


def test_r_scalar_first_step():
    # one backward Euler step: omega_0 / (omega_0 + lambda) with omega_0 = 1
    assert kernel.r_scalar(SINGLE, 16.0, 1.0, 1) == pytest.approx(1.0 / 17.0)


def test_r_scalar_many_matches_scalar():
    lams = np.array([2.0, 16.0, 90.0])
    many = kernel.r_scalar_many(MULTI, lams, 0.05, 20)
    each = [kernel.r_scalar(MULTI, lam, 0.05, 20) for lam in lams]
    np.testing.assert_allclose(many, each, rtol=1e-13)


def test_r_scalar_stays_in_unit_interval():
    for op in ALL_OPS:
        for lam in (1.0, 16.0, 400.0):
            for n in (1, 7, 60):
                val = kernel.r_scalar(op, lam, 0.1, n)
                assert 0.0 < val <= 1.0


def test_r_scalar_first_order_convergence():
    t, lam = 0.1, 16.0
    exact = kernel.u_lambda(SINGLE, lam, t)
    errors = [
        abs(kernel.r_scalar(SINGLE, lam, t / n, n) - exact) for n in (16, 32, 64)
    ]
    assert errors[0] / errors[1] == pytest.approx(2.0, rel=0.3)
    assert errors[1] / errors[2] == pytest.approx(2.0, rel=0.3)


def test_r_scalar_rejections():
    with pytest.raises(InvalidParameter):
        kernel.r_scalar(SINGLE, 16.0, 1.0, 0)
    with pytest.raises(InvalidParameter):
        kernel.r_scalar(SINGLE, -16.0, 1.0, 3)
