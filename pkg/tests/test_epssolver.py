from fractions import Fraction

import numpy as np
import pytest

from gevrey_kit import (
    CoeffTensor,
    ProblemSpec,
    assemble_B,
    build_T0,
    solve_a0,
    solve_ai,
    solve_coeffs_z,
    solve_eps_expansion,
)
from gevrey_kit.errors import InsufficientOrderError


def half_binomial(k):
    """binom(1/2, k) as an exact fraction."""
    b = Fraction(1)
    for j in range(k):
        b = b * (Fraction(1, 2) - j) / (j + 1)
    return b


def a0_exact_coeff(k):
    """[z^k] of 1/2 - 1/(1 + sqrt(1+4z)) = -binom(1/2, k+1) 4^k for k >= 1."""
    return float(-half_binomial(k + 1) * Fraction(4) ** k)


def sqrt1p4z_coeff(k):
    """[z^k] of sqrt(1+4z)."""
    return float(half_binomial(k) * Fraction(4) ** k)


class TestA0:
    def test_riccati_against_binomial_oracle(self, riccati):
        a0 = solve_a0(riccati, 25)
        assert a0.coeff_vec(0)[0] == 0.0
        for k in range(1, 26):
            exact = a0_exact_coeff(k)
            got = a0.coeff_vec(k)[0].real
            assert abs(got - exact) <= 1e-12 * max(1.0, abs(exact)), k

    def test_riccati_first_terms(self, riccati):
        a0 = solve_a0(riccati, 3)
        np.testing.assert_allclose(a0.coeffs[0, :3].real, [0.0, 0.5, -1.0], atol=1e-14)

    def test_brute_force_substitution(self, riccati):
        # -(1+2z) a0 + z/2 + 2 z a0^2 must vanish through the truncation
        K = 18
        a0 = solve_a0(riccati, K).coeffs[0].real
        quad = np.convolve(a0, a0)[: K + 1]
        resid = -a0 - 2 * np.concatenate([[0], a0[:-1]])
        resid[1] += 0.5
        resid += 2 * np.concatenate([[0], quad[:-1]])
        assert np.abs(resid).max() < 1e-12

    def test_linear_problem(self, linear_problem):
        a0 = solve_a0(linear_problem, 8)
        expect = np.zeros(9)
        expect[1] = 1.0
        np.testing.assert_allclose(a0.coeffs[0].real, expect, atol=1e-14)

    def test_zero_forcing(self):
        p = ProblemSpec(nu=1, rho=1.0, rho1=4.0, tensors=(
            CoeffTensor(0, 1, np.array([[[-1.0 + 0j]]])),
            CoeffTensor(2, 2, np.array([[[[1.0 + 0j]]]])),
        ))
        a0 = solve_a0(p, 10)
        assert np.abs(a0.coeffs).max() == 0.0

    def test_agrees_with_z_solver_at_zero(self, riccati):
        a0 = solve_a0(riccati, 20)
        sol = solve_coeffs_z(riccati, 0.0, 20)
        np.testing.assert_allclose(a0.coeffs[:, 1:].T, sol.coeffs, atol=1e-12)


class TestT0:
    def test_riccati_is_minus_sqrt(self, riccati):
        K = 12
        a0 = solve_a0(riccati, K)
        t0, t0_inv = build_T0(riccati, a0, K)
        for k in range(K + 1):
            assert t0.coeffs[0, 0, k].real == pytest.approx(
                -sqrt1p4z_coeff(k), abs=1e-10 * 4**k)
        # independent identity: T0^2 = 1 + 4z
        sq = t0.matmul(t0).coeffs[0, 0].real
        expect = np.zeros(K + 1)
        expect[0], expect[1] = 1.0, 4.0
        np.testing.assert_allclose(sq, expect, atol=1e-9)

    def test_linear_block_only(self, linear_problem):
        a0 = solve_a0(linear_problem, 6)
        t0, _ = build_T0(linear_problem, a0, 6)
        np.testing.assert_allclose(t0.coeffs[0, 0].real, [-1, 0, 0, 0, 0, 0, 0],
                                   atol=1e-14)

    def test_zero_a0_reduces_to_B01(self, riccati):
        from gevrey_kit.series import VecSeries

        zero = VecSeries(np.zeros((1, 7), dtype=complex), "z")
        t0, _ = build_T0(riccati, zero, 6)
        np.testing.assert_allclose(t0.coeffs[0, 0].real, [-1, -2, 0, 0, 0, 0, 0],
                                   atol=1e-14)


class TestAi:
    def test_riccati_a1_closed_form(self, riccati):
        # a1 = -2z / ((1+4z) (1+sqrt(1+4z))^2); series oracle with fractions
        K = 10
        sol = solve_eps_expansion(riccati, 1, K + 1)
        a1 = sol.a[1].coeffs[0].real

        # oracle built from exact binomials: numerator -2z, denominator
        # (1+4z)*(1+sqrt(1+4z))^2 inverted term by term with fractions
        sq = [half_binomial(k) * Fraction(4) ** k for k in range(K + 2)]
        one_plus = [Fraction(1) + sq[0]] + sq[1:]
        dsq = np.convolve([float(x) for x in one_plus],
                          [float(x) for x in one_plus])[: K + 2]
        den = np.convolve(dsq, [1.0, 4.0])[: K + 2]
        num = np.zeros(K + 2)
        num[1] = -2.0
        # invert den (den[0] = 4) and multiply
        inv = np.zeros(K + 2)
        inv[0] = 1.0 / den[0]
        for k in range(1, K + 2):
            inv[k] = -sum(den[j] * inv[k - j] for j in range(1, k + 1)) / den[0]
        expect = np.convolve(num, inv)[: K + 1]
        np.testing.assert_allclose(a1[: K + 1], expect, rtol=1e-9, atol=1e-12)
        assert a1[1] == pytest.approx(-0.5)

    def test_a1_matches_eps_derivative_of_f1(self, riccati):
        # d/deps [1/(2(1+eps))] at 0 = -1/2 = [z^1] a_1
        sol = solve_eps_expansion(riccati, 1, 8)
        assert sol.a[1].coeff_vec(1)[0].real == pytest.approx(-0.5)

    def test_linear_problem_alternating(self, linear_problem):
        # f = z/(1+eps): a_i = (-1)^i z exactly
        sol = solve_eps_expansion(linear_problem, 6, 14)
        for i, ai in enumerate(sol.a):
            expect = np.zeros(ai.order + 1)
            expect[1] = (-1.0) ** i
            np.testing.assert_allclose(ai.coeffs[0].real, expect, atol=1e-12)

    def test_nonlinear_cross_terms_present(self, riccati):
        # [z^3] a_2 = 59 = [eps^2] f_3; off by the quadratic block's
        # (1,1)-composition (one half here) if that cross term is dropped
        sol = solve_eps_expansion(riccati, 2, 10)
        assert sol.a[2].coeff_vec(3)[0].real == pytest.approx(59.0)

    def test_delivered_orders(self, riccati):
        K = 12
        sol = solve_eps_expansion(riccati, 4, K)
        for i, ai in enumerate(sol.a):
            assert ai.order == (K if i == 0 else K - i)

    def test_insufficient_order(self, riccati):
        with pytest.raises(InsufficientOrderError):
            solve_eps_expansion(riccati, 12, 12)
        a0 = solve_a0(riccati, 5)
        with pytest.raises(InsufficientOrderError):
            solve_ai(riccati, [a0] + [None] * 4, 5, 5)

    def test_residuals_verified(self, riccati):
        sol = solve_eps_expansion(riccati, 8, 30)
        assert max(sol.residuals) <= 1e-10

    def test_zero_problem_stays_zero(self):
        p = ProblemSpec(nu=1, rho=1.0, rho1=4.0, tensors=(
            CoeffTensor(0, 1, np.array([[[-1.0 + 0j]]])),))
        sol = solve_eps_expansion(p, 5, 12)
        for ai in sol.a:
            assert np.abs(ai.coeffs).max() == 0.0


class TestContractionEstimate:
    def test_riccati_small_disc(self, riccati):
        from gevrey_kit import contraction_estimate

        a0 = solve_a0(riccati, 30)
        b = contraction_estimate(riccati, a0, kappa=0.05, c=1.5)
        assert 0.0 < b < 1.0  # the linearized factor stays a contraction

    def test_grows_with_radius(self, riccati):
        from gevrey_kit import contraction_estimate

        a0 = solve_a0(riccati, 40)
        b_small = contraction_estimate(riccati, a0, kappa=0.02, c=1.5)
        b_large = contraction_estimate(riccati, a0, kappa=0.1, c=1.5)
        assert b_small < b_large


class TestTwoDimensional:
    def test_diagonal_system_matches_scalars(self):
        # decoupled pair of linear problems solved as one 2d system
        a01 = np.zeros((2, 2, 1), dtype=complex)
        a01[0, 0, 0], a01[1, 1, 0] = -1.0, -2.0
        frc = np.zeros((2, 1), dtype=complex)
        frc[0, 0], frc[1, 0] = 1.0, 3.0
        p = ProblemSpec(nu=2, rho=1.0, rho1=4.0, tensors=(
            CoeffTensor(0, 1, a01), CoeffTensor(1, 0, frc)))
        sol = solve_eps_expansion(p, 4, 10)
        # component closed forms: z/(1+eps) and (3/2) z/(1+eps/2)
        for i, ai in enumerate(sol.a):
            assert ai.coeff_vec(1)[0].real == pytest.approx((-1.0) ** i)
            assert ai.coeff_vec(1)[1].real == pytest.approx(1.5 * (-0.5) ** i)
        zsol = solve_coeffs_z(p, 0.3, 6)
        assert zsol.coeffs[0, 0] == pytest.approx(1.0 / 1.3)
        assert zsol.coeffs[0, 1] == pytest.approx(3.0 / 2.3)
