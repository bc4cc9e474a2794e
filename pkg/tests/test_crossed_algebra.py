"""
Tests for the crossed-product algebra: twisted product, involution, norms, P.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from src.crossed_algebra import (
    AlgebraElement,
    RotationParameter,
    Weight,
    adjoint,
    allclose,
    embed_torus_function,
    fourier_coefficient,
    multiply,
    norm_A,
    norm_l1,
    power,
    project_P,
    truncate_support,
    unit_element,
    vanishes_under_P,
    zero_element,
)
from src.datasets import random_element, random_torus_function
from src.errors import MismatchedParameters, PreconditionError
from src.torus_function import TorusFunction, multiply as multiply_functions, sup_norm, translate


def u(theta, weight, n):
    return unit_element(theta, weight, n)


class TestRotationParameter:

    def test_golden_convergents(self, theta):
        for pair in [(1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]:
            assert pair in theta.convergents
        for p, q in theta.convergents:
            assert abs(theta.theta - p / q) < 1.0 / q ** 2

    def test_denominators_include_one(self, theta):
        qs = theta.denominators()
        assert qs[0] == 1
        assert qs == sorted(set(qs))

    def test_range(self):
        with pytest.raises(PreconditionError):
            RotationParameter(theta=1.5)

    def test_bad_convergent(self):
        with pytest.raises(PreconditionError):
            RotationParameter(theta=0.618, convergents=((1, 3),))

    def test_from_strings(self, theta):
        parsed = RotationParameter.from_strings(theta.theta, ["1/2", "2/3", "3/5"])
        assert parsed.convergents == ((1, 2), (2, 3), (3, 5))


class TestWeight:

    def test_symmetric_and_submultiplicative(self):
        w = Weight(2.5)
        assert w(0) == 1.0
        for m in range(-6, 7):
            assert w(m) == w(-m)
            for n in range(-6, 7):
                assert w(m + n) <= w(m) * w(n) * (1 + 1e-15)

    def test_base_below_one(self):
        with pytest.raises(PreconditionError):
            Weight(0.5)


class TestUnits:

    def test_unit_is_identity(self, rng, theta, weight, make_element):
        F = make_element(rng)
        u0 = u(theta, weight, 0)
        assert allclose(u0 * F, F, 0.0)
        assert allclose(F * u0, F, 0.0)

    def test_norm_of_u3(self, theta, weight):
        assert norm_A(u(theta, weight, 3)) == (math.e ** 3, math.e ** 3)

    def test_shift_product(self, theta, weight):
        assert allclose(u(theta, weight, 1) * u(theta, weight, 2), u(theta, weight, 3), 0.0)

    @pytest.mark.parametrize("sigma", [1.0, 2.0, math.e])
    def test_norm_law(self, theta, sigma):
        w = Weight(sigma)
        for n in range(-8, 9):
            assert norm_A(u(theta, w, n)) == (sigma ** abs(n), sigma ** abs(n))
            assert norm_l1(u(theta, w, n)) == (1.0, 1.0)

    def test_sum_of_two_units(self, theta, weight):
        lower, upper = norm_A(u(theta, weight, 1) + u(theta, weight, -1))
        assert lower == upper == 2 * math.e

    def test_l1_of_u1_minus_2u0(self, theta, weight):
        assert norm_l1(u(theta, weight, 1) - u(theta, weight, 0).scale(2.0)) == (3.0, 3.0)


class TestEmbedding:

    def test_embed_one_is_unit(self, theta, weight):
        assert allclose(embed_torus_function(TorusFunction.constant(1.0), theta, weight), u(theta, weight, 0), 0.0)

    def test_norm_is_sup_norm(self, rng, theta, weight):
        phi = random_torus_function(rng, 5)
        assert norm_A(embed_torus_function(phi, theta, weight)) == sup_norm(phi)

    def test_multiplicative(self, rng, theta, weight):
        phi, psi = random_torus_function(rng, 4), random_torus_function(rng, 4)
        lhs = embed_torus_function(phi, theta, weight) * embed_torus_function(psi, theta, weight)
        assert allclose(lhs, embed_torus_function(multiply_functions(phi, psi), theta, weight), 1e-10)


class TestProduct:

    def test_covariance(self, rng, theta, weight):
        phi = random_torus_function(rng, 5)
        lhs = u(theta, weight, 1) * embed_torus_function(phi, theta, weight) * u(theta, weight, -1)
        rhs = embed_torus_function(translate(phi, theta.theta), theta, weight)
        assert allclose(lhs, rhs, 1e-12)

    def test_commutation_with_shift(self, rng, theta, weight):
        phi = random_torus_function(rng, 5)
        lhs = u(theta, weight, 1) * embed_torus_function(phi, theta, weight)
        rhs = embed_torus_function(translate(phi, theta.theta), theta, weight) * u(theta, weight, 1)
        assert allclose(lhs, rhs, 1e-12)

    def test_support_arithmetic(self, rng, make_element):
        F = make_element(rng, support=2)
        G = make_element(rng, support=1)
        sums = {m + n for m in F.support for n in G.support}
        assert set((F * G).support) <= sums

    def test_mismatched_parameters(self, theta):
        F = unit_element(theta, Weight(2.0), 1)
        G = unit_element(theta, Weight(math.e), 1)
        with pytest.raises(MismatchedParameters):
            multiply(F, G)

    def test_associativity(self, theta, weight):
        rng = np.random.default_rng(1)
        start = time.time()
        for _ in range(500):
            F, G, H = (random_element(rng, theta, weight, support=3, degree=4, decay=False) for _ in range(3))
            scale = norm_A(F)[1] * norm_A(G)[1] * norm_A(H)[1]
            deviation = norm_A((F * G) * H - F * (G * H))[1]
            assert deviation < 1e-9 * scale
        assert time.time() - start < 30

    def test_submultiplicative(self, rng, make_element):
        for _ in range(50):
            F, G = make_element(rng, decay=False), make_element(rng, decay=False)
            assert norm_A(F * G)[1] <= norm_A(F)[1] * norm_A(G)[1] * (1 + 1e-9)

    def test_triangle_inequality(self, rng, make_element):
        for _ in range(50):
            F, G = make_element(rng), make_element(rng)
            assert norm_A(F + G)[1] <= (norm_A(F)[1] + norm_A(G)[1]) * (1 + 1e-12)

    def test_power(self, theta, weight):
        assert allclose(power(u(theta, weight, 1), 4), u(theta, weight, 4), 0.0)
        assert allclose(power(u(theta, weight, 2), 0), u(theta, weight, 0), 0.0)


class TestAdjoint:

    def test_units(self, theta, weight):
        for n in range(-4, 5):
            assert allclose(adjoint(u(theta, weight, n)), u(theta, weight, -n), 0.0)

    def test_involution(self, rng, make_element):
        F = make_element(rng)
        assert allclose(adjoint(adjoint(F)), F, 1e-12)

    def test_anti_homomorphism(self, rng, make_element):
        for _ in range(10):
            F, G = make_element(rng), make_element(rng)
            assert allclose(adjoint(F * G), adjoint(G) * adjoint(F), 1e-10)

    def test_isometric(self, rng, make_element):
        for _ in range(50):
            F = make_element(rng)
            lo1, hi1 = norm_A(F)
            lo2, hi2 = norm_A(adjoint(F))
            assert abs(lo1 - lo2) <= 1e-12 * hi1
            assert abs(hi1 - hi2) <= 1e-12 * hi1


class TestNorms:

    @seed(21)
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_l1_below_A(self, entropy):
        theta, weight = RotationParameter.golden(), Weight(math.e)
        F = random_element(np.random.default_rng(entropy), theta, weight, decay=False)
        assert norm_l1(F)[1] <= norm_A(F)[1]
        assert norm_A(F)[0] <= norm_A(F)[1]

    def test_sigma_one_collapses(self, rng, theta):
        F = random_element(rng, theta, Weight(1.0))
        assert norm_A(F) == norm_l1(F)


class TestProjection:

    def test_units(self, theta, weight):
        assert project_P(u(theta, weight, 0)).equals(TorusFunction.constant(1.0))
        assert project_P(u(theta, weight, 3)).is_zero

    def test_embed_then_project(self, rng, theta, weight):
        phi = random_torus_function(rng, 6)
        assert project_P(embed_torus_function(phi, theta, weight)).equals(phi)

    def test_contraction(self, theta, weight):
        rng = np.random.default_rng(3)
        violations = 0
        for _ in range(1000):
            F = random_element(rng, theta, weight, support=3, degree=4, decay=False)
            if sup_norm(project_P(F))[1] > norm_A(F)[1]:
                violations += 1
        assert violations == 0

    def test_idempotent(self, rng, theta, weight, make_element):
        F = make_element(rng)
        P = project_P(F)
        assert project_P(embed_torus_function(P, theta, weight)).equals(P)

    def test_fourier_coefficients_recover_terms(self, rng, make_element):
        F = make_element(rng, support=2)
        for n in range(-2, 3):
            assert fourier_coefficient(F, n).allclose(F.term(n), 1e-12)

    def test_vanishes_under_P(self, rng, theta, weight, make_element):
        assert vanishes_under_P(zero_element(theta, weight))
        assert not vanishes_under_P(make_element(rng))
        assert not vanishes_under_P(u(theta, weight, 2))


class TestTruncation:

    def test_full_support(self, rng, make_element):
        F = make_element(rng, support=3)
        F1, tail = truncate_support(F, 5)
        assert tail == 0.0
        assert allclose(F1, F, 0.0)

    def test_single_dropped_term(self, theta, weight):
        F = u(theta, weight, 0) + u(theta, weight, 2)
        F1, tail = truncate_support(F, 1)
        assert allclose(F1, u(theta, weight, 0), 0.0)
        assert tail == math.e ** 2

    def test_tail_monotone(self, rng, make_element):
        F = make_element(rng, support=4)
        tails = [truncate_support(F, N)[1] for N in range(6)]
        assert all(b <= a for a, b in zip(tails, tails[1:]))

    def test_negative_cutoff(self, theta, weight):
        with pytest.raises(PreconditionError):
            truncate_support(u(theta, weight, 0), -1)
