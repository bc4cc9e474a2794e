"""
Tests for character conjugation, averaging plans and the approximation of P.
"""

import math
import time

import numpy as np
import pytest

from src.averaging import (
    AveragingPlan,
    average_toward_P,
    character_mean,
    choose_cutoff,
    conjugate_by_character,
    conjugate_by_unimodular,
    plan_average,
    reproduce_estimate,
)
from src.crossed_algebra import allclose, embed_torus_function, norm_A, unit_element
from src.datasets import random_element, random_torus_function
from src.errors import NoPlanFound, NotUnimodular, PreconditionError
from src.torus_function import TorusFunction


def direct_mean(q, M, theta, n):
    x = (q * n * theta) % 1.0
    j = np.arange(1, M + 1)
    return np.mean(np.exp(-2j * np.pi * np.mod(j * x, 1.0)))


class TestConjugation:

    def test_constant_one(self, rng, make_element):
        F = make_element(rng)
        assert allclose(conjugate_by_unimodular(F, TorusFunction.constant(1.0)), F, 1e-15)

    def test_shift_closed_form(self, theta, weight):
        F = unit_element(theta, weight, 1)
        generic = conjugate_by_unimodular(F, TorusFunction.character(1))
        expected = F.scale(np.exp(-2j * np.pi * theta.theta))
        assert allclose(generic, expected, 1e-12)

    def test_closed_form_matches_generic(self, rng, make_element):
        F = make_element(rng)
        for k in (1, 2, 5, -3):
            generic = conjugate_by_unimodular(F, TorusFunction.character(k))
            assert allclose(generic, conjugate_by_character(F, k), 1e-12)

    def test_multiplication_operators_fixed(self, rng, theta, weight):
        F = embed_torus_function(random_torus_function(rng, 4), theta, weight)
        assert allclose(conjugate_by_unimodular(F, TorusFunction.character(7)), F, 1e-15)

    @pytest.mark.parametrize("u", [
        TorusFunction.constant(2.0),
        TorusFunction.from_coeffs({-1: 0.5, 1: 0.5}),
        TorusFunction.zero(),
    ])
    def test_not_unimodular(self, rng, make_element, u):
        with pytest.raises(NotUnimodular):
            conjugate_by_unimodular(make_element(rng), u)


class TestCharacterMean:

    def test_zero_term(self, theta):
        assert character_mean(3, 1000, theta.theta, 0) == 1.0

    def test_matches_direct_sum(self, theta):
        for q, M, n in [(1, 7, 1), (2, 64, 3), (5, 1000, -2), (13, 70_000, 4)]:
            assert abs(character_mean(q, M, theta.theta, n) - direct_mean(q, M, theta.theta, n)) < 1e-12

    def test_non_increasing_along_doubling(self, theta):
        for q in theta.denominators()[:4]:
            for n in range(1, 6):
                values = [abs(character_mean(q, M, theta.theta, n)) for M in (3, 6, 12, 24, 48, 96)]
                assert all(b <= a + 1e-13 for a, b in zip(values, values[1:]))


class TestPlan:

    def test_nothing_to_kill(self, theta):
        plan = plan_average(0, 1e-3, theta)
        assert plan.M == 1
        assert plan.predicted_error == 0.0

    def test_golden_n3(self, theta):
        plan = plan_average(3, 1e-3, theta)
        assert plan.predicted_error <= 1e-3
        assert plan.q in theta.denominators()
        assert plan.M & (plan.M - 1) == 0
        direct = max(abs(direct_mean(plan.q, plan.M, theta.theta, n)) for n in range(1, 4))
        assert abs(direct - plan.predicted_error) < 1e-12
        assert plan.frequencies[:3] == [plan.q, 2 * plan.q, 3 * plan.q]

    def test_zero_epsilon(self, theta):
        with pytest.raises(NoPlanFound):
            plan_average(3, 0.0, theta)

    def test_ceiling(self, theta):
        with pytest.raises(NoPlanFound):
            plan_average(5, 1e-9, theta, ceiling=1024)

    def test_negative_cutoff(self, theta):
        with pytest.raises(PreconditionError):
            plan_average(-1, 1e-3, theta)


class TestAverage:

    def test_unit_fixed(self, theta, weight):
        u0 = unit_element(theta, weight, 0)
        avg, bound = average_toward_P(u0, plan_average(3, 1e-3, theta))
        assert allclose(avg, u0, 0.0)
        assert bound == 0.0

    def test_shift_damped(self, theta, weight):
        u1 = unit_element(theta, weight, 1)
        plan = plan_average(1, 1e-4, theta)
        avg, _ = average_toward_P(u1, plan)
        assert norm_A(avg)[1] <= math.e * plan.predicted_error * (1 + 1e-12)

    def test_measured_within_bound(self, theta, weight):
        rng = np.random.default_rng(5)
        plan = plan_average(3, 1e-3, theta)
        for _ in range(100):
            F = random_element(rng, theta, weight, support=3, degree=4)
            avg, bound = average_toward_P(F, plan)
            assert avg.term(0).max_coefficient_distance(F.term(0)) <= 1e-14
            measured = norm_A(embed_torus_function(F.term(0), theta, weight) - avg)[1]
            assert measured <= bound
            assert norm_A(avg)[1] <= norm_A(F)[1] + 1e-9

    def test_explicit_matches_closed_form(self, rng, make_element, theta):
        F = make_element(rng, support=2)
        plan = plan_average(2, 0.05, theta)
        assert plan.M <= 4096
        fast, bound_fast = average_toward_P(F, plan)
        slow, bound_slow = average_toward_P(F, plan, explicit=True)
        assert bound_fast == bound_slow
        assert allclose(fast, slow, 1e-10 * max(1.0, norm_A(F)[1]))
        assert slow.term(0).max_coefficient_distance(F.term(0)) <= 1e-12

    def test_explicit_limit(self, rng, make_element, theta):
        plan = AveragingPlan(N=1, epsilon=1e-6, M=10_000, q=1, theta=theta.theta, predicted_error=1e-6)
        with pytest.raises(PreconditionError):
            average_toward_P(make_element(rng), plan, explicit=True)

    def test_plan_for_other_theta(self, rng, make_element):
        plan = AveragingPlan(N=1, epsilon=0.1, M=4, q=1, theta=0.3, predicted_error=0.1)
        with pytest.raises(PreconditionError):
            average_toward_P(make_element(rng), plan)


class TestEstimate:

    def test_cutoff(self, theta, weight):
        F = unit_element(theta, weight, 0) + unit_element(theta, weight, 4).scale(1e-6)
        N, tail = choose_cutoff(F, 1e-3)
        assert N == 0
        assert tail == pytest.approx(1e-6 * math.e ** 4)

    def test_unit(self, theta, weight):
        report = reproduce_estimate(unit_element(theta, weight, 0), 1e-3)
        assert report.measured == 0.0
        assert report.passed

    def test_zero_epsilon(self, theta, weight):
        with pytest.raises(NoPlanFound):
            reproduce_estimate(unit_element(theta, weight, 0), 0.0)

    @pytest.mark.parametrize("epsilon", [1e-2, 1e-3])
    def test_reproduces_two_epsilon(self, theta, weight, epsilon):
        rng = np.random.default_rng(99)
        start = time.time()
        for _ in range(50):
            F = random_element(rng, theta, weight, support=5, degree=4)
            report = reproduce_estimate(F, epsilon)
            assert report.measured <= report.error_bound
            assert report.measured < 2 * epsilon
            assert report.plan.M >= 1
        assert time.time() - start < 60
