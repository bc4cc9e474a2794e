"""
Seeded random elements and demo generators.
"""

from typing import Optional

import numpy as np

from .crossed_algebra import (
    AlgebraElement,
    RotationParameter,
    Weight,
    embed_torus_function,
    unit_element,
)
from .torus_function import TorusFunction


def random_torus_function(rng: np.random.Generator, degree: int, scale: float = 1.0) -> TorusFunction:
    """Gaussian complex coefficients on frequencies -degree..degree."""
    size = 2 * degree + 1
    data = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * (scale / np.sqrt(2.0 * size))
    return TorusFunction.from_dense(-degree, data)


def random_element(
    rng: np.random.Generator,
    theta: RotationParameter,
    weight: Weight,
    support: int = 3,
    degree: int = 4,
    decay: bool = True,
) -> AlgebraElement:
    """
    Random element with terms on [-support, support].

    Args:
        rng: Seeded generator
        theta: Rotation parameter
        weight: Weight
        support: Largest |n|
        degree: Largest |k| of each term
        decay: Scale the n-th term by sigma^-|n| so every term has A-weight O(1)

    Returns:
        AlgebraElement
    """
    terms = {}
    for n in range(-support, support + 1):
        scale = 1.0 / weight(n) if decay else 1.0
        terms[n] = random_torus_function(rng, degree, scale)
    return AlgebraElement.from_terms(theta, weight, terms)


def random_real_function(rng: np.random.Generator, degree: int) -> TorusFunction:
    """Real-valued trigonometric polynomial (c_-k = conj c_k)."""
    phi = random_torus_function(rng, degree)
    return (phi + phi.conjugate()).scale(0.5)


def almost_mathieu_element(
    lam: float,
    theta: Optional[RotationParameter] = None,
    weight: Optional[Weight] = None,
) -> AlgebraElement:
    """
    u_1 + u_1* + lam (v + v*) with v = embed(exp(2 pi i z)).

    Self-adjoint; its section at z0 is the almost Mathieu operator
    (H x)_m = x_{m+1} + x_{m-1} + 2 lam cos(2 pi (z0 + m theta)) x_m.
    """
    theta = theta or RotationParameter.golden()
    weight = weight or Weight()
    cosine = TorusFunction.from_coeffs({-1: lam, 1: lam})
    return (
        unit_element(theta, weight, 1)
        + unit_element(theta, weight, -1)
        + embed_torus_function(cosine, theta, weight)
    )


def sine_plus_offset(offset: float = 0.1) -> TorusFunction:
    """sin(2 pi z) + offset."""
    return TorusFunction.from_coeffs({-1: 0.5j, 0: offset, 1: -0.5j})
