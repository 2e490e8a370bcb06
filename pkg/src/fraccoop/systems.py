"""The three worked examples: fields, orders, initial states, weight vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .field import VectorField


def example1_field() -> VectorField:
    """(-3 w1^(3/2) + 2 w1 sqrt(w2), sqrt(w1) w2 - 4 w2^(3/2)); degree 3/2."""

    def f(w):
        s1, s2 = np.sqrt(w[0]), np.sqrt(w[1])
        return np.array([-3.0 * w[0] * s1 + 2.0 * w[0] * s2, s1 * w[1] - 4.0 * w[1] * s2])

    def jac(w):
        s1, s2 = np.sqrt(w[0]), np.sqrt(w[1])
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.array(
                [
                    [-4.5 * s1 + 2.0 * s2, w[0] / s2],
                    [w[1] / (2.0 * s1), s1 - 6.0 * s2],
                ]
            )

    return VectorField(2, f, jac, name="example1", clip_negative=True)


def example2_field() -> VectorField:
    """(-w1 + w2 + w3, |(w1, w3)| - 4 w2, w1 + |(w2, w3)| - 5 w3); degree 1."""

    def f(w):
        return np.array(
            [
                -w[0] + w[1] + w[2],
                np.hypot(w[0], w[2]) - 4.0 * w[1],
                w[0] + np.hypot(w[1], w[2]) - 5.0 * w[2],
            ]
        )

    def jac(w):
        r13 = np.hypot(w[0], w[2])
        r23 = np.hypot(w[1], w[2])
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.array(
                [
                    [-1.0, 1.0, 1.0],
                    [w[0] / r13, -4.0, w[2] / r13],
                    [1.0, w[1] / r23, w[2] / r23 - 5.0],
                ]
            )

    return VectorField(3, f, jac, name="example2", clip_negative=True)


EXAMPLE3_MATRIX = np.array([[-3.0, 1.0], [1.0, -1.0]])
EXAMPLE3_RATES = np.array([1.0, 1.0])


def linear_field(matrix, name: str = "linear") -> VectorField:
    A = np.array(matrix, dtype=float)
    return VectorField(A.shape[0], lambda w: A @ w, lambda w: A, name=name)


def example3_interaction() -> VectorField:
    return linear_field(EXAMPLE3_MATRIX, name="example3")


@dataclass(frozen=True)
class Example:
    number: int
    field: VectorField
    orders: tuple
    omega: tuple
    degree: float
    v: Optional[tuple] = None
    rates: Optional[tuple] = None
    equilibrium: Optional[tuple] = None

    @property
    def is_kolmogorov(self) -> bool:
        return self.rates is not None


EXAMPLES = {
    1: Example(1, example1_field(), (0.24, 0.55), (0.7, 0.2), 1.5, v=(1.0, 1.0)),
    2: Example(2, example2_field(), (0.45, 0.45, 0.45), (0.5, 0.3, 0.8), 1.0, v=(3.0, 1.0, 1.0)),
    3: Example(
        3,
        example3_interaction(),
        (0.4, 0.6),
        (0.2, 2.3),
        1.0,
        v=(1.0, 2.0),
        rates=(1.0, 1.0),
        equilibrium=(1.0, 2.0),
    ),
}

# field-file sources for the same systems
EXAMPLE_SOURCES = {
    1: "# example 1, degree 3/2\ndimension 2\nf1 = -3*sqrt(w1^3) + 2*w1*sqrt(w2)\nf2 = sqrt(w1)*w2 - 4*sqrt(w2^3)\n",
    2: (
        "# example 2, degree 1\ndimension 3\n"
        "f1 = -w1 + w2 + w3\n"
        "f2 = sqrt(w1^2 + w3^2) - 4*w2\n"
        "f3 = w1 + sqrt(w2^2 + w3^2) - 5*w3\n"
    ),
    3: "# example 3, Lotka-Volterra interaction\ndimension 2\nf1 = -3*w1 + w2\nf2 = w1 - w2\nrates = 1, 1\n",
}
