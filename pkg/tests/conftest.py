import math
import random

import numpy as np
import pytest

from symindex import NormalFormDecomposition, PathIndexData, Scalar
from symindex.oracle import path_from_matrix_function, path_from_quadratic_hamiltonian


@pytest.fixture
def rng():
    return random.Random(20240811)


def rotation_path(theta_times_pi: float, tau: float = 1.0, steps: int = 2048):
    """gamma(t) = R(theta * t / tau) from the quadratic generator."""
    w = theta_times_pi * math.pi / tau
    return path_from_quadratic_hamiltonian(w * np.eye(2), tau, steps=steps)


def shear_path(b: int, tau: float = 1.0, steps: int = 2048):
    """gamma(t) ending at N1(1, b); generator diag(0, -b)."""
    return path_from_quadratic_hamiltonian(np.diag([0.0, -float(b)]), tau, steps=steps)


def n1_minus_path(b: int, tau: float = 1.0, steps: int = 2048):
    """gamma(t) = R(t pi) N1(1, -b t/tau), ending at N1(-1, b)."""

    def f(t):
        s = math.pi * t / tau
        c = -b * t / tau
        R = np.array([[math.cos(s), -math.sin(s)], [math.sin(s), math.cos(s)]])
        return R @ np.array([[1.0, c], [0.0, 1.0]])

    return path_from_matrix_function(f, tau, 1, steps=steps)


def rot_data(theta: Scalar, i1: int = 1) -> PathIndexData:
    return PathIndexData(NormalFormDecomposition(n=1, thetas=(theta,)), i1=i1)
