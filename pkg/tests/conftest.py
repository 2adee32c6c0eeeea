import numpy as np
import pytest

from gevrey_kit import CoeffTensor, ProblemSpec, builtin_riccati


@pytest.fixture(scope="session")
def riccati():
    return builtin_riccati()


@pytest.fixture(scope="session")
def perturbative():
    """Small feasible problem: eps*z*f' = -f + delta*z + delta*z*f**2."""
    delta = 1e-3
    return ProblemSpec(nu=1, rho=1.0, rho1=4.0, tensors=(
        CoeffTensor(0, 1, np.array([[[-1.0 + 0j]]])),
        CoeffTensor(1, 0, np.array([[delta + 0j]])),
        CoeffTensor(1, 2, np.array([[[[delta + 0j]]]])),
    ))


@pytest.fixture(scope="session")
def linear_problem():
    """eps*z*f' = -f + z, with closed form f = z/(1+eps)."""
    return ProblemSpec(nu=1, rho=1.0, rho1=4.0, tensors=(
        CoeffTensor(0, 1, np.array([[[-1.0 + 0j]]])),
        CoeffTensor(1, 0, np.array([[1.0 + 0j]])),
    ))
