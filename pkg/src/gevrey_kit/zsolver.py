"""z-power-series solution at fixed numeric eps.

The coefficients of f(eps, z) = sum_{k>=1} f_k(eps) z^k satisfy a closed
triangular recursion: f_1 solves (eps*I - A01(eps)) f_1 = A10(eps), and each
later f_j solves (eps*j*I - A01(eps)) f_j = g_j, where g_j collects every
block (n, m) with 2 <= n + m <= j applied to the offset-1 convolutions of
the earlier coefficients.  Linear systems are solved by dense factorization
with an explicit residual check; eps*k landing on an eigenvalue of the
linear block is reported as a resonance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GevreyKitError, ResonanceError
from .problem import ProblemSpec
from .sector import RadiiReport
from .series import CONV_TAMING_A, compositions, multilinear_apply

_RESONANCE_RTOL = 1e-10
_RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class EvalResult:
    """Partial-sum value with its geometric tail estimate.

    `tail_valid` is False when no radii are attached or |z| >= kappa; the
    bound is then meaningless and reported as None.
    """

    value: np.ndarray
    tail_bound: float | None
    tail_valid: bool


@dataclass(frozen=True, eq=False)
class ZSolution:
    """Coefficients f_1..f_K at a fixed eps.

    ``coeffs[k-1]`` is the nu-vector f_k.  `residuals` records the relative
    residual of each linear solve.  `radii` optionally carries the majorant
    data used for tail bounds.
    """

    eps: complex
    coeffs: np.ndarray
    residuals: np.ndarray
    radii: RadiiReport | None = None

    @property
    def K(self) -> int:
        return self.coeffs.shape[0]

    @property
    def nu(self) -> int:
        return self.coeffs.shape[1]


def solve_coeffs_z(p: ProblemSpec, eps: complex, K: int,
                   radii: RadiiReport | None = None) -> ZSolution:
    """Run the coefficient recursion up to order K at numeric eps."""
    if K < 1:
        raise ValueError("K must be >= 1")
    p.require_normalized()
    nu = p.nu
    eps = complex(eps)
    a01_block = p.blocks[(0, 1)]
    a01 = a01_block.at_eps(eps)
    eye = np.eye(nu, dtype=np.complex128)

    tensors_at_eps = [(t.n, t.m, t.at_eps(eps)) for t in p.tensors]

    coeffs = np.zeros((K, nu), dtype=np.complex128)
    residuals = np.zeros(K)

    def solve_linear(k: int, rhs: np.ndarray) -> tuple[np.ndarray, float]:
        mat = eps * k * eye - a01
        svals = np.linalg.svd(mat, compute_uv=False)
        if float(svals[-1]) <= _RESONANCE_RTOL * max(1.0, float(svals[0])):
            raise ResonanceError(
                f"eps*k = {eps * k:.6g} collides with an eigenvalue of the linear "
                f"block at k = {k}", k=k, eps=eps)
        x = np.linalg.solve(mat, rhs)
        res = float(np.linalg.norm(mat @ x - rhs)) / (1.0 + float(np.linalg.norm(rhs)))
        if res > _RESIDUAL_RTOL:
            raise GevreyKitError(f"linear solve at k = {k} left residual {res:.3e}")
        return x, res

    t10 = p.tensor(1, 0)
    rhs1 = t10.at_eps(eps) if t10 is not None else np.zeros(nu, dtype=np.complex128)
    coeffs[0], residuals[0] = solve_linear(1, rhs1)

    for j in range(2, K + 1):
        g = np.zeros(nu, dtype=np.complex128)
        for n, m, entries in tensors_at_eps:
            if not 2 <= n + m <= j:
                continue
            if m == 0:
                if n == j:
                    g += entries
                continue
            if j - n < m:
                continue
            for comp in compositions(j - n, m, 1):
                g += multilinear_apply(entries, [coeffs[l - 1] for l in comp])
        coeffs[j - 1], residuals[j - 1] = solve_linear(j, g)

    return ZSolution(eps=eps, coeffs=coeffs, residuals=residuals, radii=radii)


def evaluate_f(sol: ZSolution, z: complex) -> EvalResult:
    """Partial sum sum_{k<=K} f_k z^k plus the closed-form tail estimate
    ``alpha*A*(|z|/kappa)^(K+1) / ((K+1)^2 (1 - |z|/kappa))`` when majorant
    radii are attached and |z| < kappa."""
    z = complex(z)
    acc = np.zeros(sol.nu, dtype=np.complex128)
    for k in range(sol.K, 0, -1):
        acc = acc * z + sol.coeffs[k - 1]
    acc = acc * z

    if sol.radii is None:
        return EvalResult(value=acc, tail_bound=None, tail_valid=False)
    q = abs(z) / sol.radii.kappa
    if q >= 1.0:
        return EvalResult(value=acc, tail_bound=None, tail_valid=False)
    kk = sol.K + 1
    bound = sol.radii.alpha * CONV_TAMING_A * q**kk / (kk**2 * (1.0 - q))
    return EvalResult(value=acc, tail_bound=bound, tail_valid=True)


def ode_residual_z(p: ProblemSpec, sol: ZSolution, z_grid) -> float:
    """Max over the grid of ||eps*z*f'(z) - F(eps, z, f(z))|| with f' from
    exact differentiation of the partial sum."""
    worst = 0.0
    for z in np.atleast_1d(np.asarray(z_grid, dtype=np.complex128)):
        val = np.zeros(sol.nu, dtype=np.complex128)
        dval = np.zeros(sol.nu, dtype=np.complex128)
        for k in range(sol.K, 0, -1):
            val = val * z + sol.coeffs[k - 1]
            dval = dval * z + k * sol.coeffs[k - 1]
        val = val * z
        dval_times_z = dval * z  # z * f'(z), since dval = sum k f_k z^(k-1)
        resid = sol.eps * dval_times_z - p.eval_F(sol.eps, z, val)
        worst = max(worst, float(np.linalg.norm(resid)))
    return worst
