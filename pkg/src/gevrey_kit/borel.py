"""Numerical 1-summation of the formal eps-expansion at a fixed z.

Convention: for f-hat = sum_{i>=0} a_i eps^i the transform kept here is

    B(t) = sum_{i>=0} a_{i+1} t^i / i!,     value = a_0 + int_0^inf e^(-t/eps) B(t) dt,

which reproduces a_i eps^i termwise since int e^(-t/eps) t^i/i! dt = eps^(i+1).
Other standard normalizations differ from this one by bookkeeping only.

The transform is continued by rational (Pade) approximation from its Taylor
coefficients, solved from the Toeplitz system with a pivoted factorization;
near-singular systems trigger an order-reduction fallback.  The Laplace
integral runs along the ray of direction theta with adaptive Gauss-Legendre
panels and an explicit truncation-tail term in the error budget.  The
optimal-truncation partial sum is provided as the superasymptotic baseline
the summation has to beat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContinuationFailedError, PoleObstructionError

#: kernel decay target at the integration cutoff
_ETA = 1e-16
_SAFETY = 1.5
_POLE_SAFETY = 1e-3


@dataclass(frozen=True, eq=False)
class BorelData:
    """Transform coefficients at a fixed evaluation point.

    ``b_coeffs[i]`` is a_{i+1}/i! (shape (I, nu)); the constant a_0 rides
    along separately and is added back after the Laplace integral.
    """

    a0_value: np.ndarray
    b_coeffs: np.ndarray
    z: complex | None = None

    @property
    def I(self) -> int:
        return self.b_coeffs.shape[0]

    @property
    def nu(self) -> int:
        return self.b_coeffs.shape[1]


@dataclass(frozen=True, eq=False)
class PadeApproximant:
    """Componentwise [L/M] rational approximants with their poles.

    `orders` records the effective (L, M) per component after any fallback
    reduction; `degenerate` flags components where reduction occurred.
    """

    numerators: tuple[np.ndarray, ...]
    denominators: tuple[np.ndarray, ...]
    poles: tuple[np.ndarray, ...]
    requested: tuple[int, int]
    orders: tuple[tuple[int, int], ...]

    @property
    def degenerate(self) -> bool:
        return any(o != self.requested for o in self.orders)

    def all_poles(self) -> np.ndarray:
        if not any(p.size for p in self.poles):
            return np.zeros(0, dtype=np.complex128)
        return np.concatenate([p for p in self.poles if p.size])

    def eval(self, t: complex) -> np.ndarray:
        out = np.empty(len(self.numerators), dtype=np.complex128)
        for c, (num, den) in enumerate(zip(self.numerators, self.denominators)):
            pn = 0.0 + 0.0j
            for a in num[::-1]:
                pn = pn * t + a
            pd = 0.0 + 0.0j
            for a in den[::-1]:
                pd = pd * t + a
            out[c] = pn / pd
        return out


@dataclass(frozen=True, eq=False)
class SummationReport:
    """Outcome of one summation, with an honest error budget."""

    value: np.ndarray
    method: str
    quadrature_error_estimate: float
    pole_clearance: float
    t_max: float
    theta: float
    eps: complex
    I_star: int | None = None
    reference_error: float | None = None


def borel_transform(a_values: np.ndarray, z: complex | None = None) -> BorelData:
    """Factorially damped transform coefficients b_i = a_{i+1}/i!.

    `a_values` stacks the expansion coefficients a_0..a_I at the evaluation
    point, shape (I+1, nu) (a 1-d input is treated as scalar components).
    Requires I >= 4.
    """
    arr = np.asarray(a_values, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 5:
        raise ValueError("need coefficients a_0..a_I with I >= 4")
    I = arr.shape[0] - 1
    fact = np.array([math.gamma(i + 1.0) for i in range(I)])
    return BorelData(a0_value=arr[0].copy(), b_coeffs=arr[1:] / fact[:, None], z=z)


def _pade_component(c: np.ndarray, L: int, M: int,
                    rcond: float = 1e-12) -> tuple[np.ndarray, np.ndarray, int]:
    """[L/M] Pade of one coefficient sequence, reducing M on degeneracy.

    Returns (numerator, denominator, effective_M).  The denominator is
    normalized to q_0 = 1; the numerator is the truncated product (c * q).
    """
    for m_eff in range(M, 0, -1):
        if L + m_eff + 1 > c.size:
            continue
        rows = np.empty((m_eff, m_eff), dtype=np.complex128)
        rhs = np.empty(m_eff, dtype=np.complex128)
        for s in range(1, m_eff + 1):
            for j in range(1, m_eff + 1):
                idx = L + s - j
                rows[s - 1, j - 1] = c[idx] if idx >= 0 else 0.0
            rhs[s - 1] = -c[L + s]
        svals = np.linalg.svd(rows, compute_uv=False)
        if svals[-1] <= rcond * max(1.0, float(svals[0])):
            continue
        q = np.concatenate([[1.0 + 0.0j], np.linalg.solve(rows, rhs)])
        num = np.convolve(c[: L + m_eff + 1], q)[: L + 1]
        return num, q, m_eff
    # no stable rational block: fall back to the Taylor polynomial
    if L + 1 > c.size:
        raise ContinuationFailedError("not enough coefficients for any order")
    return c[: L + 1].copy(), np.array([1.0 + 0.0j]), 0


def pade_continue(b: BorelData, L: int, M: int, rcond: float = 1e-12) -> PadeApproximant:
    """Componentwise [L/M] rational continuation of the transform.

    Requires L + M + 1 <= I.  Components whose Toeplitz block is numerically
    rank-deficient fall back to smaller denominator degrees (ultimately the
    Taylor polynomial); the effective orders are reported.
    """
    if L < 0 or M < 0:
        raise ValueError("orders must be nonnegative")
    if L + M + 1 > b.I:
        raise ValueError(f"[{L}/{M}] needs {L + M + 1} coefficients, have {b.I}")
    nums, dens, poles, orders = [], [], [], []
    for comp in range(b.nu):
        c = b.b_coeffs[:, comp]
        num, den, m_eff = _pade_component(c, L, M, rcond)
        nums.append(num)
        dens.append(den)
        orders.append((L, m_eff))
        if m_eff:
            rts = np.roots(den[::-1])
            poles.append(rts[np.isfinite(rts)])
        else:
            poles.append(np.zeros(0, dtype=np.complex128))
    return PadeApproximant(numerators=tuple(nums), denominators=tuple(dens),
                           poles=tuple(poles), requested=(L, M), orders=tuple(orders))


def _segment_clearance(poles: np.ndarray, theta: float, t_max: float) -> float:
    """Min distance of the poles to the ray segment e^(i theta) [0, t_max]."""
    if poles.size == 0:
        return math.inf
    direction = complex(math.cos(theta), math.sin(theta))
    best = math.inf
    for pole in poles:
        proj = (pole * direction.conjugate()).real
        proj = min(max(proj, 0.0), t_max)
        best = min(best, abs(pole - proj * direction))
    return best


def _gauss_panels(func, t_max: float, panels: int, nodes: int = 24) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, t_max, panels + 1)
    total = None
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for xi, wi in zip(x, w):
            val = func(mid + half * xi) * (wi * half)
            total = val if total is None else total + val
    return total


def laplace_sum(b: BorelData, pade: PadeApproximant, eps: complex,
                theta: float = 0.0, pole_safety: float = _POLE_SAFETY) -> SummationReport:
    """Laplace integral of the continued transform along direction theta.

    The cutoff t_max = |eps| * ln(1/eta) * safety keeps the dropped tail at
    kernel level; its bound e^(-t_max/|eps|) * sup|P| joins the quadrature
    refinement difference in the reported error estimate.  A continuation
    pole within `pole_safety` of the integration segment raises
    :class:`PoleObstructionError` (non-summability in this direction, or
    not enough coefficients).
    """
    eps = complex(eps)
    direction = complex(math.cos(theta), math.sin(theta))
    if (direction / eps).real <= 0.0:
        raise ValueError("kernel does not decay: need Re(e^(i theta)/eps) > 0")
    t_max = abs(eps) * math.log(1.0 / _ETA) * _SAFETY
    poles = pade.all_poles()
    clearance = _segment_clearance(poles, theta, t_max)
    if clearance <= pole_safety:
        dists = [_segment_clearance(np.array([pl]), theta, t_max) for pl in poles]
        worst = complex(poles[int(np.argmin(dists))]) if poles.size else None
        raise PoleObstructionError(
            f"continuation pole within {clearance:.3e} of the theta = {theta:.4g} ray",
            pole=worst, clearance=clearance)

    rate = direction / eps

    def integrand(s: float) -> np.ndarray:
        t = direction * s
        return np.exp(-rate * s) * pade.eval(t) * direction

    panels = 4
    prev = _gauss_panels(integrand, t_max, panels)
    diff = math.inf
    while panels < 512:
        panels *= 2
        cur = _gauss_panels(integrand, t_max, panels)
        diff = float(np.abs(cur - prev).max())
        prev = cur
        if diff < 1e-12 or diff < 1e-10 * max(1.0, float(np.abs(cur).max())):
            break
    sup_p = max(float(np.abs(pade.eval(direction * s)).max())
                for s in np.linspace(0.0, t_max, 65))
    tail = math.exp(-t_max / abs(eps)) * sup_p
    value = b.a0_value + prev
    return SummationReport(value=value, method="borel_pade",
                           quadrature_error_estimate=diff + tail,
                           pole_clearance=clearance, t_max=t_max, theta=theta,
                           eps=eps)


def optimal_truncation_sum(a_values: np.ndarray, eps: complex) -> SummationReport:
    """Superasymptotic baseline: stop the partial sum just before the
    smallest term ||a_i|| |eps|^i."""
    arr = np.asarray(a_values, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] < 5:
        raise ValueError("need coefficients a_0..a_I with I >= 4")
    eps = complex(eps)
    sizes = np.linalg.norm(arr, axis=1) * np.abs(eps) ** np.arange(arr.shape[0])
    i_star = int(np.argmin(sizes))
    value = np.zeros(arr.shape[1], dtype=np.complex128)
    for i in range(i_star):
        value += arr[i] * eps**i
    return SummationReport(value=value, method="optimal_truncation",
                           quadrature_error_estimate=float(sizes[i_star]),
                           pole_clearance=math.inf, t_max=0.0, theta=0.0,
                           eps=eps, I_star=i_star)
