"""Ray condition on the spectrum, resolvent sampling, and majorant radii.

A sector S(theta, gamma; E) is the set of eps with |arg eps - theta| <
gamma/2 and 0 < |eps| < E.  The solvability of the coefficient recursions
rests on no eigenvalue ray of the linear block meeting the closed sector;
this module checks that condition, estimates the uniform resolvent constant
by sampling the sector boundary, and evaluates the majorant radii used by
the tail bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateSpectrumError, RadiiInfeasibleError,
                     SectorTooWideError)
from .problem import ProblemSpec
from .series import CONV_TAMING_A

_RESOLVENT_BLOWUP = 1e12


@dataclass(frozen=True)
class SectorSpec:
    """Direction theta, opening gamma (radians), radius limit."""

    theta: float
    gamma: float
    radius: float

    def __post_init__(self):
        if not 0.0 < self.gamma <= 2.0 * math.pi:
            raise ValueError("opening gamma must lie in (0, 2*pi]")
        if self.radius <= 0.0:
            raise ValueError("sector radius must be positive")


@dataclass(frozen=True)
class SiegelCheck:
    """Per-eigenvalue angular margins against a (theta, gamma) query."""

    ok: bool
    theta: float
    gamma: float
    margins: np.ndarray  # d_j - gamma/2, one per eigenvalue


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    args: np.ndarray
    theta: float
    gamma_max: float
    summable: bool


@dataclass(frozen=True)
class ResolventReport:
    """Sampled estimate of the uniform resolvent constant on a sector.

    `c` is the maximum operator norm of (eps*k*I - A01(eps))^{-1} over the
    sampled boundary grid; a practical stand-in for the uniform constant,
    not a certified bound.
    """

    c: float
    worst_k: int
    worst_eps: complex
    sector: SectorSpec
    k_max: int
    samples: int


@dataclass(frozen=True)
class RadiiReport:
    c: float
    a: float
    alpha: float
    kappa: float
    sigma: float
    rho: float
    C_bound: float
    limiting_block: tuple[int, int]
    A: float = CONV_TAMING_A


def spectrum(a01: np.ndarray) -> np.ndarray:
    """Eigenvalues of the dense linear block (dimension at most 8).

    Each eigenvalue is verified by |det(A - lambda I)| being small relative
    to the matrix scale.
    """
    a = np.asarray(a01, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    nu = a.shape[0]
    if nu > 8:
        raise ValueError("dimension above 8 is not supported")
    eigs = np.linalg.eigvals(a)
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    for lam in eigs:
        det = np.linalg.det(a - lam * np.eye(nu))
        if abs(det) > 1e-8 * scale**nu:
            raise ArithmeticError(f"eigenvalue verification failed at {lam}")
    return eigs


def _angular_distances(eigs: np.ndarray, theta: float) -> np.ndarray:
    eigs = np.atleast_1d(np.asarray(eigs, dtype=np.complex128))
    scale = float(np.abs(eigs).max())
    if scale == 0.0 or float(np.abs(eigs).min()) <= 1e-14 * max(1.0, scale):
        raise DegenerateSpectrumError("zero eigenvalue: ray condition undefined")
    diff = np.angle(eigs) - theta
    # wrap into [0, pi]: distance between rays
    wrapped = np.abs((diff + math.pi) % (2.0 * math.pi) - math.pi)
    return wrapped


def check_siegel(eigs: np.ndarray, theta: float, gamma: float) -> SiegelCheck:
    """True when every eigenvalue ray stays outside the closed sector,
    i.e. the wrapped angular distance of each arg(lambda_j) from theta
    exceeds gamma/2."""
    d = _angular_distances(eigs, theta)
    margins = d - gamma / 2.0
    return SiegelCheck(ok=bool(np.min(d) > gamma / 2.0), theta=theta, gamma=gamma,
                       margins=margins)


def gamma_max(eigs: np.ndarray, theta: float) -> SpectrumReport:
    """Supremum opening at direction theta, with the summability verdict
    gamma_max > pi."""
    eigs = np.atleast_1d(np.asarray(eigs, dtype=np.complex128))
    d = _angular_distances(eigs, theta)
    gmax = 2.0 * float(np.min(d))
    return SpectrumReport(eigenvalues=eigs, args=np.angle(eigs), theta=theta,
                          gamma_max=gmax, summable=gmax > math.pi)


def resolvent_bound(p: ProblemSpec, sector: SectorSpec, k_max: int = 50,
                    samples: int = 64) -> ResolventReport:
    """Sampled maximum of ||(eps*k*I - A01(eps))^{-1}|| over the sector
    boundary (both radial edges and the outer arc) and k = 1..k_max.

    Raises :class:`SectorTooWideError` when an eigenvalue ray meets the
    closed sector or a sampled resolvent exceeds 1e12.
    """
    if k_max < 1 or samples < 2:
        raise ValueError("need k_max >= 1 and samples >= 2")
    eigs = spectrum(p.a01(0.0))
    if not check_siegel(eigs, sector.theta, sector.gamma).ok:
        raise SectorTooWideError(
            "an eigenvalue ray meets the closed sector; shrink gamma or rotate theta")
    a01_block = p.blocks[(0, 1)]

    radii = sector.radius * np.arange(1, samples + 1) / samples
    arcs = sector.theta + sector.gamma * (np.arange(samples) / (samples - 1) - 0.5)
    eps_grid = np.concatenate([
        radii * np.exp(1j * (sector.theta - sector.gamma / 2.0)),
        radii * np.exp(1j * (sector.theta + sector.gamma / 2.0)),
        sector.radius * np.exp(1j * arcs),
    ])

    eye = np.eye(p.nu)
    best = 0.0
    worst_k, worst_eps = 1, eps_grid[0]
    for eps in eps_grid:
        a = a01_block.at_eps(eps)
        for k in range(1, k_max + 1):
            smin = float(np.linalg.svd(eps * k * eye - a, compute_uv=False)[-1])
            norm_inv = np.inf if smin == 0.0 else 1.0 / smin
            if norm_inv > _RESOLVENT_BLOWUP:
                raise SectorTooWideError(
                    f"resolvent blows up at eps={eps:.4g}, k={k}; "
                    "shrink gamma or the sector radius")
            if norm_inv > best:
                best, worst_k, worst_eps = norm_inv, k, complex(eps)
    return ResolventReport(c=best, worst_k=worst_k, worst_eps=worst_eps,
                           sector=sector, k_max=k_max, samples=samples)


def radius_estimates(p: ProblemSpec, c: float, C_bound: float | None = None) -> RadiiReport:
    """Majorant scale alpha and the radii kappa, sigma.

    For every present block (n, m) other than the linear (0,1) part, alpha
    must satisfy ``c * alpha_nm <= alpha * C_n / rho**(n+m)`` with
    ``C_n = A/n**2`` (C_0 = A).  The block norm bound alpha_nm is the smaller
    of the per-block coefficient bound on the closed eps-disc of radius rho
    and the Cauchy-type bound ``C_bound / (rho1**n * rho**m)``.  Feasibility
    requires alpha < rho/2; then

        kappa = rho * sqrt(1 - alpha / (rho - alpha)),
        sigma = kappa * (rho - alpha * A) / rho,

    which makes the majorant partial-sum identity
    ``alpha * A * kappa / (kappa - sigma) = rho`` hold exactly.
    """
    if c <= 0:
        raise ValueError("resolvent constant c must be positive")
    rho, rho1 = p.rho, p.rho1
    if C_bound is None:
        C_bound = sum(t.frobenius_bound(rho) * rho1**t.n * rho**t.m for t in p.tensors)

    alpha = 0.0
    limiting = (0, 1)
    for t in p.tensors:
        if (t.n, t.m) == (0, 1):
            continue
        c_n = CONV_TAMING_A if t.n == 0 else CONV_TAMING_A / t.n**2
        alpha_nm = min(t.frobenius_bound(rho), C_bound / (rho1**t.n * rho**t.m))
        need = c * alpha_nm * rho ** (t.n + t.m) / c_n
        if need > alpha:
            alpha = need
            limiting = (t.n, t.m)
    if alpha >= rho / 2.0:
        raise RadiiInfeasibleError(
            f"no admissible majorant scale: block {limiting} needs alpha = "
            f"{alpha:.4g} >= rho/2 = {rho / 2.0:.4g}; shrink rho",
            limiting_block=limiting, alpha_required=alpha)
    kappa = rho * math.sqrt(1.0 - alpha / (rho - alpha))
    sigma = kappa * (rho - alpha * CONV_TAMING_A) / rho
    return RadiiReport(c=c, a=1.0 / c, alpha=alpha, kappa=kappa, sigma=sigma,
                       rho=rho, C_bound=C_bound, limiting_block=limiting)
