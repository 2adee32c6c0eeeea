"""Formal eps-expansion: a_0 from the algebraic limit equation, then the
linear recursion for a_i, all as truncated z-series.

a_0 solves F(0, z, a_0(z)) = 0 with a_0(0) = 0 by a triangular coefficient
recursion.  For i >= 1 the coefficient of eps^i in the equation isolates

    T_0(z) a_i = z a'_{i-1}(z) - R_i(z),

where T_0 collects the f-derivative of the eps-constant part of F along
a_0, and R_i gathers every remaining contribution of the blocks graded by
eps-power: blocks with eps-power n >= 1 convolved (offset 0) over
(a_0, ..., a_{i-n}), plus the eps-constant nonlinear blocks applied to
compositions of i that involve at least two indices below i.  Dropping the
latter cross terms is the classic mistake; the double-series consistency
test against the fixed-eps solver pins them down.

Each a_i is delivered to z-order K_z - i: one order is reserved per
eps-step, and the honest order is recorded on the returned series.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GevreyKitError, InsufficientOrderError
from .problem import BTensor, ProblemSpec, assemble_B
from .series import (MatSeries, VecSeries, compositions, mat_series_inverse,
                     multilinear_apply)

_RESIDUAL_RTOL = 1e-10


def _pmul_trunc(a: np.ndarray, b: np.ndarray, K: int) -> np.ndarray:
    out = np.convolve(a[: K + 1], b[: K + 1])[: K + 1]
    if out.size < K + 1:
        out = np.concatenate([out, np.zeros(K + 1 - out.size, dtype=np.complex128)])
    return out


def _apply_tensor_series(entries: np.ndarray, factors: list[np.ndarray],
                         K: int) -> np.ndarray:
    """Contract a dense tensor with z-polynomial entries against m vector
    series, truncating every product at order K.

    `entries` has shape (nu,)*(m+1) + (Dz+1,); each factor has shape
    (nu, L_j+1).  Returns (nu, K+1).
    """
    m = entries.ndim - 2
    nu = entries.shape[0]
    out = np.zeros((nu, K + 1), dtype=np.complex128)
    for idx in np.ndindex(*(nu,) * (m + 1)):
        i, rest = idx[0], idx[1:]
        poly = entries[idx]
        if not np.any(poly):
            continue
        term = poly[: K + 1]
        if term.size < K + 1:
            term = np.concatenate([term, np.zeros(K + 1 - term.size, dtype=np.complex128)])
        for slot, comp in enumerate(rest):
            term = _pmul_trunc(term, factors[slot][comp], K)
        out[i] += term
    return out


@dataclass(frozen=True, eq=False)
class EpsFormalSolution:
    """Coefficients a_0..a_I of the formal eps-expansion at truncation K_z.

    ``a[i]`` is a z-VecSeries delivered to order K_z - i.  T0_inv is cached
    since every step reuses it.
    """

    a: tuple[VecSeries, ...]
    T0: MatSeries
    T0_inv: MatSeries
    K_z: int
    residuals: tuple[float, ...]

    @property
    def I(self) -> int:
        return len(self.a) - 1

    def values_at(self, z: complex) -> np.ndarray:
        """Stack of a_i(z) values, shape (I+1, nu)."""
        return np.stack([ai.evaluate(z) for ai in self.a])


def solve_a0(p: ProblemSpec, K_z: int) -> VecSeries:
    """Power-series solution of F(0, z, a_0(z)) = 0 with a_0(0) = 0.

    Triangular recursion on the coefficients: the linear block at eps = 0
    is solved against the z-forcing plus all convolution contributions of
    the earlier coefficients (offset-1, so everything is strictly earlier).
    """
    if K_z < 1:
        raise ValueError("K_z must be >= 1")
    p.require_normalized()
    nu = p.nu
    a01 = p.a01(0.0)
    tensors0 = [(t.n, t.m, t.at_eps(0.0)) for t in p.tensors]

    a0 = np.zeros((nu, K_z + 1), dtype=np.complex128)
    for k in range(1, K_z + 1):
        rhs = np.zeros(nu, dtype=np.complex128)
        for n, m, entries in tensors0:
            if (n, m) == (0, 1):
                continue
            if m == 0:
                if n == k:
                    rhs += entries
                continue
            if k - n < m:
                continue
            for comp in compositions(k - n, m, 1):
                rhs += multilinear_apply(entries, [a0[:, l] for l in comp])
        a0[:, k] = -np.linalg.solve(a01, rhs)
    return VecSeries(a0, var="z")


def build_T0(p: ProblemSpec, a0: VecSeries, K_z: int) -> tuple[MatSeries, MatSeries]:
    """Assemble T_0(z) = B_{0,1}(z) + sum_{m>=2} m B_{0,m}(z) a_0^{m-1} and
    its series inverse.

    For non-symmetric blocks the derivative sum runs over the free slot, so
    entry (i, i') collects each block with one slot left open and the others
    contracted with a_0.
    """
    p.require_normalized()
    nu = p.nu
    b_map = assemble_B(p)
    t = np.zeros((nu, nu, K_z + 1), dtype=np.complex128)
    for (j, m), block in b_map.items():
        if j != 0 or m < 1:
            continue
        for free in range(m):
            # contract every slot except `free` with a_0
            for idx in np.ndindex(*(nu,) * (m + 1)):
                i, rest = idx[0], idx[1:]
                poly = block.entries[idx]
                if not np.any(poly):
                    continue
                term = poly[: K_z + 1]
                if term.size < K_z + 1:
                    term = np.concatenate(
                        [term, np.zeros(K_z + 1 - term.size, dtype=np.complex128)])
                for slot, comp in enumerate(rest):
                    if slot == free:
                        continue
                    term = _pmul_trunc(term, a0.coeffs[comp], K_z)
                t[i, rest[free]] += term
    t0 = MatSeries(t, var="z")
    return t0, mat_series_inverse(t0)


def contraction_estimate(p: ProblemSpec, a0: VecSeries, kappa: float, c: float,
                         n_samples: int = 33) -> float:
    """Sampled estimate of c * (||B01(z) - B01(0)|| + sum_m m ||B0m(z)||
    ||a_0(z)||^{m-1}) on |z| <= kappa, the contraction quantity controlling
    invertibility of T_0 on that disc (< 1 means safely invertible)."""
    b_map = assemble_B(p)
    worst = 0.0
    for s in range(1, n_samples + 1):
        z = kappa * s / n_samples
        total = 0.0
        a0z = float(np.linalg.norm(a0.evaluate(z)))
        for (j, m), block in b_map.items():
            if j != 0 or m < 1:
                continue
            flat = block.entries.reshape(-1, block.entries.shape[-1])
            vals = flat @ (z ** np.arange(flat.shape[1]))
            if m == 1:
                b01z = vals.reshape(p.nu, p.nu)
                const = flat[:, 0].reshape(p.nu, p.nu)
                total += float(np.linalg.norm(b01z - const, 2))
            else:
                total += m * float(np.linalg.norm(vals)) * a0z ** (m - 1)
        worst = max(worst, c * total)
    return worst


def _assemble_Ri(b_map: dict[tuple[int, int], BTensor], nu: int, i: int,
                 a_coeffs: list[np.ndarray], K: int) -> np.ndarray:
    """Everything on the right-hand side of the order-i equation except the
    T_0 a_i term and z a'_{i-1}.

    Blocks with eps-power j >= 1 contribute their full offset-0 convolution
    at deficit i - j.  The eps-constant blocks (j = 0, arity >= 2)
    contribute the compositions of i avoiding the index i itself; the
    composition with a bare a_i in one slot is exactly the T_0 term.
    """
    r = np.zeros((nu, K + 1), dtype=np.complex128)
    for (j, m), block in b_map.items():
        if j > i:
            continue
        deficit = i - j
        if m == 0:
            if deficit == 0:
                poly = block.entries[..., : K + 1]
                r[:, : poly.shape[-1]] += poly
            continue
        for comp in compositions(deficit, m, 0):
            if j == 0 and max(comp) == i:
                continue
            r += _apply_tensor_series(block.entries, [a_coeffs[l] for l in comp], K)
    return r


def solve_ai(p: ProblemSpec, a_so_far: list[VecSeries], i: int, K_z: int,
             T0_inv: MatSeries | None = None) -> VecSeries:
    """Next coefficient a_i = T0^{-1} (z a'_{i-1} - R_i), delivered to
    z-order K_z - i."""
    if i < 1 or len(a_so_far) != i:
        raise ValueError("need exactly the coefficients a_0..a_{i-1}")
    target = K_z - i
    if target < 1:
        raise InsufficientOrderError(
            f"truncation K_z = {K_z} cannot support order-{i} coefficients")
    if T0_inv is None:
        _, T0_inv = build_T0(p, a_so_far[0], K_z)
    b_map = assemble_B(p)
    a_coeffs = [ai.coeffs for ai in a_so_far]
    za_prime = a_so_far[i - 1].derivative().shift_up()
    rhs = za_prime.coeffs[:, : target + 1].copy()
    rhs -= _assemble_Ri(b_map, p.nu, i, a_coeffs, target)
    out = T0_inv.apply_vec(VecSeries(rhs, var="z"))
    return out.truncate(target)


def solve_eps_expansion(p: ProblemSpec, I: int, K_z: int) -> EpsFormalSolution:
    """Compute a_0..a_I with residual verification of every defining relation."""
    if I < 0:
        raise ValueError("I must be >= 0")
    if K_z - I < 1 and I >= 1:
        raise InsufficientOrderError(
            f"truncation K_z = {K_z} cannot deliver {I} eps-orders")
    p.require_normalized()
    a0 = solve_a0(p, K_z)
    t0, t0_inv = build_T0(p, a0, K_z)
    b_map = assemble_B(p)
    a_list = [a0]
    residuals = [0.0]
    for i in range(1, I + 1):
        ai = solve_ai(p, a_list, i, K_z, T0_inv=t0_inv)
        target = K_z - i
        # residual of: z a'_{i-1} - T0 a_i - R_i = 0 through the delivered order
        za_prime = a_list[i - 1].derivative().shift_up().coeffs[:, : target + 1]
        t0ai = t0.apply_vec(ai).coeffs[:, : target + 1]
        ri = _assemble_Ri(b_map, p.nu, i, [x.coeffs for x in a_list], target)
        resid = za_prime - t0ai - ri
        scale = max(1.0, float(np.abs(za_prime).max()), float(np.abs(t0ai).max()))
        rel = float(np.abs(resid).max()) / scale
        if rel > _RESIDUAL_RTOL:
            raise GevreyKitError(f"defining relation for a_{i} left residual {rel:.3e}")
        residuals.append(rel)
        a_list.append(ai)
    return EpsFormalSolution(a=tuple(a_list), T0=t0, T0_inv=t0_inv, K_z=K_z,
                             residuals=tuple(residuals))
