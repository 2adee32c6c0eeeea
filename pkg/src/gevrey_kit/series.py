"""Truncated power-series arithmetic over complex scalars, vectors and matrices.

A series here stores exactly the coefficients it knows and the formal variable
it lives in.  Coefficients beyond the recorded order are *unknown*, not zero,
and binary operations deliver the minimum of the operand orders, so a
coefficient is only ever reported when both inputs vouch for it.  Explicit
zero-extension is available through :meth:`TruncatedSeries.pad_to` for data
known to be polynomial.

The module also provides the two sequence-convolution conventions (offset 1
and offset 0), dense multilinear tensor application, Neumann inversion of
matrix series, and the convolution-taming inequality check on factorially
weighted sequences.  Everything downstream is built from these kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArityMismatchError, SingularMatrixError, VarMismatchError

SERIES_VARS = ("eps", "z", "t")

#: Absolute coefficient tolerance, scaled by the largest coefficient magnitude.
COEFF_TOL = 1e-12

#: Convolution-taming constant (1 + pi^2/3)^(-1) / 2 = 0.1165536...
CONV_TAMING_A = 0.5 / (1.0 + math.pi**2 / 3.0)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{what} contains non-finite entries")


def _check_var(var: str) -> None:
    if var not in SERIES_VARS:
        raise ValueError(f"unknown series variable {var!r}; expected one of {SERIES_VARS}")


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """One-variable power series with complex coefficients, known through a
    finite order.

    ``coeffs[k]`` is the coefficient of ``var**k`` and ``len(coeffs)`` equals
    ``order + 1``.  Instances are immutable; all arithmetic returns new
    objects, truncated to the minimum order of the operands.
    """

    coeffs: np.ndarray
    var: str = "z"

    def __post_init__(self):
        _check_var(self.var)
        arr = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("series coefficients must be a non-empty 1-d array")
        _check_finite(arr, "series")
        object.__setattr__(self, "coeffs", _freeze(arr.copy()))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zeros(order: int, var: str = "z") -> "TruncatedSeries":
        return TruncatedSeries(np.zeros(order + 1, dtype=np.complex128), var)

    @staticmethod
    def constant(value: complex, var: str = "z", order: int = 0) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = value
        return TruncatedSeries(c, var)

    @staticmethod
    def monomial(power: int, var: str = "z", coeff: complex = 1.0,
                 order: int | None = None) -> "TruncatedSeries":
        order = power if order is None else order
        if order < power:
            raise ValueError("order must cover the monomial power")
        c = np.zeros(order + 1, dtype=np.complex128)
        c[power] = coeff
        return TruncatedSeries(c, var)

    # -- basic queries -----------------------------------------------------

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def coeff(self, k: int) -> complex:
        if not 0 <= k <= self.order:
            raise IndexError(f"coefficient {k} beyond trusted order {self.order}")
        return complex(self.coeffs[k])

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max())

    def _require_same_var(self, other: "TruncatedSeries") -> None:
        if self.var != other.var:
            raise VarMismatchError(
                f"cannot combine series in {self.var!r} with series in {other.var!r}")

    # -- order management --------------------------------------------------

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot truncate to a higher order; use pad_to for polynomials")
        return TruncatedSeries(self.coeffs[: order + 1], self.var)

    def pad_to(self, order: int) -> "TruncatedSeries":
        """Zero-extend to `order`.

        Only valid when the series is known exactly as a polynomial, since the
        new coefficients are declared trustworthy.
        """
        if order <= self.order:
            return self
        c = np.zeros(order + 1, dtype=np.complex128)
        c[: self.coeffs.size] = self.coeffs
        return TruncatedSeries(c, self.var)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._require_same_var(other)
        k = min(self.order, other.order)
        return TruncatedSeries(self.coeffs[: k + 1] + other.coeffs[: k + 1], self.var)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._require_same_var(other)
        k = min(self.order, other.order)
        return TruncatedSeries(self.coeffs[: k + 1] - other.coeffs[: k + 1], self.var)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self.coeffs, self.var)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._require_same_var(other)
            k = min(self.order, other.order)
            prod = np.convolve(self.coeffs[: k + 1], other.coeffs[: k + 1])[: k + 1]
            return TruncatedSeries(prod, self.var)
        if isinstance(other, (int, float, complex, np.number)):
            return TruncatedSeries(self.coeffs * complex(other), self.var)
        return NotImplemented

    __rmul__ = __mul__

    def derivative(self) -> "TruncatedSeries":
        """Formal derivative; the order drops by one (constants go to the
        zero series of order 0)."""
        if self.order == 0:
            return TruncatedSeries.zeros(0, self.var)
        k = np.arange(1, self.order + 1)
        return TruncatedSeries(self.coeffs[1:] * k, self.var)

    def shift_up(self) -> "TruncatedSeries":
        """Multiply by the formal variable; every known coefficient shifts up
        one slot, so the order grows by one."""
        c = np.concatenate([[0.0 + 0.0j], self.coeffs])
        return TruncatedSeries(c, self.var)

    def __call__(self, x: complex) -> complex:
        """Horner evaluation of the degree-`order` partial sum."""
        acc = 0.0 + 0.0j
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return complex(acc)

    def isclose(self, other: "TruncatedSeries", tol: float = COEFF_TOL) -> bool:
        self._require_same_var(other)
        k = min(self.order, other.order)
        a, b = self.coeffs[: k + 1], other.coeffs[: k + 1]
        scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
        return bool(np.abs(a - b).max() <= tol * scale)


@dataclass(frozen=True, eq=False)
class VecSeries:
    """A vector of ``nu`` series sharing variable and order.

    ``coeffs`` has shape ``(nu, order + 1)``; ``coeffs[i, k]`` is coefficient
    ``k`` of component ``i``.
    """

    coeffs: np.ndarray
    var: str = "z"

    def __post_init__(self):
        _check_var(self.var)
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("vector series coefficients must have shape (nu, order + 1)")
        _check_finite(arr, "vector series")
        object.__setattr__(self, "coeffs", _freeze(arr.copy()))

    @staticmethod
    def zeros(nu: int, order: int, var: str = "z") -> "VecSeries":
        return VecSeries(np.zeros((nu, order + 1), dtype=np.complex128), var)

    @staticmethod
    def from_components(components: Sequence[TruncatedSeries]) -> "VecSeries":
        if not components:
            raise ValueError("need at least one component")
        var = components[0].var
        order = components[0].order
        for c in components[1:]:
            if c.var != var:
                raise VarMismatchError("components must share the variable tag")
            if c.order != order:
                raise ValueError("components must share the order")
        return VecSeries(np.stack([c.coeffs for c in components]), var)

    @property
    def nu(self) -> int:
        return self.coeffs.shape[0]

    @property
    def order(self) -> int:
        return self.coeffs.shape[1] - 1

    def component(self, i: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs[i], self.var)

    def coeff_vec(self, k: int) -> np.ndarray:
        if not 0 <= k <= self.order:
            raise IndexError(f"coefficient {k} beyond trusted order {self.order}")
        return self.coeffs[:, k].copy()

    def norms(self) -> np.ndarray:
        """Euclidean norm of each coefficient vector, indexed by power."""
        return np.linalg.norm(self.coeffs, axis=0)

    def truncate(self, order: int) -> "VecSeries":
        if order > self.order:
            raise ValueError("cannot truncate to a higher order")
        return VecSeries(self.coeffs[:, : order + 1], self.var)

    def pad_to(self, order: int) -> "VecSeries":
        if order <= self.order:
            return self
        c = np.zeros((self.nu, order + 1), dtype=np.complex128)
        c[:, : self.coeffs.shape[1]] = self.coeffs
        return VecSeries(c, self.var)

    def derivative(self) -> "VecSeries":
        if self.order == 0:
            return VecSeries.zeros(self.nu, 0, self.var)
        k = np.arange(1, self.order + 1)
        return VecSeries(self.coeffs[:, 1:] * k, self.var)

    def shift_up(self) -> "VecSeries":
        c = np.concatenate([np.zeros((self.nu, 1), dtype=np.complex128), self.coeffs], axis=1)
        return VecSeries(c, self.var)

    def __add__(self, other: "VecSeries") -> "VecSeries":
        if not isinstance(other, VecSeries):
            return NotImplemented
        if self.var != other.var:
            raise VarMismatchError("vector series variable mismatch")
        k = min(self.order, other.order)
        return VecSeries(self.coeffs[:, : k + 1] + other.coeffs[:, : k + 1], self.var)

    def __sub__(self, other: "VecSeries") -> "VecSeries":
        if not isinstance(other, VecSeries):
            return NotImplemented
        if self.var != other.var:
            raise VarMismatchError("vector series variable mismatch")
        k = min(self.order, other.order)
        return VecSeries(self.coeffs[:, : k + 1] - other.coeffs[:, : k + 1], self.var)

    def __neg__(self) -> "VecSeries":
        return VecSeries(-self.coeffs, self.var)

    def scale(self, factor: complex) -> "VecSeries":
        return VecSeries(self.coeffs * complex(factor), self.var)

    def evaluate(self, x: complex) -> np.ndarray:
        acc = np.zeros(self.nu, dtype=np.complex128)
        for k in range(self.order, -1, -1):
            acc = acc * x + self.coeffs[:, k]
        return acc


@dataclass(frozen=True, eq=False)
class MatSeries:
    """A square matrix of series sharing variable and order.

    ``coeffs`` has shape ``(nu, nu, order + 1)``.
    """

    coeffs: np.ndarray
    var: str = "z"

    def __post_init__(self):
        _check_var(self.var)
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] < 1:
            raise ValueError("matrix series coefficients must have shape (nu, nu, order + 1)")
        _check_finite(arr, "matrix series")
        object.__setattr__(self, "coeffs", _freeze(arr.copy()))

    @staticmethod
    def zeros(nu: int, order: int, var: str = "z") -> "MatSeries":
        return MatSeries(np.zeros((nu, nu, order + 1), dtype=np.complex128), var)

    @staticmethod
    def identity(nu: int, order: int, var: str = "z") -> "MatSeries":
        c = np.zeros((nu, nu, order + 1), dtype=np.complex128)
        c[:, :, 0] = np.eye(nu)
        return MatSeries(c, var)

    @property
    def nu(self) -> int:
        return self.coeffs.shape[0]

    @property
    def order(self) -> int:
        return self.coeffs.shape[2] - 1

    def entry(self, i: int, j: int) -> TruncatedSeries:
        return TruncatedSeries(self.coeffs[i, j], self.var)

    def constant(self) -> np.ndarray:
        return self.coeffs[:, :, 0].copy()

    def truncate(self, order: int) -> "MatSeries":
        if order > self.order:
            raise ValueError("cannot truncate to a higher order")
        return MatSeries(self.coeffs[:, :, : order + 1], self.var)

    def pad_to(self, order: int) -> "MatSeries":
        if order <= self.order:
            return self
        c = np.zeros((self.nu, self.nu, order + 1), dtype=np.complex128)
        c[:, :, : self.coeffs.shape[2]] = self.coeffs
        return MatSeries(c, self.var)

    def __add__(self, other: "MatSeries") -> "MatSeries":
        if not isinstance(other, MatSeries):
            return NotImplemented
        if self.var != other.var:
            raise VarMismatchError("matrix series variable mismatch")
        k = min(self.order, other.order)
        return MatSeries(self.coeffs[:, :, : k + 1] + other.coeffs[:, :, : k + 1], self.var)

    def __neg__(self) -> "MatSeries":
        return MatSeries(-self.coeffs, self.var)

    def matmul(self, other: "MatSeries") -> "MatSeries":
        if self.var != other.var:
            raise VarMismatchError("matrix series variable mismatch")
        k = min(self.order, other.order)
        out = np.zeros((self.nu, self.nu, k + 1), dtype=np.complex128)
        for p in range(k + 1):
            for q in range(p + 1):
                out[:, :, p] += self.coeffs[:, :, q] @ other.coeffs[:, :, p - q]
        return MatSeries(out, self.var)

    def apply_vec(self, v: VecSeries) -> VecSeries:
        if self.var != v.var:
            raise VarMismatchError("matrix/vector series variable mismatch")
        k = min(self.order, v.order)
        out = np.zeros((self.nu, k + 1), dtype=np.complex128)
        for p in range(k + 1):
            for q in range(p + 1):
                out[:, p] += self.coeffs[:, :, q] @ v.coeffs[:, p - q]
        return VecSeries(out, self.var)


@dataclass(frozen=True, eq=False)
class VecSequence:
    """A sequence of complex ``nu``-vectors indexed from a declared offset.

    An offset-1 sequence has no index-0 element; its first stored vector is
    index 1.  ``data`` has shape ``(count, nu)``.
    """

    data: np.ndarray
    offset: int = 1

    def __post_init__(self):
        if self.offset not in (0, 1):
            raise ValueError("offset must be 0 or 1")
        arr = np.asarray(self.data, dtype=np.complex128)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError("sequence data must have shape (count, nu)")
        _check_finite(arr, "sequence")
        object.__setattr__(self, "data", _freeze(arr.copy()))

    @property
    def nu(self) -> int:
        return self.data.shape[1]

    @property
    def last_index(self) -> int:
        return self.data.shape[0] - 1 + self.offset

    def get(self, k: int) -> np.ndarray:
        if k < self.offset or k > self.last_index:
            raise IndexError(f"index {k} outside [{self.offset}, {self.last_index}]")
        return self.data[k - self.offset]


# ---------------------------------------------------------------------------
# convolution products and tensor application
# ---------------------------------------------------------------------------

def compositions(total: int, parts: int, min_part: int = 0):
    """Yield every tuple of `parts` integers >= `min_part` summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= min_part:
            yield (total,)
        return
    for first in range(min_part, total - min_part * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, min_part):
            yield (first,) + rest


def _common_nu(seqs: Sequence[VecSequence]) -> int:
    nu = seqs[0].nu
    for s in seqs[1:]:
        if s.nu != nu:
            raise ValueError("sequences must share the vector dimension")
    return nu


def conv_offset1(seqs: Sequence[VecSequence], k: int) -> np.ndarray:
    """Component `k` of the m-fold convolution of offset-1 vector sequences.

    Sums the componentwise products over all compositions of `k` into
    ``len(seqs)`` parts >= 1; the result is the zero vector whenever
    ``k < len(seqs)``.  In particular the 2-fold product vanishes at k = 1.
    """
    seqs = list(seqs)
    if not seqs:
        raise ValueError("need at least one sequence")
    if k < 1:
        raise ValueError("offset-1 convolutions are indexed from 1")
    for s in seqs:
        if s.offset != 1:
            raise ValueError("conv_offset1 requires offset-1 sequences")
    nu = _common_nu(seqs)
    acc = np.zeros(nu, dtype=np.complex128)
    m = len(seqs)
    if k < m:
        return acc
    for comp in compositions(k, m, 1):
        term = seqs[0].get(comp[0]).copy()
        for s, l in zip(seqs[1:], comp[1:]):
            term = term * s.get(l)
        acc += term
    return acc


def conv_offset0(seqs: Sequence[VecSequence], k: int) -> np.ndarray:
    """Component `k` of the m-fold convolution with parts >= 0.

    For two sequences this is the plain Cauchy rule
    ``(a * b)_k = sum_l a_l b_{k-l}``.
    """
    seqs = list(seqs)
    if not seqs:
        raise ValueError("need at least one sequence")
    if k < 0:
        raise ValueError("offset-0 convolutions are indexed from 0")
    for s in seqs:
        if s.offset != 0:
            raise ValueError("conv_offset0 requires offset-0 sequences")
    nu = _common_nu(seqs)
    acc = np.zeros(nu, dtype=np.complex128)
    for comp in compositions(k, len(seqs), 0):
        term = seqs[0].get(comp[0]).copy()
        for s, l in zip(seqs[1:], comp[1:]):
            term = term * s.get(l)
        acc += term
    return acc


def multilinear_apply(entries: np.ndarray, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Apply a dense multilinear tensor to m vectors.

    `entries` is indexed row-major as ``[i, i_1, ..., i_m]``; the result has
    components ``sum A[i, i_1..i_m] v_1[i_1] ... v_m[i_m]``.  With m = 0 the
    tensor is returned as a plain vector.
    """
    entries = np.asarray(entries, dtype=np.complex128)
    m = entries.ndim - 1
    if len(vectors) != m:
        raise ArityMismatchError(f"tensor of arity {m} applied to {len(vectors)} vectors")
    res = entries
    for v in vectors:
        v = np.asarray(v, dtype=np.complex128)
        if v.shape != (entries.shape[0],):
            raise ArityMismatchError("vector dimension does not match the tensor")
        res = np.tensordot(res, v, axes=([1], [0]))
    return res


# ---------------------------------------------------------------------------
# matrix series inversion
# ---------------------------------------------------------------------------

def mat_series_inverse(t: MatSeries) -> MatSeries:
    """Invert a matrix series whose constant term is invertible.

    Uses the Neumann recursion ``S_0 = T(0)^{-1}``,
    ``S_k = -T(0)^{-1} sum_{j=1..k} T_j S_{k-j}`` and verifies
    ``T S = I + O(var^(K+1))`` to the coefficient tolerance.
    """
    t0 = t.constant()
    svals = np.linalg.svd(t0, compute_uv=False)
    smax = float(svals[0])
    smin = float(svals[-1])
    if smin <= 1e-14 * max(1.0, smax):
        raise SingularMatrixError(
            "constant term of the matrix series is numerically singular "
            f"(norm {smax:.3e}, smallest singular value {smin:.3e})",
            norm=smax, smallest_singular_value=smin)
    nu, order = t.nu, t.order
    t0inv = np.linalg.solve(t0, np.eye(nu, dtype=np.complex128))
    s = np.zeros((nu, nu, order + 1), dtype=np.complex128)
    s[:, :, 0] = t0inv
    for k in range(1, order + 1):
        acc = np.zeros((nu, nu), dtype=np.complex128)
        for j in range(1, k + 1):
            acc += t.coeffs[:, :, j] @ s[:, :, k - j]
        s[:, :, k] = -t0inv @ acc
    inv = MatSeries(s, t.var)
    resid = t.matmul(inv).coeffs.copy()
    resid[:, :, 0] -= np.eye(nu)
    scale = max(1.0, float(np.abs(t.coeffs).max()), float(np.abs(s).max()))
    worst = float(np.abs(resid).max())
    if worst > COEFF_TOL * scale:
        raise SingularMatrixError(
            f"matrix series inverse failed verification (residual {worst:.3e}, "
            f"condition number {smax / smin:.3e})",
            norm=smax, smallest_singular_value=smin)
    return inv


# ---------------------------------------------------------------------------
# module-level operation aliases
# ---------------------------------------------------------------------------

def series_mul(p: TruncatedSeries, q: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the minimum operand order."""
    return p * q


def series_derivative(p: TruncatedSeries) -> TruncatedSeries:
    """Formal derivative; see :meth:`TruncatedSeries.derivative`."""
    return p.derivative()


def evaluate(p: TruncatedSeries, x: complex) -> complex:
    """Horner evaluation of the partial sum of degree ``p.order``."""
    return p(x)


# ---------------------------------------------------------------------------
# convolution-taming inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaConvReport:
    """Outcome of the convolution-taming inequality scan."""

    passed: bool
    max_ratio: float
    worst_m: int
    lam: float
    c0_is_A: bool
    m_max: int
    A: float = CONV_TAMING_A


def lemma_conv_bound(lam: float, c0_is_A: bool, m_max: int) -> LemmaConvReport:
    """Check ``sum_{l=0..m} C_l C_{m-l} <= C_m`` for the weight sequence
    ``C_l = A (l!)^lam / l**2`` (l >= 1) with ``C_0`` either ``A`` or 0.

    Factorials enter only through log-magnitudes, so the scan is overflow-free
    for any `lam`.  Returns the maximal ratio over ``m <= m_max`` and a pass
    verdict at tolerance 1e-12.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    ls = np.arange(1, m_max + 1, dtype=np.float64)
    log_c = np.empty(m_max + 1, dtype=np.float64)
    log_a = math.log(CONV_TAMING_A)
    log_c[0] = log_a if c0_is_A else -np.inf
    log_c[1:] = log_a + lam * np.array([math.lgamma(l + 1.0) for l in ls]) - 2.0 * np.log(ls)

    max_ratio = 0.0
    worst_m = 0
    for m in range(m_max + 1):
        if m == 0:
            ratio = CONV_TAMING_A if c0_is_A else 0.0
        else:
            terms = log_c[: m + 1] + log_c[m::-1] - log_c[m]
            finite = terms[np.isfinite(terms)]
            ratio = float(np.exp(finite).sum()) if finite.size else 0.0
        if ratio > max_ratio:
            max_ratio = ratio
            worst_m = m
    return LemmaConvReport(passed=max_ratio <= 1.0 + 1e-12, max_ratio=max_ratio,
                           worst_m=worst_m, lam=lam, c0_is_A=c0_is_A, m_max=m_max)
