"""Exact algebra for centred Gaussian kernels ``exp(log_prefactor - x.Q.x)``.

Every density matrix, wavefunction and reduced density of the package is a
kernel of this form, so normalisations, partial traces and purity traces can
be computed in closed form independently of the hand-derived coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonIntegrableDirection, NotPositiveDefinite

__all__ = [
    "QuadKernel",
    "cholesky_pivots",
    "is_positive_definite",
    "log_integrate_all",
    "integrate_all",
    "marginalize",
    "pullback",
    "compose",
    "trace_product",
]

PIVOT_TOL = 1e-12
SYMMETRY_TOL = 1e-14


@dataclass(frozen=True)
class QuadKernel:
    log_prefactor: float
    quad: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = np.array(self.quad, dtype=float, ndmin=2)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"quad must be square, got shape {q.shape}")
        scale = max(1.0, float(np.max(np.abs(q)))) if q.size else 1.0
        if np.max(np.abs(q - q.T), initial=0.0) > SYMMETRY_TOL * scale:
            raise ValueError("quad is not symmetric")
        q = 0.5 * (q + q.T)
        q.setflags(write=False)
        object.__setattr__(self, "quad", q)
        object.__setattr__(self, "log_prefactor", float(self.log_prefactor))

    @property
    def dim(self) -> int:
        return self.quad.shape[0]

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)

    def log_value(self, x) -> np.ndarray:
        """Log of the kernel at points ``x`` with trailing axis of length dim.

        Floating inputs keep their precision (e.g. ``np.longdouble``).
        """
        x = np.asarray(x)
        if x.dtype.kind != "f":
            x = x.astype(float)
        return self.log_prefactor - np.einsum("...i,ij,...j->...", x, self.quad, x)

    def __call__(self, x) -> np.ndarray:
        return np.exp(self.log_value(x))


def cholesky_pivots(quad: np.ndarray) -> np.ndarray:
    """Pivots ``L[i, i]**2`` of the Cholesky factorisation, stopping at the first
    non-positive one (returned as is, remaining entries NaN)."""
    a = np.array(quad, dtype=float)
    n = a.shape[0]
    pivots = np.full(n, np.nan)
    low = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - low[j, :j] @ low[j, :j]
        pivots[j] = pivot
        if not pivot > 0:
            break
        low[j, j] = math.sqrt(pivot)
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - low[i, :j] @ low[j, :j]) / low[j, j]
    return pivots


def is_positive_definite(quad: np.ndarray) -> bool:
    pivots = cholesky_pivots(quad)
    scale = max(1.0, float(np.max(np.abs(np.diag(quad)))))
    return bool(np.all(pivots > PIVOT_TOL * scale))


def log_integrate_all(kernel: QuadKernel) -> float:
    """Log of the integral of the kernel over all of R**dim."""
    pivots = cholesky_pivots(kernel.quad)
    scale = max(1.0, float(np.max(np.abs(np.diag(kernel.quad)))))
    if not np.all(pivots > PIVOT_TOL * scale):
        raise NotPositiveDefinite(f"Cholesky pivots {pivots}")
    log_det = float(np.sum(np.log(pivots)))
    return kernel.log_prefactor + 0.5 * kernel.dim * math.log(math.pi) - 0.5 * log_det


def integrate_all(kernel: QuadKernel) -> float:
    return math.exp(log_integrate_all(kernel))


def marginalize(kernel: QuadKernel, index: int) -> QuadKernel:
    """Integrate out variable ``index`` (Schur complement of the diagonal entry)."""
    q = kernel.quad
    qii = q[index, index]
    if not qii > 0:
        raise NonIntegrableDirection(f"quad[{index}, {index}] = {qii!r} <= 0")
    rest = [i for i in range(kernel.dim) if i != index]
    coupling = q[rest, index]
    reduced = q[np.ix_(rest, rest)] - np.outer(coupling, coupling) / qii
    return QuadKernel(kernel.log_prefactor + 0.5 * math.log(math.pi / qii), reduced)


def _marginalize_many(kernel: QuadKernel, indices) -> QuadKernel:
    for index in sorted(indices, reverse=True):
        kernel = marginalize(kernel, index)
    return kernel


def pullback(kernel: QuadKernel, matrix) -> QuadKernel:
    """Kernel in new variables z with x = matrix @ z (no Jacobian factor)."""
    s = np.asarray(matrix, dtype=float)
    return QuadKernel(kernel.log_prefactor, s.T @ kernel.quad @ s)


def compose(first: QuadKernel, second: QuadKernel) -> QuadKernel:
    """Integral kernel product ``int first(u, y) second(y, w) dy``.

    Both kernels act on ``2n`` variables ordered (out, in); the result is
    ordered (u, w).
    """
    if first.dim != second.dim or first.dim % 2:
        raise ValueError("compose needs two kernels of equal even dimension")
    n = first.dim // 2
    big = np.zeros((3 * n, 3 * n))
    big[: 2 * n, : 2 * n] += first.quad
    big[n:, n:] += second.quad
    joint = QuadKernel(first.log_prefactor + second.log_prefactor, big)
    return _marginalize_many(joint, range(n, 2 * n))


def trace_product(first: QuadKernel, second: QuadKernel) -> float:
    """``int int first(x, x') second(x', x) dx dx'`` for two-point kernels."""
    if first.dim != 2 or second.dim != 2:
        raise ValueError("trace_product needs two kernels of dimension 2")
    swapped = pullback(second, [[0.0, 1.0], [1.0, 0.0]])
    joint = QuadKernel(first.log_prefactor + second.log_prefactor, first.quad + swapped.quad)
    return integrate_all(joint)
