"""Complete Pick tests, feature maps, Pick feasibility and multiplier bounds
on finite point sets.

Every verdict here is a statement about a finite sample. A sample that passes
is *consistent* with the complete Pick property; a failing sample *refutes*
it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ArityError,
    DiagonalTooLargeError,
    DivergenceError,
    NotPsdError,
    SingularGramError,
    ZeroKernelError,
)
from .kernels import (
    PSD_TOL,
    HermitianMatrix,
    KernelSpec,
    PointSet,
    as_point,
    gram,
    kernel_matrix,
)

ZERO_KERNEL_TOL = 1e-14
SINGULAR_GRAM_TOL = 1e-10


def _resolve_base(pts: PointSet, x0):
    """Return ``(point, index_or_None)`` for an index into ``pts`` or an explicit point."""
    if x0 is None:
        if pts.base_index is None:
            raise ValueError("no base point given and the point set has no base_index")
        x0 = pts.base_index
    if isinstance(x0, (int, np.integer)):
        return pts[int(x0)], int(x0)
    p = as_point(x0, pts.dim)
    hit = np.flatnonzero(np.linalg.norm(pts.coords - p, axis=1) <= 1e-12) if len(pts) else []
    return p, (int(hit[0]) if len(hit) else None)


class NormalizedKernel:
    """``K'(x, y) = K(x, y) K(x0, x0) / (K(x, x0) K(x0, y))``, so that ``K'(x, x0) = 1``."""

    def __init__(self, spec: KernelSpec, x0):
        self.spec = spec
        self.x0 = as_point(x0, spec.dim)
        self.k00 = kernel_matrix(spec, self.x0[None, :], self.x0[None, :])[0, 0].real
        if not self.k00 > 0:
            raise ZeroKernelError(f"K(x0, x0) = {self.k00} is not positive")

    def _column(self, X):
        kx = kernel_matrix(self.spec, X, self.x0[None, :])[:, 0]
        bad = np.flatnonzero(np.abs(kx) <= ZERO_KERNEL_TOL)
        if bad.size:
            raise ZeroKernelError(f"K(x, x0) vanishes at sample {int(bad[0])}")
        return kx

    def matrix(self, X, Y) -> np.ndarray:
        X = self.spec.check_domain(X)
        Y = self.spec.check_domain(Y)
        kx = self._column(X)
        ky = self._column(Y)
        return kernel_matrix(self.spec, X, Y) * self.k00 / np.outer(kx, ky.conj())

    def __call__(self, x, y) -> complex:
        x = as_point(x, self.spec.dim)
        y = as_point(y, self.spec.dim)
        return complex(self.matrix(x[None, :], y[None, :])[0, 0])

    def gram(self, pts: PointSet) -> HermitianMatrix:
        return HermitianMatrix(self.matrix(pts.coords, pts.coords))


def normalize(spec: KernelSpec, pts: PointSet, x0) -> NormalizedKernel:
    """Normalise ``spec`` at ``x0``; raises ZeroKernelError if ``K(x, x0)`` vanishes on ``pts``."""
    x0, _ = _resolve_base(pts, x0)
    nk = NormalizedKernel(spec, x0)
    if len(pts):
        nk._column(pts.coords)
    return nk


def cnp_defect(spec: KernelSpec, pts: PointSet, x0=None) -> HermitianMatrix:
    """The matrix ``F[i, j] = 1 - K(x_i, x0) K(x0, x_j) / (K(x_i, x_j) K(x0, x0))``."""
    x0, _ = _resolve_base(pts, x0)
    X = pts.coords
    K = kernel_matrix(spec, X, X)
    if np.any(np.abs(K) <= ZERO_KERNEL_TOL):
        i, j = np.argwhere(np.abs(K) <= ZERO_KERNEL_TOL)[0]
        raise ZeroKernelError(f"K(x_{i}, x_{j}) vanishes")
    nk = NormalizedKernel(spec, x0)
    kx = nk._column(X)
    return HermitianMatrix(1.0 - np.outer(kx, kx.conj()) / (K * nk.k00))


@dataclass(frozen=True)
class CnpVerdict:
    psd: bool
    min_eig: float
    defect: HermitianMatrix
    base_point_index: Optional[int]
    tol: float

    @property
    def claim(self) -> str:
        return "consistent" if self.psd else "refuted"

    def report(self, kernel: str) -> dict:
        return {
            "kernel": kernel,
            "n_points": self.defect.n,
            "base_index": self.base_point_index,
            "min_eig": self.min_eig,
            "psd": self.psd,
            "claim": self.claim,
            "tol": self.tol,
        }


def complete_pick_verdict(spec: KernelSpec, pts: PointSet, x0=None, tol: float = PSD_TOL) -> CnpVerdict:
    """PSD test of the defect matrix: a necessary condition checked on the sample."""
    _, idx = _resolve_base(pts, x0)
    F = cnp_defect(spec, pts, x0)
    ev = F.eigvalsh()
    lo = float(ev[0]) if ev.size else 0.0
    rho = float(np.max(np.abs(ev))) if ev.size else 0.0
    return CnpVerdict(lo >= -tol * max(1.0, rho), lo, F, idx, tol)


def base_point_invariance(spec: KernelSpec, pts: PointSet, candidates: Sequence, tol: float = PSD_TOL) -> bool:
    """True iff the verdict is the same for every candidate base point."""
    verdicts = {complete_pick_verdict(spec, pts, x0, tol).psd for x0 in candidates}
    return len(verdicts) <= 1


@dataclass(frozen=True)
class FeatureMap:
    """Rows ``b_i`` with ``b_i . conj(b_j) = F[i, j]`` up to ``tol_used * ||F||``."""

    rows: np.ndarray
    tol_used: float

    @property
    def rank(self) -> int:
        return self.rows.shape[1]

    def inner(self) -> np.ndarray:
        return self.rows @ self.rows.conj().T

    def kernel(self) -> HermitianMatrix:
        """The normalised kernel ``1 / (1 - b_i b_j^*)``."""
        return HermitianMatrix(1.0 / (1.0 - self.inner()))


def feature_map(F, tol: float = PSD_TOL) -> FeatureMap:
    F = F if isinstance(F, HermitianMatrix) else HermitianMatrix(F)
    diag = np.real(np.diag(F.entries))
    if np.any(diag >= 1.0):
        i = int(np.argmax(diag))
        raise DiagonalTooLargeError(f"F[{i}, {i}] = {diag[i]!r} >= 1")
    if F.n == 0:
        return FeatureMap(np.zeros((0, 0), dtype=np.complex128), tol)
    lam, V = np.linalg.eigh(F.entries)
    top = float(np.max(np.abs(lam)))
    if lam[0] < -tol * max(1.0, top):
        raise NotPsdError(f"defect matrix has eigenvalue {lam[0]!r}")
    keep = lam > tol * top
    rows = V[:, keep] * np.sqrt(lam[keep])[None, :]
    return FeatureMap(rows, tol)


def geometric_reconstruction(fm: FeatureMap, N: int) -> HermitianMatrix:
    """Partial sums ``sum_{n <= N} G^n`` (entrywise powers) with ``G = b_i b_j^*``."""
    G = fm.inner()
    if G.size and np.max(np.abs(G)) >= 1.0:
        raise DivergenceError("some |b_i b_j^*| >= 1; the geometric series diverges")
    total = np.ones_like(G)
    power = np.ones_like(G)
    for _ in range(N):
        power = power * G
        total = total + power
    return HermitianMatrix(total)


def geometric_error_bound(fm: FeatureMap, N: int) -> np.ndarray:
    a = np.abs(fm.inner())
    return a ** (N + 1) / (1.0 - a)


def pick_matrix(spec: KernelSpec, nodes: PointSet, targets) -> HermitianMatrix:
    w = np.asarray(targets, dtype=np.complex128).ravel()
    if w.shape[0] != len(nodes):
        raise ArityError(f"{w.shape[0]} targets for {len(nodes)} nodes")
    K = kernel_matrix(spec, nodes.coords, nodes.coords)
    return HermitianMatrix((1.0 - np.outer(w, w.conj())) * K)


@dataclass(frozen=True)
class PickResult:
    feasible: bool
    min_eig: float
    marginal: bool
    tol: float

    def report(self, kernel: str, n: int) -> dict:
        return {
            "kernel": kernel,
            "n_points": n,
            "feasible": self.feasible,
            "marginal": self.marginal,
            "min_eig": self.min_eig,
            "tol": self.tol,
        }


def pick_problem(spec: KernelSpec, nodes: PointSet, targets, tol: float = PSD_TOL) -> PickResult:
    """Pick-matrix test with the eigenvalue and a flag for the ``±tol`` band."""
    P = pick_matrix(spec, nodes, targets)
    ev = P.eigvalsh()
    lo = float(ev[0]) if ev.size else 0.0
    band = tol * max(1.0, float(np.max(np.abs(ev))) if ev.size else 0.0)
    return PickResult(lo >= -band, lo, abs(lo) <= band, tol)


def pick_feasible(spec: KernelSpec, nodes: PointSet, targets, tol: float = PSD_TOL) -> bool:
    """Is there a multiplier of norm <= 1 taking ``nodes[i]`` to ``targets[i]``?

    Exact for complete Pick kernels; a necessary condition otherwise.
    """
    return pick_problem(spec, nodes, targets, tol).feasible


def multiplier_norm_lower_bound(spec: KernelSpec, pts: PointSet, h_values) -> float:
    """Smallest ``c`` with ``((c^2 - h_i conj(h_j)) K_ij)`` PSD.

    Solved as a generalised eigenproblem after whitening by the Cholesky
    factor of the Gram matrix.
    """
    h = np.asarray(h_values, dtype=np.complex128).ravel()
    if h.shape[0] != len(pts):
        raise ArityError(f"{h.shape[0]} values for {len(pts)} points")
    K = gram(spec, pts)
    lo = float(K.eigvalsh()[0])
    if lo <= SINGULAR_GRAM_TOL:
        raise SingularGramError(f"Gram matrix min eigenvalue {lo!r} <= {SINGULAR_GRAM_TOL}")
    L = np.linalg.cholesky(K.entries)
    A = h[:, None] * K.entries * h.conj()[None, :]
    Y = scipy.linalg.solve_triangular(L, A, lower=True)
    M = scipy.linalg.solve_triangular(L, Y.conj().T, lower=True).conj().T
    lam = HermitianMatrix(M).eigvalsh()[-1]
    return float(np.sqrt(max(lam, 0.0)))
