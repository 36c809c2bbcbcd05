"""Kernel families, point sets and Gram matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, DuplicatePointError, NumericalError

FAMILIES = ("szego", "bergman", "drury_arveson", "diagonal", "segal_bargmann_hardy")

DOMAIN_MARGIN = 1e-9
POINT_TOL = 1e-12
PSD_TOL = 1e-9
MAX_TERMS = 10**5
TERM_TOL = 1e-15


def as_point(x, dim=None) -> np.ndarray:
    """Coerce a scalar or sequence of complex numbers into a 1-d complex array."""
    p = np.atleast_1d(np.asarray(x, dtype=np.complex128))
    if p.ndim != 1:
        raise ValueError(f"a point must be 1-d, got shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise ValueError(f"point has {p.shape[0]} coordinates, expected {dim}")
    return p


@dataclass(frozen=True, eq=False)
class PointSet:
    """Pairwise-distinct points of C^dim stored row-wise in ``coords``."""

    coords: np.ndarray
    base_index: Optional[int] = None

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.complex128)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValueError(f"coords must have shape (n, dim), got {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        if self.base_index is not None and not 0 <= self.base_index < len(c):
            raise IndexError(f"base_index {self.base_index} out of range for {len(c)} points")
        if len(c) > 1:
            diff = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)
            diff[np.diag_indices(len(c))] = np.inf
            i, j = np.unravel_index(np.argmin(diff), diff.shape)
            if diff[i, j] <= POINT_TOL:
                raise DuplicatePointError(f"points {min(i, j)} and {max(i, j)} coincide")

    @classmethod
    def of(cls, points, base_index=None, dim=None):
        rows = [as_point(p, dim) for p in points]
        if not rows:
            return cls(np.zeros((0, dim or 1), dtype=np.complex128), base_index)
        return cls(np.vstack(rows), base_index)

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def __len__(self):
        return self.coords.shape[0]

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def subset(self, idx) -> "PointSet":
        return PointSet(self.coords[list(idx)])

    def with_point(self, x) -> "PointSet":
        return PointSet(np.vstack([self.coords, as_point(x, self.dim)[None, :]]), self.base_index)


WeightSource = Union[Callable[[int], float], Sequence[float]]


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A kernel family plus its parameters.

    Use the constructors (:meth:`szego`, :meth:`bergman`, :meth:`drury_arveson`,
    :meth:`diagonal`, :meth:`segal_bargmann_hardy`) rather than the raw fields.
    For the diagonal family ``K(z, w) = sum_n a_n (z conj(w))^n`` the weights are
    either a callable ``n -> a_n`` or a finite sequence, which gives a
    polynomial kernel.
    """

    family: str
    dim: int = 1
    weights: Optional[WeightSource] = None
    label: Optional[str] = None
    max_terms: int = MAX_TERMS
    term_tol: float = TERM_TOL
    _log_a: list = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "diagonal":
            if self.weights is None:
                raise ValueError("diagonal kernel needs a weight sequence")
            if not callable(self.weights):
                w = tuple(float(a) for a in self.weights)
                if not w or min(w) <= 0:
                    raise ValueError("diagonal weights must be strictly positive")
                object.__setattr__(self, "weights", w)
            elif not self.weights(0) > 0:
                raise ValueError("diagonal weights must be strictly positive")

    @classmethod
    def szego(cls):
        return cls("szego")

    @classmethod
    def bergman(cls):
        return cls("bergman")

    @classmethod
    def drury_arveson(cls, d: int):
        if d < 1:
            raise ValueError("dimension must be positive")
        return cls("drury_arveson", dim=d)

    @classmethod
    def diagonal(cls, weights: WeightSource, label=None, **kw):
        return cls("diagonal", weights=weights, label=label, **kw)

    @classmethod
    def segal_bargmann_hardy(cls):
        return cls("segal_bargmann_hardy", dim=2)

    @property
    def name(self) -> str:
        if self.family == "drury_arveson":
            return f"drury_arveson({self.dim})"
        if self.family == "diagonal":
            return f"diagonal({self.label or 'custom'})"
        return self.family

    def log_weights(self, n: int) -> np.ndarray:
        """``log a_k`` for ``k < n`` (fewer if the sequence is finite)."""
        cache = self._log_a
        if callable(self.weights):
            for k in range(len(cache), n):
                a = self.weights(k)
                if not a > 0:
                    raise ValueError(f"weight a_{k} = {a} is not positive")
                cache.append(math.log(a))
        elif not cache:
            cache.extend(math.log(a) for a in self.weights)
        return np.asarray(cache[:n], dtype=np.float64)

    def check_domain(self, X) -> np.ndarray:
        """Validate rows of ``X`` (shape ``(n, dim)``) and return them as a complex array."""
        X = np.asarray(X, dtype=np.complex128)
        if X.ndim == 1:
            X = X[None, :] if self.dim > 1 or X.shape[0] == 1 else X[:, None]
        if X.shape[1] != self.dim:
            raise DomainError(f"{self.name} expects {self.dim} coordinates, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise DomainError("non-finite coordinates")
        if self.family == "drury_arveson":
            r = np.linalg.norm(X, axis=1)
        elif self.family == "segal_bargmann_hardy":
            r = np.abs(X[:, 1])
        else:
            r = np.abs(X[:, 0])
        bad = np.flatnonzero(1.0 - r < DOMAIN_MARGIN)
        if bad.size:
            raise DomainError(
                f"point {int(bad[0])} (radius {r[bad[0]]!r}) is outside the admissible "
                f"domain of {self.name} (margin {DOMAIN_MARGIN})"
            )
        return X


def _diagonal_series(spec: KernelSpec, u: np.ndarray) -> np.ndarray:
    flat = np.ascontiguousarray(u, dtype=np.complex128).ravel()
    out = np.empty_like(flat)
    is_zero = flat == 0
    logmag = np.zeros(flat.shape)
    logmag[~is_zero] = np.log(np.abs(flat[~is_zero]))
    phase = np.angle(flat)
    todo = np.arange(flat.size)
    n = min(4096, spec.max_terms)
    while True:
        log_a = spec.log_weights(n)
        sums, used = _kernels.series_sum(
            logmag[todo], phase[todo], is_zero[todo], log_a, spec.term_tol
        )
        ok = used >= 0
        out[todo[ok]] = sums[ok]
        todo = todo[~ok]
        if not todo.size:
            return out.reshape(u.shape)
        if not callable(spec.weights) and len(log_a) < n:
            # finite sequence: a polynomial kernel, summed exactly
            out[todo] = sums[~ok]
            return out.reshape(u.shape)
        if n >= spec.max_terms:
            worst = np.max(np.abs(flat[todo]))
            raise ConvergenceError(
                f"{spec.name}: series did not reach relative tolerance {spec.term_tol} "
                f"within {len(log_a)} terms (|z w| up to {worst:.6g})"
            )
        n = min(8 * n, spec.max_terms)


def kernel_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """Cross matrix ``K(X[i], Y[j])`` without any symmetrisation."""
    X = spec.check_domain(X)
    Y = spec.check_domain(Y)
    fam = spec.family
    if fam == "segal_bargmann_hardy":
        return np.exp(np.outer(X[:, 0], Y[:, 0].conj())) / (1.0 - np.outer(X[:, 1], Y[:, 1].conj()))
    u = X @ Y.conj().T
    if fam in ("szego", "drury_arveson"):
        return 1.0 / (1.0 - u)
    if fam == "bergman":
        return 1.0 / (1.0 - u) ** 2
    return _diagonal_series(spec, u)


def eval_kernel(spec: KernelSpec, x, y) -> complex:
    x = as_point(x, spec.dim)
    y = as_point(y, spec.dim)
    return complex(kernel_matrix(spec, x[None, :], y[None, :])[0, 0])


class HermitianMatrix:
    """Dense Hermitian matrix; the input is replaced by ``(A + A^H) / 2``."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        A = np.asarray(entries, dtype=np.complex128)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {A.shape}")
        H = 0.5 * (A + A.conj().T)
        H.setflags(write=False)
        self.entries = H

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __getitem__(self, key):
        return self.entries[key]

    def __repr__(self):
        return f"HermitianMatrix(n={self.n})"

    def eigvalsh(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0)
        try:
            return np.linalg.eigvalsh(self.entries)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigensolver failed: {exc}") from exc

    def principal(self, idx) -> "HermitianMatrix":
        idx = np.asarray(idx, dtype=int)
        return HermitianMatrix(self.entries[np.ix_(idx, idx)])


def _as_hermitian(M) -> HermitianMatrix:
    return M if isinstance(M, HermitianMatrix) else HermitianMatrix(M)


def gram(spec: KernelSpec, pts: PointSet) -> HermitianMatrix:
    return HermitianMatrix(kernel_matrix(spec, pts.coords, pts.coords))


def min_eigenvalue(M) -> float:
    ev = _as_hermitian(M).eigvalsh()
    return float(ev[0]) if ev.size else 0.0


def spectral_radius(M) -> float:
    ev = _as_hermitian(M).eigvalsh()
    return float(np.max(np.abs(ev))) if ev.size else 0.0


def psd_threshold(M, tol: float = PSD_TOL) -> float:
    """The (negative) eigenvalue floor ``-tol * max(1, spectral radius)``."""
    return -tol * max(1.0, spectral_radius(M))


def is_psd(M, tol: float = PSD_TOL) -> bool:
    M = _as_hermitian(M)
    ev = M.eigvalsh()
    if not ev.size:
        return True
    return bool(ev[0] >= -tol * max(1.0, float(np.max(np.abs(ev)))))
