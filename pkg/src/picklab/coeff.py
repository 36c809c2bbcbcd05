"""Truncated coefficient models of weighted Hardy-type spaces.

Functions are finitely supported maps from multi-indices to complex
coefficients. Norms are ``||f||^2 = sum_alpha w_alpha |c_alpha|^2`` for a
weight rule: Hardy (``w = 1``), Segal-Bargmann x Hardy (``w_(j,k) = j!``),
or diagonal (``w_n = 1/a_n``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import FunctionalSupportError

MultiIndex = Tuple[int, ...]


def _norm_index(idx, nvars) -> MultiIndex:
    if isinstance(idx, (int, np.integer)):
        idx = (int(idx),)
    idx = tuple(int(e) for e in idx)
    if len(idx) != nvars or min(idx) < 0:
        raise ValueError(f"bad multi-index {idx} for {nvars} variable(s)")
    return idx


class CoeffFunction:
    """A polynomial in one or two variables, stored sparsely.

    >>> f = CoeffFunction.from_dense([1, 0, -1])
    >>> f.degree
    2
    """

    __slots__ = ("vars", "coeffs")

    def __init__(self, nvars: int, coeffs: Mapping = ()):
        if nvars not in (1, 2):
            raise ValueError("only one or two variables are supported")
        self.vars = nvars
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        out: Dict[MultiIndex, complex] = {}
        for idx, c in items:
            idx = _norm_index(idx, nvars)
            c = out.get(idx, 0) + complex(c)
            out[idx] = c
        self.coeffs = {k: v for k, v in sorted(out.items()) if v != 0}

    @classmethod
    def from_dense(cls, arr, nvars=None) -> "CoeffFunction":
        """Build from a dense coefficient array (1-d for one variable, 2-d for two)."""
        a = np.asarray(arr, dtype=np.complex128)
        nvars = nvars or a.ndim
        if a.ndim == 1 and nvars == 1:
            return cls(1, {(i,): c for i, c in enumerate(a) if c != 0})
        if a.ndim == 2 and nvars == 2:
            return cls(2, {(int(i), int(j)): a[i, j] for i, j in zip(*np.nonzero(a))})
        raise ValueError(f"array of rank {a.ndim} does not match {nvars} variable(s)")

    @classmethod
    def monomial(cls, idx, coeff=1.0) -> "CoeffFunction":
        idx = (idx,) if isinstance(idx, (int, np.integer)) else tuple(idx)
        return cls(len(idx), {idx: coeff})

    @classmethod
    def constant(cls, c=1.0, nvars=1) -> "CoeffFunction":
        return cls(nvars, {(0,) * nvars: c})

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero function."""
        return max((sum(k) for k in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def shape(self) -> Tuple[int, ...]:
        if not self.coeffs:
            return (1,) * self.vars
        return tuple(max(k[d] for k in self.coeffs) + 1 for d in range(self.vars))

    def dense(self, shape=None) -> np.ndarray:
        shape = shape or self.shape()
        a = np.zeros(shape, dtype=np.complex128)
        for k, c in self.coeffs.items():
            a[k] = c
        return a

    def __call__(self, x) -> complex:
        return complex(self.evaluate(np.atleast_2d(np.asarray(x, dtype=np.complex128)))[0])

    def evaluate(self, X) -> np.ndarray:
        """Evaluate at the rows of ``X`` (shape ``(m, vars)``)."""
        X = np.asarray(X, dtype=np.complex128).reshape(-1, self.vars)
        out = np.zeros(X.shape[0], dtype=np.complex128)
        for k, c in self.coeffs.items():
            out += c * np.prod(X ** np.asarray(k), axis=1)
        return out

    def _combine(self, other, sign):
        if self.vars != other.vars:
            raise ValueError("variable counts differ")
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + sign * v
        return CoeffFunction(self.vars, c)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, other):
        if isinstance(other, CoeffFunction):
            return multiply(self, other)
        return CoeffFunction(self.vars, {k: v * other for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __pow__(self, n: int):
        out = CoeffFunction.constant(1.0, self.vars)
        for _ in range(n):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        return isinstance(other, CoeffFunction) and self.vars == other.vars and self.coeffs == other.coeffs

    def __repr__(self):
        return f"CoeffFunction({self.vars}, {self.coeffs})"

    def shift(self, var: int = -1, by: int = 1) -> "CoeffFunction":
        """Multiply by a coordinate monomial ``z_var ** by``."""
        var %= self.vars
        out = {}
        for k, v in self.coeffs.items():
            k2 = list(k)
            k2[var] += by
            out[tuple(k2)] = v
        return CoeffFunction(self.vars, out)

    def l1(self) -> float:
        return float(sum(abs(v) for v in self.coeffs.values()))


def multiply(f: CoeffFunction, g: CoeffFunction) -> CoeffFunction:
    """Exact polynomial product by dense coefficient convolution."""
    if f.vars != g.vars:
        raise ValueError("variable counts differ")
    if f.is_zero() or g.is_zero():
        return CoeffFunction(f.vars)
    a = f.dense()
    b = g.dense()
    if f.vars == 1:
        a = a[:, None]
        b = b[:, None]
    prod = _kernels.conv2d(np.ascontiguousarray(a), np.ascontiguousarray(b))
    return CoeffFunction.from_dense(prod[:, 0] if f.vars == 1 else prod, f.vars)


# ---------------------------------------------------------------------------
# weight sequences and norms


def gkz_weight(n: int) -> int:
    """``k!`` for the unique ``k`` with ``k^2 <= n < (k+1)^2``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.factorial(math.isqrt(n))


@dataclass(frozen=True)
class SpaceWeights:
    """Weight rule ``MultiIndex -> w > 0``.

    ``kind`` is ``"hardy"``, ``"sb_hardy"`` or ``"diagonal"``; the diagonal
    kind carries the kernel coefficients ``a_n`` and uses ``w_n = 1/a_n``.
    Integer-valued sequences give exact ``Fraction`` weights.
    """

    kind: str
    a: Optional[Callable[[int], float]] = None

    @classmethod
    def hardy(cls):
        return cls("hardy")

    @classmethod
    def sb_hardy(cls):
        return cls("sb_hardy")

    @classmethod
    def diagonal(cls, a):
        return cls("diagonal", a)

    @classmethod
    def gkz(cls):
        return cls("diagonal", gkz_weight)

    def weight(self, idx: MultiIndex):
        if self.kind == "hardy":
            return Fraction(1)
        if self.kind == "sb_hardy":
            if len(idx) != 2:
                raise ValueError("sb_hardy weights are for two variables")
            return Fraction(math.factorial(idx[0]))
        if self.kind == "diagonal":
            if len(idx) != 1:
                raise ValueError("diagonal weights are for one variable")
            a = self.a(idx[0])
            if not a > 0:
                raise ValueError(f"a_{idx[0]} = {a} is not positive")
            if isinstance(a, (int, Fraction)):
                return Fraction(1) / Fraction(a)
            return 1.0 / a
        raise ValueError(f"unknown weight kind {self.kind!r}")


def space_norm_sq(f: CoeffFunction, w: SpaceWeights) -> float:
    return float(sum(float(w.weight(k)) * abs(c) ** 2 for k, c in f.coeffs.items()))


def space_norm(f: CoeffFunction, w: SpaceWeights) -> float:
    return math.sqrt(space_norm_sq(f, w))


@dataclass(frozen=True)
class SequenceReport:
    horizon: int
    ratios_le_one: bool
    min_ratio: Fraction
    min_ratio_at: int
    root_bracket_ok: bool

    def report(self) -> dict:
        return {
            "horizon": self.horizon,
            "ratios_le_one": self.ratios_le_one,
            "min_ratio": float(self.min_ratio),
            "min_ratio_exact": f"{self.min_ratio.numerator}/{self.min_ratio.denominator}",
            "min_ratio_at": self.min_ratio_at,
            "root_bracket_ok": self.root_bracket_ok,
        }


def check_sequence_properties(N: int) -> SequenceReport:
    """Exact checks of the ``k!``-block weight sequence up to horizon ``N``.

    Ratios ``a_n / a_{n+1}`` are taken for ``0 <= n < N``. The bracket
    ``1 <= a_n^(1/n) <= k^(1/k)`` is checked for ``1 <= n <= N`` in the integer
    form ``a_n >= 1`` and ``a_n^k <= k^n``.
    """
    if N < 4:
        raise ValueError("horizon must be at least 4")
    a = [gkz_weight(n) for n in range(N + 1)]
    ratios = [Fraction(a[n], a[n + 1]) for n in range(N)]
    lo = min(ratios)
    bracket = True
    k, lhs, rhs = 0, 0, 1
    for n in range(1, N + 1):
        if math.isqrt(n) != k:
            k = math.isqrt(n)
            lhs = a[n] ** k
            rhs = k ** n
        else:
            rhs *= k
        if a[n] < 1 or lhs > rhs:
            bracket = False
            break
    return SequenceReport(N, all(r <= 1 for r in ratios), lo, ratios.index(lo), bracket)


# ---------------------------------------------------------------------------
# functionals


class CoeffFunctional:
    """``L(f) = sum_alpha weights[alpha] * coeffs[alpha]``.

    ``max_degree`` is the total degree up to which ``L`` is defined; ``None``
    means it is defined everywhere and vanishes off its support.
    """

    __slots__ = ("vars", "weights", "max_degree")

    def __init__(self, nvars: int, weights: Mapping = (), max_degree: Optional[int] = None):
        self.vars = nvars
        self.weights = CoeffFunction(nvars, weights).coeffs
        self.max_degree = max_degree

    @classmethod
    def basis_sum(cls, indices: Iterable, nvars=None, max_degree=None):
        """``e_{alpha_1} + e_{alpha_2} + ...``, e.g. ``basis_sum([(0, 0), (0, 1)])``."""
        idx = [(i,) if isinstance(i, int) else tuple(i) for i in indices]
        nvars = nvars or len(idx[0])
        return cls(nvars, [(i, 1.0) for i in idx], max_degree)

    @classmethod
    def point_evaluation(cls, x, max_degree: int):
        """Weights ``x^alpha`` for every ``|alpha| <= max_degree``."""
        x = np.atleast_1d(np.asarray(x, dtype=np.complex128))
        if x.size == 1:
            w = {(n,): x[0] ** n for n in range(max_degree + 1)}
            return cls(1, w, max_degree)
        if x.size == 2:
            w = {
                (j, k): x[0] ** j * x[1] ** k
                for j in range(max_degree + 1)
                for k in range(max_degree + 1 - j)
            }
            return cls(2, w, max_degree)
        raise ValueError("point evaluation supports one or two variables")

    def support_degree(self) -> int:
        return max((sum(k) for k in self.weights), default=-1)

    def defined_to(self, degree: int) -> bool:
        return self.max_degree is None or degree <= self.max_degree

    def dense_weights(self, degree: int) -> np.ndarray:
        """One-variable weights ``w[0..degree]`` as an array."""
        if self.vars != 1:
            raise ValueError("dense weights are for one-variable functionals")
        if not self.defined_to(degree):
            raise FunctionalSupportError(f"functional defined to degree {self.max_degree}, need {degree}")
        w = np.zeros(degree + 1, dtype=np.complex128)
        for (n,), c in self.weights.items():
            if n <= degree:
                w[n] = c
        return w

    def __call__(self, f: CoeffFunction) -> complex:
        return apply_functional(self, f)

    def __repr__(self):
        return f"CoeffFunctional({self.vars}, {self.weights}, max_degree={self.max_degree})"


def apply_functional(L: CoeffFunctional, f: CoeffFunction) -> complex:
    if L.vars != f.vars:
        raise ValueError("variable counts differ")
    w = L.weights
    return complex(sum(w[k] * c for k, c in f.coeffs.items() if k in w))


def multiplicativity_defect(L: CoeffFunctional, f: CoeffFunction, g: CoeffFunction) -> float:
    """``|L(fg) - L(f) L(g)|``; ``L`` must be defined up to ``deg f + deg g``."""
    need = max(f.degree, 0) + max(g.degree, 0)
    if not L.defined_to(need):
        raise FunctionalSupportError(
            f"functional defined to degree {L.max_degree}, product needs degree {need}"
        )
    return abs(apply_functional(L, multiply(f, g)) - apply_functional(L, f) * apply_functional(L, g))


def isometry_check_mz2(f: CoeffFunction) -> float:
    """``| ||z2 f|| - ||f|| |`` in the Segal-Bargmann x Hardy norm."""
    if f.vars != 2:
        raise ValueError("expected a two-variable function")
    w = SpaceWeights.sb_hardy()
    return abs(space_norm(f.shift(1), w) - space_norm(f, w))


# ---------------------------------------------------------------------------
# M_z is not bounded below in the k!-block space


def mz_witness_partial_sums(K: int):
    """Exact cumulative ``(||g_k||^2, ||g_k / z||^2)`` for ``k = 1..K`` as Fractions.

    ``g_K = sum_{k <= K} c_k z^{(k+1)^2}`` with ``|c_k|^2 = a_{(k+1)^2} / k^2``.
    """
    if K < 1:
        raise ValueError("need at least one block")
    g, gz = Fraction(0), Fraction(0)
    out_g, out_gz = [], []
    for k in range(1, K + 1):
        n = (k + 1) ** 2
        c2 = Fraction(gkz_weight(n), k * k)
        g += c2 / gkz_weight(n)
        gz += c2 / gkz_weight(n - 1)
        out_g.append(g)
        out_gz.append(gz)
    return out_g, out_gz


@dataclass(frozen=True)
class MzWitness:
    blocks: int
    norm_sq_g_exact: Fraction
    norm_sq_g_over_z_exact: Fraction

    @property
    def norm_sq_g(self) -> float:
        return float(self.norm_sq_g_exact)

    @property
    def norm_sq_g_over_z(self) -> float:
        return float(self.norm_sq_g_over_z_exact)

    @cached_property
    def terms(self) -> CoeffFunction:
        """Coefficients of ``g_K``; overflows for roughly ``K > 280``."""
        c = {}
        for k in range(1, self.blocks + 1):
            n = (k + 1) ** 2
            val = math.exp(0.5 * math.lgamma(math.isqrt(n) + 1)) / k
            if not math.isfinite(val):
                raise OverflowError(f"coefficient of z^{n} is not representable as a double")
            c[(n,)] = val
        return CoeffFunction(1, c)

    def report(self) -> dict:
        return {
            "blocks": self.blocks,
            "norm_sq_g": self.norm_sq_g,
            "norm_sq_g_over_z": self.norm_sq_g_over_z,
        }


def mz_unbounded_witness(K: int) -> MzWitness:
    g, gz = mz_witness_partial_sums(K)
    return MzWitness(K, g[-1], gz[-1])
