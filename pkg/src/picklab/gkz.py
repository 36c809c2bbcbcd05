"""Search for the two ways a unital functional on truncated H^2 can fail to be
multiplicative: it annihilates a cyclic (outer) polynomial, or it breaks
``L(fg) = L(f) L(g)`` on an explicit pair. Also a finite test for whether a
functional acts like evaluation at a grid point.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import _kernels
from .coeff import CoeffFunction, CoeffFunctional, apply_functional, multiplicativity_defect
from .errors import FunctionalSupportError, GridEmptyError, ZeroPolynomialError
from .kernels import PointSet

ROOT_TOL = 1e-9
SEARCH_TOL = 1e-9
DEFAULT_DEGREE = 12
DEFAULT_TRIALS = 10_000
# roots of an m-fold factor spread by ~eps**(1/m); clusters are judged by their centroid
CLUSTER_RADIUS = 1e-4


def polynomial_roots(p: CoeffFunction) -> np.ndarray:
    """Roots of a one-variable polynomial from its companion matrix."""
    if p.vars != 1:
        raise ValueError("expected a one-variable polynomial")
    if p.is_zero():
        raise ZeroPolynomialError("the zero polynomial has no well-defined roots")
    c = p.dense()
    d = len(c) - 1
    if d == 0:
        return np.zeros(0, dtype=np.complex128)
    C = np.zeros((d, d), dtype=np.complex128)
    C[np.arange(1, d), np.arange(d - 1)] = 1.0
    C[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(C)


def hardy_cyclic(p: CoeffFunction, tol: float = ROOT_TOL) -> bool:
    """A polynomial is cyclic in H^2 iff it has no zeros in the open disc.

    Roots with ``|rho| >= 1 - tol`` count as boundary zeros. A root inside
    that radius is forgiven only if the centroid of its cluster (roots within
    ``CLUSTER_RADIUS``) lies on or outside it, which absorbs the splitting of
    repeated boundary roots.
    """
    r = polynomial_roots(p)
    inside = np.flatnonzero(np.abs(r) < 1.0 - tol)
    for i in inside:
        cluster = r[np.abs(r - r[i]) <= CLUSTER_RADIUS]
        if abs(cluster.mean()) < 1.0 - tol:
            return False
    return True


@dataclass
class Finding:
    kind: str
    witness_f: Optional[CoeffFunction] = None
    witness_g: Optional[CoeffFunction] = None
    defect: Optional[float] = None
    trials: int = 0
    seed: int = 0
    max_degree: int = 0
    lambda_one: complex = 1.0
    unit_hypothesis: bool = True
    max_defect: float = 0.0
    companion: Optional[dict] = field(default=None)

    @property
    def is_refutation(self) -> bool:
        return self.kind != "no_violation_found"


def _default_grid() -> List[complex]:
    boundary = [np.exp(2j * np.pi * k / 8) for k in range(8)]
    interior = [0.5 * np.exp(2j * np.pi * k / 4) for k in range(4)]
    pts = boundary + interior
    return [complex(round(z.real, 15), round(z.imag, 15)) for z in pts]


def _factor_products(grid, max_factors, budget):
    """Products of ``(1 - rho z)`` over multisets of grid points, by increasing size."""
    yield CoeffFunction.constant(1.0)
    count = 1
    for m in range(1, max_factors + 1):
        for combo in itertools.combinations_with_replacement(range(len(grid)), m):
            if count >= budget:
                return
            c = np.array([1.0 + 0j])
            for i in combo:
                c = np.convolve(c, [1.0, -grid[i]])
            yield CoeffFunction.from_dense(c)
            count += 1


def _unit_disc(rng, shape):
    r = np.sqrt(rng.random(shape))
    th = 2 * np.pi * rng.random(shape)
    return r * np.exp(1j * th)


def _companion_violation(L, f, N, tol):
    """Look among powers of ``f`` for a pair breaking multiplicativity."""
    d = f.degree
    if d <= 0:
        return None
    max_pow = N // d
    powers = [f]
    for _ in range(1, max_pow):
        powers.append(powers[-1] * f)
    for a in range(1, max_pow + 1):
        for b in range(a, max_pow + 1):
            D = multiplicativity_defect(L, powers[a - 1], powers[b - 1])
            if D > tol:
                return {"f": powers[a - 1], "g": powers[b - 1], "defect": D}
    return None


def gkz_dichotomy_search(
    L: CoeffFunctional,
    N: int = DEFAULT_DEGREE,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    tol: float = SEARCH_TOL,
    max_factors: int = 3,
) -> Finding:
    """Deterministic factor-grid phase followed by ``trials`` seeded random pairs.

    Any finding returned has been re-checked with exact coefficient
    arithmetic. ``no_violation_found`` is not a proof of multiplicativity.
    """
    if L.vars != 1:
        raise ValueError("the search works on one-variable functionals")
    if not L.defined_to(2 * N):
        raise FunctionalSupportError(f"functional defined to degree {L.max_degree}, search needs {2 * N}")
    lam1 = apply_functional(L, CoeffFunction.constant(1.0))
    base = dict(
        trials=trials,
        seed=seed,
        max_degree=N,
        lambda_one=lam1,
        unit_hypothesis=abs(lam1 - 1) <= tol,
    )

    for f in _factor_products(_default_grid(), min(max_factors, N), trials):
        if abs(apply_functional(L, f)) <= tol and hardy_cyclic(f):
            comp = _companion_violation(L, f, N, tol) if base["unit_hypothesis"] else None
            return Finding("cyclic_annihilated", witness_f=f, companion=comp, **base)

    w = L.dense_weights(2 * N)
    rng = np.random.default_rng(seed)
    F = _unit_disc(rng, (trials, N + 1))
    G = _unit_disc(rng, (trials, N + 1))
    defects = _kernels.hankel_defects(F, G, w)
    max_defect = float(defects.max()) if trials else 0.0
    for t in np.flatnonzero(defects > tol):
        f = CoeffFunction.from_dense(F[t])
        g = CoeffFunction.from_dense(G[t])
        D = multiplicativity_defect(L, f, g)
        if D > tol:
            return Finding(
                "multiplicativity_violation", witness_f=f, witness_g=g, defect=D,
                max_defect=max_defect, **base,
            )
    return Finding("no_violation_found", max_defect=max_defect, **base)


def default_test_functions(nvars: int) -> List[CoeffFunction]:
    """The constant 1, each coordinate, and every degree-2 monomial."""
    out = [CoeffFunction.constant(1.0, nvars)]
    for deg in (1, 2):
        for idx in itertools.product(range(deg + 1), repeat=nvars):
            if sum(idx) == deg:
                out.append(CoeffFunction.monomial(idx))
    return out


def _check_test_functions(tests: Sequence[CoeffFunction], nvars: int):
    seen = {next(iter(t.coeffs)) for t in tests if len(t.coeffs) == 1}
    need = [(0,) * nvars] + [tuple(int(i == d) for i in range(nvars)) for d in range(nvars)]
    missing = [k for k in need if k not in seen]
    if missing:
        raise ValueError(f"test functions must include the monomials {missing}")
    if not any(t.degree == 2 and len(t.coeffs) == 1 for t in tests):
        raise ValueError("test functions must include a degree-2 monomial")


def point_eval_witness(
    L: CoeffFunctional,
    grid: PointSet,
    test_functions: Optional[Sequence[CoeffFunction]] = None,
    tol: float = SEARCH_TOL,
) -> Optional[np.ndarray]:
    """First grid point ``x`` with ``|L(phi) - phi(x)| <= tol`` for every test function."""
    if len(grid) == 0:
        raise GridEmptyError("empty grid")
    tests = list(test_functions) if test_functions is not None else default_test_functions(L.vars)
    _check_test_functions(tests, L.vars)
    ok = np.ones(len(grid), dtype=bool)
    for phi in tests:
        ok &= np.abs(apply_functional(L, phi) - phi.evaluate(grid.coords)) <= tol
    hit = np.flatnonzero(ok)
    return grid[int(hit[0])] if hit.size else None
