import numpy as np
import pytest
from hypothesis import given, strategies as st

from picklab import HermitianMatrix, KernelSpec, PointSet, eval_kernel, gram, is_psd, min_eigenvalue
from picklab.coeff import gkz_weight
from picklab.errors import ConvergenceError, DomainError, DuplicatePointError
from picklab.kernels import kernel_matrix

from conftest import random_ball, random_disc

FAMILIES = {
    "szego": KernelSpec.szego(),
    "bergman": KernelSpec.bergman(),
    "da2": KernelSpec.drury_arveson(2),
    "da3": KernelSpec.drury_arveson(3),
    "diag_ones": KernelSpec.diagonal(lambda n: 1.0),
    "diag_gkz": KernelSpec.diagonal(gkz_weight),
    "sbh": KernelSpec.segal_bargmann_hardy(),
}


def random_points(spec, rng, n):
    if spec.family == "drury_arveson":
        return random_ball(rng, n, spec.dim)
    if spec.family == "segal_bargmann_hardy":
        z1 = 1.5 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        return np.column_stack([z1, random_disc(rng, n)])
    return random_disc(rng, n)[:, None]


def geometric_oracle(u, a=lambda n: 1.0):
    total, term, n = 0j, 1.0 + 0j, 0
    while True:
        t = a(n) * term
        total += t
        if abs(t) < 1e-17:
            return total
        term *= u
        n += 1


def test_szego_value():
    assert eval_kernel(FAMILIES["szego"], 0.5, 0.5) == pytest.approx(4 / 3, rel=1e-15)


def test_sb_hardy_normalized_at_origin(rng):
    spec = FAMILIES["sbh"]
    for y in random_points(spec, rng, 10):
        assert eval_kernel(spec, [0, 0], y) == 1


def test_diagonal_ones_matches_geometric_oracle():
    u = 0.3 * 0.2
    assert eval_kernel(FAMILIES["diag_ones"], 0.3, 0.2) == pytest.approx(geometric_oracle(u), rel=1e-14)
    assert eval_kernel(FAMILIES["diag_ones"], 0.3, 0.2) == pytest.approx(1 / (1 - 0.06), rel=1e-14)


def test_diagonal_gkz_matches_series_oracle():
    u = 0.7 * np.exp(0.4j) * 0.8
    want = geometric_oracle(u, gkz_weight)
    got = kernel_matrix(FAMILIES["diag_gkz"], np.array([[0.7 * np.exp(0.4j)]]), np.array([[0.8]]))[0, 0]
    assert got == pytest.approx(want, rel=1e-13)


def test_bergman_is_diagonal_with_linear_weights():
    spec = KernelSpec.diagonal(lambda n: n + 1.0)
    pts = PointSet.of([0.5, -0.3j, 0.8])
    np.testing.assert_allclose(gram(spec, pts).entries, gram(FAMILIES["bergman"], pts).entries, rtol=1e-13)


def test_gram_examples():
    S = FAMILIES["szego"]
    np.testing.assert_array_equal(gram(S, PointSet.of([0])).entries, [[1]])
    np.testing.assert_allclose(gram(S, PointSet.of([0, 0.5])).entries, [[1, 1], [1, 4 / 3]], rtol=1e-15)
    # hand values: 1/(1 - z w)^2 at (0.5, 0.5), (0.5, 0.8), (0.8, 0.8)
    want = [[1 / 0.75**2, 1 / 0.6**2], [1 / 0.6**2, 1 / 0.36**2]]
    np.testing.assert_allclose(gram(FAMILIES["bergman"], PointSet.of([0.5, 0.8])).entries, want, rtol=1e-14)


def test_min_eigenvalue_examples():
    assert min_eigenvalue(np.eye(2)) == pytest.approx(1.0)
    assert is_psd(np.eye(2))
    M = np.array([[1, 2], [2, 1]])
    assert min_eigenvalue(M) == pytest.approx(-1.0)
    assert not is_psd(M)
    v = np.array([1, 1j])
    R = np.outer(v, v.conj())
    assert abs(min_eigenvalue(R)) < 1e-15
    assert is_psd(R)


def test_hermitian_matrix_is_exactly_hermitian(rng):
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    H = HermitianMatrix(A).entries
    np.testing.assert_array_equal(H, H.conj().T)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_kernel(FAMILIES["szego"], 1.0, 0.0)
    with pytest.raises(DomainError):
        eval_kernel(FAMILIES["szego"], 1 - 1e-10, 0.0)
    with pytest.raises(DomainError):
        eval_kernel(FAMILIES["da2"], [0.8, 0.7], [0, 0])
    with pytest.raises(DomainError):
        eval_kernel(FAMILIES["sbh"], [100.0, 1.0], [0, 0])
    # first coordinate is unrestricted
    assert np.isfinite(eval_kernel(FAMILIES["sbh"], [10.0, 0.5], [1.0, 0.0]))


def test_duplicate_points_rejected():
    with pytest.raises(DuplicatePointError):
        PointSet.of([0.1, 0.2, 0.1 + 1e-13])
    PointSet.of([0.1, 0.1 + 1e-11])


def test_convergence_error_near_boundary():
    spec = KernelSpec.diagonal(lambda n: 1.0, max_terms=1000)
    with pytest.raises(ConvergenceError):
        eval_kernel(spec, 0.999, 0.999)


def test_finite_weights_give_polynomial_kernel():
    spec = KernelSpec.diagonal([1.0, 1.0, 3.0])
    assert eval_kernel(spec, 0.5, 0.5j) == pytest.approx(1 - 0.25j + 3 * (-0.25j) ** 2, rel=1e-14)
    assert eval_kernel(KernelSpec.diagonal([1.0, 2.0]), 0.0, 0.0) == 1.0


@pytest.mark.parametrize("name", FAMILIES)
def test_hermitian_symmetry(name, rng):
    spec = FAMILIES[name]
    X = random_points(spec, rng, 12)
    K = kernel_matrix(spec, X, X)
    Kt = kernel_matrix(spec, X, X).T.conj()
    assert np.all(np.abs(K - Kt) <= 1e-12 * (1 + np.abs(K)))


@pytest.mark.parametrize("name", FAMILIES)
def test_gram_psd_and_cauchy_schwarz(name, rng):
    spec = FAMILIES[name]
    for n in (1, 5, 40):
        K = gram(spec, PointSet(random_points(spec, rng, n))).entries
        assert is_psd(K, 1e-9)
        d = np.real(np.diag(K))
        assert np.all(np.abs(K) ** 2 <= np.outer(d, d) * (1 + 1e-10))


@pytest.mark.parametrize("name", FAMILIES)
def test_normalized_at_origin(name, rng):
    spec = FAMILIES[name]
    X = random_points(spec, rng, 20)
    k0 = kernel_matrix(spec, X, np.zeros((1, spec.dim)))
    np.testing.assert_allclose(k0, 1.0, rtol=0, atol=1e-15)


@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.sampled_from(sorted(FAMILIES)))
def test_interlacing(n, seed, name):
    rng = np.random.default_rng(seed)
    spec = FAMILIES[name]
    K = gram(spec, PointSet(random_points(spec, rng, n)))
    full = min_eigenvalue(K)
    keep = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
    assert min_eigenvalue(K.principal(keep)) >= full - 1e-10
