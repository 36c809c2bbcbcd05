import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from picklab.coeff import (
    CoeffFunction,
    CoeffFunctional,
    SpaceWeights,
    apply_functional,
    check_sequence_properties,
    gkz_weight,
    isometry_check_mz2,
    multiplicativity_defect,
    multiply,
    mz_unbounded_witness,
    mz_witness_partial_sums,
    space_norm,
    space_norm_sq,
)
from picklab.errors import FunctionalSupportError

z = CoeffFunction.monomial(1)
one = CoeffFunction.constant(1.0)
z1 = CoeffFunction.monomial((1, 0))
z2 = CoeffFunction.monomial((0, 1))
E00_E01 = CoeffFunctional.basis_sum([(0, 0), (0, 1)])


def block_index(n):
    """k with k^2 <= n < (k+1)^2, by linear scan."""
    k = 0
    while (k + 1) * (k + 1) <= n:
        k += 1
    return k


small_ints = st.integers(-4, 4)
coeff_1d = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=1, max_size=8)


def coeff_2d(max_deg=4):
    return st.dictionaries(
        st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)),
        st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        min_size=1,
        max_size=10,
    ).map(lambda d: CoeffFunction(2, d))


# --- construction and products ------------------------------------------


def test_zero_coefficients_dropped():
    f = CoeffFunction(1, {(0,): 1, (3,): 0})
    assert f.coeffs == {(0,): 1}
    assert f.degree == 0


def test_multiply_examples():
    assert multiply(one + z, one - z) == one - z * z
    assert multiply(z2, z2) == CoeffFunction.monomial((0, 2))
    assert (one - z) ** 2 == CoeffFunction.from_dense([1, -2, 1])


@given(coeff_1d, coeff_1d)
def test_multiply_matches_numpy_polymul(a, b):
    got = multiply(CoeffFunction.from_dense(a), CoeffFunction.from_dense(b)).dense()
    want = np.polynomial.polynomial.polymul(np.array(a, dtype=complex), np.array(b, dtype=complex))
    want = np.trim_zeros(want, "b")
    n = max(len(got), len(want))
    np.testing.assert_allclose(np.pad(got, (0, n - len(got))), np.pad(want, (0, n - len(want))), atol=1e-9)


@given(coeff_2d(), coeff_2d(), st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_multiply_evaluates_pointwise(f, g, x, y):
    lhs = multiply(f, g)([x, y])
    rhs = f([x, y]) * g([x, y])
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs)) * 10**4


# --- norms ---------------------------------------------------------------


def test_space_norm_examples():
    for w in (SpaceWeights.hardy(), SpaceWeights.gkz()):
        assert space_norm(one, w) == 1.0
    assert space_norm(CoeffFunction.constant(1.0, 2), SpaceWeights.sb_hardy()) == 1.0
    # a_5 = 2 since 4 <= 5 < 9
    assert space_norm_sq(CoeffFunction.monomial(5), SpaceWeights.gkz()) == 0.5
    assert space_norm_sq(CoeffFunction.monomial((1, 1)), SpaceWeights.sb_hardy()) == 1.0
    assert SpaceWeights.gkz().weight((5,)) == Fraction(1, 2)


def test_monomial_norms_are_reciprocal_weights():
    w = SpaceWeights.gkz()
    for n in range(60):
        assert w.weight((n,)) == Fraction(1, gkz_weight(n))


@pytest.mark.parametrize("w", [SpaceWeights.hardy(), SpaceWeights.gkz(), SpaceWeights.diagonal(lambda n: 1.0 / (n + 1))])
@given(f=coeff_1d, g=coeff_1d)
def test_parallelogram_1d(w, f, g):
    f = CoeffFunction.from_dense(f)
    g = CoeffFunction.from_dense(g)
    lhs = space_norm(f + g, w) ** 2 + space_norm(f - g, w) ** 2
    rhs = 2 * space_norm(f, w) ** 2 + 2 * space_norm(g, w) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-300)


@given(coeff_2d(6), coeff_2d(6))
def test_parallelogram_sb_hardy(f, g):
    w = SpaceWeights.sb_hardy()
    lhs = space_norm(f + g, w) ** 2 + space_norm(f - g, w) ** 2
    rhs = 2 * space_norm(f, w) ** 2 + 2 * space_norm(g, w) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-300)


# --- the k!-block sequence ----------------------------------------------


@pytest.mark.parametrize("n,want", [(0, 1), (3, 1), (4, 2), (8, 2), (9, 6), (15, 6), (16, 24)])
def test_gkz_weight_values(n, want):
    assert gkz_weight(n) == want


def test_gkz_weight_matches_scan_and_is_nondecreasing():
    prev = 0
    for n in range(10_001):
        a = gkz_weight(n)
        assert a == math.factorial(block_index(n))
        assert a >= prev
        prev = a


def test_sequence_report_examples():
    r = check_sequence_properties(8)
    assert r.ratios_le_one and r.root_bracket_ok
    assert (r.min_ratio, r.min_ratio_at) == (Fraction(1, 2), 3)
    r = check_sequence_properties(120)
    assert (r.min_ratio, r.min_ratio_at) == (Fraction(1, 10), 99)
    # scan oracle on floats
    ratios = [gkz_weight(n) / gkz_weight(n + 1) for n in range(120)]
    assert min(ratios) == pytest.approx(0.1) and int(np.argmin(ratios)) == 99
    assert check_sequence_properties(4).root_bracket_ok
    assert 2 ** 0.25 <= 2 ** 0.5


def test_sequence_horizon_too_small():
    with pytest.raises(ValueError):
        check_sequence_properties(3)


# --- functionals ---------------------------------------------------------


def test_apply_functional_examples():
    f = CoeffFunction(2, {(0, 0): 1, (1, 0): 3, (0, 1): 2})
    assert apply_functional(E00_E01, f) == 3
    assert apply_functional(E00_E01, CoeffFunction.constant(1.0, 2)) == 1
    assert apply_functional(E00_E01, z2) == 1


def test_defect_examples():
    assert multiplicativity_defect(E00_E01, z2, z2) == 1.0
    L = CoeffFunctional.basis_sum([0, 1])
    f = one - z
    assert apply_functional(L, f) == 0
    assert apply_functional(L, f * f) == -1
    assert multiplicativity_defect(L, f, f) == 1.0


def test_defect_requires_support():
    L = CoeffFunctional.point_evaluation(0.3, 4)
    multiplicativity_defect(L, z * z, z * z)
    with pytest.raises(FunctionalSupportError):
        multiplicativity_defect(L, z * z, z * z * z)


@given(st.lists(small_ints, min_size=1, max_size=6), st.lists(small_ints, min_size=1, max_size=6),
       st.sampled_from([0.5, -0.25, 0.75, 0.125j, 0.5 - 0.5j]))
def test_point_evaluation_exactly_multiplicative(a, b, x):
    # dyadic point, small integer coefficients: every operation is exact in binary floating point
    L = CoeffFunctional.point_evaluation(x, 12)
    assert multiplicativity_defect(L, CoeffFunction.from_dense(a), CoeffFunction.from_dense(b)) == 0.0


@given(coeff_1d, coeff_1d, st.complex_numbers(max_magnitude=0.95))
def test_point_evaluation_multiplicative_generic(a, b, x):
    f, g = CoeffFunction.from_dense(a), CoeffFunction.from_dense(b)
    L = CoeffFunctional.point_evaluation(x, 14)
    assert multiplicativity_defect(L, f, g) <= 1e-12 * (1 + f.l1() * g.l1())


@given(st.integers(1, 2), st.integers(0, 2**32 - 1),
       st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_functional_linear(nvars, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    shape = (6,) if nvars == 1 else (4, 4)

    def rand():
        return CoeffFunction.from_dense(rng.normal(size=shape) + 1j * rng.normal(size=shape))

    L = CoeffFunctional(nvars, rand().coeffs)
    f, g = rand(), rand()
    lhs = apply_functional(L, alpha * f + beta * g)
    rhs = alpha * apply_functional(L, f) + beta * apply_functional(L, g)
    scale = sum(abs(v) for v in L.weights.values())
    assert abs(lhs - rhs) <= 1e-12 * (abs(alpha) * f.l1() + abs(beta) * g.l1()) * max(1.0, scale)


# --- the Segal-Bargmann x Hardy example ---------------------------------


def test_isometry_examples():
    assert isometry_check_mz2(CoeffFunction.constant(1.0, 2)) == 0
    assert isometry_check_mz2(z1) == 0


@given(st.integers(0, 2**32 - 1))
def test_isometry_random(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(11, 11)) + 1j * rng.normal(size=(11, 11))
    c[np.add.outer(np.arange(11), np.arange(11)) > 10] = 0
    f = CoeffFunction.from_dense(c)
    assert isometry_check_mz2(f) <= 1e-12 * space_norm(f, SpaceWeights.sb_hardy())


# --- non-closed range witness -------------------------------------------


def test_mz_witness_small_blocks():
    w = mz_unbounded_witness(1)
    assert (w.norm_sq_g_exact, w.norm_sq_g_over_z_exact) == (1, 2)
    w = mz_unbounded_witness(2)
    assert (w.norm_sq_g_exact, w.norm_sq_g_over_z_exact) == (Fraction(5, 4), Fraction(11, 4))


def test_mz_witness_terms_match_norms():
    w = mz_unbounded_witness(6)
    g = w.terms
    assert space_norm_sq(g, SpaceWeights.gkz()) == pytest.approx(w.norm_sq_g, rel=1e-13)
    g_over_z = CoeffFunction(1, {(n - 1,): c for (n,), c in g.coeffs.items()})
    assert space_norm_sq(g_over_z, SpaceWeights.gkz()) == pytest.approx(w.norm_sq_g_over_z, rel=1e-13)


def test_mz_witness_against_harmonic_oracle():
    g, gz = mz_witness_partial_sums(200)
    basel = np.cumsum([1 / k**2 for k in range(1, 201)])
    harm = np.cumsum([1 / k for k in range(1, 201)])
    np.testing.assert_allclose([float(v) for v in g], basel, rtol=1e-14)
    np.testing.assert_allclose([float(v) for v in gz], basel + harm, rtol=1e-14)
    # 1 + sum_{k=2..K} 1/k is the full harmonic sum
    assert all(float(v) >= h for v, h in zip(gz, harm))
    assert all(float(v) <= 1.6450 for v in g)
    assert all(b > a for a, b in zip(gz, gz[1:]))
    assert next(k for k, v in enumerate(gz, 1) if v > 5) <= 50
