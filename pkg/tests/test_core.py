"""Core transform/derivative/norm behaviour against hand-derived oracles."""

import math

import numpy as np
import pytest

from cubelab import (
    CoordinateError,
    CubeFunction,
    DimensionCapError,
    DomainError,
    SparsePolynomial,
    derivative,
    eval_polynomial,
    influence,
    inverse_transform,
    l2_degree,
    level_weight,
    lp_norm,
    project,
    second_derivative,
    structured_tail,
    tail_weight,
    threshold_norm,
    total_influence,
    transform,
    truncate,
)
from cubelab.core import (
    ORACLE_TOL,
    TOL,
    level_weights,
    polynomial_table,
    transform_reference,
)

OR2 = CubeFunction(2, [0.0, 1.0, 1.0, 1.0])  # masks 00, 01, 10, 11
X1 = CubeFunction(1, [0.0, 1.0])


def random_table(n, rng):
    return CubeFunction(n, rng.uniform(-1.0, 1.0, size=1 << n))


# --- transform -------------------------------------------------------------


def test_transform_constant_only_empty_character():
    s = transform(CubeFunction.constant(3, 2.5))
    assert s[0] == pytest.approx(2.5, abs=TOL)
    assert np.max(np.abs(s.coeffs[1:])) <= TOL


def test_transform_or_four_point_values():
    # brute-force 4-point transform: fhat(S) = (1/4) sum f(x) chi_S(x)
    s = transform(OR2)
    assert s[0b00] == pytest.approx(3 / 4, abs=TOL)
    assert s[0b01] == pytest.approx(-1 / 4, abs=TOL)
    assert s[0b10] == pytest.approx(-1 / 4, abs=TOL)
    assert s[0b11] == pytest.approx(-1 / 4, abs=TOL)


def test_transform_dictator_sign_convention():
    s = transform(X1)
    assert s[0] == pytest.approx(0.5, abs=TOL)
    assert s[1] == pytest.approx(-0.5, abs=TOL)


def test_transform_matches_definition_sum_oracle():
    rng = np.random.default_rng(7)
    for n in range(1, 9):
        f = random_table(n, rng)
        fast = transform(f).coeffs
        slow = transform_reference(f).coeffs
        assert np.max(np.abs(fast - slow)) <= ORACLE_TOL


def test_inverse_transform_examples():
    f = inverse_transform(transform(X1))
    assert np.allclose(f.values, [0.0, 1.0], atol=TOL)
    zero = inverse_transform(transform(CubeFunction.constant(4, 0.0)))
    assert np.all(zero.values == 0.0)


def test_round_trip_random_n10():
    rng = np.random.default_rng(11)
    f = random_table(10, rng)
    back = inverse_transform(transform(f))
    assert np.max(np.abs(back.values - f.values)) <= TOL


def test_parseval_random_sweep():
    rng = np.random.default_rng(3)
    for n in (1, 4, 7):
        f = random_table(n, rng)
        s = transform(f)
        assert s.total_weight() == pytest.approx(np.mean(f.values**2), abs=TOL)


def test_dimension_cap_error(monkeypatch):
    from cubelab.core import check_dimension

    with pytest.raises(DimensionCapError):
        check_dimension(9, cap=8)
    monkeypatch.setenv("CUBELAB_MAX_N", "4")
    with pytest.raises(DimensionCapError):
        CubeFunction(5, np.zeros(32))
    monkeypatch.delenv("CUBELAB_MAX_N")
    CubeFunction(5, np.zeros(32))  # default cap admits n=5


def test_table_validation():
    with pytest.raises(DomainError):
        CubeFunction(2, [0.0, 1.0, 2.0])
    with pytest.raises(DomainError):
        CubeFunction(1, [0.0, np.nan])


# --- derivatives -----------------------------------------------------------


def test_derivative_dictator_is_one():
    d = derivative(X1, 1)
    assert np.allclose(d.values, 1.0, atol=TOL)


def test_derivative_or_is_one_minus_other():
    d1 = derivative(OR2, 1)
    # d_1 OR = 1 - x_2: value 1 when x_2 = 0 (masks 00, 01), 0 when x_2 = 1
    assert np.allclose(d1.values, [1.0, 1.0, 0.0, 0.0], atol=TOL)


def test_derivative_out_of_range():
    with pytest.raises(CoordinateError):
        derivative(OR2, 3)
    with pytest.raises(CoordinateError):
        derivative(OR2, 0)


def test_second_derivative_cross_terms():
    # f = 1 - (1-x1)(1-x2) = OR has d_12 f = -1 everywhere
    d = second_derivative(OR2, 1, 2)
    assert np.allclose(d.values, -1.0, atol=TOL)
    # AND has d_12 f = +1 (1 - 0 - 0 + 0)
    and2 = CubeFunction(2, [0.0, 0.0, 0.0, 1.0])
    assert np.allclose(second_derivative(and2, 1, 2).values, 1.0, atol=TOL)


def test_second_derivative_diagonal_is_zero():
    rng = np.random.default_rng(1)
    f = random_table(4, rng)
    assert np.all(second_derivative(f, 2, 2).values == 0.0)


def test_second_derivative_is_iterated_first():
    rng = np.random.default_rng(2)
    f = random_table(5, rng)
    direct = second_derivative(f, 1, 4)
    iterated = derivative(derivative(f, 4), 1)
    assert np.max(np.abs(direct.values - iterated.values)) <= TOL


def test_derivative_spectrum_identity():
    # transform(d_i f)(T) = -2 fhat(T u {i}) for i not in T, 0 for i in T
    rng = np.random.default_rng(5)
    for n in (3, 6):
        f = random_table(n, rng)
        s = transform(f)
        for i in (1, n):
            ds = transform(derivative(f, i))
            bit = 1 << (i - 1)
            for t in range(1 << n):
                if t & bit:
                    assert abs(ds[t]) <= TOL
                else:
                    assert ds[t] == pytest.approx(-2.0 * s[t | bit], abs=TOL)


def test_second_derivative_norm_identity():
    # ||d_ij f||_2^2 = 16 sum_{S containing i,j} fhat(S)^2
    rng = np.random.default_rng(6)
    f = random_table(6, rng)
    s = transform(f)
    pc_mask = np.arange(1 << 6)
    for i, j in [(1, 2), (3, 6)]:
        both = (1 << (i - 1)) | (1 << (j - 1))
        rhs = 16.0 * float(np.sum(s.coeffs[(pc_mask & both) == both] ** 2))
        lhs = lp_norm(second_derivative(f, i, j), 2) ** 2
        assert lhs == pytest.approx(rhs, abs=TOL)


# --- norms -----------------------------------------------------------------


def test_lp_norms():
    assert lp_norm(OR2, 2) == pytest.approx(math.sqrt(3 / 4), abs=TOL)
    assert lp_norm(CubeFunction.constant(3, 1.0), 1) == 1.0
    assert lp_norm(CubeFunction.constant(3, 1.0), 2) == 1.0
    assert lp_norm(CubeFunction.constant(3, 1.0), np.inf) == 1.0
    assert lp_norm(CubeFunction.constant(2, 0.0), 2) == 0.0
    with pytest.raises(DomainError):
        lp_norm(OR2, 3)


def threshold_norm_reference(f):
    """Grid oracle: largest qualifying alpha among all candidate points."""
    absv = np.abs(f.values)
    cands = {0.0}
    for v in absv:
        cands.add(float(v))
    for v in sorted(set(absv)):
        p = float(np.mean(absv >= v))
        cands.add(p ** (1 / 3))
    best = 0.0
    for a in cands:
        if float(np.mean(absv >= a)) >= a**3 - 1e-15:
            best = max(best, a)
    return best


def test_threshold_norm_examples():
    assert threshold_norm(CubeFunction.constant(3, 1.0)) == pytest.approx(1.0)
    assert threshold_norm(CubeFunction.constant(3, -0.5)) == pytest.approx(0.5)
    assert threshold_norm(CubeFunction.constant(3, 0.0)) == 0.0


def test_threshold_norm_plateau_interior_point():
    # |f| = 1 on a quarter of the points: G(alpha) = 1/4 on (0, 1];
    # qualifying sup is (1/4)^{1/3} < 1, interior to the plateau.
    f = CubeFunction(2, [1.0, 0.0, 0.0, 0.0])
    assert threshold_norm(f) == pytest.approx(0.25 ** (1 / 3), abs=TOL)


def test_threshold_norm_matches_grid_oracle():
    rng = np.random.default_rng(12)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        f = random_table(n, rng)
        assert threshold_norm(f) == pytest.approx(
            threshold_norm_reference(f), abs=1e-12
        )
    # discrete-valued tables exercise plateau boundaries
    for _ in range(50):
        n = int(rng.integers(1, 6))
        vals = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0], size=1 << n)
        f = CubeFunction(n, vals)
        assert threshold_norm(f) == pytest.approx(
            threshold_norm_reference(f), abs=1e-12
        )


# --- spectral weights ------------------------------------------------------


def test_level_and_tail_weights_or():
    s = transform(OR2)
    assert level_weight(s, 0) == pytest.approx(9 / 16, abs=TOL)
    assert level_weight(s, 1) == pytest.approx(2 / 16, abs=TOL)
    assert level_weight(s, 2) == pytest.approx(1 / 16, abs=TOL)
    assert tail_weight(s, 1) == pytest.approx(1 / 16, abs=TOL)
    assert tail_weight(s, 2) == 0.0


def test_levels_sum_to_energy():
    rng = np.random.default_rng(8)
    f = random_table(7, rng)
    s = transform(f)
    assert float(level_weights(s).sum()) == pytest.approx(
        lp_norm(f, 2) ** 2, abs=TOL
    )


def test_tail_monotone_nonincreasing():
    rng = np.random.default_rng(9)
    f = random_table(6, rng)
    s = transform(f)
    tails = [tail_weight(s, d) for d in range(7)]
    assert all(a >= b - TOL for a, b in zip(tails, tails[1:]))
    assert tails[-1] == 0.0


def test_structured_tail_cases():
    rng = np.random.default_rng(10)
    f = random_table(8, rng)
    s = transform(f)
    assert structured_tail(s, range(1, 9), 0) == 0.0
    for k in (0, 3):
        assert structured_tail(s, (), k) == pytest.approx(
            tail_weight(s, k), abs=TOL
        )
    # brute-force subset enumeration oracle for L = {1, 2}, k = 2
    lmask = 0b11
    brute = sum(
        s[m] ** 2
        for m in range(1 << 8)
        if bin(m & ~lmask & 0xFF).count("1") > 2
    )
    assert structured_tail(s, (1, 2), 2) == pytest.approx(brute, abs=TOL)


def test_l2_degree():
    s = transform(OR2)
    assert l2_degree(s, 0.3) == 1
    assert l2_degree(transform(CubeFunction.constant(5, 0.7)), 0.01) == 0
    with pytest.raises(DomainError):
        l2_degree(s, 0.0)


# --- influence -------------------------------------------------------------


def test_influence_dictator():
    assert influence(X1, 1, 2) == pytest.approx(0.25, abs=TOL)
    f = CubeFunction(2, [0.0, 1.0, 0.0, 1.0])  # = x1 on n=2
    assert influence(f, 2, 2) == 0.0


def test_influence_spectrum_identity():
    rng = np.random.default_rng(13)
    f = random_table(6, rng)
    s = transform(f)
    masks = np.arange(1 << 6)
    for i in (1, 4, 6):
        bit = 1 << (i - 1)
        fourier_mass = float(np.sum(s.coeffs[(masks & bit) != 0] ** 2))
        assert influence(f, i, 2) == pytest.approx(fourier_mass, abs=TOL)
        assert influence(s, i, 2) == pytest.approx(fourier_mass, abs=TOL)


def test_total_influence_and_kappa_validation():
    assert total_influence(X1, 2) == pytest.approx(0.25, abs=TOL)
    with pytest.raises(DomainError):
        influence(X1, 1, 0.5)


# --- projections and truncation --------------------------------------------


def test_project_cases():
    rng = np.random.default_rng(14)
    f = random_table(5, rng)
    assert np.allclose(project(f, range(1, 6)).values, f.values, atol=TOL)
    assert np.allclose(
        project(f, ()).values, float(np.mean(f.values)), atol=TOL
    )
    p = project(OR2, (1,))
    assert np.allclose(p.values, [0.5, 1.0, 0.5, 1.0], atol=TOL)


def test_project_zeroes_outside_spectrum():
    rng = np.random.default_rng(15)
    f = random_table(5, rng)
    coords = (2, 4)
    imask = 0b01010
    s = transform(project(f, coords))
    orig = transform(f)
    for m in range(1 << 5):
        if m & ~imask:
            assert abs(s[m]) <= TOL
        else:
            assert s[m] == pytest.approx(orig[m], abs=TOL)


def test_truncate_residual_matches_tail():
    rng = np.random.default_rng(16)
    f = random_table(6, rng)
    s = transform(f)
    for d in (0, 2, 6):
        p = truncate(s, d)
        err = lp_norm(
            CubeFunction(6, polynomial_table(p).values - f.values), 2
        )
        assert err**2 == pytest.approx(tail_weight(s, d), abs=TOL)
    pl = truncate(s, 1, coords=(1, 2, 5))
    err = lp_norm(CubeFunction(6, polynomial_table(pl).values - f.values), 2)
    assert err**2 == pytest.approx(structured_tail(s, (1, 2, 5), 1), abs=TOL)


def test_truncate_lossless_and_degree_zero():
    s = transform(OR2)
    full = truncate(s, 2)
    assert np.allclose(polynomial_table(full).values, OR2.values, atol=TOL)
    const = truncate(s, 0)
    assert set(const.terms) == {0}
    assert const.terms[0] == pytest.approx(3 / 4, abs=TOL)
    assert lp_norm(CubeFunction(2, polynomial_table(truncate(s, 1)).values - OR2.values), 2) ** 2 == pytest.approx(1 / 16, abs=TOL)


def test_eval_polynomial():
    empty = SparsePolynomial(3, {})
    assert all(eval_polynomial(empty, x) == 0.0 for x in range(8))
    const = SparsePolynomial(3, {0: 0.4})
    assert eval_polynomial(const, 5) == pytest.approx(0.4)
    # clamp
    big = SparsePolynomial(1, {0: 1.7})
    assert eval_polynomial(big, 0, clip=True) == 1.0
    rng = np.random.default_rng(17)
    f = random_table(4, rng)
    p = truncate(transform(f), 4)
    for x in range(16):
        assert eval_polynomial(p, x) == pytest.approx(f(x), abs=TOL)


def test_sparse_polynomial_drops_zeros_and_tracks_degree():
    p = SparsePolynomial(4, {0b0011: 1.0, 0b1000: 0.0, 0: 2.0})
    assert set(p.terms) == {0b0011, 0}
    assert p.degree == 2
