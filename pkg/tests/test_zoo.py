"""Function constructors, embeddings and class predicates."""

import math

import numpy as np
import pytest

from cubelab import CoordinateError, CubeFunction, DomainError, lp_norm, transform
from cubelab.core import TOL
from cubelab.zoo import (
    MDNF,
    HammingCode,
    VectorSet,
    XOSRep,
    boolean_to_submodular,
    eval_xos,
    hamming_encode,
    hamming_self_bounding,
    hockey_stick,
    is_monotone,
    is_self_bounding,
    is_subadditive,
    is_submodular,
    is_xos,
    majority,
    mdnf_to_table,
    mdnf_to_xos,
    middle_layer_dimension,
    rademacher_function,
    random_talagrand_mdnf,
    separation_example,
    subset_rank,
    subset_unrank,
    vectors_from_xos,
    xos_to_table,
)

OR2 = CubeFunction(2, [0.0, 1.0, 1.0, 1.0])
AND2 = CubeFunction(2, [0.0, 0.0, 0.0, 1.0])
XOR2 = CubeFunction(2, [0.0, 1.0, 1.0, 0.0])


# --- hockey stick and majority ----------------------------------------------


def test_hockey_stick_k2_is_or():
    assert np.allclose(hockey_stick(2, 2).values, OR2.values)


def test_hockey_stick_weight_one_value():
    f = hockey_stick(4, 4)
    for mask in (1, 2, 4, 8):
        assert f(mask) == pytest.approx(0.5)


def test_hockey_stick_class_membership():
    f = hockey_stick(4, 4)
    assert is_monotone(f)
    assert is_submodular(f)
    assert is_subadditive(f)
    assert is_self_bounding(f, 1.0)


def test_hockey_stick_constant_outside_first_k():
    f = hockey_stick(5, 3)
    for m in range(8):
        assert f(m) == f(m | 0b11000)


def test_hockey_stick_range_check():
    with pytest.raises(CoordinateError):
        hockey_stick(3, 4)
    with pytest.raises(CoordinateError):
        majority(3, 0)


def test_majority_k1_is_dictator():
    assert np.allclose(majority(2, 1).values, [0.0, 1.0, 0.0, 1.0])


def test_majority_tie_counts():
    f = majority(2, 2)
    assert f(0b01) == 1.0  # weight 1 >= 2/2
    assert f(0b00) == 0.0


def test_majority3_level1_weight():
    s = transform(majority(3, 3))
    w1 = sum(s[1 << i] ** 2 for i in range(3))
    assert w1 == pytest.approx(3 * (1 / 4) ** 2, abs=TOL)


# --- XOS representations -----------------------------------------------------


def test_single_uniform_clause_is_linear():
    n = 4
    rep = XOSRep(n, np.full((1, n), 1 / n))
    f = xos_to_table(rep)
    for m in range(1 << n):
        assert f(m) == pytest.approx(bin(m).count("1") / n, abs=TOL)


def test_unit_clauses_make_or():
    rep = XOSRep(2, [[1.0, 0.0], [0.0, 1.0]])
    assert np.allclose(xos_to_table(rep).values, OR2.values)
    assert eval_xos(rep, 0b10) == 1.0
    assert eval_xos(rep, 0) == 0.0


def test_xos_table_is_self_bounding():
    rng = np.random.default_rng(42)
    w = rng.uniform(0, 1, size=(5, 8))
    w /= w.sum(axis=1).max()
    f = xos_to_table(XOSRep(8, w))
    assert is_self_bounding(f, 1.0)
    assert is_monotone(f)
    assert is_subadditive(f)


def test_xos_rep_validation():
    with pytest.raises(DomainError):
        XOSRep(2, np.zeros((0, 2)))
    with pytest.raises(DomainError):
        XOSRep(2, [[-0.1, 0.0]])


# --- MDNF embedding ----------------------------------------------------------


def test_mdnf_single_positive_literal():
    h = MDNF(1, (frozenset({1}),))
    f = xos_to_table(mdnf_to_xos(h))
    assert np.allclose(f.values, [0.0, 1.0], atol=TOL)


def test_mdnf_and_embedding_values():
    h = MDNF(2, (frozenset({1, 2}),))
    f = xos_to_table(mdnf_to_xos(h))
    assert f(0b01) == pytest.approx(0.5, abs=TOL)
    assert f(0b11) == pytest.approx(1.0, abs=TOL)
    assert f(0b00) == 0.0


@pytest.mark.parametrize("k,seed", [(4, 1), (6, 2), (9, 3), (12, 4)])
def test_mdnf_embedding_formula_equality(k, seed):
    h = random_talagrand_mdnf(k, seed)
    t = h.max_term_size
    table = xos_to_table(mdnf_to_xos(h)).values
    htab = mdnf_to_table(h).values
    expected = 1.0 - (1.0 - htab) / t
    expected[0] = 0.0
    assert np.max(np.abs(table - expected)) <= 1e-12


def test_mdnf_embedding_is_xos():
    for k, seed in [(4, 5), (6, 6), (8, 7)]:
        f = xos_to_table(mdnf_to_xos(random_talagrand_mdnf(k, seed)))
        assert is_xos(f)


def test_mdnf_validation():
    with pytest.raises(DomainError):
        MDNF(3, ())
    with pytest.raises(DomainError):
        MDNF(3, (frozenset(),))
    with pytest.raises(CoordinateError):
        MDNF(3, (frozenset({4}),))


# --- Talagrand generator -----------------------------------------------------


def test_talagrand_deterministic():
    a = random_talagrand_mdnf(4, 99)
    b = random_talagrand_mdnf(4, 99)
    assert a.terms == b.terms
    assert len(a.terms) == 4 and all(len(t) == 2 for t in a.terms)


def test_talagrand_k1():
    h = random_talagrand_mdnf(1, 0)
    assert h.terms == (frozenset({1}), frozenset({1}))
    assert np.allclose(mdnf_to_table(h).values, [0.0, 1.0])


def test_talagrand_general_k_uses_ceil_sqrt():
    h = random_talagrand_mdnf(10, 5)
    assert len(h.terms) == 16
    assert all(len(t) == 4 for t in h.terms)


# --- subset ranking ----------------------------------------------------------


def test_subset_rank_first_is_zero():
    assert subset_rank((1, 2, 3), 6) == 0


def test_subset_rank_unrank_round_trip():
    seen = set()
    for idx in range(math.comb(6, 3)):
        s = subset_unrank(idx, 3, 6)
        assert subset_rank(s, 6) == idx
        seen.add(s)
    assert len(seen) == 20


def test_subset_rank_lex_increasing():
    subs = [tuple(sorted(subset_unrank(i, 3, 6))) for i in range(20)]
    assert subs == sorted(subs)


def test_subset_unrank_range_error():
    with pytest.raises(CoordinateError):
        subset_unrank(20, 3, 6)


# --- middle-layer embedding --------------------------------------------------


def test_embedding_k1_hand_enumeration():
    assert middle_layer_dimension(1) == 1
    h1 = CubeFunction(1, [1.0, 1.0])
    f = boolean_to_submodular(h1)
    # h == 1 raises both mapped middle-layer points to 1: f = OR
    assert np.allclose(f.values, OR2.values)
    h0 = CubeFunction(1, [0.0, 0.0])
    f0 = boolean_to_submodular(h0)
    # mapped points get 1 - 1/2 = 1/2, nothing else changes
    assert np.allclose(f0.values, [0.0, 0.5, 0.5, 1.0])


def test_embedding_middle_layer_values_two_valued():
    h = CubeFunction(4, (np.arange(16) % 3 == 0).astype(float))
    f = boolean_to_submodular(h)
    t = middle_layer_dimension(4)
    assert t == 3
    vals = {
        round(f(m), 12)
        for m in range(1 << 6)
        if bin(m).count("1") == t
    }
    assert vals <= {round(1 - 1 / (2 * t), 12), 1.0}


def test_embedding_monotone_submodular_sweep():
    rng = np.random.default_rng(7)
    targets = [CubeFunction(4, rng.integers(0, 2, size=16).astype(float)) for _ in range(16)]
    targets.append(CubeFunction(4, np.zeros(16)))
    targets.append(CubeFunction(4, np.ones(16)))
    for h in targets:
        f = boolean_to_submodular(h)
        assert f.n == 6
        assert is_monotone(f)
        assert is_submodular(f)


def test_embedding_rejects_non_boolean():
    with pytest.raises(DomainError):
        boolean_to_submodular(CubeFunction(2, [0.0, 0.5, 1.0, 1.0]))


# --- Hamming embedding -------------------------------------------------------


def test_hamming_zero_maps_to_zero():
    code = HammingCode(3)
    assert code.k == 4
    assert hamming_encode(code, 0) == 0


def test_hamming_distance_three_exhaustive():
    for r in (2, 3, 4):
        code = HammingCode(r)
        words = [x | (hamming_encode(code, x) << code.k) for x in range(1 << code.k)]
        for a in range(len(words)):
            for b in range(a + 1, len(words)):
                assert bin(words[a] ^ words[b]).count("1") >= 3


def test_hamming_self_bounding_parity_target():
    parity = CubeFunction(4, np.array([bin(m).count("1") % 2 for m in range(16)], dtype=float))
    f = hamming_self_bounding(parity, 3)
    assert f.n == 7
    assert is_self_bounding(f, 1.0)


def test_hamming_self_bounding_sweep():
    rng = np.random.default_rng(11)
    targets = [CubeFunction(4, rng.integers(0, 2, size=16).astype(float)) for _ in range(16)]
    targets.append(CubeFunction(4, np.zeros(16)))
    targets.append(CubeFunction(4, np.ones(16)))
    for h in targets:
        assert is_self_bounding(hamming_self_bounding(h, 3), 1.0)


def test_hamming_dimension_mismatch():
    with pytest.raises(DomainError):
        hamming_self_bounding(CubeFunction(3, np.zeros(8)), 3)


# --- Rademacher complexity ---------------------------------------------------


def test_rademacher_unit_vectors():
    vs = VectorSet(2, [[1.0, 0.0], [0.0, 1.0]])
    f = rademacher_function(vs)
    # E[max(s1, s2)] = 1/2, scaled by 1/n = 1/2
    assert f(0b11) == pytest.approx(0.25, abs=TOL)
    assert f(0b01) == pytest.approx(0.25, abs=TOL)
    assert f(0b10) == pytest.approx(0.25, abs=TOL)
    assert f(0) == 0.0


def test_rademacher_zero_vector():
    f = rademacher_function(VectorSet(3, np.zeros((1, 3))))
    assert np.all(f.values == 0.0)


def test_rademacher_monotone_and_xos():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        vs = VectorSet(n, rng.uniform(-1, 1, size=(int(rng.integers(1, 5)), n)))
        f = rademacher_function(vs)
        assert f(0) == 0.0
        assert is_monotone(f)
        assert is_xos(f)


def test_vectors_from_xos_round_trips():
    # single clause (1,1): the table is f(A) = |A|
    rep = XOSRep(2, [[1.0, 1.0]])
    f = rademacher_function(vectors_from_xos(rep))
    assert np.max(np.abs(f.values - xos_to_table(rep).values)) <= TOL
    # OR round-trip
    rep_or = XOSRep(2, [[1.0, 0.0], [0.0, 1.0]])
    f_or = rademacher_function(vectors_from_xos(rep_or))
    assert np.max(np.abs(f_or.values - OR2.values)) <= TOL
    # zero-weight clause only
    zero = XOSRep(3, np.zeros((1, 3)))
    assert np.all(rademacher_function(vectors_from_xos(zero)).values == 0.0)


# --- separation fixture ------------------------------------------------------


def test_separation_example_classes():
    f = separation_example()
    assert is_monotone(f)
    assert is_self_bounding(f, 1.0)
    sub = is_subadditive(f)
    assert not sub
    assert sub.witness["set_coords"] == ((1,), (2, 3))
    cert = is_xos(f)
    assert not cert


def test_separation_example_values():
    f = separation_example()
    assert f(0) == 0.0
    assert f(0b111) == 1.0
    assert f(0b101) == pytest.approx(4 / 5)


# --- predicates --------------------------------------------------------------


def test_and_not_submodular_with_witness():
    res = is_submodular(AND2)
    assert not res
    assert res.witness["pair"] == (1, 2)
    assert res.witness["point"] == 0
    assert res.witness["second_derivative"] == pytest.approx(1.0)


def test_xor_submodular_not_monotone():
    assert is_submodular(XOR2)
    assert not is_monotone(XOR2)


def test_linear_clause_self_bounding_equality():
    rep = XOSRep(3, [[0.2, 0.3, 0.4]])
    f = xos_to_table(rep)
    assert is_self_bounding(f, 1.0)


def test_is_xos_or_with_certificate():
    cert = is_xos(OR2)
    assert cert
    w = cert.supports[0b01]
    assert w[0] == pytest.approx(1.0, abs=1e-9)
    # every support must satisfy all constraints
    for a_mask, w in cert.supports.items():
        if a_mask == 0:
            continue
        for b in range(4):
            bits = [i for i in range(2) if b >> i & 1]
            assert sum(w[i] for i in bits) <= OR2(b) + 1e-8
        on = [i for i in range(2) if a_mask >> i & 1]
        assert sum(w[i] for i in on) == pytest.approx(OR2(a_mask), abs=1e-8)


def test_is_xos_domain_errors():
    with pytest.raises(DomainError):
        is_xos(CubeFunction(2, [0.5, 1.0, 1.0, 1.0]))
    with pytest.raises(DomainError):
        is_xos(CubeFunction(2, [0.0, -1.0, 1.0, 1.0]))


def test_submodular_predicate_matches_quadruple_definition():
    rng = np.random.default_rng(123)
    agree = 0
    for _ in range(500):
        n = int(rng.integers(2, 7))
        f = CubeFunction(n, rng.uniform(0, 1, size=1 << n))
        via_deriv = bool(is_submodular(f))
        via_def = True
        size = 1 << n
        vals = f.values
        for a in range(size):
            union = np.uint64(a) | np.arange(size, dtype=np.uint64)
            inter = np.uint64(a) & np.arange(size, dtype=np.uint64)
            if np.any(vals[union] + vals[inter] > vals[a] + vals + 1e-9):
                via_def = False
                break
        assert via_deriv == via_def
        agree += 1
    assert agree == 500


def test_monotone_witness_is_lowest():
    f = CubeFunction(2, [1.0, 0.0, 1.0, 0.0])  # decreasing in x1
    res = is_monotone(f)
    assert not res
    assert res.witness["coordinate"] == 1
    assert res.witness["point"] == 0
