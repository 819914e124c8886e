"""Constructors for the function families under study, plus exact
class-membership predicates.

Families: hockey-stick and majority (symmetric lower-bound instances),
XOS clause representations, monotone DNFs and their XOS embedding,
Boolean-to-submodular middle-layer embedding, Hamming-code
self-bounding embedding, Rademacher-complexity functions, and the fixed
3-variable function separating monotone self-bounding from XOS.

Predicates (`is_monotone`, `is_submodular`, `is_subadditive`,
`is_self_bounding`, `is_xos`) run exhaustively over the table and
return a result carrying a deterministic witness on failure (lowest
coordinate/pair, then lowest point mask).  Constructed tables are exact
dyadic-denominator rationals in binary floating point, so the default
tolerance of 1e-9 cleanly separates genuine violations (at least
1/(2t) >= 1/48 in every construction here) from rounding noise.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from ._bits import all_masks, coords_to_mask, mask_to_coords, popcounts
from .core import CubeFunction, check_dimension
from .errors import CoordinateError, DomainError, SimplexError

PREDICATE_TOL = 1e-9

SUBADDITIVE_CAP = 13  # the pair scan is O(4^n)
XOS_LP_CAP = 10  # one LP with up to 2^n constraints per point
RADEMACHER_CAP = 16  # exact sign-vector enumeration is O(3^n |V|)
XOS_TO_VECTORS_CAP = 10  # the vector set has |C| * 2^n members


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class XOSRep:
    """f(x) = max over clauses c of sum_i w_{ci} x_i, all weights >= 0."""

    n: int
    clauses: np.ndarray

    def __post_init__(self):
        check_dimension(self.n)
        w = np.asarray(self.clauses, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] != self.n:
            raise DomainError(
                f"clauses must be a (m, {self.n}) array with m >= 1, "
                f"got shape {w.shape}"
            )
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DomainError("clause weights must be finite and nonnegative")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "clauses", w)

    @property
    def num_clauses(self) -> int:
        return int(self.clauses.shape[0])


@dataclass(frozen=True)
class MDNF:
    """Monotone DNF over [k]: OR of ANDs of positive literals."""

    k: int
    terms: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("MDNF needs k >= 1")
        terms = tuple(frozenset(int(i) for i in t) for t in self.terms)
        if not terms:
            raise DomainError("MDNF needs at least one term")
        for t in terms:
            if not t:
                raise DomainError("MDNF terms must be nonempty")
            if not all(1 <= i <= self.k for i in t):
                raise CoordinateError(f"term {sorted(t)} not within [1, {self.k}]")
        object.__setattr__(self, "terms", terms)

    @property
    def max_term_size(self) -> int:
        return max(len(t) for t in self.terms)

    def __call__(self, x: int) -> int:
        for t in self.terms:
            tm = coords_to_mask(t, self.k)
            if x & tm == tm:
                return 1
        return 0


@dataclass(frozen=True)
class VectorSet:
    """Finite bounded set of real n-vectors."""

    n: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] != self.n:
            raise DomainError(
                f"vectors must be a nonempty (m, {self.n}) array, got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise DomainError("vector entries must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)


@dataclass(frozen=True)
class HammingCode:
    """Systematic [2^r - 1, 2^r - r - 1] code with minimum distance 3.

    Data bit j maps to the j-th r-bit column of weight >= 2 (ascending);
    the r parity bits are the XOR of the columns of the set data bits.
    Any two distinct codewords u o c(u), v o c(v) differ in at least 3
    positions, which `tests` verify exhaustively for r <= 4.
    """

    r: int

    def __post_init__(self):
        if self.r < 2:
            raise DomainError("Hamming construction needs r >= 2")

    @property
    def k(self) -> int:
        return (1 << self.r) - self.r - 1

    @property
    def data_columns(self) -> tuple[int, ...]:
        return tuple(
            v for v in range(1, 1 << self.r) if v.bit_count() >= 2
        )


# ---------------------------------------------------------------------------
# symmetric lower-bound instances
# ---------------------------------------------------------------------------


def hockey_stick(n: int, k: int) -> CubeFunction:
    """min{1, 2 w_k(x) / k} with w_k the Hamming weight of the first k bits.

    Monotone, submodular, totally symmetric in the first k coordinates.
    """
    check_dimension(n)
    if not 1 <= k <= n:
        raise CoordinateError(f"k={k} out of range [1, {n}]")
    first_k = np.uint64((1 << k) - 1)
    w = np.bitwise_count(all_masks(n) & first_k).astype(np.float64)
    return CubeFunction(n, np.minimum(1.0, 2.0 * w / k))


def majority(n: int, k: int) -> CubeFunction:
    """0/1 indicator of w_k(x) >= k/2 (ties count as 1)."""
    check_dimension(n)
    if not 1 <= k <= n:
        raise CoordinateError(f"k={k} out of range [1, {n}]")
    first_k = np.uint64((1 << k) - 1)
    w = np.bitwise_count(all_masks(n) & first_k).astype(np.float64)
    return CubeFunction(n, (w >= k / 2).astype(np.float64))


# ---------------------------------------------------------------------------
# XOS representations
# ---------------------------------------------------------------------------


def _bits_matrix(n: int) -> np.ndarray:
    masks = all_masks(n)
    return (
        (masks[:, None] >> np.arange(n, dtype=np.uint64)[None, :])
        & np.uint64(1)
    ).astype(np.float64)


def eval_xos(rep: XOSRep, x: int) -> float:
    """max over clauses of the weighted sum of the set bits of x."""
    if not 0 <= x < (1 << rep.n):
        raise CoordinateError(f"mask {x} out of range for n={rep.n}")
    bits = np.array(
        [(x >> i) & 1 for i in range(rep.n)], dtype=np.float64
    )
    return float(np.max(rep.clauses @ bits))


def xos_to_table(rep: XOSRep) -> CubeFunction:
    """Materialize all 2^n values of the clause maximum."""
    values = (_bits_matrix(rep.n) @ rep.clauses.T).max(axis=1)
    return CubeFunction(rep.n, values)


def mdnf_to_xos(h: MDNF) -> XOSRep:
    """Embed an s-term t-MDNF as an XOS function of size s + k.

    Clauses: indicator(T_j)/|T_j| per term, plus ((t-1)/t) e_i per
    coordinate.  The resulting table equals 1 - (1 - h(x))/t for x != 0
    and 0 at x = 0.
    """
    t = h.max_term_size
    clauses = []
    for term in h.terms:
        row = np.zeros(h.k)
        for i in term:
            row[i - 1] = 1.0 / len(term)
        clauses.append(row)
    for i in range(h.k):
        row = np.zeros(h.k)
        row[i] = (t - 1) / t
        clauses.append(row)
    return XOSRep(h.k, np.array(clauses))


def mdnf_to_table(h: MDNF) -> CubeFunction:
    """Dense 0/1 table of the monotone DNF itself."""
    masks = all_masks(h.k)
    covered = np.zeros(1 << h.k, dtype=bool)
    for term in h.terms:
        tm = np.uint64(coords_to_mask(term, h.k))
        covered |= (masks & tm) == tm
    return CubeFunction(h.k, covered.astype(np.float64))


def random_talagrand_mdnf(k: int, seed: int) -> MDNF:
    """Random t-MDNF with t = ceil(sqrt(k)) and 2^t independent terms.

    Each term is a uniformly random t-subset of [k]; terms are drawn
    with replacement and duplicates are kept.  Deterministic in `seed`.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    t = math.isqrt(k)
    if t * t < k:
        t += 1
    rng = np.random.default_rng(np.random.SeedSequence([0x7A1A, seed]))
    terms = tuple(
        frozenset(int(c) + 1 for c in rng.choice(k, size=t, replace=False))
        for _ in range(1 << t)
    )
    return MDNF(k, terms)


# ---------------------------------------------------------------------------
# subset ranking (combinatorial number system, lexicographic)
# ---------------------------------------------------------------------------


def subset_rank(coords: Iterable[int], n: int) -> int:
    """Rank of a subset of [n] among same-size subsets in lex order.

    The lexicographically first subset {1, ..., t} has rank 0, and the
    rank is strictly increasing in the sorted-tuple lex order.
    """
    s = sorted(int(i) for i in coords)
    t = len(s)
    if t == 0 or len(set(s)) != t or s[0] < 1 or s[-1] > n:
        raise CoordinateError(f"not a valid nonempty subset of [1, {n}]: {s}")
    rank = 0
    prev = 0
    for j, sj in enumerate(s, start=1):
        for c in range(prev + 1, sj):
            rank += math.comb(n - c, t - j)
        prev = sj
    return rank


def subset_unrank(idx: int, t: int, n: int) -> frozenset[int]:
    """Inverse of subset_rank for t-subsets of [n]."""
    total = math.comb(n, t)
    if not 0 <= idx < total:
        raise CoordinateError(f"rank {idx} out of range [0, {total})")
    out = []
    prev = 0
    remaining = idx
    for j in range(1, t + 1):
        c = prev + 1
        while True:
            block = math.comb(n - c, t - j)
            if remaining < block:
                break
            remaining -= block
            c += 1
        out.append(c)
        prev = c
    return frozenset(out)


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


def middle_layer_dimension(k: int) -> int:
    """Smallest t with C(2t, t) >= 2^k."""
    t = 1
    while math.comb(2 * t, t) < (1 << k):
        t += 1
    return t


def boolean_to_submodular(h: CubeFunction) -> CubeFunction:
    """Embed a 0/1-valued h on k bits into a monotone submodular f on 2t bits.

    f agrees with the hockey-stick hs_{2t} off the middle layer; middle
    layer points of rank y < 2^k take the value 1 - (1 - h(y))/(2t) and
    unmapped middle-layer points take 1.  The rank map is the
    lexicographic combinatorial number system.
    """
    if not h.is_boolean():
        raise DomainError("inner function must be 0/1-valued")
    k = h.n
    t = middle_layer_dimension(k)
    n = 2 * t
    check_dimension(n)
    f = hockey_stick(n, n).values.copy()
    pc = popcounts(n)
    f[pc == t] = 1.0
    for y in range(1 << k):
        coords = subset_unrank(y, t, n)
        mask = coords_to_mask(coords, n)
        f[mask] = 1.0 - (1.0 - h.values[y]) / n
    return CubeFunction(n, f)


def hamming_encode(code: HammingCode, x: int) -> int:
    """Parity bits of data word x: XOR of the data columns of set bits."""
    if not 0 <= x < (1 << code.k):
        raise CoordinateError(f"data word {x} out of range for k={code.k}")
    cols = code.data_columns
    z = 0
    j = 0
    while x:
        if x & 1:
            z ^= cols[j]
        x >>= 1
        j += 1
    return z


def hamming_self_bounding(h: CubeFunction, r: int) -> CubeFunction:
    """f(x o z) = h(x) when z = c(x), else 1; a 1-self-bounding function.

    Layout: the low k bits of the mask hold x, the top r bits hold z.
    """
    code = HammingCode(r)
    if h.n != code.k:
        raise DomainError(
            f"inner function has {h.n} bits but r={r} needs k={code.k}"
        )
    if not h.is_boolean():
        raise DomainError("inner function must be 0/1-valued")
    n = code.k + r
    check_dimension(n)
    values = np.ones(1 << n)
    for x in range(1 << code.k):
        z = hamming_encode(code, x)
        values[x | (z << code.k)] = h.values[x]
    return CubeFunction(n, values)


# ---------------------------------------------------------------------------
# Rademacher complexity
# ---------------------------------------------------------------------------


def rademacher_function(vs: VectorSet) -> CubeFunction:
    """value(A) = (1/n) E_{sigma in {-1,1}^A}[ max_v sum_{i in A} sigma_i v_i ].

    Exact enumeration of all 2^|A| sign vectors per point; monotone,
    0 at the empty set, and XOS for every vector set.
    """
    n = vs.n
    if n > RADEMACHER_CAP:
        raise DomainError(
            f"exact sign enumeration capped at n={RADEMACHER_CAP}, got {n}"
        )
    values = np.zeros(1 << n)
    for a_mask in range(1, 1 << n):
        idx = [i for i in range(n) if a_mask >> i & 1]
        va = vs.vectors[:, idx]
        size = len(idx)
        sub = all_masks(size)
        signs = 1.0 - 2.0 * (
            (sub[:, None] >> np.arange(size, dtype=np.uint64)[None, :])
            & np.uint64(1)
        ).astype(np.float64)
        sums = signs @ va.T  # (2^|A|, |V|)
        values[a_mask] = sums.max(axis=1).mean() / n
    return CubeFunction(n, values)


def vectors_from_xos(rep: XOSRep) -> VectorSet:
    """Vector set whose Rademacher-complexity function reproduces the XOS table.

    V = { n * (w_{c1} s_1, ..., w_{cn} s_n) : c a clause, s in {-1,1}^n }.
    For every sign pattern the restricted maximum then picks out
    n * max_c sum_{i in A} w_{ci}, and the 1/n normalization in
    `rademacher_function` returns exactly the clause maximum.
    """
    n = rep.n
    if n > XOS_TO_VECTORS_CAP:
        raise DomainError(
            f"the vector set has |C| * 2^n members; capped at n={XOS_TO_VECTORS_CAP}"
        )
    signs = 1.0 - 2.0 * (
        (all_masks(n)[:, None] >> np.arange(n, dtype=np.uint64)[None, :])
        & np.uint64(1)
    ).astype(np.float64)
    vecs = (signs[None, :, :] * rep.clauses[:, None, :] * n).reshape(-1, n)
    return VectorSet(n, vecs)


def separation_example() -> CubeFunction:
    """The fixed 3-variable monotone self-bounding function that is not XOS
    (and not even subadditive: f({1,2,3}) = 1 > f({1}) + f({2,3}) = 4/5)."""
    values = np.zeros(8)
    values[0b001] = 1 / 5
    values[0b010] = 2 / 5
    values[0b100] = 3 / 5
    values[0b011] = 3 / 5
    values[0b101] = 4 / 5
    values[0b110] = 3 / 5
    values[0b111] = 1.0
    return CubeFunction(3, values)


# ---------------------------------------------------------------------------
# class predicates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredicateResult:
    """Boolean verdict plus a deterministic witness on failure."""

    ok: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_monotone(f: CubeFunction, tol: float = PREDICATE_TOL) -> PredicateResult:
    """f(A) <= f(B) for A <= B, equivalently every d_i f >= -tol."""
    masks = all_masks(f.n)
    for i in range(1, f.n + 1):
        bit = np.uint64(1 << (i - 1))
        low = masks[(masks & bit) == 0]
        drop = f.values[low] - f.values[low | bit]
        bad = np.flatnonzero(drop > tol)
        if bad.size:
            point = int(low[bad[0]])
            return PredicateResult(
                False,
                {
                    "predicate": "monotone",
                    "coordinate": i,
                    "point": point,
                    "drop": float(drop[bad[0]]),
                },
            )
    return PredicateResult(True)


def is_submodular(f: CubeFunction, tol: float = PREDICATE_TOL) -> PredicateResult:
    """All mixed second differences d_ij f <= tol (i != j)."""
    masks = all_masks(f.n)
    v = f.values
    for i in range(1, f.n + 1):
        bi = np.uint64(1 << (i - 1))
        for j in range(i + 1, f.n + 1):
            bj = np.uint64(1 << (j - 1))
            base = masks[(masks & (bi | bj)) == 0]
            dij = v[base | bi | bj] - v[base | bi] - v[base | bj] + v[base]
            bad = np.flatnonzero(dij > tol)
            if bad.size:
                return PredicateResult(
                    False,
                    {
                        "predicate": "submodular",
                        "pair": (i, j),
                        "point": int(base[bad[0]]),
                        "second_derivative": float(dij[bad[0]]),
                    },
                )
    return PredicateResult(True)


def is_subadditive(f: CubeFunction, tol: float = PREDICATE_TOL) -> PredicateResult:
    """f(A u B) <= f(A) + f(B) for every pair of sets; O(4^n) scan."""
    if f.n > SUBADDITIVE_CAP:
        raise DomainError(
            f"subadditivity scan capped at n={SUBADDITIVE_CAP}, got {f.n}"
        )
    masks = all_masks(f.n)
    v = f.values
    for a in range(1 << f.n):
        excess = v[np.uint64(a) | masks] - v[a] - v
        bad = np.flatnonzero(excess > tol)
        if bad.size:
            b = int(bad[0])
            return PredicateResult(
                False,
                {
                    "predicate": "subadditive",
                    "sets": (a, b),
                    "set_coords": (
                        tuple(sorted(mask_to_coords(a))),
                        tuple(sorted(mask_to_coords(b))),
                    ),
                    "excess": float(excess[bad[0]]),
                },
            )
    return PredicateResult(True)


def is_self_bounding(
    f: CubeFunction, a: float = 1.0, tol: float = PREDICATE_TOL
) -> PredicateResult:
    """sum_i (f(x) - f(x xor e_i))_+ <= a f(x) at every point."""
    masks = all_masks(f.n)
    v = f.values
    drops = np.zeros(1 << f.n)
    for i in range(f.n):
        bit = np.uint64(1 << i)
        drops += np.maximum(v - v[masks ^ bit], 0.0)
    excess = drops - a * v
    bad = np.flatnonzero(excess > tol)
    if bad.size:
        point = int(bad[0])
        return PredicateResult(
            False,
            {
                "predicate": f"{a}-self-bounding",
                "point": point,
                "marginal_sum": float(drops[point]),
                "bound": float(a * v[point]),
            },
        )
    return PredicateResult(True)


# --- XOS membership via supporting vectors ---------------------------------


def _simplex_max(c: np.ndarray, m: np.ndarray, b: np.ndarray, tol: float):
    """Maximize c.w subject to m w <= b, w >= 0, with b >= 0.

    Dense tableau simplex, slack starting basis, Bland's rule (lowest
    eligible index) so it cannot cycle.  Returns (optimum, w).
    """
    rows, cols = m.shape
    tab = np.zeros((rows + 1, cols + rows + 1))
    tab[:rows, :cols] = m
    tab[:rows, cols : cols + rows] = np.eye(rows)
    tab[:rows, -1] = b
    tab[-1, :cols] = -c
    basis = list(range(cols, cols + rows))
    for _ in range(50_000):
        enter_candidates = np.flatnonzero(tab[-1, :-1] < -tol)
        if enter_candidates.size == 0:
            break
        enter = int(enter_candidates[0])
        col = tab[:rows, enter]
        rows_pos = np.flatnonzero(col > tol)
        if rows_pos.size == 0:
            raise SimplexError("unbounded feasibility LP (malformed input)")
        ratios = tab[rows_pos, -1] / col[rows_pos]
        best = ratios.min()
        tie = rows_pos[np.flatnonzero(ratios <= best + tol * max(1.0, best))]
        leave = int(min(tie, key=lambda rr: basis[rr]))
        pivot = tab[leave, enter]
        tab[leave] /= pivot
        for rr in range(rows + 1):
            if rr != leave and tab[rr, enter] != 0.0:
                tab[rr] -= tab[rr, enter] * tab[leave]
        basis[leave] = enter
    else:
        raise SimplexError("simplex iteration limit reached")
    w = np.zeros(cols)
    for rr, var in enumerate(basis):
        if var < cols:
            w[var] = tab[rr, -1]
    return float(tab[-1, -1]), w


@dataclass(frozen=True)
class XOSCertificate:
    """Outcome of the exact XOS membership check.

    On success `supports[A]` is a nonnegative vector w with
    sum_{i in A} w_i = f(A) and sum_{i in B} w_i <= f(B) for all B.
    On failure `violating_set` is the first point with no such vector.
    """

    ok: bool
    supports: dict[int, np.ndarray] | None = None
    violating_set: frozenset[int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_xos(f: CubeFunction, tol: float = PREDICATE_TOL) -> XOSCertificate:
    """Exact fractional-subadditivity check via supporting vectors.

    f is XOS iff for every A there is w >= 0 with sum_{i in A} w_i = f(A)
    and sum_{i in B} w_i <= f(B) for all B (the LP dual of the worst
    fractional cover of A).  One bounded LP per point: maximize
    sum_{i in A} w_i over the constraint system restricted to A, where
    the constraint bound for C <= A is min{f(B) : B n A = C}.
    """
    if f.n > XOS_LP_CAP:
        raise DomainError(f"LP membership check capped at n={XOS_LP_CAP}, got {f.n}")
    if abs(f.values[0]) > tol:
        raise DomainError(f"not in the XOS domain: f(empty) = {f.values[0]} != 0")
    if np.any(f.values < -tol):
        raise DomainError("not in the XOS domain: negative values present")

    supports: dict[int, np.ndarray] = {0: np.zeros(0)}
    for a_mask in range(1, 1 << f.n):
        idx = [i for i in range(f.n) if a_mask >> i & 1]
        t = len(idx)
        # g(C) = min f over sets whose intersection with A is C: min-fold
        # the free coordinates into the table, then gather C <= A.
        g = f.values.copy()
        masks = all_masks(f.n)
        for i in range(f.n):
            if not a_mask >> i & 1:
                bit = np.uint64(1 << i)
                low = masks[(masks & bit) == 0]
                g[low] = np.minimum(g[low], g[low | bit])
        sub = all_masks(t)
        cmasks = np.zeros(1 << t, dtype=np.uint64)
        for pos, i in enumerate(idx):
            cmasks |= ((sub >> np.uint64(pos)) & np.uint64(1)) << np.uint64(i)
        bounds = np.maximum(g[cmasks], 0.0)
        rows = (
            (sub[:, None] >> np.arange(t, dtype=np.uint64)[None, :])
            & np.uint64(1)
        ).astype(np.float64)
        target = float(f.values[a_mask])
        opt, w = _simplex_max(np.ones(t), rows, bounds, tol)
        if opt < target - tol * max(1.0, abs(target)):
            return XOSCertificate(False, None, mask_to_coords(a_mask))
        full = np.zeros(f.n)
        full[idx] = w
        supports[a_mask] = full
    return XOSCertificate(True, supports, None)
