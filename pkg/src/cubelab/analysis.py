"""Inequality verifiers and desk-scale experiments.

Every verifier returns a BoundReport with the left/right hand values,
the slack rhs - lhs and a pass flag; pointwise bounds report the worst
point as a witness.  Pass tolerance is -1e-9 relative to max(1, |rhs|):
the inequalities are proven non-strict, so only floating-point noise is
forgiven, never a real violation.

Asymptotic claims with unspecified constants are handled in two phases:
`scripts/calibrate.py` computes exact values once (against independent
definition-sum oracles) and freezes them into fixtures/calibration.json;
the acceptance suite asserts byte-stable reproduction of those numbers
rather than inventing constants.

Randomized corpora derive one child generator per member from a master
seed via SeedSequence([master, index]), so results are independent of
iteration or scheduling order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from ._bits import all_masks, popcounts
from .core import (
    CubeFunction,
    Spectrum,
    derivative,
    inverse_transform,
    level_weights,
    lp_norm,
    second_derivative,
    tail_weight,
    threshold_norm,
    transform,
    transform_reference,
)
from .errors import DomainError
from .zoo import (
    XOSRep,
    boolean_to_submodular,
    hockey_stick,
    is_submodular,
    mdnf_to_table,
    random_talagrand_mdnf,
    xos_to_table,
)

PASS_TOL = 1e-9


class BoundId:
    """Identifiers for the verified inequalities."""

    DEGREE2_TAIL = "tail-vs-second-derivatives"
    XOS_POINTWISE = "xos-pointwise-square-bound"
    XOS_GLOBAL = "xos-second-derivative-mass"
    SQRT_BOUND = "submodular-derivative-l1-vs-l2"
    SELF_BOUND = "monotone-self-bounding-pointwise"
    XOS_INFLUENCE = "xos-first-influence-vs-l1"
    XOS_TAIL = "xos-tail-decay"
    TWO_VS_T = "l2-vs-threshold-norm"
    PAIR_COEFF = "pair-coefficient-dominates-mass"
    IMPORTANT_VARS = "large-coefficient-count"
    JUNTA_RESIDUAL = "junta-extraction-residual"


@dataclass(frozen=True)
class BoundReport:
    """One verified inequality: lhs <= rhs up to the pass tolerance."""

    bound: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    witness: dict | None = None
    detail: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "bound": self.bound,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "witness": self.witness,
        }


def make_report(bound: str, lhs: float, rhs: float, witness=None, **detail) -> BoundReport:
    slack = rhs - lhs
    passed = slack >= -PASS_TOL * max(1.0, abs(rhs))
    return BoundReport(bound, float(lhs), float(rhs), float(slack), passed, witness, detail)


@dataclass(frozen=True)
class NoiseSpec:
    """Monte Carlo noise-sensitivity estimation parameters."""

    alpha: float
    trials: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 0.5:
            raise DomainError(f"noise rate must be in [0, 1/2], got {self.alpha}")
        if self.trials < 1:
            raise DomainError("need at least one trial")


# ---------------------------------------------------------------------------
# second-derivative machinery shared by several checks
# ---------------------------------------------------------------------------


def _pair_second_derivatives(f: CubeFunction):
    """Yield (i, j, d_ij table) for all 1 <= i < j <= n."""
    for i in range(1, f.n + 1):
        for j in range(i + 1, f.n + 1):
            yield i, j, second_derivative(f, i, j)


def second_derivative_mass(f: CubeFunction) -> float:
    """sum over ordered pairs (i, j) of ||d_ij f||_2^2 (diagonal is zero)."""
    return 2.0 * sum(
        float(np.mean(d.values**2)) for _, _, d in _pair_second_derivatives(f)
    )


def check_degree2_tail(f: CubeFunction, k: int) -> BoundReport:
    """W^{>k}(f) <= (1/16k^2) sum_{i,j} ||d_ij f||_2^2, for any real f."""
    if not 1 <= k <= f.n:
        raise DomainError(f"k={k} out of range [1, {f.n}]")
    lhs = tail_weight(transform(f), k)
    rhs = second_derivative_mass(f) / (16.0 * k * k)
    return make_report(BoundId.DEGREE2_TAIL, lhs, rhs, k=k)


def check_xos_pointwise(rep: XOSRep) -> BoundReport:
    """sum_{i,j: x_i=x_j=1} (d_ij f(x))^2 <= 5 f(x)^2 at the worst point."""
    f = xos_to_table(rep)
    masks = all_masks(f.n)
    acc = np.zeros(1 << f.n)
    for i, j, d in _pair_second_derivatives(f):
        both = np.uint64((1 << (i - 1)) | (1 << (j - 1)))
        on = (masks & both) == both
        acc[on] += 2.0 * d.values[on] ** 2  # (i,j) and (j,i)
    rhs_all = 5.0 * f.values**2
    # worst point by ratio: 0/0 points are vacuous, lhs > 0 with rhs = 0
    # is an infinite-ratio violation
    ratios = np.divide(acc, rhs_all, out=np.zeros_like(acc), where=rhs_all > 0)
    ratios[(rhs_all == 0.0) & (acc > PASS_TOL)] = math.inf
    worst = int(np.argmax(ratios))
    return make_report(
        BoundId.XOS_POINTWISE,
        float(acc[worst]),
        float(rhs_all[worst]),
        witness={"point": worst},
        max_ratio=float(ratios[worst]),
    )


def check_xos_global(rep: XOSRep) -> BoundReport:
    """sum_{i,j} ||d_ij f||_2^2 <= 20 ||f||_2^2 for XOS f."""
    f = xos_to_table(rep)
    lhs = second_derivative_mass(f)
    energy = lp_norm(f, 2) ** 2
    return make_report(
        BoundId.XOS_GLOBAL,
        lhs,
        20.0 * energy,
        energy=energy,
        ratio_to_energy=float(lhs / energy) if energy > 0 else 0.0,
    )


def check_sqrt_bound(
    f: CubeFunction, i: int, coords, *, assume_submodular: bool = False
) -> BoundReport:
    """sum_{j in A} ||d_ij f||_1 <= 2 sqrt(|A|) ||d_i f||_2 (submodular f)."""
    if not assume_submodular and not is_submodular(f):
        raise DomainError("square-root bound requires a submodular function")
    a = sorted({int(j) for j in coords})
    lhs = sum(lp_norm(second_derivative(f, i, j), 1) for j in a)
    rhs = 2.0 * math.sqrt(len(a)) * lp_norm(derivative(f, i), 2)
    return make_report(BoundId.SQRT_BOUND, lhs, rhs, i=i, set_size=len(a))


def sqrt_bound_sweep(f: CubeFunction, *, assume_submodular: bool = False) -> BoundReport:
    """Worst case of the square-root bound over ALL pairs (i, A).

    For fixed i and |A| = a the left side is maximized by the a largest
    values of ||d_ij f||_1, so checking sorted prefix sums against
    2 sqrt(a) ||d_i f||_2 covers every subset exactly.
    """
    if not assume_submodular and not is_submodular(f):
        raise DomainError("square-root bound requires a submodular function")
    worst = None
    for i in range(1, f.n + 1):
        norms = np.array(
            [
                lp_norm(second_derivative(f, i, j), 1) if j != i else 0.0
                for j in range(1, f.n + 1)
            ]
        )
        prefix = np.cumsum(np.sort(norms)[::-1])
        di2 = lp_norm(derivative(f, i), 2)
        sizes = np.arange(1, f.n + 1)
        rhs = 2.0 * np.sqrt(sizes) * di2
        slack = rhs - prefix
        a = int(np.argmin(slack))
        rep = make_report(
            BoundId.SQRT_BOUND,
            float(prefix[a]),
            float(rhs[a]),
            witness={"i": i, "set_size": a + 1},
        )
        if worst is None or rep.slack < worst.slack:
            worst = rep
    assert worst is not None
    return worst


def check_self_bound_ineq(rep: XOSRep) -> BoundReport:
    """sum_{i: x_i=1} d_i f(x) <= f(x) at the worst point (XOS f)."""
    f = xos_to_table(rep)
    masks = all_masks(f.n)
    acc = np.zeros(1 << f.n)
    for i in range(1, f.n + 1):
        bit = np.uint64(1 << (i - 1))
        on = (masks & bit) != 0
        acc[on] += derivative(f, i).values[on]
    slack = f.values - acc
    worst = int(np.argmin(slack))
    return make_report(
        BoundId.SELF_BOUND,
        float(acc[worst]),
        float(f.values[worst]),
        witness={"point": worst},
    )


def check_xos_influence(rep: XOSRep) -> BoundReport:
    """Inf^1(f) <= ||f||_1 for XOS f."""
    f = xos_to_table(rep)
    inf1 = sum(
        float(np.mean(np.abs(0.5 * derivative(f, i).values)))
        for i in range(1, f.n + 1)
    )
    return make_report(BoundId.XOS_INFLUENCE, inf1, lp_norm(f, 1))


def check_xos_tail(rep: XOSRep, k: int | None = None) -> BoundReport:
    """W^{>k}(f) <= 5/(4k^2) for XOS f with ||f||_inf <= 1; worst k if None."""
    f = xos_to_table(rep)
    if lp_norm(f, np.inf) > 1.0 + PASS_TOL:
        raise DomainError("the 5/(4k^2) tail bound needs ||f||_inf <= 1")
    s = transform(f)
    ks = range(1, f.n + 1) if k is None else [k]
    worst = None
    for kk in ks:
        rep_k = make_report(
            BoundId.XOS_TAIL, tail_weight(s, kk), 5.0 / (4.0 * kk * kk), k=kk
        )
        if worst is None or rep_k.slack < worst.slack:
            worst = rep_k
    assert worst is not None
    return worst


def check_2_vs_T(h: CubeFunction) -> BoundReport:
    """||h||_2 <= sqrt(2) ||h||_T for h with range in [-1, 1]."""
    if lp_norm(h, np.inf) > 1.0 + PASS_TOL:
        raise DomainError("threshold-norm comparison needs range within [-1, 1]")
    return make_report(
        BoundId.TWO_VS_T, lp_norm(h, 2), math.sqrt(2.0) * threshold_norm(h)
    )


def check_pair_coefficient_bound(f: CubeFunction, s: Spectrum | None = None) -> BoundReport:
    """|fhat({i,j})| >= (1/2) sum_{S containing i,j} fhat(S)^2, worst pair.

    Holds for submodular f with range [0, 1].
    """
    if s is None:
        s = transform(f)
    masks = all_masks(s.n)
    worst = None
    for i in range(1, s.n + 1):
        for j in range(i + 1, s.n + 1):
            both = np.uint64((1 << (i - 1)) | (1 << (j - 1)))
            mass = float(np.sum(s.coeffs[(masks & both) == both] ** 2))
            coeff = abs(s[int(both)])
            rep = make_report(
                BoundId.PAIR_COEFF, 0.5 * mass, coeff, witness={"pair": (i, j)}
            )
            if worst is None or rep.slack < worst.slack:
                worst = rep
    if worst is None:  # n = 1: vacuous
        worst = make_report(BoundId.PAIR_COEFF, 0.0, 0.0)
    return worst


def check_important_variable_count(
    s: Spectrum, alpha: float, beta: float
) -> BoundReport:
    """|{i: |fhat({i})| >= alpha} u {i: exists j, |fhat({i,j})| >= beta}|
    <= 2/min(alpha, beta) for submodular f with range [0, 1]."""
    if alpha <= 0 or beta <= 0:
        raise DomainError("thresholds must be positive")
    chosen = set()
    for i in range(1, s.n + 1):
        if abs(s[1 << (i - 1)]) >= alpha:
            chosen.add(i)
            continue
        for j in range(1, s.n + 1):
            if j != i and abs(s[(1 << (i - 1)) | (1 << (j - 1))]) >= beta:
                chosen.add(i)
                break
    return make_report(
        BoundId.IMPORTANT_VARS,
        float(len(chosen)),
        2.0 / min(alpha, beta),
        indices=sorted(chosen),
    )


# ---------------------------------------------------------------------------
# censuses
# ---------------------------------------------------------------------------


def large_derivative_census(f: CubeFunction, eps: float, delta: float) -> frozenset[int]:
    """{ i : Pr[|d_i f| >= eps] >= delta }, exact table scan."""
    if not (0 < eps < 1 and 0 < delta <= 1):
        raise DomainError("need eps in (0,1) and delta in (0,1]")
    out = set()
    for i in range(1, f.n + 1):
        prob = float(np.mean(np.abs(derivative(f, i).values) >= eps))
        if prob >= delta:
            out.add(i)
    return frozenset(out)


def threshold_census(f: CubeFunction, eps: float) -> frozenset[int]:
    """{ i : ||d_i f||_T >= eps }."""
    if not 0 < eps < 1:
        raise DomainError("need eps in (0, 1)")
    return frozenset(
        i
        for i in range(1, f.n + 1)
        if threshold_norm(derivative(f, i)) >= eps
    )


# ---------------------------------------------------------------------------
# noise sensitivity
# ---------------------------------------------------------------------------


def noise_sensitivity_exact(h, alpha: float) -> float:
    """Pr[h(x) != h(y)] for y ~ N_alpha(x), from the spectrum of 0/1-valued h.

    For 0/1-valued h the flip probability equals E[(h(x) - h(y))^2]
    = 2 sum_d (1 - (1-2a)^d) W^d(h); the 1/2-leading-constant form of
    the same identity applies to the +-1 encoding instead.
    """
    if not 0.0 <= alpha <= 0.5:
        raise DomainError(f"noise rate must be in [0, 1/2], got {alpha}")
    if isinstance(h, Spectrum):
        s = h
        table = inverse_transform(s)
    else:
        table = h
        s = transform(h)
    if not table.is_boolean(tol=1e-9):
        raise DomainError("noise sensitivity is defined for 0/1-valued functions")
    w = level_weights(s)
    decay = (1.0 - 2.0 * alpha) ** np.arange(s.n + 1)
    return float(2.0 * np.sum((1.0 - decay) * w))


def noise_sensitivity_mc(h: CubeFunction, spec: NoiseSpec) -> tuple[float, float]:
    """Monte Carlo estimate of Pr[h(x) != h(y)], with its standard error."""
    if not h.is_boolean(tol=1e-9):
        raise DomainError("noise sensitivity is defined for 0/1-valued functions")
    rng = np.random.default_rng(np.random.SeedSequence([0x4E5, spec.seed]))
    x = rng.integers(0, 1 << h.n, size=spec.trials, dtype=np.uint64)
    y = x.copy()
    for i in range(h.n):
        flips = rng.random(spec.trials) < spec.alpha
        y[flips] ^= np.uint64(1 << i)
    disagree = np.abs(h.values[x] - h.values[y]) > 0.5
    p = float(np.mean(disagree))
    stderr = math.sqrt(max(p * (1.0 - p), 1.0 / spec.trials) / spec.trials)
    return p, stderr


# ---------------------------------------------------------------------------
# lower-bound experiments
# ---------------------------------------------------------------------------


def symmetric_tail_reference(k: int, d: int, values_by_weight) -> float:
    """Exact W^{>d} for a function of the Hamming weight of k bits.

    Independent of the butterfly: uses the Krawtchouk expansion
    fhat_j = 2^{-k} sum_w f(w) sum_a (-1)^a C(j,a) C(k-j, w-a)
    (all coefficients with |S| = j coincide), evaluated in exact
    rational arithmetic, with W^j = C(k,j) fhat_j^2.
    """
    vals = [Fraction(v) for v in values_by_weight]
    if len(vals) != k + 1:
        raise DomainError(f"need {k + 1} weight-level values, got {len(vals)}")
    tail = Fraction(0)
    for j in range(d + 1, k + 1):
        coeff = Fraction(0)
        for w in range(k + 1):
            kraw = sum(
                (-1) ** a * math.comb(j, a) * math.comb(k - j, w - a)
                for a in range(max(0, w - (k - j)), min(j, w) + 1)
            )
            coeff += vals[w] * kraw
        coeff /= 2**k
        tail += math.comb(k, j) * coeff * coeff
    return float(tail)


def hockey_tail_exact(k: int, d: int) -> float:
    """Exact W^{>d}(hs_k) via the symmetric (Krawtchouk) oracle."""
    weights = [Fraction(min(2 * w, k), k) for w in range(k + 1)]
    return symmetric_tail_reference(k, d, weights)


def default_tail_level(k: int) -> int:
    return k // 2


def hockey_tail_experiment(k_values, d_rule=None) -> list[dict]:
    """Exact W^{>d}(hs_k) sweep with the scaled statistic W * k * d^{3/2}.

    The default level rule is d = floor(k/2).
    """
    rule = d_rule or default_tail_level
    rows = []
    for k in k_values:
        k = int(k)
        d = int(rule(k))
        s = transform(hockey_stick(k, k))
        tail = tail_weight(s, d)
        rows.append(
            {
                "k": k,
                "d": d,
                "tail": tail,
                "scaled": tail * k * d**1.5,
            }
        )
    return rows


def talagrand_experiment(k: int, seeds, alpha: float | None = None) -> dict:
    """Spectral statistics of random Talagrand MDNFs.

    Per seed: the exact noise sensitivity at rate alpha (default
    1/sqrt(k)), the spectral-formula value in the +-1 convention
    (ns/4 for a 0/1-valued function), the level d = floor(ns_half *
    sqrt(k) / 2) it certifies, and the verified chain
    W^{>d}(h) >= 2 (ns_half - alpha d).
    """
    if k > 20:
        raise DomainError("exact spectra capped at k = 20")
    alpha = 1.0 / math.sqrt(k) if alpha is None else float(alpha)
    rows = []
    for seed in seeds:
        h = random_talagrand_mdnf(k, int(seed))
        table = mdnf_to_table(h)
        s = transform(table)
        ns = noise_sensitivity_exact(s, alpha)
        ns_half = ns / 4.0
        d = int(ns_half * math.sqrt(k) / 2.0)
        tail = tail_weight(s, d)
        chain_rhs = 2.0 * (ns_half - alpha * d)
        rows.append(
            {
                "seed": int(seed),
                "ns": ns,
                "ns_half": ns_half,
                "d": d,
                "tail": tail,
                "chain_rhs": chain_rhs,
                "chain_ok": tail >= chain_rhs - PASS_TOL,
            }
        )
    ns_vals = np.array([r["ns"] for r in rows])
    tail_vals = np.array([r["tail"] for r in rows])
    return {
        "k": k,
        "alpha": alpha,
        "count": len(rows),
        "rows": rows,
        "mean_ns": float(ns_vals.mean()),
        "min_ns": float(ns_vals.min()),
        "max_ns": float(ns_vals.max()),
        "mean_tail": float(tail_vals.mean()),
        "min_tail": float(tail_vals.min()),
        "max_tail": float(tail_vals.max()),
        "chain_failures": int(sum(not r["chain_ok"] for r in rows)),
    }


# ---------------------------------------------------------------------------
# junta extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JuntaExtraction:
    """Result of threshold-influence junta extraction."""

    indices: frozenset[int]
    degree: int
    alpha: float
    residual: float
    ok: bool


def xos_junta_extract(s: Spectrum, eps: float) -> JuntaExtraction:
    """Influence-threshold junta: spectral mass outside {S <= I, |S| <= d}
    is at most eps^2.

    d is the smallest level with W^{>d} <= eps^2/2; the influence cutoff
    is alpha = ((1/3)^{d-1} eps^2 / (2 Inf^{4/3}(f)))^2 with the 4/3
    influences Inf_i = E[|d_i f / 2|^{4/3}].
    """
    if not 0 < eps < 1:
        raise DomainError("need eps in (0, 1)")
    target = eps * eps / 2.0
    weights = level_weights(s)
    tail = float(weights.sum())
    d = s.n
    for lvl in range(s.n + 1):
        tail -= float(weights[lvl])
        if tail <= target:
            d = lvl
            break
    f = inverse_transform(s)
    infs = np.array(
        [
            float(np.mean(np.abs(0.5 * derivative(f, i).values) ** (4.0 / 3.0)))
            for i in range(1, s.n + 1)
        ]
    )
    total = float(infs.sum())
    if total == 0.0:
        indices: frozenset[int] = frozenset()
        alpha = math.inf
    else:
        alpha = ((1.0 / 3.0) ** (d - 1) * eps * eps / (2.0 * total)) ** 2
        indices = frozenset(
            i for i in range(1, s.n + 1) if infs[i - 1] >= alpha
        )
    imask = np.uint64(sum(1 << (i - 1) for i in indices))
    masks = all_masks(s.n)
    keep = ((masks & ~imask) == 0) & (popcounts(s.n) <= d)
    residual = float(np.sum(s.coeffs[~keep] ** 2))
    return JuntaExtraction(
        indices, d, float(alpha), residual, residual <= eps * eps + PASS_TOL
    )


# ---------------------------------------------------------------------------
# Lipschitz-sum experiment
# ---------------------------------------------------------------------------


def lipschitz_sum_experiment(corpus, alphas) -> list[dict]:
    """For each function and alpha: restrict to S = {i: ||d_i f||_T <= alpha}
    and report sum_{i,j in S} ||d_ij f||_2^2 against sqrt(a) log^{3/2}(1/a).

    Measurement only; the asymptotic constant is unspecified, so there
    is no pass flag.
    """
    rows = []
    for name, f in corpus:
        tnorms = {
            i: threshold_norm(derivative(f, i)) for i in range(1, f.n + 1)
        }
        for alpha in alphas:
            alpha = float(alpha)
            if not 0 < alpha < 1:
                raise DomainError("need alpha in (0, 1)")
            idx = sorted(i for i, t in tnorms.items() if t <= alpha)
            num = 0.0
            for pos, i in enumerate(idx):
                for j in idx[pos + 1 :]:
                    num += 2.0 * float(
                        np.mean(second_derivative(f, i, j).values ** 2)
                    )
            denom = math.sqrt(alpha) * math.log(1.0 / alpha) ** 1.5
            rows.append(
                {
                    "function": name,
                    "alpha": alpha,
                    "set_size": len(idx),
                    "numerator": num,
                    "ratio": num / denom if denom > 0 else math.inf,
                }
            )
    return rows


# ---------------------------------------------------------------------------
# seeded corpora
# ---------------------------------------------------------------------------


def _child_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(index)]))


def random_xos_rep(
    rng: np.random.Generator, n_max: int = 10, max_clauses: int = 8
) -> XOSRep:
    """Random XOS representation normalized so the table maximum is <= 1."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, max_clauses + 1))
    w = rng.uniform(0.0, 1.0, size=(m, n))
    w *= rng.random(size=(m, n)) < 0.75
    peak = float(w.sum(axis=1).max())
    if peak > 0:
        w /= peak
    return XOSRep(n, w)


def xos_corpus(count: int, master_seed: int = 1, n_max: int = 10, max_clauses: int = 8):
    """Deterministic corpus of `count` normalized random XOS representations."""
    return [
        random_xos_rep(_child_rng(master_seed, i), n_max, max_clauses)
        for i in range(count)
    ]


def _budgeted_linear(rng: np.random.Generator, n: int) -> CubeFunction:
    w = rng.uniform(0.0, 3.0 / n, size=n)
    bits = (
        (all_masks(n)[:, None] >> np.arange(n, dtype=np.uint64)[None, :])
        & np.uint64(1)
    ).astype(np.float64)
    return CubeFunction(n, np.minimum(1.0, bits @ w))


def _concave_sum(rng: np.random.Generator, n: int) -> CubeFunction:
    """Sum of concave functions of nonnegative linear forms (submodular)."""
    bits = (
        (all_masks(n)[:, None] >> np.arange(n, dtype=np.uint64)[None, :])
        & np.uint64(1)
    ).astype(np.float64)
    total = np.zeros(1 << n)
    for _ in range(int(rng.integers(1, 4))):
        w = rng.uniform(0.0, 1.0, size=n)
        lin = bits @ w
        kind = int(rng.integers(0, 3))
        if kind == 0:
            total += np.sqrt(lin)
        elif kind == 1:
            total += np.log1p(lin)
        else:
            total += np.minimum(rng.uniform(0.3, 1.0), lin)
    peak = float(total.max())
    if peak > 0:
        total /= peak
    return CubeFunction(n, total)


def _perturbed_submodular(rng: np.random.Generator, n: int) -> CubeFunction:
    """Direct table: noisy budgeted-linear, rejection-filtered through
    the exact submodularity predicate (noise shrinks until accepted)."""
    base = _budgeted_linear(rng, n)
    noise = rng.uniform(-1.0, 1.0, size=1 << n)
    scale = 0.02
    for _ in range(12):
        cand_vals = base.values + scale * noise
        lo, hi = float(cand_vals.min()), float(cand_vals.max())
        if hi > lo:
            cand_vals = (cand_vals - lo) / (hi - lo)
        cand = CubeFunction(n, cand_vals)
        if is_submodular(cand):
            return cand
        scale /= 2.0
    return base


def submodular_corpus(count: int, master_seed: int = 2, n_max: int = 8):
    """Deterministic mixed corpus of submodular functions in [0, 1].

    Kinds rotate through hockey-sticks, budgeted linear minima, sums of
    concave-of-linear compositions, middle-layer embeddings of random
    Boolean functions, and rejection-filtered perturbed tables (n <= 6).
    """
    out = []
    for i in range(count):
        rng = _child_rng(master_seed, i)
        kind = i % 5
        if kind == 0:
            n = int(rng.integers(2, n_max + 1))
            k = int(rng.integers(1, n + 1))
            out.append((f"hockey_stick[{i}]", hockey_stick(n, k)))
        elif kind == 1:
            n = int(rng.integers(2, n_max + 1))
            out.append((f"budgeted_linear[{i}]", _budgeted_linear(rng, n)))
        elif kind == 2:
            n = int(rng.integers(2, n_max + 1))
            out.append((f"concave_sum[{i}]", _concave_sum(rng, n)))
        elif kind == 3:
            k = int(rng.integers(2, 5))
            h = CubeFunction(k, rng.integers(0, 2, size=1 << k).astype(float))
            out.append((f"embedded[{i}]", boolean_to_submodular(h)))
        else:
            n = int(rng.integers(2, 7))
            out.append((f"perturbed[{i}]", _perturbed_submodular(rng, n)))
    return out


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


@dataclass
class SuiteResult:
    """Aggregate outcome of a verification battery."""

    suite: str
    checks: int = 0
    failures: int = 0
    failure_reports: list = field(default_factory=list)
    worst_slack: float = math.inf
    notes: dict = field(default_factory=dict)

    def add(self, report: BoundReport, context: str = "") -> None:
        self.checks += 1
        self.worst_slack = min(self.worst_slack, report.slack)
        if not report.passed:
            self.failures += 1
            row = report.as_row()
            row["context"] = context
            self.failure_reports.append(row)

    def add_flag(self, ok: bool, context: str) -> None:
        self.checks += 1
        if not ok:
            self.failures += 1
            self.failure_reports.append({"context": context, "pass": False})

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _run_indexed(worker, count: int, threads: int) -> list:
    """Evaluate worker(0..count-1), possibly on a thread pool, merging
    results in index order so the outcome is scheduling-independent."""
    if threads <= 1 or count <= 1:
        return [worker(i) for i in range(count)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(count)))


def _merge(res: SuiteResult, batches) -> SuiteResult:
    for batch in batches:
        for kind, payload, ctx in batch:
            if kind == "report":
                res.add(payload, ctx)
            else:
                res.add_flag(payload, ctx)
    return res


def verify_core(
    count: int = 500, master_seed: int = 11, n_max: int = 10, threads: int = 1
) -> SuiteResult:
    """Transform identities on seeded random tables.

    Per table: Parseval, butterfly vs definition-sum oracle (1e-12),
    round-trip, derivative and second-derivative spectrum identities,
    tail monotonicity and the unconditional degree-2 tail bound for
    every k in [1, n].
    """

    def worker(idx: int):
        out = []
        rng = _child_rng(master_seed, idx)
        n = int(rng.integers(1, n_max + 1))
        f = CubeFunction(n, rng.uniform(-1.0, 1.0, size=1 << n))
        s = transform(f)
        masks = all_masks(n)
        ctx = f"table[{idx}] n={n}"

        energy = float(np.mean(f.values**2))
        out.append(
            (
                "flag",
                abs(s.total_weight() - energy) <= 1e-10 * max(1.0, energy),
                f"{ctx} parseval",
            )
        )
        oracle = transform_reference(f)
        out.append(
            (
                "flag",
                float(np.max(np.abs(s.coeffs - oracle.coeffs))) <= 1e-12,
                f"{ctx} butterfly-vs-definition-sum",
            )
        )
        back = inverse_transform(s)
        out.append(
            (
                "flag",
                float(np.max(np.abs(back.values - f.values))) <= 1e-10,
                f"{ctx} round-trip",
            )
        )
        ok_d = True
        for i in range(1, n + 1):
            bit = np.uint64(1 << (i - 1))
            ds = transform(derivative(f, i))
            expected = np.where(
                (masks & bit) != 0, 0.0, -2.0 * s.coeffs[masks | bit]
            )
            if float(np.max(np.abs(ds.coeffs - expected))) > 1e-10:
                ok_d = False
        out.append(("flag", ok_d, f"{ctx} derivative-identity"))
        ok_dd = True
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                both = np.uint64((1 << (i - 1)) | (1 << (j - 1)))
                rhs = 16.0 * float(np.sum(s.coeffs[(masks & both) == both] ** 2))
                lhs = float(np.mean(second_derivative(f, i, j).values ** 2))
                if abs(lhs - rhs) > 1e-10 * max(1.0, rhs):
                    ok_dd = False
        out.append(("flag", ok_dd, f"{ctx} second-derivative-identity"))
        tails = [tail_weight(s, d) for d in range(n + 1)]
        out.append(
            (
                "flag",
                all(a >= b - 1e-12 for a, b in zip(tails, tails[1:]))
                and tails[-1] <= 1e-15,
                f"{ctx} tail-monotonicity",
            )
        )
        # degree-2 tail bound for every k, with the derivative mass and
        # spectrum computed once per table
        mass = second_derivative_mass(f)
        for k in range(1, n + 1):
            out.append(
                (
                    "report",
                    make_report(
                        BoundId.DEGREE2_TAIL,
                        tail_weight(s, k),
                        mass / (16.0 * k * k),
                        k=k,
                    ),
                    f"{ctx} k={k}",
                )
            )
        return out

    return _merge(SuiteResult("core"), _run_indexed(worker, count, threads))


def verify_xos(
    count: int = 1000,
    master_seed: int = 1,
    n_max: int = 10,
    max_clauses: int = 8,
    junta_eps: tuple = (),
    threads: int = 1,
) -> SuiteResult:
    """Class-conditional bounds on a random XOS corpus; zero failures expected."""

    def worker(idx: int):
        rep = random_xos_rep(_child_rng(master_seed, idx), n_max, max_clauses)
        ctx = f"xos[{idx}] n={rep.n} clauses={rep.num_clauses}"
        out = [
            ("report", check_xos_pointwise(rep), f"{ctx} pointwise-square"),
            ("report", check_xos_global(rep), f"{ctx} global-square"),
            ("report", check_self_bound_ineq(rep), f"{ctx} self-bound"),
            ("report", check_xos_influence(rep), f"{ctx} influence"),
            ("report", check_xos_tail(rep), f"{ctx} tail"),
        ]
        for eps in junta_eps:
            extraction = xos_junta_extract(transform(xos_to_table(rep)), eps)
            out.append(
                (
                    "report",
                    make_report(
                        BoundId.JUNTA_RESIDUAL,
                        extraction.residual,
                        eps * eps,
                        junta=sorted(extraction.indices),
                        degree=extraction.degree,
                    ),
                    f"{ctx} junta eps={eps}",
                )
            )
        return out

    return _merge(SuiteResult("xos"), _run_indexed(worker, count, threads))


def verify_submodular(
    count: int = 60, master_seed: int = 2, n_max: int = 8, threads: int = 1
) -> SuiteResult:
    """Submodular corpus battery: predicate, square-root bound over all
    (i, A), pair-coefficient and variable-count lemmas, threshold-norm
    comparison on every derivative."""
    corpus = submodular_corpus(count, master_seed, n_max)

    def worker(idx: int):
        name, f = corpus[idx]
        out = [("flag", bool(is_submodular(f)), f"{name} is_submodular")]
        out.append(
            ("report", sqrt_bound_sweep(f, assume_submodular=True), f"{name} sqrt-bound")
        )
        s = transform(f)
        out.append(
            ("report", check_pair_coefficient_bound(f, s), f"{name} pair-coefficient")
        )
        for alpha, beta in ((0.05, 0.05), (0.1, 0.02), (0.2, 0.01)):
            out.append(
                (
                    "report",
                    check_important_variable_count(s, alpha, beta),
                    f"{name} important-vars({alpha},{beta})",
                )
            )
        for i in range(1, f.n + 1):
            out.append(("report", check_2_vs_T(derivative(f, i)), f"{name} 2vsT(d_{i})"))
        return out

    return _merge(SuiteResult("submodular"), _run_indexed(worker, count, threads))


# ---------------------------------------------------------------------------
# calibration fixtures
# ---------------------------------------------------------------------------


def load_calibration() -> dict:
    """Frozen desk-scale constants written by scripts/calibrate.py."""
    path = resources.files("cubelab").joinpath("fixtures/calibration.json")
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)
