"""PAC learning pipeline over the uniform distribution.

Stages: seeded uniform example generation, Fourier coefficient
estimation, junta selection by the degree-1/degree-2 coefficient
thresholds 3 eps / (16 sqrt(s)) and 3 eps^2 / (32 s^2), least-squares
fitting over the low-degree monomials on the selected variables, and
exact or empirical l2 error evaluation.

Desk-scale defaults
-------------------
The asymptotically faithful parameter choices (junta parameter
s = ceil(4 ln(2/eps) / eps^2), sample count m = C ln(n) s^4 / eps^4)
produce astronomically many samples for any interesting eps, so the
resolved sample count is capped (default 20000, configurable), the
coefficient-accuracy shortfall is surfaced as a warning in the report,
and the regression degree is reduced until the feature count fits both
the feature cap and an m/8 overdetermination budget.  All resolved
values, formula values, caps and warnings are recorded in the run
report; every stage is deterministic given (function, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._bits import coords_to_mask, parity_signs
from .core import CubeFunction, SparsePolynomial, polynomial_table
from .errors import DomainError, RegressionError

DEFAULT_SAMPLE_CAP = 20_000
DEFAULT_FEATURE_CAP = 4096
DEFAULT_SAMPLE_CONSTANT = 4.0
#: features are kept below m / OVERDETERMINATION so the solve stays cheap
#: and the empirical risk tracks the true risk
OVERDETERMINATION = 8


@dataclass(frozen=True)
class SampleSet:
    """Labeled uniform examples (bitmask, real label), reproducible by seed."""

    n: int
    masks: np.ndarray
    labels: np.ndarray
    seed: int

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=np.uint64)
        labels = np.asarray(self.labels, dtype=np.float64)
        if masks.ndim != 1 or masks.shape != labels.shape or masks.size == 0:
            raise DomainError("masks and labels must be equal-length nonempty 1-d arrays")
        if not np.all(np.isfinite(labels)):
            raise DomainError("labels must be finite")
        masks.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return int(self.masks.size)


@dataclass(frozen=True)
class LearnerConfig:
    """Pipeline parameters; None fields resolve to documented defaults."""

    eps: float
    s: int | None = None
    d: int | None = None
    m: int | None = None
    seed: int = 0
    clip: bool = True
    sample_constant: float = DEFAULT_SAMPLE_CONSTANT
    sample_cap: int = DEFAULT_SAMPLE_CAP
    feature_cap: int = DEFAULT_FEATURE_CAP

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"eps must be in (0, 1), got {self.eps}")
        if self.s is not None and self.s < 1:
            raise DomainError("junta parameter s must be >= 1")
        if self.d is not None and self.d < 0:
            raise DomainError("degree must be >= 0")
        if self.m is not None and self.m < 1:
            raise DomainError("sample count must be >= 1")


@dataclass(frozen=True)
class LearnedModel:
    """Junta plus sparse low-degree polynomial hypothesis."""

    junta: frozenset[int]
    polynomial: SparsePolynomial
    clip: bool
    diagnostics: dict

    def __post_init__(self):
        jmask = coords_to_mask(self.junta, self.polynomial.n)
        for mask in self.polynomial.terms:
            if mask & ~jmask:
                raise DomainError("polynomial term uses a non-junta variable")

    def predict(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.uint64)
        acc = np.zeros(masks.shape, dtype=np.float64)
        for mask, c in self.polynomial.terms.items():
            acc += c * parity_signs(masks, mask)
        if self.clip:
            np.clip(acc, 0.0, 1.0, out=acc)
        return acc

    def table(self) -> CubeFunction:
        return polynomial_table(self.polynomial, clip=self.clip)


# ---------------------------------------------------------------------------
# sampling and estimation
# ---------------------------------------------------------------------------


def draw_samples(f: CubeFunction, m: int, seed: int) -> SampleSet:
    """m i.i.d. uniform points labeled by f; identical set for identical seed."""
    if m < 1:
        raise DomainError(f"sample count must be >= 1, got {m}")
    rng = np.random.default_rng(np.random.SeedSequence([0x5A3, int(seed)]))
    masks = rng.integers(0, 1 << f.n, size=m, dtype=np.uint64)
    return SampleSet(f.n, masks, f.values[masks], int(seed))


def estimate_coefficients(samples: SampleSet, subsets) -> np.ndarray:
    """Empirical coefficients (1/m) sum label * chi_S(x) for each subset mask.

    Unbiased for fhat(S); standard error at most ||f||_inf / sqrt(m).
    Degenerates to the exact definition when the samples enumerate the
    cube once each.
    """
    out = np.empty(len(subsets))
    for pos, mask in enumerate(subsets):
        out[pos] = float(
            np.mean(samples.labels * parity_signs(samples.masks, int(mask)))
        )
    return out


# ---------------------------------------------------------------------------
# junta selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JuntaSelection:
    """Outcome of threshold-based junta selection from samples."""

    indices: frozenset[int]
    threshold1: float
    threshold2: float | None
    target_accuracy: float
    accuracy_warning: bool
    degree1: dict = field(default_factory=dict)
    degree2: dict = field(default_factory=dict)


def junta_thresholds(eps: float, s: int) -> tuple[float, float]:
    """The selection thresholds 3 eps/(16 sqrt(s)) and 3 eps^2/(32 s^2)."""
    return 3.0 * eps / (16.0 * math.sqrt(s)), 3.0 * eps * eps / (32.0 * s * s)


def required_sample_count(n: int, eps: float, s: int, constant: float = DEFAULT_SAMPLE_CONSTANT) -> int:
    """ceil(C ln(n) s^4 / eps^4): the coefficient-accuracy driven count."""
    return int(math.ceil(constant * math.log(max(n, 2)) * s**4 / eps**4))


def select_junta(
    samples: SampleSet,
    eps: float,
    s: int,
    *,
    use_pairs: bool = True,
    sample_constant: float = DEFAULT_SAMPLE_CONSTANT,
) -> JuntaSelection:
    """Variables with a large estimated degree-1 (or with `use_pairs`,
    degree-2) coefficient.

    Returns the selection plus the estimates; if the sample set is too
    small for the requested coefficient accuracy eps^2/(32 s^2) the
    selection still runs and the shortfall is flagged, not raised.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must be in (0, 1)")
    if s < 1:
        raise DomainError("junta parameter s must be >= 1")
    n = samples.n
    t1, t2 = junta_thresholds(eps, s)
    target = eps * eps / (32.0 * s * s)
    needed = required_sample_count(n, eps, s, sample_constant)
    warn = samples.size < needed

    signs = np.empty((samples.size, n))
    for i in range(n):
        signs[:, i] = parity_signs(samples.masks, 1 << i)
    labels = samples.labels
    deg1 = {i + 1: float(np.mean(labels * signs[:, i])) for i in range(n)}
    chosen = {i for i, est in deg1.items() if abs(est) >= t1}
    deg2: dict = {}
    if use_pairs:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                est = float(
                    np.mean(labels * signs[:, i - 1] * signs[:, j - 1])
                )
                deg2[(i, j)] = est
                if abs(est) >= t2:
                    chosen.add(i)
                    chosen.add(j)
    return JuntaSelection(
        frozenset(chosen),
        t1,
        t2 if use_pairs else None,
        target,
        warn,
        deg1,
        deg2,
    )


# ---------------------------------------------------------------------------
# regression
# ---------------------------------------------------------------------------


def _feature_masks(junta: frozenset[int], n: int, degree: int) -> list[int]:
    coords = sorted(junta)
    feats = [0]
    for size in range(1, degree + 1):
        for combo in combinations(coords, size):
            feats.append(coords_to_mask(combo, n))
    return feats


def feature_count(junta_size: int, degree: int) -> int:
    return sum(math.comb(junta_size, j) for j in range(0, degree + 1))


def fit_low_degree(
    samples: SampleSet,
    junta,
    degree: int,
    *,
    clip: bool = True,
    feature_cap: int = DEFAULT_FEATURE_CAP,
) -> LearnedModel:
    """Least squares over the degree-d monomials on the junta variables.

    Solved by orthogonal factorization (SVD least squares); if the
    system is rank deficient, refit as ridge on the normal equations
    with lambda = 1e-8 trace(X'X)/t.  Diagnostics record the path.
    """
    junta = frozenset(int(i) for i in junta)
    degree = min(int(degree), len(junta))
    t = feature_count(len(junta), degree)
    if t > feature_cap:
        raise RegressionError(
            f"{t} features exceed the cap of {feature_cap} "
            f"(junta {len(junta)}, degree {degree})"
        )
    m = samples.size
    if m < t:
        raise RegressionError(f"under-determined: {m} samples for {t} features")

    feats = _feature_masks(junta, samples.n, degree)
    x = np.empty((m, t))
    index = {mask: pos for pos, mask in enumerate(feats)}
    x[:, 0] = 1.0
    for pos, mask in enumerate(feats):
        if pos == 0:
            continue
        low = mask & -mask
        parent = mask ^ low
        x[:, pos] = x[:, index[parent]] * parity_signs(samples.masks, low)

    beta, residual, rank, sv = np.linalg.lstsq(x, samples.labels, rcond=None)
    solver = "lstsq"
    if rank < t:
        gram = x.T @ x
        lam = 1e-8 * float(np.trace(gram)) / t
        beta = np.linalg.solve(gram + lam * np.eye(t), x.T @ samples.labels)
        solver = "ridge"
    mse = float(np.mean((x @ beta - samples.labels) ** 2))
    diagnostics = {
        "solver": solver,
        "rank": int(rank),
        "features": t,
        "samples": m,
        "condition": float(sv[0] / sv[-1]) if sv.size and sv[-1] > 0 else math.inf,
        "empirical_mse": mse,
    }
    poly = SparsePolynomial(
        samples.n, {mask: float(b) for mask, b in zip(feats, beta)}
    )
    return LearnedModel(junta, poly, clip, diagnostics)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate_error(model: LearnedModel, f: CubeFunction) -> float:
    """Exact ||f - h||_2 over the full table (clipped if the model clips)."""
    if model.polynomial.n != f.n:
        raise DomainError(
            f"model is over n={model.polynomial.n}, target over n={f.n}"
        )
    h = model.table()
    return float(np.sqrt(np.mean((h.values - f.values) ** 2)))


def evaluate_error_empirical(model: LearnedModel, holdout: SampleSet) -> float:
    """Root mean squared error on a holdout sample."""
    if model.polynomial.n != holdout.n:
        raise DomainError("holdout dimension mismatch")
    pred = model.predict(holdout.masks)
    return float(np.sqrt(np.mean((pred - holdout.labels) ** 2)))


# ---------------------------------------------------------------------------
# end-to-end pipeline
# ---------------------------------------------------------------------------


def default_degree(mode: str, eps: float) -> int:
    """Degree targets: eps^{-4/5} ln(1/eps) (submodular), sqrt(5)/(2 eps) (xos)."""
    if mode == "submodular":
        return int(math.ceil(eps ** (-0.8) * math.log(1.0 / eps)))
    if mode == "xos":
        return int(math.ceil(math.sqrt(5.0) / (2.0 * eps)))
    raise DomainError(f"unknown mode {mode!r} (use 'submodular' or 'xos')")


def default_junta_parameter(eps: float) -> int:
    return int(math.ceil(4.0 * math.log(2.0 / eps) / (eps * eps)))


def learn(
    f: CubeFunction, config: LearnerConfig, mode: str = "submodular"
) -> tuple[LearnedModel, dict]:
    """Full pipeline: sample, select junta, fit, evaluate exactly.

    Submodular mode selects on degree-1 and degree-2 coefficients; xos
    mode on degree-1 only.  The effective regression degree is
    min(config degree, junta size) reduced until the feature count fits
    the feature cap and the m/8 sample budget.
    """
    if mode not in ("submodular", "xos"):
        raise DomainError(f"unknown mode {mode!r} (use 'submodular' or 'xos')")
    eps = config.eps
    s = config.s if config.s is not None else default_junta_parameter(eps)
    m_formula = required_sample_count(f.n, eps, s, config.sample_constant)
    m = config.m if config.m is not None else min(m_formula, config.sample_cap)

    samples = draw_samples(f, m, config.seed)
    selection = select_junta(
        samples,
        eps,
        s,
        use_pairs=(mode == "submodular"),
        sample_constant=config.sample_constant,
    )
    junta = selection.indices

    d_requested = config.d if config.d is not None else default_degree(mode, eps)
    budget = min(config.feature_cap, max(1, m // OVERDETERMINATION))
    d_eff = min(d_requested, len(junta))
    while d_eff > 0 and feature_count(len(junta), d_eff) > budget:
        d_eff -= 1

    model = fit_low_degree(
        samples, junta, d_eff, clip=config.clip, feature_cap=config.feature_cap
    )
    exact = evaluate_error(model, f)
    report = {
        "mode": mode,
        "eps": eps,
        "junta_parameter_s": s,
        "samples": m,
        "sample_formula": m_formula,
        "sample_cap": config.sample_cap,
        "seed": config.seed,
        "clip": config.clip,
        "threshold_degree1": selection.threshold1,
        "threshold_degree2": selection.threshold2,
        "coefficient_accuracy_target": selection.target_accuracy,
        "accuracy_warning": selection.accuracy_warning,
        "junta": sorted(junta),
        "junta_size": len(junta),
        "degree_requested": d_requested,
        "degree_effective": d_eff,
        "feature_budget": budget,
        "diagnostics": model.diagnostics,
        "exact_l2_error": exact,
    }
    return model, report
