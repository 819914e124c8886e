"""Exact Fourier analysis of real-valued functions on {0,1}^n.

Conventions
-----------
* A function is a dense table of 2^n finite reals; the value at integer
  mask m is f(x) where bit (i-1) of m holds coordinate x_i.  Coordinates
  are 1-based in the public API.
* Characters: chi_S(x) = (-1)^{sum_{i in S} x_i}, so on n=1 the function
  f(x) = x_1 has expansion 1/2 - (1/2) chi_{{1}}.
* Coefficients: fhat(S) = 2^{-n} sum_x f(x) chi_S(x), computed by an
  in-place fast Walsh-Hadamard butterfly in O(n 2^n) with a fixed
  summation order.  Parseval: sum_S fhat(S)^2 = E[f^2].
* All norms and expectations are uniform-distribution averages over the
  table; numpy's pairwise reduction keeps the summation error near
  machine precision, and the standard comparison tolerance is 1e-10.
* Discrete derivatives: d_i f(x) = f(x_{i<-1}) - f(x_{i<-0}) and
  d_ij f = d_i (d_j f), with d_ii defined as the zero function.  In
  spectrum terms, transform(d_i f)(T) = -2 fhat(T u {i}) for i not in T.

Tables larger than 2^24 (128 MiB of doubles) are refused with a typed
resource error; the cap is overridable per call or via CUBELAB_MAX_N.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from ._bits import (
    all_masks,
    coord_bit,
    coords_to_mask,
    parity_signs,
    popcounts,
)
from .errors import CoordinateError, DimensionCapError, DomainError

DEFAULT_DIMENSION_CAP = 24
CAP_ENV_VAR = "CUBELAB_MAX_N"

#: standard comparison tolerance for identities on tables/spectra
TOL = 1e-10
#: tighter tolerance for fast-transform vs definition-sum comparisons
ORACLE_TOL = 1e-12


def dimension_cap(explicit: int | None = None) -> int:
    """Resolve the dimension cap: explicit value, else env var, else 24."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(CAP_ENV_VAR)
    return int(env) if env else DEFAULT_DIMENSION_CAP


def check_dimension(n: int, cap: int | None = None, what: str = "table") -> None:
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    resolved = dimension_cap(cap)
    if n > resolved:
        raise DimensionCapError(n, resolved, what)


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CubeFunction:
    """Dense real-valued function on {0,1}^n, indexed by bitmask."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_dimension(self.n)
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise DomainError(
                f"need exactly 2^{self.n} = {1 << self.n} values, "
                f"got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("table contains NaN or infinity")
        object.__setattr__(self, "values", _freeze(values))

    @classmethod
    def from_values(cls, values, cap: int | None = None) -> "CubeFunction":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0 or values.size & (values.size - 1):
            raise DomainError("table length must be a power of two")
        n = values.size.bit_length() - 1
        check_dimension(n, cap)
        return cls(n, values)

    @classmethod
    def constant(cls, n: int, c: float) -> "CubeFunction":
        return cls(n, np.full(1 << n, float(c)))

    def __call__(self, mask: int) -> float:
        return float(self.values[mask])

    def is_boolean(self, tol: float = TOL) -> bool:
        v = self.values
        return bool(np.all((np.abs(v) <= tol) | (np.abs(v - 1.0) <= tol)))


@dataclass(frozen=True)
class Spectrum:
    """Dense Fourier coefficient table; entry at mask S is fhat(S)."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        check_dimension(self.n)
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.shape != (1 << self.n,):
            raise DomainError(
                f"need exactly 2^{self.n} coefficients, got shape {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("spectrum contains NaN or infinity")
        object.__setattr__(self, "coeffs", _freeze(coeffs))

    def __getitem__(self, subset_mask: int) -> float:
        return float(self.coeffs[subset_mask])

    def total_weight(self) -> float:
        """sum_S fhat(S)^2 (= ||f||_2^2 by Parseval)."""
        return float(np.sum(self.coeffs**2))


@dataclass(frozen=True)
class SparsePolynomial:
    """Multilinear polynomial sum_S terms[S] * chi_S with sparse terms."""

    n: int
    terms: dict[int, float]
    degree: int = field(init=False)

    def __post_init__(self):
        check_dimension(self.n)
        cleaned = {}
        for mask, c in self.terms.items():
            mask = int(mask)
            c = float(c)
            if not 0 <= mask < (1 << self.n):
                raise CoordinateError(f"term mask {mask} out of range for n={self.n}")
            if not math.isfinite(c):
                raise DomainError("polynomial coefficient not finite")
            if c != 0.0:
                cleaned[mask] = c
        object.__setattr__(self, "terms", cleaned)
        deg = max((int(m).bit_count() for m in cleaned), default=0)
        object.__setattr__(self, "degree", deg)

    def __len__(self) -> int:
        return len(self.terms)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


def _fwht_inplace(a: np.ndarray) -> None:
    """Walsh-Hadamard butterfly, sequential schedule, in place.

    After the call a[S] = sum_x a0[x] * (-1)^{popcount(S & x)}.
    """
    h = 1
    size = a.size
    while h < size:
        b = a.reshape(-1, 2 * h)
        x = b[:, :h].copy()
        y = b[:, h:].copy()
        b[:, :h] = x + y
        b[:, h:] = x - y
        h *= 2


def transform(f: CubeFunction, cap: int | None = None) -> Spectrum:
    """Fourier transform: fhat(S) = 2^{-n} sum_x f(x) chi_S(x).

    Validates Parseval against the input table to 1e-10 (relative to
    max(1, ||f||_2^2)) before returning.
    """
    check_dimension(f.n, cap, what="transform")
    a = f.values.copy()
    _fwht_inplace(a)
    a /= 1 << f.n
    spec = Spectrum(f.n, a)
    energy_f = float(np.mean(f.values**2))
    energy_s = spec.total_weight()
    if abs(energy_f - energy_s) > TOL * max(1.0, energy_f):
        raise AssertionError(
            f"Parseval violated by the transform: {energy_f} vs {energy_s}"
        )
    return spec


def inverse_transform(s: Spectrum, cap: int | None = None) -> CubeFunction:
    """Inverse transform: f(x) = sum_S fhat(S) chi_S(x)."""
    check_dimension(s.n, cap, what="inverse transform")
    a = s.coeffs.copy()
    _fwht_inplace(a)
    return CubeFunction(s.n, a)


def transform_reference(f: CubeFunction, cap: int = 12) -> Spectrum:
    """Definition-sum transform, O(4^n): independent oracle for the butterfly.

    Computes each coefficient as the literal average 2^{-n} sum_x f(x) chi_S(x)
    via an explicit sign matrix; no butterfly is involved.  Capped small
    because of the quadratic table.
    """
    if f.n > cap:
        raise DimensionCapError(f.n, cap, "definition-sum transform")
    masks = all_masks(f.n)
    inter = masks[None, :] & masks[:, None]
    signs = 1.0 - 2.0 * (np.bitwise_count(inter) & np.uint64(1)).astype(np.float64)
    coeffs = signs @ f.values / (1 << f.n)
    return Spectrum(f.n, coeffs)


# ---------------------------------------------------------------------------
# discrete derivatives
# ---------------------------------------------------------------------------


def derivative(f: CubeFunction, i: int) -> CubeFunction:
    """d_i f(x) = f(x with x_i=1) - f(x with x_i=0); constant in bit i."""
    bit = np.uint64(coord_bit(i, f.n))
    masks = all_masks(f.n)
    return CubeFunction(f.n, f.values[masks | bit] - f.values[masks & ~bit])


def second_derivative(f: CubeFunction, i: int, j: int) -> CubeFunction:
    """Mixed difference d_ij f; the i = j case is the zero function."""
    bi = np.uint64(coord_bit(i, f.n))
    bj = np.uint64(coord_bit(j, f.n))
    if i == j:
        return CubeFunction.constant(f.n, 0.0)
    masks = all_masks(f.n)
    v = f.values
    return CubeFunction(
        f.n,
        v[masks | bi | bj]
        - v[(masks | bi) & ~bj]
        - v[(masks | bj) & ~bi]
        + v[masks & ~(bi | bj)],
    )


# ---------------------------------------------------------------------------
# norms and spectral weights
# ---------------------------------------------------------------------------


def lp_norm(f: CubeFunction, p) -> float:
    """Expectation-based norm over the uniform distribution; p in {1, 2, inf}."""
    v = f.values
    if p == 1:
        return float(np.mean(np.abs(v)))
    if p == 2:
        return float(np.sqrt(np.mean(v**2)))
    if p in (np.inf, math.inf, "inf"):
        return float(np.max(np.abs(v)))
    raise DomainError(f"unsupported norm order {p!r} (use 1, 2 or inf)")


def threshold_norm(f: CubeFunction) -> float:
    """sup { alpha : Pr[|f| >= alpha] >= alpha^3 }, computed exactly.

    With G(alpha) = Pr[|f| >= alpha] (inclusive) a left-continuous
    non-increasing step function, the qualifying set {G(a) >= a^3} is a
    closed down-set, so the sup is attained.  On the plateau ending at
    an achieved value v with G-height p the best qualifying point is
    min(v, p^{1/3}); candidates dominated by lower plateaus drop out of
    the max automatically.  Always in [0, 1] when ||f||_inf <= 1.
    """
    absv = np.abs(f.values)
    size = absv.size
    vals, counts = np.unique(absv, return_counts=True)
    if vals[0] == 0.0:
        vals, counts = vals[1:], counts[1:]
    if vals.size == 0:
        return 0.0
    # Pr[|f| >= v_i] for the sorted distinct positive values v_i
    ge_prob = counts[::-1].cumsum()[::-1] / size
    candidates = np.minimum(vals, np.cbrt(ge_prob))
    return float(candidates.max(initial=0.0))


def level_weight(s: Spectrum, d: int) -> float:
    """W^d = sum of fhat(S)^2 over |S| = d."""
    if not 0 <= d <= s.n:
        raise CoordinateError(f"level {d} out of range [0, {s.n}]")
    pc = popcounts(s.n)
    return float(np.sum(s.coeffs[pc == d] ** 2))


def level_weights(s: Spectrum) -> np.ndarray:
    """All level weights W^0 .. W^n at once."""
    pc = popcounts(s.n)
    return np.bincount(pc, weights=s.coeffs**2, minlength=s.n + 1)


def tail_weight(s: Spectrum, d: int) -> float:
    """W^{>d} = sum of fhat(S)^2 over |S| > d."""
    if not 0 <= d <= s.n:
        raise CoordinateError(f"level {d} out of range [0, {s.n}]")
    pc = popcounts(s.n)
    return float(np.sum(s.coeffs[pc > d] ** 2))


def structured_tail(s: Spectrum, coords: Iterable[int], k: int) -> float:
    """sum of fhat(S)^2 over subsets S with |S \\ L| > k."""
    if not 0 <= k <= s.n:
        raise CoordinateError(f"level {k} out of range [0, {s.n}]")
    lmask = np.uint64(coords_to_mask(coords, s.n))
    outside = np.bitwise_count(all_masks(s.n) & ~lmask)
    return float(np.sum(s.coeffs[outside > k] ** 2))


def l2_degree(s: Spectrum, eps: float) -> int:
    """Smallest d with W^{>d} <= eps^2 (the (l2, eps)-approximate degree)."""
    if not eps > 0:
        raise DomainError(f"accuracy must be positive, got {eps}")
    target = eps * eps
    weights = level_weights(s)
    tail = float(weights.sum())
    for d in range(s.n + 1):
        tail -= float(weights[d])
        if tail <= target:
            return d
    return s.n


def influence(f, i: int, kappa: float = 2.0) -> float:
    """Inf^kappa_i = E[ |(1/2) d_i f|^kappa ]; accepts a table or spectrum.

    For kappa = 2 this equals the Fourier mass on sets containing i.
    """
    if kappa < 1:
        raise DomainError(f"influence exponent must be >= 1, got {kappa}")
    if isinstance(f, Spectrum):
        f = inverse_transform(f)
    d = derivative(f, i)
    return float(np.mean(np.abs(0.5 * d.values) ** kappa))


def total_influence(f, kappa: float = 2.0) -> float:
    """Inf^kappa = sum over coordinates of Inf^kappa_i."""
    if isinstance(f, Spectrum):
        f = inverse_transform(f)
    return float(sum(influence(f, i, kappa) for i in range(1, f.n + 1)))


def project(f: CubeFunction, coords: Iterable[int]) -> CubeFunction:
    """f_I(x) = E_y[ f(x_I, y_outside) ]: average out coordinates not in I.

    Spectrally this zeroes every fhat(S) with S not contained in I.
    """
    imask = coords_to_mask(coords, f.n)
    shaped = f.values.reshape([2] * f.n)
    # axis (n - i) of the reshaped tensor carries coordinate i
    drop = tuple(f.n - i for i in range(1, f.n + 1) if not imask & (1 << (i - 1)))
    if drop:
        shaped = np.broadcast_to(shaped.mean(axis=drop, keepdims=True), shaped.shape)
    return CubeFunction(f.n, shaped.reshape(-1))


def truncate(s: Spectrum, d: int, coords: Iterable[int] | None = None) -> SparsePolynomial:
    """Keep fhat(S) with |S| <= d, or |S \\ I| <= d when coords given.

    The discarded squared mass equals tail_weight (resp. structured_tail),
    so the result is the best such approximation in l2.
    """
    if not 0 <= d <= s.n:
        raise CoordinateError(f"level {d} out of range [0, {s.n}]")
    if coords is None:
        sizes = popcounts(s.n)
    else:
        imask = np.uint64(coords_to_mask(coords, s.n))
        sizes = np.bitwise_count(all_masks(s.n) & ~imask)
    keep = np.flatnonzero((sizes <= d) & (s.coeffs != 0.0))
    return SparsePolynomial(s.n, {int(m): float(s.coeffs[m]) for m in keep})


def eval_polynomial(p: SparsePolynomial, x: int, clip: bool = False) -> float:
    """Evaluate sum_S p[S] chi_S(x) at one mask; optionally clamp to [0,1]."""
    if not 0 <= x < (1 << p.n):
        raise CoordinateError(f"mask {x} out of range for n={p.n}")
    acc = 0.0
    for mask, c in p.terms.items():
        acc += c if (mask & x).bit_count() % 2 == 0 else -c
    if clip:
        acc = min(1.0, max(0.0, acc))
    return acc


def polynomial_table(p: SparsePolynomial, clip: bool = False) -> CubeFunction:
    """Materialize the polynomial as a dense table (direct character sum)."""
    masks = all_masks(p.n)
    acc = np.zeros(1 << p.n)
    for mask, c in p.terms.items():
        acc += c * parity_signs(masks, mask)
    if clip:
        np.clip(acc, 0.0, 1.0, out=acc)
    return CubeFunction(p.n, acc)
