"""Bitmask helpers shared across modules.

Convention: a point x in {0,1}^n is the integer mask m with bit (i-1)
holding coordinate x_i (coordinates are 1-based in the public API,
bits 0-based internally). Subsets S of [n] use the same encoding.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from .errors import CoordinateError


def popcount(a: np.ndarray) -> np.ndarray:
    """Per-element number of set bits."""
    return np.bitwise_count(a)


def all_masks(n: int) -> np.ndarray:
    """All 2^n masks as uint64, in index order."""
    return np.arange(1 << n, dtype=np.uint64)


def popcounts(n: int) -> np.ndarray:
    """popcount of every mask in [0, 2^n), as a small-int array."""
    return np.bitwise_count(all_masks(n)).astype(np.int64)


def parity_signs(masks: np.ndarray, subset: int) -> np.ndarray:
    """chi_S at each mask: (-1)^{popcount(mask & S)} as float +-1."""
    par = np.bitwise_count(masks & np.uint64(subset)) & np.uint64(1)
    return 1.0 - 2.0 * par.astype(np.float64)


def coord_bit(i: int, n: int) -> int:
    """Validate 1-based coordinate i and return its bit mask."""
    if not 1 <= i <= n:
        raise CoordinateError(f"coordinate {i} out of range [1, {n}]")
    return 1 << (i - 1)


def coords_to_mask(coords: Iterable[int], n: int) -> int:
    """Fold a collection of 1-based coordinates into a subset mask."""
    mask = 0
    for i in coords:
        mask |= coord_bit(int(i), n)
    return mask


def mask_to_coords(mask: int) -> frozenset[int]:
    """Subset mask back to a frozenset of 1-based coordinates."""
    out = set()
    i = 1
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def iter_submasks(mask: int):
    """All submasks of mask (including 0 and mask itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask
