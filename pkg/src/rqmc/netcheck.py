"""Exact (t,m,s)-net and (lambda,t,m,s)-net verification by b-ary box counting.

Membership is decided on digit matrices: a point lies in the box with
per-dimension depth d_j and index a_j iff its first d_j digits in dimension j
equal the base-b digits of a_j.  No floating point, no tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Iterator

import numpy as np

from .sequences import PointSet

__all__ = [
    "BAryBox",
    "is_tms_net",
    "is_lambda_tms_net",
    "enumerate_boxes",
    "box_count",
]

_MAX_BOXES = 10**8


@dataclass(frozen=True)
class BAryBox:
    """Elementary interval prod_j [a_j b**-d_j, (a_j+1) b**-d_j)."""

    base: int
    depths: tuple[int, ...]
    indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.depths) != len(self.indices):
            raise ValueError("depths and indices must have equal length")
        for d, a in zip(self.depths, self.indices):
            if d < 0 or not 0 <= a < self.base**d:
                raise ValueError(f"invalid box cell (d={d}, a={a}) in base {self.base}")

    @property
    def volume(self) -> float:
        return float(self.base) ** -sum(self.depths)

    def contains(self, x) -> bool:
        """Half-open membership test for a float point (for display/debug only)."""
        x = np.asarray(x, dtype=np.float64)
        lo = np.array([a * self.base**-d for a, d in zip(self.indices, self.depths)])
        hi = np.array([(a + 1) * self.base**-d for a, d in zip(self.indices, self.depths)])
        return bool(np.all((x >= lo) & (x < hi)))


def box_count(base: int, s: int, total_depth: int) -> int:
    """Number of b-ary boxes with depth sum equal to ``total_depth``."""
    return base**total_depth * math.comb(total_depth + s - 1, s - 1)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All orderings of nonnegative integers summing to ``total``."""
    for cuts in combinations_with_replacement(range(total + 1), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def enumerate_boxes(base: int, s: int, total_depth: int) -> Iterator[BAryBox]:
    """Yield every b-ary box with depth sum ``total_depth`` exactly once."""
    if total_depth < 0:
        raise ValueError("total_depth must be >= 0")
    if box_count(base, s, total_depth) > _MAX_BOXES:
        raise ValueError(
            f"box enumeration for base {base}, s={s}, depth {total_depth} needs "
            f"{box_count(base, s, total_depth)} boxes (> {_MAX_BOXES})"
        )
    for depths in _compositions(total_depth, s):
        ranges = [range(base**d) for d in depths]
        for indices in product(*ranges):
            yield BAryBox(base=base, depths=depths, indices=indices)


def _prefix_integers(ps: PointSet, max_depth: int) -> np.ndarray:
    """pref[n, j, d] = integer formed by the first d digits of coordinate j."""
    if max_depth > ps.depth:
        raise ValueError(f"requested depth {max_depth} exceeds digit depth {ps.depth}")
    pref = np.zeros((ps.count, ps.dim, max_depth + 1), dtype=np.int64)
    for d in range(1, max_depth + 1):
        pref[:, :, d] = pref[:, :, d - 1] * ps.base + ps.digits[:, :, d - 1]
    return pref


def _all_box_counts(ps: PointSet, total_depth: int) -> Iterator[np.ndarray]:
    """Per-composition occupancy vectors (length base**total_depth)."""
    b, s = ps.base, ps.dim
    if box_count(b, s, total_depth) > _MAX_BOXES:
        raise ValueError(
            f"net check at depth {total_depth} in dimension {s} needs "
            f"{box_count(b, s, total_depth)} boxes (> {_MAX_BOXES}); refusing"
        )
    pref = _prefix_integers(ps, total_depth)
    nboxes = b**total_depth
    for depths in _compositions(total_depth, s):
        key = np.zeros(ps.count, dtype=np.int64)
        for j, d in enumerate(depths):
            key = key * b**d + pref[:, j, d]
        yield np.bincount(key, minlength=nboxes)


def is_tms_net(ps: PointSet, t: int, m: int) -> bool:
    """True iff every box of volume b**(t-m) contains exactly b**t points.

    Requires ``ps.count == base**m`` and 0 <= t <= m.
    """
    if not 0 <= t <= m:
        raise ValueError(f"need 0 <= t <= m, got t={t}, m={m}")
    if ps.count != ps.base**m:
        raise ValueError(
            f"not a power-net size: {ps.count} != {ps.base}**{m}"
        )
    target = ps.base**t
    return all(np.all(counts == target) for counts in _all_box_counts(ps, m - t))


def is_lambda_tms_net(ps: PointSet, lam: int, t: int, m: int) -> bool:
    """Check the (lambda,t,m,s)-net conditions.

    Every box of volume b**(t-m) must contain exactly lam*b**t points and no
    box of volume b**(t-m-1) may contain more than b**t points.
    """
    if not 1 <= lam <= ps.base - 1:
        raise ValueError(f"lambda must be in [1, base-1], got {lam}")
    if not 0 <= t <= m:
        raise ValueError(f"need 0 <= t <= m, got t={t}, m={m}")
    if ps.count != lam * ps.base**m:
        raise ValueError(
            f"size error: {ps.count} != {lam} * {ps.base}**{m}"
        )
    target = lam * ps.base**t
    if not all(np.all(c == target) for c in _all_box_counts(ps, m - t)):
        return False
    cap = ps.base**t
    return all(int(c.max()) <= cap for c in _all_box_counts(ps, m - t + 1))
