"""Hilbert space-filling curve H: [0,1] -> [0,1]^d and its pseudo-inverse.

d = 1 is the identity; d = 2 uses the classical recursive construction at a
fixed order p (2**(2p) cells), with the standard orientation: cell rank 0 is
the quadrant touching the origin and the last rank is the quadrant touching
(1, 0), so the curve enters and leaves along the bottom edge.  Points on
cell boundaries belong to the cell on their upper side (left-closed
convention, matching b-ary boxes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["HilbertOrder", "hilbert_map", "hilbert_inverse", "rank_to_cell", "cell_to_rank"]


@dataclass(frozen=True)
class HilbertOrder:
    """Curve configuration: dimension d in {1, 2} and resolution order p."""

    dim: int
    order: int = 16

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("only d in {1, 2} is supported")
        if not 1 <= self.order <= 31:
            raise ValueError("order must be in [1, 31] for exact integer ranks")

    @property
    def cells_per_axis(self) -> int:
        return 1 << self.order

    @property
    def total_cells(self) -> int:
        return 1 << (self.dim * self.order)


def rank_to_cell(rank, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell coordinates (x, y) of the given ranks on the order-p 2-D curve."""
    t = np.asarray(rank, dtype=np.uint64).copy()
    x = np.zeros_like(t)
    y = np.zeros_like(t)
    one = np.uint64(1)
    for level in range(order):
        s = np.uint64(1 << level)
        rx = (t >> one) & one
        ry = (t ^ rx) & one
        # rotate the quadrant contents where ry == 0
        m = ry == 0
        flip = m & (rx == 1)
        x[flip] = s - one - x[flip]
        y[flip] = s - one - y[flip]
        xm = x[m].copy()
        x[m] = y[m]
        y[m] = xm
        x += s * rx
        y += s * ry
        t >>= np.uint64(2)
    return x, y


def cell_to_rank(x, y, order: int) -> np.ndarray:
    """Rank along the order-p 2-D curve of the given cell coordinates."""
    x = np.asarray(x, dtype=np.uint64).copy()
    y = np.asarray(y, dtype=np.uint64).copy()
    rank = np.zeros_like(x)
    one = np.uint64(1)
    for level in range(order - 1, -1, -1):
        s = np.uint64(1 << level)
        rx = ((x & s) > 0).astype(np.uint64)
        ry = ((y & s) > 0).astype(np.uint64)
        rank += s * s * ((np.uint64(3) * rx) ^ ry)
        m = ry == 0
        flip = m & (rx == 1)
        x[flip] = s - one - x[flip]
        y[flip] = s - one - y[flip]
        xm = x[m].copy()
        x[m] = y[m]
        y[m] = xm
    return rank


def hilbert_map(u, order: HilbertOrder) -> np.ndarray:
    """H(u): center of the cell with rank floor(u * 2**(d*p)).

    For d = 1 this is the identity.  Input may be scalar or array; output
    gains a trailing axis of length d for d = 2.
    """
    u = np.asarray(u, dtype=np.float64)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    if order.dim == 1:
        return u
    total = order.total_cells
    rank = np.minimum((u * total).astype(np.uint64), np.uint64(total - 1))
    x, y = rank_to_cell(rank, order.order)
    n = float(order.cells_per_axis)
    return np.stack([(x + 0.5) / n, (y + 0.5) / n], axis=-1)


def hilbert_inverse(x, order: HilbertOrder) -> np.ndarray:
    """h(x): curve rank of the cell containing x, scaled to [0, 1).

    Satisfies H(h(x)) in the same cell as x; for d = 1 it is the identity.
    """
    x = np.asarray(x, dtype=np.float64)
    if order.dim == 1:
        return x[..., 0] if (x.ndim > 0 and x.shape[-1] == 1) else x
    if x.shape[-1] != 2:
        raise ValueError("expected points with a trailing axis of length 2")
    if np.any((x < 0) | (x >= 1)):
        raise ValueError("points must lie in [0, 1)^2")
    n = order.cells_per_axis
    cx = np.minimum((x[..., 0] * n).astype(np.uint64), np.uint64(n - 1))
    cy = np.minimum((x[..., 1] * n).astype(np.uint64), np.uint64(n - 1))
    rank = cell_to_rank(cx, cy, order.order)
    return rank.astype(np.float64) / float(order.total_cells)
