"""Haar-like spectral decomposition of square-integrable integrands.

For a coordinate subset u and a vector kappa of per-coordinate depths, the
component nu_{u,kappa} is obtained by applying, in every active dimension
j in u, the detail operator (conditional mean at b-adic depth k_j + 1 minus
conditional mean at depth k_j), and integrating all inactive dimensions out.
The squared norms sigma2_{u,kappa} of these mutually orthogonal step
functions sum to the variance of the integrand, and drive the evaluation of
the arbitrary-N variance bound for scrambled-net quadrature.

Everything here is deterministic midpoint quadrature on b-adic grids (small
dimensions only); no sampling.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .integrands import IntegrandSpec
from .netcheck import BAryBox
from .quadrature import c_b, gain_factor_bound

__all__ = [
    "HaarComponent",
    "AnovaTable",
    "box_mean",
    "haar_component",
    "sigma_uk",
    "build_table",
    "theorem1_bound",
    "gain_factor_bound",
]

_MAX_GRID = 1 << 24


@dataclass(frozen=True)
class HaarComponent:
    """nu_{u,kappa} tabulated on its active-cell grid.

    ``values[i1, ..., i_{|u|}]`` is the constant value of the component on
    the cell with index i_j at depth kappa_j + 1 in active dimension u_j;
    the component is constant (full range) in every inactive dimension.
    """

    base: int
    dim: int
    u: tuple[int, ...]
    kappa: tuple[int, ...]
    values: np.ndarray

    def norm_sq(self) -> float:
        """Integral of the squared component over the unit cube."""
        return float(np.mean(self.values**2))


def box_mean(phi: IntegrandSpec, box: BAryBox, resolution: int) -> float:
    """Midpoint-rule mean of the integrand over a b-ary box.

    Uses resolution**dim midpoints; O(resolution**-2) error for smooth
    integrands.
    """
    if resolution < 1:
        raise ValueError("under-resolved: resolution must be >= 1")
    axes = []
    for d, a in zip(box.depths, box.indices):
        width = box.base ** -d
        lo = a * width
        axes.append(lo + (np.arange(resolution) + 0.5) * width / resolution)
    if len(axes) != phi.dim:
        raise ValueError("box dimension does not match integrand dimension")
    grid = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grid], axis=1)
    return float(phi(pts).mean())


def _cell_means(phi, base, dim, u, kappa, resolution):
    """Mean of phi over every finest active cell (depth k_j+1 in dims of u),
    with inactive dimensions integrated out by the same midpoint rule."""
    if resolution < 1:
        raise ValueError("under-resolved: resolution must be >= 1")
    axes = []
    shape = []
    quad_axes = []
    for j in range(dim):
        if j in u:
            k = kappa[u.index(j)]
            ncells = base ** (k + 1)
            pts = (np.arange(ncells * resolution) + 0.5) / (ncells * resolution)
            axes.append(pts)
            shape.extend([ncells, resolution])
        else:
            axes.append((np.arange(resolution) + 0.5) / resolution)
            shape.extend([1, resolution])
        quad_axes.append(2 * j + 1)
    total = int(np.prod([len(a) for a in axes]))
    if total > _MAX_GRID:
        raise ValueError(
            f"grid of {total} quadrature points exceeds limit {_MAX_GRID}"
        )
    grid = np.meshgrid(*axes, indexing="ij")
    vals = phi(np.stack([g.ravel() for g in grid], axis=1))
    means = vals.reshape(shape).mean(axis=tuple(quad_axes))
    inactive = tuple(j for j in range(dim) if j not in u)
    return np.squeeze(means, axis=inactive) if inactive else means


def _detail(a: np.ndarray, axis: int, base: int) -> np.ndarray:
    """Value minus parent-cell mean along one b-adic axis."""
    n = a.shape[axis]
    shape = list(a.shape)
    shape[axis : axis + 1] = [n // base, base]
    blocks = a.reshape(shape)
    parents = blocks.mean(axis=axis + 1, keepdims=True)
    return (blocks - parents).reshape(a.shape)


def haar_component(
    phi: IntegrandSpec,
    u,
    kappa,
    resolution: int = 8,
    base: int = 2,
) -> HaarComponent:
    """Compute nu_{u,kappa} for an integrand by tensor-product differencing."""
    u = tuple(sorted(u))
    kappa = tuple(kappa)
    if not u:
        raise ValueError("u must be a nonempty set of dimensions")
    if len(u) != len(kappa) or any(k < 0 for k in kappa):
        raise ValueError("kappa must hold one depth >= 0 per active dimension")
    if any(not 0 <= j < phi.dim for j in u):
        raise ValueError(f"active dimensions {u} out of range for dim {phi.dim}")
    vals = _cell_means(phi, base, phi.dim, u, kappa, resolution)
    for axis in range(len(u)):
        vals = _detail(vals, axis, base)
    return HaarComponent(base=base, dim=phi.dim, u=u, kappa=kappa, values=vals)


def sigma_uk(phi: IntegrandSpec, u, kappa, resolution: int = 8, base: int = 2) -> float:
    """sigma2_{u,kappa}: squared norm of the Haar-like component."""
    return haar_component(phi, u, kappa, resolution, base).norm_sq()


@dataclass
class AnovaTable:
    """Tabulated sigma2_{u,kappa} up to total level |kappa| <= depth.

    ``entries`` maps (u, kappa) with u a sorted tuple of 0-based dimensions.
    ``sigma2_total`` is the full integrand variance; whatever spectral mass
    is not tabulated is available as ``residual`` and is folded
    conservatively into tail sums by the bound evaluator.
    """

    base: int
    dim: int
    depth: int
    sigma2_total: float
    entries: dict[tuple[tuple[int, ...], tuple[int, ...]], float]

    @property
    def tabled_mass(self) -> float:
        return float(sum(self.entries.values()))

    @property
    def residual(self) -> float:
        return max(0.0, self.sigma2_total - self.tabled_mass)

    def level_mass(self, u, level: int) -> float:
        """sigma2~_{u,l}: total mass of components with |kappa| = level."""
        u = tuple(sorted(u))
        return sum(v for (uu, kk), v in self.entries.items() if uu == u and sum(kk) == level)

    def to_json(self, path=None) -> str:
        doc = {
            "base": self.base,
            "dim": self.dim,
            "depth": self.depth,
            "sigma2_total": self.sigma2_total,
            "entries": [
                {"u": list(u), "kappa": list(k), "sigma2": v}
                for (u, k), v in sorted(self.entries.items())
            ],
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_json(cls, text: str) -> "AnovaTable":
        doc = json.loads(text)
        entries = {
            (tuple(e["u"]), tuple(e["kappa"])): float(e["sigma2"])
            for e in doc["entries"]
        }
        return cls(
            base=doc["base"],
            dim=doc["dim"],
            depth=doc["depth"],
            sigma2_total=doc["sigma2_total"],
            entries=entries,
        )


def build_table(
    phi: IntegrandSpec,
    depth: int,
    *,
    base: int = 2,
    resolution: int = 8,
    sigma2_total: float | None = None,
) -> AnovaTable:
    """Tabulate sigma2_{u,kappa} for all nonempty u and |kappa| <= depth.

    Restricted to dim <= 3 and depth <= 12: the cell count b**(|u|+|kappa|)
    grows too fast beyond that, and small-dimension tables are all the bound
    verification needs.
    """
    if phi.dim > 3:
        raise ValueError("spectral tables are restricted to dim <= 3")
    if depth > 12:
        raise ValueError("spectral tables are restricted to depth <= 12")
    if sigma2_total is None:
        sigma2_total = phi.exact_variance
    if sigma2_total is None:
        raise ValueError("need sigma2_total (or an integrand with exact_variance)")
    entries = {}
    dims = range(phi.dim)
    for size in range(1, phi.dim + 1):
        for u in combinations(dims, size):
            for kappa in product(range(depth + 1), repeat=size):
                if sum(kappa) > depth:
                    continue
                entries[(u, kappa)] = sigma_uk(phi, u, kappa, resolution, base)
    return AnovaTable(
        base=base, dim=phi.dim, depth=depth, sigma2_total=float(sigma2_total), entries=entries
    )


def _b_term(table: AnovaTable, k: int, c: int) -> float:
    """B_c^(k) with the untabulated residual folded into the tail sum."""
    b = table.base
    tail = table.residual
    geom = 0.0
    for (u, kappa), val in table.entries.items():
        thr = k - c - len(u)
        if sum(kappa) > thr:
            tail += val
        else:
            geom += b ** float(-thr) * val * b ** sum(kappa)
    return tail + geom


def theorem1_bound(table: AnovaTable, n: int, t: int) -> float:
    """Arbitrary-N variance bound for scrambled (t,s)-sequence quadrature.

    Evaluates, with k the integer such that b**k <= N < b**(k+1),

        2 (Gamma_{t,s}/N) { (1+c_b) B_t^(k)
            + c_b [ B_{t+1}^(k)
                    + sum_u b**(-(k-1-t-|u|)/2)
                      sum_{|kappa| <= k-1-t-|u|} b**(|kappa|/2) sigma2_{u,kappa} ] }
        + b**(2t) sigma2 / N**2

    with empty sums null.  Untabulated spectral mass is added to every tail
    sum, so the result stays a valid upper bound for a truncated table.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    b = table.base
    k = 0
    while b ** (k + 1) <= n:
        k += 1
    if table.depth < k:
        raise ValueError(f"table too shallow: depth {table.depth} < k = {k}")
    gamma = gain_factor_bound(t, table.dim, b)
    cb = c_b(b)
    third = 0.0
    for (u, kappa), val in table.entries.items():
        thr = k - 1 - t - len(u)
        if thr >= 0 and sum(kappa) <= thr:
            third += b ** (-thr / 2.0) * b ** (sum(kappa) / 2.0) * val
    braces = (1 + cb) * _b_term(table, k, t) + cb * (_b_term(table, k, t + 1) + third)
    return 2 * gamma / n * braces + b ** (2 * t) * table.sigma2_total / n**2
