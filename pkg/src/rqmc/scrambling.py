"""Randomization of digital point sets.

Two schemes, both structured as a lazy tree of per-node digit maps keyed by
(dimension, digit prefix):

* ``owen_nested`` -- a uniformly random permutation of {0,..,b-1} at every node;
* ``linear_matousek`` -- a random affine map d -> (h*d + g) mod b per node,
  h uniform in {1,..,b-1}, g uniform in {0,..,b-1}.

Node maps are derived purely from (seed, scheme, dimension, digit level,
prefix) through a counter-based 64-bit mixer, so scrambling is reproducible
at any evaluation order or parallelism level and the permutation tree (which
has b**depth nodes per dimension) is never materialized.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .sequences import PointSet

__all__ = [
    "ScrambleState",
    "scramble",
    "point_value",
    "point_values",
    "scrambled_values",
    "derive_seed",
]

SCHEMES = ("owen_nested", "linear_matousek")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_PHI = 0xD1B54A32D192ED03
_DIM_C = 0x8CB92BA72F3D8DD7
_LEVEL_C = 0xABC98388FB8FAC03
_RESIDUAL_TAG = 0x6A09E667F3BCC909
_SCHEME_TAG = {"owen_nested": 0x5851F42D4C957F2D, "linear_matousek": 0x2545F4914F6CDD1D}

_U1 = np.uint64(1)

_perm_cache: dict[int, np.ndarray] = {}


def _mix64_int(x: int) -> int:
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(0xBF58476D1CE4E5B9)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def derive_seed(master: int, *indices: int) -> int:
    """Deterministic child seed from a master seed and a counter path."""
    s = _mix64_int(master + _GOLDEN)
    for i in indices:
        s = _mix64_int(s ^ ((i + 1) * _PHI & _MASK64))
    return s


@dataclass(frozen=True)
class ScrambleState:
    """Seeded scrambling configuration; immutable after construction."""

    seed: int
    scheme: str = "owen_nested"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scrambling scheme {self.scheme!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def _perm_table(base: int) -> np.ndarray:
    if base not in _perm_cache:
        if math.factorial(base) > 10**6:
            raise ValueError(f"base {base} too large for permutation scrambling")
        _perm_cache[base] = np.array(
            list(itertools.permutations(range(base))), dtype=np.uint8
        )
    return _perm_cache[base]


def _dim_seeds(seeds: np.ndarray, scheme: str, dim: int) -> np.ndarray:
    """Per-replication node-key seeds for one dimension."""
    k = _mix64(seeds ^ np.uint64(_SCHEME_TAG[scheme]))
    return _mix64(k ^ np.uint64(((dim + 1) * _DIM_C) & _MASK64))


def _scramble_tile(digits_j, base, dim_seeds, scheme, y, *, collect_digits=None):
    """Scramble one coordinate tile for a batch of seeds (in-place workhorse).

    digits_j: (N, M) uint8 input digits; dim_seeds: (R,) uint64; y: (R, N)
    uint64 output buffer receiving the packed scrambled digit integers
    Y = sum a_i * base**(M - i).  Optionally stores the scrambled digits into
    ``collect_digits`` of shape (R, N, M).
    """
    n, m = digits_j.shape
    r = dim_seeds.shape[0]
    prefix = np.zeros(n, dtype=np.uint64)
    y.fill(0)
    h = np.empty((r, n), dtype=np.uint64)
    tmp = np.empty((r, n), dtype=np.uint64)
    ubase = np.uint64(base)
    c1 = np.uint64(0xBF58476D1CE4E5B9)
    c2 = np.uint64(0x94D049BB133111EB)
    fact = np.uint64(math.factorial(base))
    perms = _perm_table(base) if (scheme == "owen_nested" and base > 2) else None
    seeds_col = dim_seeds[:, None]
    for i in range(m):
        a = digits_j[:, i].astype(np.uint64)
        node = (prefix * np.uint64(_PHI)) ^ np.uint64(((i + 1) * _LEVEL_C) & _MASK64)
        # h = mix64(node ^ seed), computed without fresh allocations
        np.bitwise_xor(node[None, :], seeds_col, out=h)
        np.right_shift(h, np.uint64(30), out=tmp)
        h ^= tmp
        h *= c1
        np.right_shift(h, np.uint64(27), out=tmp)
        h ^= tmp
        h *= c2
        np.right_shift(h, np.uint64(31), out=tmp)
        h ^= tmp
        if scheme == "owen_nested":
            if base == 2:
                np.bitwise_and(h, _U1, out=tmp)
                tmp ^= a[None, :]
                anew = tmp
            else:
                idx = (h % fact).astype(np.intp)
                anew = perms[idx, a[None, :].astype(np.intp)].astype(np.uint64)
        else:  # linear_matousek; base 2 degenerates to a per-node digital shift
            hmul = _U1 + h % np.uint64(base - 1)
            g = (h >> np.uint64(32)) % ubase
            anew = (hmul * a[None, :] + g) % ubase
        y *= ubase
        y += anew
        if collect_digits is not None:
            collect_digits[:, :, i] = anew.astype(np.uint8)
        prefix *= ubase
        prefix += a
    return y


def _scramble_dim(digits_j, base, dim_seeds, scheme, *, collect_digits=None):
    """Tile the point axis so the per-level working set stays cache-resident."""
    n = digits_j.shape[0]
    r = dim_seeds.shape[0]
    y = np.empty((r, n), dtype=np.uint64)
    tile = max(512, (1 << 20) // max(r, 1))
    for lo in range(0, n, tile):
        hi = min(n, lo + tile)
        sub = None if collect_digits is None else collect_digits[:, lo:hi, :]
        _scramble_tile(
            digits_j[lo:hi], base, dim_seeds, scheme, y[:, lo:hi], collect_digits=sub
        )
    return y


def scramble(ps: PointSet, state: ScrambleState) -> PointSet:
    """Scramble a point set, returning digit matrices of the same shape.

    Owen nested scrambling permutes digit i of coordinate j by the random
    permutation attached to the prefix (a_1, ..., a_{i-1}) of the input
    digits, so the net structure (and ``t_claim``) is preserved.  Identical
    (input, seed) pairs give bit-identical output.
    """
    if ps.count == 0:
        raise ValueError("empty point set")
    seeds = np.array([state.seed], dtype=np.uint64)
    out = np.empty((1, ps.count, ps.depth), dtype=np.uint8)
    new_digits = np.empty_like(ps.digits)
    for j in range(ps.dim):
        _scramble_dim(
            ps.digits[:, j, :],
            ps.base,
            _dim_seeds(seeds, state.scheme, j),
            state.scheme,
            collect_digits=out,
        )
        new_digits[:, j, :] = out[0]
    return PointSet(base=ps.base, digits=new_digits, t_claim=ps.t_claim)


def point_value(ps: PointSet, n: int, j: int, residual_rng: np.random.Generator) -> float:
    """Value of coordinate j of point n with a uniform residual tail.

    Returns digits value + U * base**-depth with U ~ U[0,1) drawn from
    ``residual_rng``; the tail restores the exact marginal uniformity lost
    to finite-depth truncation.
    """
    if not (0 <= n < ps.count and 0 <= j < ps.dim):
        raise IndexError(f"point ({n}, {j}) out of range")
    powers = ps.base ** -(np.arange(ps.depth, dtype=np.float64) + 1)
    v = float(ps.digits[n, j].astype(np.float64) @ powers)
    return v + float(residual_rng.random()) * ps.base ** -ps.depth


def point_values(ps: PointSet, residual_rng: np.random.Generator) -> np.ndarray:
    """All point values with uniform residual tails, shape (N, dim)."""
    tail = residual_rng.random((ps.count, ps.dim)) * ps.base ** -ps.depth
    return ps.values() + tail


def scrambled_values(ps: PointSet, scheme: str, seeds, *, residual: bool = True) -> np.ndarray:
    """Fused scramble-and-evaluate over a batch of seeds.

    For each seed in ``seeds`` (shape (R,)) the digit scrambling is
    bit-identical to ``scramble(ps, ScrambleState(seed, scheme))``; returned
    values carry residual uniform tails keyed by (seed, dimension, point
    index), so results do not depend on how a batch is split.  Shape
    (R, N, dim).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scrambling scheme {scheme!r}")
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    r, n, s = seeds.shape[0], ps.count, ps.dim
    out = np.empty((r, n, s), dtype=np.float64)
    scale = float(ps.base) ** -ps.depth
    pt_idx = np.arange(n, dtype=np.uint64) * np.uint64(_PHI)
    for j in range(s):
        dseeds = _dim_seeds(seeds, scheme, j)
        y = _scramble_dim(ps.digits[:, j, :], ps.base, dseeds, scheme)
        vals = y.astype(np.float64)
        if residual:
            rkeys = _mix64(dseeds ^ np.uint64(_RESIDUAL_TAG))
            u = (_mix64(rkeys[:, None] ^ pt_idx) >> np.uint64(11)).astype(np.float64)
            vals += u * 2.0**-53
        out[:, :, j] = vals * scale
    return out
