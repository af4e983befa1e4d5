"""Digital (t,s)-sequence generators: van der Corput, Sobol', Faure.

Points are produced in natural index order (point 0 is the origin) and
stored as base-b digit matrices, the substrate for scrambling and for
exact equidistribution checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .digits import default_depth

__all__ = [
    "PointSet",
    "GeneratorSpec",
    "generate",
    "direction_numbers",
    "sobol_t_value",
    "max_sobol_dim",
]

_DIRECTION_FILE = "joe_kuo_d6.txt"


@dataclass(frozen=True)
class PointSet:
    """N points of [0,1)^s held as base-b digit matrices.

    ``digits`` has shape (N, s, depth) with digit i of coordinate j of point n
    at ``digits[n, j, i]`` carrying weight base**-(i+1).  ``t_claim`` is the
    quality parameter the generator asserts for the underlying sequence.
    """

    base: int
    digits: np.ndarray
    t_claim: int | None = None

    def __post_init__(self):
        if self.digits.ndim != 3:
            raise ValueError("digits must have shape (N, dim, depth)")

    @property
    def count(self) -> int:
        return self.digits.shape[0]

    @property
    def dim(self) -> int:
        return self.digits.shape[1]

    @property
    def depth(self) -> int:
        return self.digits.shape[2]

    def values(self) -> np.ndarray:
        """Truncated point values, shape (N, dim). Exact digit evaluation."""
        powers = self.base ** -(np.arange(self.depth, dtype=np.float64) + 1)
        return self.digits.astype(np.float64) @ powers

    def slice(self, start: int, stop: int) -> "PointSet":
        """Points with indices in [start, stop), keeping base and t_claim."""
        if not 0 <= start < stop <= self.count:
            raise ValueError(f"bad slice [{start}, {stop}) for {self.count} points")
        return PointSet(base=self.base, digits=self.digits[start:stop], t_claim=self.t_claim)


@dataclass(frozen=True)
class GeneratorSpec:
    """Which sequence to generate: kind in {van_der_corput, sobol, faure}."""

    kind: str
    dim: int = 1
    base: int = 2

    def __post_init__(self):
        if self.kind not in ("van_der_corput", "sobol", "faure"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "sobol":
            if self.base != 2:
                raise ValueError("Sobol' sequence requires base 2")
            if self.dim > max_sobol_dim():
                raise ValueError(
                    f"unsupported dimension: {self.dim} exceeds direction-number "
                    f"table size {max_sobol_dim()}"
                )
        if self.kind == "faure":
            if not _is_prime(self.base):
                raise ValueError(f"base not prime: {self.base}")
            if self.base < self.dim:
                raise ValueError(
                    f"Faure requires base >= dim, got base {self.base} < dim {self.dim}"
                )


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, int(math.isqrt(n)) + 1):
        if n % p == 0:
            return False
    return True


@lru_cache(maxsize=1)
def _direction_table() -> list[tuple[int, int, list[int]]]:
    """Parsed rows (degree, a, m-values) for dimensions 2, 3, ... of the bundled file."""
    text = resources.files("rqmc.data").joinpath(_DIRECTION_FILE).read_text()
    rows = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or not parts[0].isdigit():
            continue  # header
        d, s, a = int(parts[0]), int(parts[1]), int(parts[2])
        m = [int(x) for x in parts[3 : 3 + s]]
        if d != len(rows) + 2 or len(m) != s:
            raise ValueError(f"malformed direction-number line: {line!r}")
        rows.append((s, a, m))
    return rows


def max_sobol_dim() -> int:
    return len(_direction_table()) + 1


def sobol_t_value(dim: int) -> int:
    """Guaranteed t parameter of the first ``dim`` Sobol' coordinates.

    Equals the sum of (degree - 1) over the primitive polynomials used,
    with the trivial first coordinate contributing 0.
    """
    table = _direction_table()
    return sum(table[j][0] - 1 for j in range(dim - 1))


def direction_numbers(dim: int, nbits: int = 32) -> np.ndarray:
    """Direction integers v_k (k = 1..nbits) for one Sobol' coordinate.

    Scaled so that v_k = m_k * 2**(nbits - k); dimension 1 is the identity
    generator matrix (van der Corput).
    """
    if dim == 1:
        return np.array([1 << (nbits - k) for k in range(1, nbits + 1)], dtype=np.uint64)
    s, a, m_init = _direction_table()[dim - 2]
    m = list(m_init)
    for k in range(s, nbits):
        new = m[k - s] ^ (m[k - s] << s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                new ^= m[k - i] << i
        m.append(new)
    return np.array([m[k] << (nbits - k - 1) for k in range(nbits)], dtype=np.uint64)


def _sobol_digits(dim: int, n: int, depth: int) -> np.ndarray:
    idx = np.arange(n, dtype=np.uint64)
    x = np.zeros((n, dim), dtype=np.uint64)
    nbits = max(1, int(n - 1).bit_length()) if n > 1 else 1
    for j in range(dim):
        v = direction_numbers(j + 1, depth)
        for c in range(nbits):
            mask = (idx >> np.uint64(c)) & np.uint64(1) == 1
            x[mask, j] ^= v[c]
    # unpack bits, most significant digit first
    shifts = np.arange(depth - 1, -1, -1, dtype=np.uint64)
    return ((x[:, :, None] >> shifts) & np.uint64(1)).astype(np.uint8)


def _integer_digits(n: int, base: int, width: int) -> np.ndarray:
    """(n, width) matrix of base-b digits of 0..n-1, least significant first."""
    idx = np.arange(n, dtype=np.int64)
    out = np.empty((n, width), dtype=np.int64)
    for c in range(width):
        out[:, c] = idx % base
        idx //= base
    return out


def _pascal_power(j: int, base: int, rows: int, cols: int) -> np.ndarray:
    """Upper-triangular generator matrix C[i, c] = binom(c, i) * j**(c-i) mod base."""
    c = np.zeros((rows, cols), dtype=np.int64)
    for col in range(cols):
        for row in range(min(col, rows - 1) + 1):
            c[row, col] = (math.comb(col, row) * pow(j, col - row, base)) % base
    return c


def _faure_digits(dim: int, base: int, n: int, depth: int) -> np.ndarray:
    width = 1 if n <= 1 else math.floor(math.log(n - 1) / math.log(base) + 1e-12) + 1
    while base**width < n:  # guard against log rounding
        width += 1
    d_in = _integer_digits(n, base, width)
    out = np.zeros((n, dim, depth), dtype=np.uint8)
    ncols = min(width, depth)
    for j in range(dim):
        c = _pascal_power(j, base, depth, ncols)
        out[:, j, :] = (d_in[:, :ncols] @ c.T) % base
    return out


def generate(spec: GeneratorSpec, n: int, depth: int | None = None) -> PointSet:
    """First ``n`` points of the chosen sequence, in digit form.

    Deterministic; the output of ``generate(spec, n)`` is always a prefix of
    ``generate(spec, n2)`` for n2 > n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    depth = default_depth(spec.base) if depth is None else depth
    if spec.kind == "sobol":
        digits = _sobol_digits(spec.dim, n, depth)
        t = sobol_t_value(spec.dim)
    elif spec.kind == "faure":
        digits = _faure_digits(spec.dim, spec.base, n, depth)
        t = 0
    else:  # van der Corput: Faure dimension 0 in any base
        if spec.dim != 1:
            raise ValueError("van der Corput is one-dimensional")
        digits = _faure_digits(1, spec.base, n, depth)
        t = 0
    return PointSet(base=spec.base, digits=digits, t_claim=t)
