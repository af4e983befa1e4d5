"""Test integrands on [0,1)^s with exact integrals and variances.

The four built-ins:

    phi1(x) = sum_i x_i
    phi2(x) = max(sum_i x_i - s/2, 0)
    phi3(x) = 1{sum_i x_i > s/2}
    phi4(x) = 12**(s/2) * prod_i (x_i - 0.5)

phi2's reference values come from exact rational integration of the
Irwin-Hall distribution (sum of s independent uniforms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

__all__ = [
    "IntegrandSpec",
    "get_integrand",
    "register_integrand",
    "irwin_hall_cdf",
    "irwin_hall_mean_excess",
    "mc_variance",
]


@dataclass(frozen=True)
class IntegrandSpec:
    """A named integrand with optional exact reference values.

    ``fn`` is vectorized: it maps an (n, dim) array of points to an
    (n,) array of values, all finite on [0,1)^dim.
    """

    name: str
    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    exact_integral: float | None = None
    exact_variance: float | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(
                f"dimension mismatch: integrand {self.name!r} expects "
                f"(n, {self.dim}) points, got {x.shape}"
            )
        return self.fn(x)


def irwin_hall_cdf(x: Fraction, s: int) -> Fraction:
    """CDF of the sum of s independent U[0,1] variables, exact rationals."""
    if x <= 0:
        return Fraction(0)
    if x >= s:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(math.floor(x) + 1):
        acc += (-1) ** k * math.comb(s, k) * (x - k) ** s
    return acc / math.factorial(s)


def irwin_hall_mean_excess(a: Fraction, s: int) -> Fraction:
    """E[(S - a)+] for S ~ Irwin-Hall(s), by exact piecewise integration.

    Integrates 1 - F over [a, s] one integer knot interval at a time; the
    antiderivative of each (x-k)**s term is (x-k)**(s+1)/(s+1).
    """
    a = Fraction(a)
    if a >= s:
        return Fraction(0)
    if a < 0:
        return Fraction(s, 2) - a  # E[S] - a when the positive part never binds

    def anti(x: Fraction, j: int) -> Fraction:
        # antiderivative of F on [j, j+1)
        acc = Fraction(0)
        for k in range(j + 1):
            acc += (-1) ** k * math.comb(s, k) * (x - k) ** (s + 1)
        return acc / (math.factorial(s) * (s + 1))

    total = Fraction(0)
    j0 = math.floor(a)
    for j in range(j0, s):
        lo = a if j == j0 else Fraction(j)
        hi = Fraction(j + 1)
        total += (hi - lo) - (anti(hi, j) - anti(lo, j))
    return total


def _phi1(x):
    return x.sum(axis=1)


def _phi2(x):
    s = x.shape[1]
    return np.maximum(x.sum(axis=1) - s / 2.0, 0.0)


def _phi3(x):
    s = x.shape[1]
    return (x.sum(axis=1) > s / 2.0).astype(np.float64)


def _phi4(x):
    s = x.shape[1]
    return 12.0 ** (s / 2.0) * np.prod(x - 0.5, axis=1)


def _phi2_exact(s: int) -> tuple[float, float]:
    # I = E[(S - s/2)+]; second moment of the positive part is Var(S)/2 = s/24
    # by the symmetry of S about s/2.
    mean = irwin_hall_mean_excess(Fraction(s, 2), s)
    var = Fraction(s, 24) - mean * mean
    return float(mean), float(var)


def _builtin(name: str, dim: int) -> IntegrandSpec:
    if name == "phi1":
        return IntegrandSpec(name, dim, _phi1, exact_integral=dim / 2.0, exact_variance=dim / 12.0)
    if name == "phi2":
        mean, var = _phi2_exact(dim)
        return IntegrandSpec(name, dim, _phi2, exact_integral=mean, exact_variance=var)
    if name == "phi3":
        return IntegrandSpec(name, dim, _phi3, exact_integral=0.5, exact_variance=0.25)
    if name == "phi4":
        return IntegrandSpec(name, dim, _phi4, exact_integral=0.0, exact_variance=1.0)
    if name == "linear":
        # f(x) = x in one dimension; the workhorse for spectral-table checks.
        if dim != 1:
            raise ValueError("'linear' is one-dimensional")
        return IntegrandSpec(name, 1, lambda x: x[:, 0], exact_integral=0.5,
                             exact_variance=1.0 / 12.0)
    raise KeyError(name)


_registry: dict[tuple[str, int], IntegrandSpec] = {}


def register_integrand(spec: IntegrandSpec) -> None:
    """Add a user integrand to the registry (keyed by name and dimension)."""
    _registry[(spec.name, spec.dim)] = spec


def get_integrand(name: str, dim: int) -> IntegrandSpec:
    """Look up an integrand by name and dimension.

    Built-ins: phi1, phi2, phi3, phi4 (any dimension; phi2 exact values need
    dim <= 30 for the rational Irwin-Hall sums to stay cheap) and the
    one-dimensional 'linear'.
    """
    if (name, dim) in _registry:
        return _registry[(name, dim)]
    try:
        return _builtin(name, dim)
    except KeyError:
        raise KeyError(
            f"no reference value: unknown integrand {name!r}; register it first"
        ) from None


_mc_cache: dict[tuple[str, int, int, int], float] = {}


def mc_variance(spec: IntegrandSpec, n: int = 10**6, seed: int = 20240901) -> float:
    """Monte Carlo sample variance of an integrand from n i.i.d. points, cached."""
    key = (spec.name, spec.dim, n, seed)
    if key not in _mc_cache:
        rng = np.random.Generator(np.random.Philox(key=seed))
        total = 0.0
        totalsq = 0.0
        done = 0
        chunk = 1 << 19
        while done < n:
            take = min(chunk, n - done)
            v = spec(rng.random((take, spec.dim)))
            total += float(v.sum())
            totalsq += float((v * v).sum())
            done += take
        mean = total / n
        _mc_cache[key] = (totalsq - n * mean * mean) / (n - 1)
    return _mc_cache[key]
