"""Equal-weight quadrature, the replication harness, and closed-form
variance-bound calculators for scrambled-net integration.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .integrands import IntegrandSpec
from .scrambling import derive_seed, scrambled_values
from .sequences import GeneratorSpec, PointSet, generate

__all__ = [
    "QuadratureEstimate",
    "MSERecord",
    "MSEReport",
    "BoundReport",
    "estimate",
    "replicate",
    "fit_log_slope",
    "gain_factor_bound",
    "bound_basic",
    "bound_b1",
    "bound_b2",
    "crossover_N",
    "bound_report",
]

_REP_CHUNK = 128


class IntegrandValueError(ValueError):
    """An integrand returned a non-finite value."""


@dataclass(frozen=True)
class QuadratureEstimate:
    value: float
    n: int


@dataclass(frozen=True)
class MSERecord:
    n: int
    reps: int
    mean: float
    variance: float
    mse: float
    exact: float


@dataclass
class MSEReport:
    """Per-N replication statistics for one integrand/generator/scheme combo."""

    records: list[MSERecord]
    generator: str
    scheme: str
    seed: int
    label: str = ""

    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.records], dtype=np.int64)

    def variances(self) -> np.ndarray:
        return np.array([r.variance for r in self.records])

    def mses(self) -> np.ndarray:
        return np.array([r.mse for r in self.records])

    def record_for(self, n: int) -> MSERecord:
        for r in self.records:
            if r.n == n:
                return r
        raise KeyError(f"no record for N={n}")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("N,R,mean,variance,mse,exact\n")
            for r in self.records:
                fh.write(f"{r.n},{r.reps},{r.mean!r},{r.variance!r},{r.mse!r},{r.exact!r}\n")

    def write_sidecar(self, path, extra: dict | None = None) -> None:
        meta = {
            "generator": self.generator,
            "scheme": self.scheme,
            "seed": self.seed,
            "label": self.label,
        }
        if extra:
            meta.update(extra)
        with open(path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _check_finite(vals: np.ndarray) -> None:
    if not np.all(np.isfinite(vals)):
        idx = int(np.argwhere(~np.isfinite(vals.reshape(-1)))[0][0])
        raise IntegrandValueError(f"non-finite integrand value at flat index {idx}")


def estimate(ps: PointSet, phi: IntegrandSpec, residual_rng: np.random.Generator) -> QuadratureEstimate:
    """Equal-weight average of ``phi`` over the point set (with residual tails)."""
    from .scrambling import point_values

    vals = phi(point_values(ps, residual_rng))
    _check_finite(vals)
    return QuadratureEstimate(value=float(vals.mean()), n=ps.count)


def _estimates_for_n(ps_prefix, phi, scheme, seeds) -> np.ndarray:
    out = np.empty(len(seeds), dtype=np.float64)
    for lo in range(0, len(seeds), _REP_CHUNK):
        chunk = seeds[lo : lo + _REP_CHUNK]
        pts = scrambled_values(ps_prefix, scheme, chunk)
        r, n, s = pts.shape
        vals = phi(pts.reshape(r * n, s)).reshape(r, n)
        _check_finite(vals)
        out[lo : lo + len(chunk)] = vals.mean(axis=1)
    return out


def _record(n: int, est: np.ndarray, exact: float) -> MSERecord:
    return MSERecord(
        n=n,
        reps=len(est),
        mean=float(est.mean()),
        variance=float(est.var(ddof=1)),
        mse=float(((est - exact) ** 2).mean()),
        exact=exact,
    )


def replicate(
    spec: GeneratorSpec,
    scheme: str,
    phi: IntegrandSpec,
    exact: float,
    n_list,
    reps: int,
    master_seed: int,
    *,
    threads: int | None = None,
    share_scrambles: bool = False,
) -> MSEReport:
    """Scrambled replications for every N in ``n_list``.

    By default each (N, replication) pair gets its own scramble, with seeds
    derived from ``master_seed`` by counter, so the output is deterministic
    at any thread count.  With ``share_scrambles=True`` each replication
    scrambles the longest prefix once and reads every N off its running
    mean; per-N statistics are unchanged (estimates are then correlated
    across N, which the per-N variance/MSE columns never see) and large
    sweeps get cheaper by the ratio of the grid total to max(N).  Variances
    use the unbiased (R-1) denominator; MSE is measured against ``exact``.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if not math.isfinite(exact):
        raise ValueError("exact reference value must be finite")
    n_list = list(n_list)
    if sorted(set(n_list)) != n_list:
        raise ValueError("n_list must be strictly increasing")
    ps = generate(spec, max(n_list))

    if share_scrambles:
        ns = np.asarray(n_list)
        est = np.empty((reps, len(n_list)))
        for lo in range(0, reps, _REP_CHUNK):
            hi = min(reps, lo + _REP_CHUNK)
            seeds = np.array(
                [derive_seed(master_seed, r) for r in range(lo, hi)], dtype=np.uint64
            )
            pts = scrambled_values(ps, scheme, seeds)
            r, n, s = pts.shape
            vals = phi(pts.reshape(r * n, s)).reshape(r, n)
            _check_finite(vals)
            est[lo:hi] = np.cumsum(vals, axis=1)[:, ns - 1] / ns
        records = [_record(n, est[:, i], exact) for i, n in enumerate(n_list)]
    else:

        def run_one(item):
            i, n = item
            seeds = np.array(
                [derive_seed(master_seed, i, r) for r in range(reps)], dtype=np.uint64
            )
            return _record(n, _estimates_for_n(ps.slice(0, n), phi, scheme, seeds), exact)

        items = list(enumerate(n_list))
        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(run_one, items))
        else:
            records = [run_one(it) for it in items]
    return MSEReport(
        records=records,
        generator=f"{spec.kind}(base={spec.base},dim={spec.dim})",
        scheme=scheme,
        seed=master_seed,
        label=phi.name,
    )


def fit_log_slope(ns, ys, *, n_min: int | None = None, n_max: int | None = None) -> float:
    """Least-squares slope of log2(y) against log2(N) over an N window."""
    ns = np.asarray(ns, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    keep = ys > 0
    if n_min is not None:
        keep &= ns >= n_min
    if n_max is not None:
        keep &= ns <= n_max
    if keep.sum() < 2:
        raise ValueError("need at least two points to fit a slope")
    x = np.log2(ns[keep])
    y = np.log2(ys[keep])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Closed-form bounds


def gain_factor_bound(t: int, s: int, b: int) -> float:
    """Uniform gain-factor bound for nets from a (t,s)-sequence in base b.

    Equals e when t = 0 (which requires b >= s for the sequence to exist)
    and b**t ((b+1)/(b-1))**s otherwise.
    """
    if t < 0 or s < 1 or b < 2:
        raise ValueError("need t >= 0, s >= 1, b >= 2")
    if t == 0:
        if b < s:
            raise ValueError(
                f"no (0,s)-sequence exists in base {b} for s={s} (needs b >= s)"
            )
        return math.e
    return b**t * ((b + 1) / (b - 1)) ** s


def c_b(b: int) -> float:
    return math.sqrt(b - 1) / (math.sqrt(b) - 1)


def bound_basic(t: int, s: int, b: int, sigma2: float, n: int) -> float:
    """Variance bound Gamma_{t+1,s+1} * sigma2 / N, valid for every N >= 1."""
    if sigma2 < 0 or n < 1:
        raise ValueError("need sigma2 >= 0 and N >= 1")
    return gain_factor_bound(t + 1, s + 1, b) * sigma2 / n


def bound_b1(t: int, s: int, b: int, sigma2: float, n: int) -> float:
    """Sharper large-N bound (sigma2/N) * ([Gamma_{t,s}(1+2c_b)]^(1/2) + b^t/sqrt(N))**2."""
    if sigma2 < 0 or n < 1:
        raise ValueError("need sigma2 >= 0 and N >= 1")
    gam = gain_factor_bound(t, s, b)
    root = math.sqrt(gam * (1 + 2 * c_b(b))) + b**t / math.sqrt(n)
    return sigma2 / n * root**2


def bound_b2(sigma2: float, n: int) -> float:
    """Dimension-free bound e(3 + 2*sqrt(2)) * sigma2 / N for t = 0 sequences."""
    if sigma2 < 0 or n < 1:
        raise ValueError("need sigma2 >= 0 and N >= 1")
    return math.e * (3 + 2 * math.sqrt(2)) * sigma2 / n


def crossover_N(b: int, s: int) -> float:
    """Quadrature size past which the sharper bound beats the basic one.

    Returns max(1, N_s^(b)); the sharper bound wins for N > b**t * N_s^(b).
    """
    if b < 2 or s < 1:
        raise ValueError("need b >= 2 and s >= 1")
    ratio = (b + 1) / (b - 1)
    gap = math.sqrt(b * ratio) - math.sqrt(1 + 2 * c_b(b))
    return max(1.0, 1.0 / (ratio**s * gap**2))


@dataclass(frozen=True)
class BoundReport:
    """All closed-form bounds for one (N, t, s, b, sigma2) configuration."""

    n: int
    t: int
    s: int
    b: int
    sigma2: float
    basic_bound: float
    b1_bound: float | None
    b2_bound: float | None
    trivial_bound: float
    crossover: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "N": self.n,
                "t": self.t,
                "s": self.s,
                "b": self.b,
                "sigma2": self.sigma2,
                "basic_bound": self.basic_bound,
                "b1_bound": self.b1_bound,
                "b2_bound": self.b2_bound,
                "trivial_bound": self.trivial_bound,
                "crossover": self.crossover,
            },
            indent=2,
            sort_keys=True,
        )


def bound_report(t: int, s: int, b: int, sigma2: float = 1.0, n: int = 1) -> BoundReport:
    """Assemble the bound table; b1/b2 are omitted where their hypotheses fail."""
    try:
        b1 = bound_b1(t, s, b, sigma2, n)
    except ValueError:
        b1 = None
    b2 = bound_b2(sigma2, n) if (t == 0 and b >= s) else None
    return BoundReport(
        n=n,
        t=t,
        s=s,
        b=b,
        sigma2=sigma2,
        basic_bound=bound_basic(t, s, b, sigma2, n),
        b1_bound=b1,
        b2_bound=b2,
        trivial_bound=sigma2,
        crossover=crossover_N(b, s),
    )
