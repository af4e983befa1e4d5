import numpy as np
import pytest
from scipy import stats

from rqmc.netcheck import is_lambda_tms_net, is_tms_net
from rqmc.scrambling import (
    ScrambleState,
    derive_seed,
    point_value,
    point_values,
    scramble,
    scrambled_values,
)
from rqmc.sequences import GeneratorSpec, PointSet, generate


class FixedRng:
    """residual_rng stub returning a preset uniform."""

    def __init__(self, u):
        self.u = u

    def random(self, size=None):
        return self.u if size is None else np.full(size, self.u)


def _sobol2(m):
    return generate(GeneratorSpec(kind="sobol", dim=2), 2**m)


def test_determinism_and_seed_sensitivity():
    ps = _sobol2(6)
    a = scramble(ps, ScrambleState(seed=42))
    b = scramble(ps, ScrambleState(seed=42))
    c = scramble(ps, ScrambleState(seed=43))
    assert np.array_equal(a.digits, b.digits)
    assert not np.array_equal(a.digits, c.digits)
    assert a.t_claim == ps.t_claim


@pytest.mark.parametrize("scheme", ["owen_nested", "linear_matousek"])
def test_net_preservation_sobol(scheme):
    ps = _sobol2(6)
    for seed in range(20):
        assert is_tms_net(scramble(ps, ScrambleState(seed=seed, scheme=scheme)), 0, 6)


@pytest.mark.parametrize("scheme", ["owen_nested", "linear_matousek"])
def test_net_preservation_faure_base3(scheme):
    ps = generate(GeneratorSpec(kind="faure", base=3, dim=2), 27)
    for seed in range(10):
        assert is_tms_net(scramble(ps, ScrambleState(seed=seed, scheme=scheme)), 0, 3)


def test_lambda_net_preservation():
    ps = generate(GeneratorSpec(kind="faure", base=3, dim=2), 2 * 9)
    for seed in range(10):
        assert is_lambda_tms_net(scramble(ps, ScrambleState(seed=seed)), 2, 0, 2)


@pytest.mark.parametrize("base,kind,dim", [(2, "sobol", 2), (3, "faure", 2), (5, "faure", 3)])
def test_first_digit_marginal_uniform(base, kind, dim):
    # first digit of a fixed point, pooled over seeds, is uniform on {0..b-1}
    ps = generate(GeneratorSpec(kind=kind, base=base, dim=dim), 8).slice(3, 4)
    seeds = np.arange(2000, dtype=np.uint64)
    vals = scrambled_values(ps, "owen_nested", seeds, residual=False)  # (R,1,dim)
    first = np.floor(vals[:, 0, 0] * base).astype(int)
    counts = np.bincount(first, minlength=base)
    p = stats.chisquare(counts).pvalue
    assert p > 1e-4


def test_double_scramble_same_distribution():
    # scrambling twice with independent seeds must look like scrambling once:
    # compare joint histograms of the first two digits over many seeds
    ps = _sobol2(3).slice(5, 6)
    reps = 4000
    once = np.empty(reps, dtype=int)
    twice = np.empty(reps, dtype=int)
    for r in range(reps):
        s1 = scramble(ps, ScrambleState(seed=derive_seed(1, r)))
        once[r] = int(s1.digits[0, 0, 0]) * 2 + int(s1.digits[0, 0, 1])
        s2 = scramble(
            scramble(ps, ScrambleState(seed=derive_seed(2, r))),
            ScrambleState(seed=derive_seed(3, r)),
        )
        twice[r] = int(s2.digits[0, 0, 0]) * 2 + int(s2.digits[0, 0, 1])
    f1 = np.bincount(once, minlength=4) / reps
    f2 = np.bincount(twice, minlength=4) / reps
    se = np.sqrt(f1 * (1 - f1) / reps + f2 * (1 - f2) / reps)
    assert np.all(np.abs(f1 - f2) < 3 * np.maximum(se, 1e-12) + 1e-9)


def test_point_value_examples():
    zero = PointSet(base=2, digits=np.zeros((1, 1, 4), dtype=np.uint8))
    assert point_value(zero, 0, 0, FixedRng(0.0)) == 0.0
    one = PointSet(base=2, digits=np.ones((1, 1, 1), dtype=np.uint8))
    assert point_value(one, 0, 0, FixedRng(0.5)) == 0.75  # 0.5 + 0.5 * 2^-1
    with pytest.raises(IndexError):
        point_value(one, 1, 0, FixedRng(0.0))


def test_point_values_shape_and_range():
    ps = scramble(_sobol2(5), ScrambleState(seed=9))
    rng = np.random.Generator(np.random.Philox(key=3))
    vals = point_values(ps, rng)
    assert vals.shape == (32, 2)
    assert np.all((vals >= 0) & (vals < 1))


def test_pooled_uniformity_ks_smoke():
    ps = _sobol2(8)
    seeds = np.arange(40, dtype=np.uint64)
    vals = scrambled_values(ps, "owen_nested", seeds).reshape(-1)
    assert stats.kstest(vals, "uniform").pvalue > 1e-4


def test_engine_matches_scramble_all_schemes():
    for spec in [GeneratorSpec(kind="sobol", dim=2), GeneratorSpec(kind="faure", base=3, dim=3)]:
        ps = generate(spec, 32)
        for scheme in ("owen_nested", "linear_matousek"):
            sc = scramble(ps, ScrambleState(seed=77, scheme=scheme))
            ve = scrambled_values(ps, scheme, [77], residual=False)[0]
            assert np.allclose(ve, sc.values(), atol=0)


def test_engine_batch_split_invariance():
    ps = _sobol2(5)
    seeds = np.arange(10, dtype=np.uint64)
    full = scrambled_values(ps, "owen_nested", seeds)
    parts = np.concatenate(
        [scrambled_values(ps, "owen_nested", seeds[:3]),
         scrambled_values(ps, "owen_nested", seeds[3:])], axis=0
    )
    assert np.array_equal(full, parts)


def test_scramble_state_validation():
    with pytest.raises(ValueError, match="unknown scrambling scheme"):
        ScrambleState(seed=0, scheme="owen")
    with pytest.raises(ValueError, match="64 bits"):
        ScrambleState(seed=2**64)


def test_derive_seed_distinct_paths():
    seen = {derive_seed(0, i, j) for i in range(20) for j in range(20)}
    assert len(seen) == 400
