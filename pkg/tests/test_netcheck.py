import numpy as np
import pytest

from rqmc.netcheck import BAryBox, box_count, enumerate_boxes, is_lambda_tms_net, is_tms_net
from rqmc.sequences import GeneratorSpec, PointSet, generate


def _iid_pointset(n, dim, seed, base=2, depth=32):
    rng = np.random.Generator(np.random.Philox(key=seed))
    digits = rng.integers(0, base, size=(n, dim, depth), endpoint=False).astype(np.uint8)
    return PointSet(base=base, digits=digits)


def test_enumerate_boxes_counts():
    assert len(list(enumerate_boxes(2, 1, 3))) == 8
    boxes = list(enumerate_boxes(2, 2, 1))
    assert len(boxes) == 4
    got = {(b.depths, b.indices) for b in boxes}
    assert got == {((1, 0), (0, 0)), ((1, 0), (1, 0)), ((0, 1), (0, 0)), ((0, 1), (0, 1))}
    assert len(list(enumerate_boxes(2, 2, 2))) == 12  # 2^2 * C(3,1)


@pytest.mark.parametrize("b,s,d", [(2, 2, 5), (3, 2, 3), (5, 4, 2)])
def test_enumerate_boxes_closed_form(b, s, d):
    assert len(list(enumerate_boxes(b, s, d))) == box_count(b, s, d)


def test_enumerate_boxes_guard():
    with pytest.raises(ValueError, match="boxes"):
        list(enumerate_boxes(2, 2, 30))


def test_box_validation_and_volume():
    box = BAryBox(base=2, depths=(1, 2), indices=(1, 3))
    assert box.volume == 0.125
    assert box.contains([0.6, 0.8]) and not box.contains([0.4, 0.8])
    with pytest.raises(ValueError):
        BAryBox(base=2, depths=(1,), indices=(2,))


def test_sobol_is_net_and_iid_is_not():
    ps = generate(GeneratorSpec(kind="sobol", dim=2), 2**6)
    assert is_tms_net(ps, 0, 6)
    for seed in range(20):
        assert not is_tms_net(_iid_pointset(2**6, 2, seed), 0, 6)


def test_t_equals_m_always_true():
    assert is_tms_net(_iid_pointset(2**4, 2, 0), 4, 4)


def test_weaker_t_also_passes():
    ps = generate(GeneratorSpec(kind="sobol", dim=2), 2**6)
    for t in range(7):
        assert is_tms_net(ps, t, 6)


def test_size_validation():
    ps = generate(GeneratorSpec(kind="sobol", dim=2), 48)
    with pytest.raises(ValueError, match="not a power-net size"):
        is_tms_net(ps, 0, 5)
    with pytest.raises(ValueError, match="size error"):
        is_lambda_tms_net(ps, 1, 0, 5)
    with pytest.raises(ValueError, match="lambda"):
        is_lambda_tms_net(ps, 2, 0, 4)  # base 2 allows lambda = 1 only


def test_lambda_net_of_sequence_block():
    # indices [2^(m+1), 2^(m+1) + 2^m) of a (0,2)-sequence form a (1,0,m,2)-net
    m = 4
    ps = generate(GeneratorSpec(kind="sobol", dim=2), 2 ** (m + 1) + 2**m)
    block = ps.slice(2 ** (m + 1), 2 ** (m + 1) + 2**m)
    assert is_lambda_tms_net(block, 1, 0, m)


def test_lambda_reduces_to_tms_plus_cap():
    m = 5
    ps = generate(GeneratorSpec(kind="sobol", dim=2), 2**m)
    assert is_tms_net(ps, 0, m)
    assert is_lambda_tms_net(ps, 1, 0, m)


def test_faure_lambda2():
    ps = generate(GeneratorSpec(kind="faure", base=3, dim=2), 2 * 9)
    assert is_lambda_tms_net(ps, 2, 0, 2)


def test_partition_totals():
    ps = generate(GeneratorSpec(kind="sobol", dim=2), 2**6)
    from rqmc.netcheck import _all_box_counts

    for counts in _all_box_counts(ps, 4):
        assert counts.sum() == 2**6
