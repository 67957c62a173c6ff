import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alphaeta.analysis import (
    SWEEP_COLUMNS,
    JointCounts,
    SweepResult,
    default_grid,
    delta_I,
    error_by_basis,
    intensity_sweep,
    key_consumption,
    mutual_information,
    run_point,
)
from alphaeta.channel import RngHandle, gaussian_sigma
from alphaeta.encoding import ChannelModel, ProtocolParams
from alphaeta.keystream import SeedKey
from alphaeta.receivers import run_protocol
from fixtures import BSC_011_CAPACITY

tables = st.lists(st.integers(0, 1000), min_size=4, max_size=4).filter(lambda v: sum(v) > 0)


def test_mi_examples():
    assert mutual_information(JointCounts([[50, 0], [0, 50]])) == pytest.approx(1.0)
    assert mutual_information(JointCounts([[25, 25], [25, 25]])) == 0.0
    f = 0.11
    bsc = JointCounts([[0.5 * (1 - f) * 1e6, 0.5 * f * 1e6], [0.5 * f * 1e6, 0.5 * (1 - f) * 1e6]])
    assert mutual_information(bsc) == pytest.approx(BSC_011_CAPACITY, abs=1e-12)


def test_mi_empty_table():
    with pytest.raises(ValueError):
        mutual_information(JointCounts(np.zeros((2, 2))))


@given(tables)
def test_mi_bounds_and_symmetry(v):
    t = np.array(v, dtype=float).reshape(2, 2)
    mi = mutual_information(JointCounts(t))
    assert 0.0 <= mi <= 1.0
    assert mi == pytest.approx(mutual_information(JointCounts(t.T)), abs=1e-12)


def test_uniform_pad_carries_no_information():
    # exact enumeration: D and L uniform and independent, E = D xor L
    table = np.zeros((2, 2))
    for d, l in itertools.product((0, 1), repeat=2):
        table[d, d ^ l] += 0.25
    assert mutual_information(JointCounts(table)) == 0.0


@pytest.mark.parametrize("N", [1.0, 100.0, 1e4])
def test_delta_i_zero_identical_record(N):
    gen = np.random.default_rng(int(N))
    t = run_protocol(gen.integers(0, 2, 20_000), SeedKey.random(gen), ProtocolParams(32, N), RngHandle(1))
    i_ab, i_ae, d = delta_I(t)
    assert d == 0.0 and i_ab == i_ae


def test_parity_threshold_pairing_noiseless():
    gen = np.random.default_rng(2)
    t = run_protocol(gen.integers(0, 2, 100_000), SeedKey.random(gen),
                     ProtocolParams(32, 1.0, ChannelModel.NOISELESS), RngHandle(2))
    i_ab, i_ae, _ = delta_I(t, "parity-threshold")
    assert i_ab == pytest.approx(1.0)
    # LFSR parity is pseudorandom; the plug-in value is at the sampling-bias floor
    assert i_ae < 1e-3


def test_delta_i_errors():
    gen = np.random.default_rng(3)
    t = run_protocol([], SeedKey.random(gen), ProtocolParams(32, 1.0), RngHandle(3))
    with pytest.raises(ValueError):
        delta_I(t)
    t = run_protocol([0, 1], SeedKey.random(gen), ProtocolParams(32, 1.0), RngHandle(3))
    with pytest.raises(ValueError):
        delta_I(t, "bogus")


@pytest.mark.parametrize("n,M,bits", [(1000, 32, 4000), (77, 4, 77), (0, 128, 0)])
def test_key_consumption(n, M, bits):
    assert key_consumption(n, M) == bits


def test_vacuum_sweep_point():
    row, _ = run_point(0.0, 128, 20_000, RngHandle(4))
    assert abs(row.eve_err - 0.5) < 3 * row.eve_err_se
    assert abs(row.bob_err - 0.5) < 3 * row.bob_err_se


def test_errors_concentrate_on_boundary_bases():
    n, N, M = 100_000, 1e4, 32
    row, t = run_point(N, M, n, RngHandle(5))
    rate, count = error_by_basis(t)
    basis = np.pi * np.arange(M // 2) / M
    interior = (basis > 4 * gaussian_sigma(N)) & (np.pi / 2 - basis > 4 * gaussian_sigma(N))
    errs = rate * count
    assert errs[interior].sum() / count[interior].sum() < 1e-3
    assert rate[0] > 0.4  # basis 0 sits exactly on both thresholds


def test_sweep_csv_round_trip():
    res = intensity_sweep(default_grid((1.0, 10.0), (4, 32)), 2000, 6)
    text = res.to_csv()
    assert text.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    back = SweepResult.from_csv(text)
    assert back.rows == res.rows
    assert back.to_csv() == text
    for r in back.rows:
        assert 0 <= r.bob_err <= 1 and 0 <= r.eve_err <= 1
        assert 0 <= r.I_AB <= 1 and 0 <= r.I_AE <= 1


def test_sweep_parallel_matches_serial():
    grid = default_grid((1.0, 100.0), (32,))
    a = intensity_sweep(grid, 2000, 9)
    b = intensity_sweep(grid, 2000, 9, workers=2)
    assert a.to_csv() == b.to_csv()


def test_sweep_minimum_pulses():
    with pytest.raises(ValueError):
        intensity_sweep([(1.0, 32)], 999, 0)


def test_default_grid_size():
    assert len(default_grid()) == 18
