import numpy as np
import pytest
from hypothesis import given, strategies as st

from alphaeta.encoding import ProtocolParams, basis_parity, encode_angle, encode_stream
from alphaeta.keystream import Keystream, SeedKey

PI = np.pi
sizes = st.sampled_from([4, 8, 16, 32, 64, 128, 1024])


@pytest.mark.parametrize("bit,l,expected", [
    (0, 0, 0.0),
    (1, 0, PI / 2),
    (0, 1, PI / 32 + PI / 2),
    (1, 1, PI / 32),
])
def test_encode_angle_examples(bit, l, expected):
    assert encode_angle(bit, l, 32) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("l,parity", [(0, 0), (7, 1), (2, 0)])
def test_basis_parity(l, parity):
    assert basis_parity(l) == parity


def test_l_out_of_range():
    with pytest.raises(ValueError):
        encode_angle(0, 16, 32)
    with pytest.raises(ValueError):
        encode_angle(0, -1, 32)


@given(sizes)
def test_injective_uniform_grid(M):
    l = np.repeat(np.arange(M // 2), 2)
    b = np.tile([0, 1], M // 2)
    a = np.sort(encode_angle(b, l, M))
    assert np.all((a >= 0) & (a < PI))
    assert np.allclose(np.diff(a), PI / M)
    assert len(np.unique(np.round(a, 12))) == M


@given(sizes, st.data())
def test_opposite_parity_alternation(M, data):
    l = data.draw(st.integers(0, M // 2 - 2))
    b = data.draw(st.integers(0, 1))
    assert (encode_angle(b, l, M) < PI / 2) != (encode_angle(b, l + 1, M) < PI / 2)


@given(sizes, st.data())
def test_closed_form_half_interval(M, data):
    l = data.draw(st.integers(0, M // 2 - 1))
    b = data.draw(st.integers(0, 1))
    assert ((b ^ basis_parity(l)) == 0) == (encode_angle(b, l, M) < PI / 2)


def test_encode_stream_accounting():
    params = ProtocolParams(32, 100.0)
    ks = Keystream(SeedKey.from_int(0xBEEF))
    assert len(encode_stream([], ks, params)) == 0 and ks.consumed == 0
    train = encode_stream([1, 0, 1, 1, 0, 0, 1, 0], ks, params)
    assert len(train) == 8 and ks.consumed == 32
    for rec in train:
        assert rec.parity == rec.l % 2
        assert rec.angle == pytest.approx(encode_angle(rec.bit, rec.l, 32))


def test_encode_stream_zero_chunk():
    ks = Keystream(SeedKey.from_int(1, 16))
    ks.take = lambda n: np.zeros(n, dtype=np.uint8)
    rec = encode_stream([0], ks, ProtocolParams(32, 1.0))[0]
    assert rec.l == 0 and rec.angle == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        ProtocolParams(12, 1.0)
    with pytest.raises(ValueError):
        ProtocolParams(32, -1.0)
