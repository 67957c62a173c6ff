"""Alice's polarization encoding with alternating basis parity."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .keystream import Keystream, basis_indices, check_scheme_size


class ChannelModel(str, enum.Enum):
    COUNTING = "counting"
    GAUSSIAN = "gaussian"
    NOISELESS = "noiseless"


@dataclass(frozen=True)
class ProtocolParams:
    M: int = 32
    mean_photons: float = 1e4
    channel_model: ChannelModel = ChannelModel.COUNTING

    def __post_init__(self):
        check_scheme_size(self.M)
        if not self.mean_photons >= 0:
            raise ValueError(f"mean_photons must be >= 0, got {self.mean_photons}")
        object.__setattr__(self, "channel_model", ChannelModel(self.channel_model))


def basis_parity(l):
    return np.asarray(l) % 2 if np.ndim(l) else int(l) % 2


def encode_angle(bit, l, M: int):
    """Polarization angle for data ``bit`` in basis ``l``.

    Bit 0 sits on the basis axis ``pi*l/M`` for even ``l`` and on the
    orthogonal axis for odd ``l``; bit 1 takes the other axis. Works on
    scalars or arrays.
    """
    check_scheme_size(M)
    l_arr = np.asarray(l)
    if np.any((l_arr < 0) | (l_arr >= M // 2)):
        raise ValueError(f"basis index out of range [0, {M // 2})")
    flip = np.bitwise_xor(np.asarray(bit, dtype=np.int64), l_arr.astype(np.int64) % 2)
    angle = np.pi * l_arr / M + flip * (np.pi / 2)
    return float(angle) if angle.ndim == 0 else angle


@dataclass(frozen=True)
class PulseRecord:
    bit: int
    l: int
    parity: int
    angle: float


@dataclass
class PulseTrain:
    """Column-wise sequence of :class:`PulseRecord`."""

    bits: np.ndarray
    l: np.ndarray
    parity: np.ndarray
    angle: np.ndarray
    M: int

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, i) -> PulseRecord:
        return PulseRecord(int(self.bits[i]), int(self.l[i]), int(self.parity[i]), float(self.angle[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def encode_stream(data, stream: Keystream, params: ProtocolParams) -> PulseTrain:
    """Draw one basis index per data bit and encode."""
    bits = np.asarray(data, dtype=np.uint8).ravel()
    if np.any(bits > 1):
        raise ValueError("data must be binary")
    l = basis_indices(stream, params.M, len(bits))
    angle = encode_angle(bits, l, params.M) if len(bits) else np.zeros(0)
    return PulseTrain(bits, l, (l % 2).astype(np.uint8), np.asarray(angle, dtype=float), params.M)
