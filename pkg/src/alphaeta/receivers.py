"""Bob's keyed decoders, Eve's threshold decoder and full protocol runs."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import (
    RngHandle,
    RngLike,
    angular_distance,
    as_generator,
    count_dual_basis,
    count_single_basis,
    estimate_angle,
    gaussian_angle_channel,
)
from .encoding import ChannelModel, ProtocolParams, encode_angle, encode_stream
from .keystream import Keystream, SeedKey

TRANSCRIPT_COLUMNS = ["index", "D", "L", "E", "B_parity", "B_mtd", "theta", "theta_hat", "uninformative_flag"]


def _coins(rng, shape):
    return as_generator(rng).integers(0, 2, size=shape, dtype=np.uint8)


def _scalar_or_array(x):
    x = np.asarray(x)
    return int(x) if x.ndim == 0 else x


def bob_parity_decode(angle, l, M: int, N, rng: RngLike, noiseless: bool = False):
    """Measure in the keyed basis ``pi*l/M`` and read the parity.

    More aligned than orthogonal photons means the pulse sits on the basis
    axis, i.e. ``bit == l mod 2``. Ties, including vacuum, are a fair coin.
    In ``noiseless`` mode the analyzer sees expected intensities.
    """
    l = np.asarray(l)
    analyzer = np.pi * l / M
    gen = as_generator(rng)
    if noiseless:
        delta = np.asarray(angle) - analyzer
        aligned, orthogonal = np.cos(delta) ** 2, np.sin(delta) ** 2
    else:
        aligned, orthogonal = count_single_basis(angle, analyzer, N, gen)
    parity = (l % 2).astype(np.uint8)
    coin = _coins(gen, np.shape(aligned))
    bit = np.where(aligned > orthogonal, parity, np.where(aligned < orthogonal, 1 - parity, coin))
    return _scalar_or_array(bit.astype(np.uint8))


def bob_measure_then_decode(theta_hat, l, M: int, rng: RngLike | None = None, coins=None):
    """Pick the bit whose candidate angle in basis ``l`` is nearer ``theta_hat``.

    Exact ties use ``coins`` when given (shared record), otherwise ``rng``.
    """
    d0 = angular_distance(theta_hat, encode_angle(0, l, M))
    d1 = angular_distance(theta_hat, encode_angle(1, l, M))
    d0, d1 = np.asarray(d0), np.asarray(d1)
    if coins is None:
        coins = _coins(rng, d0.shape) if rng is not None else np.zeros(d0.shape, np.uint8)
        if rng is None and np.any(d0 == d1):
            raise ValueError("tie in measure-then-decode needs rng or coins")
    bit = np.where(d0 < d1, 0, np.where(d0 > d1, 1, coins))
    return _scalar_or_array(bit.astype(np.uint8))


def eve_threshold_decode(theta_hat):
    """0 on [0, pi/2), 1 on [pi/2, pi)."""
    return _scalar_or_array((np.asarray(theta_hat) >= np.pi / 2).astype(np.uint8))


@dataclass
class Transcript:
    """Aligned per-symbol sequences from one protocol run.

    ``tie_coins`` is part of the shared measurement record: anyone decoding
    ``theta_hat`` by nearest candidate resolves exact ties with these coins.
    """

    D: np.ndarray
    L: np.ndarray
    E: np.ndarray
    B_parity: np.ndarray
    B_mtd: np.ndarray
    theta: np.ndarray
    theta_hat: np.ndarray
    uninformative: np.ndarray
    l: np.ndarray = None
    tie_coins: np.ndarray = None
    M: int = 32
    key_bits_consumed: int = 0
    params: ProtocolParams = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.D)
        if self.l is None:
            self.l = np.full(n, -1, dtype=np.int64)
        if self.tie_coins is None:
            self.tie_coins = np.zeros(n, dtype=np.uint8)
        for name in ("L", "E", "B_parity", "B_mtd", "theta", "theta_hat", "uninformative", "l", "tie_coins"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"transcript column {name} has wrong length")

    def __len__(self):
        return len(self.D)

    @property
    def B(self):
        return self.B_parity


def run_protocol(data, seed: SeedKey, params: ProtocolParams, rng: RngLike) -> Transcript:
    """Encode ``data`` under ``seed`` and measure every pulse.

    One dual-basis record per pulse is shared by Bob (measure-then-decode)
    and Eve; Bob additionally gets his own keyed single-basis measurement.
    """
    stream = Keystream(seed)
    pulses = encode_stream(data, stream, params)
    n, M, N = len(pulses), params.M, params.mean_photons
    handle = rng if isinstance(rng, RngHandle) else None
    gens = [h.generator() for h in (handle.child(i) for i in range(4))] if handle else [rng] * 4

    if params.channel_model is ChannelModel.NOISELESS:
        theta_hat = pulses.angle.copy()
        blank = np.zeros(n, dtype=bool)
    elif params.channel_model is ChannelModel.GAUSSIAN:
        theta_hat = np.asarray(gaussian_angle_channel(pulses.angle, N, gens[0]), dtype=float).reshape(n)
        blank = np.zeros(n, dtype=bool)
    else:
        record = count_dual_basis(pulses.angle, N, gens[0])
        theta_hat, blank = estimate_angle(record, gens[1])
        theta_hat, blank = np.asarray(theta_hat).reshape(n), np.asarray(blank).reshape(n)

    noiseless = params.channel_model is ChannelModel.NOISELESS
    b_parity = np.asarray(bob_parity_decode(pulses.angle, pulses.l, M, N, gens[2], noiseless=noiseless))
    coins = _coins(gens[3], n)
    b_mtd = np.asarray(bob_measure_then_decode(theta_hat, pulses.l, M, coins=coins)) if n else np.zeros(0, np.uint8)
    E = np.asarray(eve_threshold_decode(theta_hat))

    return Transcript(
        D=pulses.bits, L=pulses.parity, E=E.reshape(n).astype(np.uint8),
        B_parity=b_parity.reshape(n).astype(np.uint8), B_mtd=b_mtd.reshape(n).astype(np.uint8),
        theta=pulses.angle, theta_hat=theta_hat, uninformative=blank, l=pulses.l,
        tie_coins=coins, M=M, key_bits_consumed=stream.consumed, params=params,
    )


def write_transcript_csv(transcript: Transcript, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRANSCRIPT_COLUMNS)
        t = transcript
        for i in range(len(t)):
            w.writerow([i, int(t.D[i]), int(t.L[i]), int(t.E[i]), int(t.B_parity[i]), int(t.B_mtd[i]),
                        repr(float(t.theta[i])), repr(float(t.theta_hat[i])), int(t.uninformative[i])])


def read_transcript_csv(path, M: int = 32) -> Transcript:
    with open(Path(path), newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != TRANSCRIPT_COLUMNS:
            raise ValueError(f"unexpected transcript header {reader.fieldnames}")
        rows = list(reader)
    col = lambda k, t: np.array([t(r[k]) for r in rows], dtype=None if t is float else np.uint8)
    return Transcript(
        D=col("D", int), L=col("L", int), E=col("E", int), B_parity=col("B_parity", int),
        B_mtd=col("B_mtd", int), theta=col("theta", float), theta_hat=col("theta_hat", float),
        uninformative=col("uninformative_flag", int).astype(bool), M=M,
    )
