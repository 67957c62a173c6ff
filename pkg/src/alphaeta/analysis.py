"""Mutual information, information advantage and intensity sweeps."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import RngHandle
from .encoding import ChannelModel, ProtocolParams
from .keystream import SeedKey, bits_per_symbol
from .receivers import Transcript, bob_measure_then_decode, run_protocol

SWEEP_COLUMNS = ["N", "M", "pulses", "bob_err", "bob_err_se", "eve_err", "eve_err_se", "I_AB", "I_AE", "delta_I"]
DEFAULT_PHOTONS = (0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0)
DEFAULT_SIZES = (4, 32, 128)


@dataclass(frozen=True)
class JointCounts:
    """2x2 co-occurrence table, rows indexed by Alice's bit."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2, 2) or np.any(t < 0):
            raise ValueError("joint counts must be a non-negative 2x2 table")
        object.__setattr__(self, "table", t)

    @property
    def total(self) -> float:
        return float(self.table.sum())

    @classmethod
    def from_pairs(cls, x, y) -> "JointCounts":
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        if x.shape != y.shape:
            raise ValueError("paired sequences differ in length")
        return cls(np.bincount(2 * x + y, minlength=4).reshape(2, 2))


def mutual_information(counts: JointCounts) -> float:
    """Plug-in estimate in bits, clamped to [0, 1]."""
    if counts.total <= 0:
        raise ValueError("mutual information of an empty table")
    p = counts.table / counts.total
    px, py = p.sum(axis=1, keepdims=True), p.sum(axis=0, keepdims=True)
    nz = p > 0
    mi = float(np.sum(p[nz] * np.log2(p[nz] / (px @ py)[nz])))
    return min(max(mi, 0.0), 1.0)


def binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def eve_keyed_decode(transcript: Transcript):
    """Eve holding ``K'`` and decoding her copy of the shared record."""
    return np.asarray(bob_measure_then_decode(transcript.theta_hat, transcript.l, transcript.M,
                                              coins=transcript.tie_coins), dtype=np.uint8)


def delta_I(transcript: Transcript, mode: str = "identical-record"):
    """Return ``(I_AB, I_AE, I_AB - I_AE)``.

    ``identical-record``: Bob measure-then-decode vs Eve decoding the same
    record with the key. ``parity-threshold``: Bob's keyed parity bits vs
    Eve's unkeyed threshold bits.
    """
    if not len(transcript):
        raise ValueError("empty transcript")
    if mode == "identical-record":
        bob, eve = transcript.B_mtd, eve_keyed_decode(transcript)
    elif mode == "parity-threshold":
        bob, eve = transcript.B_parity, transcript.E
    else:
        raise ValueError(f"unknown pairing mode {mode!r}")
    i_ab = mutual_information(JointCounts.from_pairs(transcript.D, bob))
    i_ae = mutual_information(JointCounts.from_pairs(transcript.D, eve))
    return i_ab, i_ae, i_ab - i_ae


def key_consumption(data_len: int, M: int) -> int:
    return data_len * bits_per_symbol(M)


def eve_threshold_errors(transcript: Transcript) -> np.ndarray:
    return transcript.E != (transcript.D ^ transcript.L)


def error_by_basis(transcript: Transcript) -> tuple[np.ndarray, np.ndarray]:
    """Per-basis-index Eve error rate and symbol count."""
    size = transcript.M // 2
    errs = np.bincount(transcript.l, weights=eve_threshold_errors(transcript), minlength=size)
    n = np.bincount(transcript.l, minlength=size)
    with np.errstate(invalid="ignore", divide="ignore"):
        return errs / n, n


def binomial_se(p: float, n: int) -> float:
    return float(np.sqrt(max(p * (1 - p), 0.0) / n)) if n else float("nan")


@dataclass
class SweepRow:
    N: float
    M: int
    pulses: int
    bob_err: float
    bob_err_se: float
    eve_err: float
    eve_err_se: float
    I_AB: float
    I_AE: float
    delta_I: float
    bob_mtd_err: float = field(default=float("nan"), compare=False)
    key_bits: int = field(default=0, compare=False)


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            d = asdict(r)
            w.writerow([repr(float(d["N"])), int(d["M"]), int(d["pulses"])]
                       + [repr(float(d[c])) for c in SWEEP_COLUMNS[3:]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepResult":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames != SWEEP_COLUMNS:
            raise ValueError(f"unexpected sweep header {reader.fieldnames}")
        rows = []
        for rec in reader:
            vals = {c: float(rec[c]) for c in SWEEP_COLUMNS}
            vals["M"], vals["pulses"] = int(rec["M"]), int(rec["pulses"])
            rows.append(SweepRow(**vals))
        return cls(rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def run_point(N: float, M: int, pulses: int, handle: RngHandle, seed: SeedKey | None = None,
              channel: ChannelModel = ChannelModel.COUNTING, pairing: str = "identical-record"):
    """One sweep grid point; returns ``(SweepRow, Transcript)``."""
    gen = handle.child(0).generator()
    key = seed if seed is not None else SeedKey.random(gen)
    data = gen.integers(0, 2, size=pulses, dtype=np.uint8)
    t = run_protocol(data, key, ProtocolParams(M, N, channel), handle.child(1))
    bob = float(np.mean(t.B_parity != t.D))
    eve = float(np.mean(eve_threshold_errors(t)))
    i_ab, i_ae, d = delta_I(t, pairing)
    row = SweepRow(float(N), M, pulses, bob, binomial_se(bob, pulses), eve, binomial_se(eve, pulses),
                   i_ab, i_ae, d, float(np.mean(t.B_mtd != t.D)), t.key_bits_consumed)
    return row, t


def _point_job(args):
    return run_point(*args)[0]


def intensity_sweep(grid, pulses: int, rng_seed: int, seed: SeedKey | None = None,
                    channel: ChannelModel = ChannelModel.COUNTING, pairing: str = "identical-record",
                    workers: int = 1) -> SweepResult:
    """Run every ``(N, M)`` grid point with its own derived RNG stream.

    ``seed=None`` draws a fresh LFSR seed per point; otherwise the given
    seed is reused everywhere.
    """
    if pulses < 1000:
        raise ValueError("sweeps need at least 1000 pulses per point")
    jobs = [(float(N), int(M), pulses, RngHandle(rng_seed, i), seed, channel, pairing)
            for i, (N, M) in enumerate(grid)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_point_job, jobs))
    else:
        rows = [_point_job(j) for j in jobs]
    return SweepResult(rows)


def default_grid(photons=DEFAULT_PHOTONS, sizes=DEFAULT_SIZES):
    return [(N, M) for M in sizes for N in photons]
