"""Shot-noise measurement of linearly polarized coherent pulses.

A pulse of mean photon number ``N`` and polarization ``theta`` sent through
a polarizing analyzer at ``phi`` yields independent Poisson counts with means
``N cos^2(theta - phi)`` and ``N sin^2(theta - phi)``. All functions accept
scalar or array angles.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class RngHandle:
    """Seed plus stream counter; equal handles give equal draws."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,)))

    def child(self, stream_id: int) -> "RngHandle":
        # Nested derivation keeps children of different parents apart.
        return RngHandle(self.seed, self.stream_id * 1_000_003 + stream_id + 1)


RngLike = Union[RngHandle, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngHandle) else rng


def _check_photons(N):
    if not np.all(np.asarray(N) >= 0):
        raise ValueError(f"mean photon number must be >= 0, got {N}")


@dataclass
class MeasurementRecord:
    """Counts per analyzer arm, last axis ordered 0, pi/2, pi/4, 3pi/4."""

    counts: np.ndarray
    mean_photons_used: float
    estimated_angle: Optional[np.ndarray] = None
    uninformative: Optional[np.ndarray] = None


def count_single_basis(angle, analyzer, N, rng: RngLike):
    """Return ``(n_aligned, n_orthogonal)`` Poisson counts."""
    _check_photons(N)
    gen = as_generator(rng)
    delta = np.asarray(angle, dtype=float) - analyzer
    aligned = gen.poisson(N * np.cos(delta) ** 2)
    orthogonal = gen.poisson(N * np.sin(delta) ** 2)
    return aligned, orthogonal


def count_dual_basis(angle, N, rng: RngLike) -> MeasurementRecord:
    """50/50 split into {0, pi/2} and {pi/4, 3pi/4} analyzers."""
    _check_photons(N)
    gen = as_generator(rng)
    theta = np.asarray(angle, dtype=float)
    c, s = np.cos(theta) ** 2, np.sin(theta) ** 2
    cd, sd = np.cos(theta - np.pi / 4) ** 2, np.sin(theta - np.pi / 4) ** 2
    means = (N / 2) * np.stack([c, s, cd, sd], axis=-1)
    return MeasurementRecord(gen.poisson(means), float(N))


def _reduce(angle):
    out = np.mod(angle, np.pi)
    # mod of a tiny negative number can round up to exactly pi
    return np.where(out >= np.pi, 0.0, out)


def estimate_angle(record, rng: RngLike | None = None):
    """Stokes-parameter angle estimate.

    Returns ``(theta_hat, uninformative)``. A zero Stokes vector (vacuum or
    perfectly balanced counts) carries no angle information; those symbols
    get a uniform random angle and are flagged.
    """
    counts = record.counts if isinstance(record, MeasurementRecord) else np.asarray(record)
    counts = np.asarray(counts, dtype=np.int64)
    s1 = counts[..., 0] - counts[..., 1]
    s2 = counts[..., 2] - counts[..., 3]
    theta = _reduce(0.5 * np.arctan2(s2, s1))
    blank = (s1 == 0) & (s2 == 0)
    if np.any(blank):
        if rng is None:
            raise ValueError("an rng is required to resolve uninformative records")
        gen = as_generator(rng)
        theta = np.where(blank, gen.uniform(0.0, np.pi, size=np.shape(blank)), theta)
    if theta.ndim == 0:
        theta, blank = float(theta), bool(blank)
    if isinstance(record, MeasurementRecord):
        record.estimated_angle, record.uninformative = theta, blank
    return theta, blank


def gaussian_sigma(N) -> float:
    return 1.0 / (2.0 * np.sqrt(N))


def gaussian_angle_channel(angle, N, rng: RngLike):
    if not np.all(np.asarray(N) > 0):
        raise ValueError(f"gaussian channel needs N > 0, got {N}")
    gen = as_generator(rng)
    theta = np.asarray(angle, dtype=float)
    out = _reduce(theta + gen.normal(0.0, gaussian_sigma(N), size=theta.shape))
    return float(out) if out.ndim == 0 else out


def angular_distance(a, b):
    """Distance on the [0, pi) polarization circle, in [0, pi/2]."""
    d = np.abs(np.mod(np.asarray(a, dtype=float) - b, np.pi))
    d = np.minimum(d, np.pi - d)
    return float(d) if d.ndim == 0 else d


def circular_spread(estimates, truth):
    """Circular mean offset and standard deviation of axial (mod pi) errors."""
    z = np.exp(2j * (np.asarray(estimates) - truth))
    mean = z.mean()
    R = min(abs(mean), 1.0)
    return 0.5 * np.angle(mean), 0.5 * np.sqrt(-2.0 * np.log(R)), R
