"""Fibonacci LFSR key expansion and basis-index slicing.

Register cells are numbered 1..k. Cell 1 is the newest cell and cell k the
oldest. Each step outputs the XOR of the tapped cells, shifts every cell one
position towards the old end and stores the output in cell 1. The output
sequence therefore obeys ``y[t] = XOR_{j in taps} y[t - j]`` where
``y[-j]`` is the initial content of cell ``j``.

Seeds are written as bit strings cell 1 first, so the hex form of a seed is
the integer whose most significant of ``k`` bits is cell 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_DEGREE = 16
DEFAULT_TAPS = (16, 15, 13, 4)

# Maximal-length tap sets for small registers (verified exhaustively in tests).
MAXIMAL_TAPS = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    16: DEFAULT_TAPS,
}


class InvalidStateError(ValueError):
    """Raised for an all-zero register or malformed seed/taps."""


def _check_taps(taps: Iterable[int], k: int) -> tuple[int, ...]:
    taps = tuple(sorted(set(int(t) for t in taps), reverse=True))
    if not taps or k not in taps:
        raise InvalidStateError(f"taps must include the oldest cell {k}, got {taps}")
    if any(t < 1 or t > k for t in taps):
        raise InvalidStateError(f"taps must lie in 1..{k}, got {taps}")
    return taps


def lfsr_step(state: Sequence[int], taps: Iterable[int]) -> tuple[tuple[int, ...], int]:
    """Advance the register once.

    ``state[i]`` holds cell ``i + 1``. Returns ``(new_state, output_bit)``.
    """
    state = tuple(int(b) & 1 for b in state)
    if not any(state):
        raise InvalidStateError("LFSR state is all-zero")
    taps = _check_taps(taps, len(state))
    out = 0
    for t in taps:
        out ^= state[t - 1]
    return (out,) + state[:-1], out


@dataclass(frozen=True)
class SeedKey:
    """Shared seed ``K``: initial register content plus the tap set."""

    bits: tuple[int, ...]
    taps: tuple[int, ...] = DEFAULT_TAPS

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InvalidStateError("seed bits must be 0 or 1")
        if len(bits) < 2:
            raise InvalidStateError("seed length must be at least 2")
        if not any(bits):
            raise InvalidStateError("all-zero seed is a fixed point of the LFSR")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "taps", _check_taps(self.taps, len(bits)))

    @property
    def k(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, value: int, k: int = DEFAULT_DEGREE, taps=None) -> "SeedKey":
        if value < 0 or value >= 1 << k:
            raise InvalidStateError(f"seed value does not fit in {k} bits")
        if taps is None and k not in MAXIMAL_TAPS:
            raise InvalidStateError(f"no default tap set for k={k}; pass taps explicitly")
        bits = tuple((value >> (k - 1 - i)) & 1 for i in range(k))
        return cls(bits, MAXIMAL_TAPS[k] if taps is None else taps)

    @classmethod
    def from_hex(cls, text: str, k: int = DEFAULT_DEGREE, taps=None) -> "SeedKey":
        try:
            value = int(text, 16)
        except ValueError as exc:
            raise InvalidStateError(f"not a hexadecimal seed: {text!r}") from exc
        return cls.from_int(value, k, taps)

    @classmethod
    def random(cls, rng: np.random.Generator, k: int = DEFAULT_DEGREE, taps=None) -> "SeedKey":
        return cls.from_int(int(rng.integers(1, 1 << k)), k, taps)

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def to_hex(self) -> str:
        return format(self.to_int(), f"0{(self.k + 3) // 4}x")

    def __xor__(self, other: "SeedKey") -> "SeedKey":
        if self.taps != other.taps or self.k != other.k:
            raise InvalidStateError("seeds must share length and taps")
        return SeedKey(tuple(a ^ b for a, b in zip(self.bits, other.bits)), self.taps)


@dataclass
class Keystream:
    """Lazily produced running key ``K'`` for one seed.

    ``consumed`` counts every bit handed out by :meth:`take`.
    """

    seed: SeedKey
    consumed: int = 0
    _state: int = field(init=False, repr=False)
    _mask: int = field(init=False, repr=False)

    def __post_init__(self):
        self._state = self.seed.to_int()
        k = self.seed.k
        self._mask = sum(1 << (k - t) for t in self.seed.taps)

    def take(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("cannot take a negative number of bits")
        state, mask, top = self._state, self._mask, self.seed.k - 1
        out = bytearray(n)
        for i in range(n):
            bit = (state & mask).bit_count() & 1
            out[i] = bit
            state = (state >> 1) | (bit << top)
        self._state = state
        self.consumed += n
        return np.frombuffer(bytes(out), dtype=np.uint8).copy()


def expand_key(seed: SeedKey, n: int) -> np.ndarray:
    """First ``n`` keystream bits of ``seed``."""
    return Keystream(seed).take(n)


def bits_per_symbol(M: int) -> int:
    """Keystream bits needed per basis index, ``log2(M/2)``."""
    check_scheme_size(M)
    return int(M).bit_length() - 2


def check_scheme_size(M: int) -> None:
    if not isinstance(M, (int, np.integer)) or M < 4 or M & (M - 1):
        raise ValueError(f"M must be a power of two >= 4, got {M}")


@dataclass(frozen=True)
class BasisIndex:
    l: int
    source_bits: tuple[int, ...]


def next_basis_index(stream: Keystream, M: int) -> BasisIndex:
    """Consume ``log2(M/2)`` bits and read them MSB-first."""
    chunk = stream.take(bits_per_symbol(M))
    l = 0
    for b in chunk:
        l = (l << 1) | int(b)
    return BasisIndex(l, tuple(int(b) for b in chunk))


def basis_indices(stream: Keystream, M: int, n: int) -> np.ndarray:
    """Vectorised :func:`next_basis_index` for ``n`` consecutive symbols."""
    width = bits_per_symbol(M)
    chunks = stream.take(n * width).reshape(n, width).astype(np.int64)
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return chunks @ weights


def orbit_period(seed: SeedKey, limit: int | None = None) -> int:
    """Number of steps until the register state first repeats the seed."""
    k = seed.k
    limit = (1 << k) if limit is None else limit
    mask = sum(1 << (k - t) for t in seed.taps)
    start = state = seed.to_int()
    for n in range(1, limit + 1):
        bit = (state & mask).bit_count() & 1
        state = (state >> 1) | (bit << (k - 1))
        if state == start:
            return n
    raise InvalidStateError(f"no period found within {limit} steps")
