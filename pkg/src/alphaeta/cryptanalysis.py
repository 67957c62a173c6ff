"""Known-plaintext seed recovery for the LFSR-expanded basis key.

Every keystream bit is a GF(2)-linear functional of the seed. Eve's
threshold bits satisfy ``E = D xor L``, so each known plaintext symbol hands
her the parity bit ``L`` of one keystream chunk, which is the last bit of the
chunk. Rows are Python ints used as packed bit vectors: bit ``k - j`` holds
the coefficient of seed cell ``j``, so row XOR runs word-wide.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .keystream import SeedKey, bits_per_symbol, expand_key


class InconsistentSystemError(ValueError):
    def __init__(self, row_index: int):
        super().__init__(f"observation row {row_index} contradicts earlier rows")
        self.row_index = row_index


@dataclass
class LinearSystem:
    k: int
    taps: tuple[int, ...]
    rows: list[int] = field(default_factory=list)
    rhs: list[int] = field(default_factory=list)
    positions: list[int] = field(default_factory=list)

    def add(self, row: int, bit: int, position: int = -1) -> None:
        self.rows.append(row)
        self.rhs.append(int(bit) & 1)
        self.positions.append(position)

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True)
class RecoveredKey:
    seed: SeedKey | None
    rank: int
    unique: bool
    conflicts: int = 0


def seed_functional(position: int, k: int, taps) -> int:
    """Packed row ``f`` with ``output_bit(position) == parity(f & seed_int)``."""
    return seed_functionals(position + 1, k, taps)[position]


def seed_functionals(n: int, k: int, taps) -> list[int]:
    """Functionals of the first ``n`` output bits.

    Uses the output recurrence ``y[t] = XOR_j y[t - j]`` with ``y[-j]``
    being seed cell ``j`` (functional ``1 << (k - j)``).
    """
    taps = tuple(taps)
    hist = [1 << (k - j) for j in range(k, 0, -1)]  # hist[k - j] is y[-j]
    out = []
    for t in range(n):
        f = 0
        for j in taps:
            f ^= hist[k + t - j]
        hist.append(f)
        out.append(f)
    return out


def observed_keystream_bits(transcript, known_plaintext, offset: int, M: int):
    """``(keystream position, bit)`` pairs leaked by known plaintext.

    Symbol ``i`` yields ``L_i = D_i xor E_i`` at the last position of
    chunk ``i``.
    """
    known = np.asarray(known_plaintext, dtype=np.uint8).ravel()
    if offset < 0 or offset + len(known) > len(transcript):
        raise ValueError("known plaintext does not align with the transcript")
    width = bits_per_symbol(M)
    E = np.asarray(transcript.E[offset:offset + len(known)])
    leaked = known ^ E
    return [((offset + i) * width + width - 1, int(b)) for i, b in enumerate(leaked)]


def build_system(observations, k: int, taps, order=None) -> LinearSystem:
    """Linear system from ``(position, bit)`` observations.

    ``order`` optionally permutes the observations (e.g. most reliable
    first) before rows are appended.
    """
    observations = list(observations)
    if order is not None:
        observations = [observations[i] for i in order]
    system = LinearSystem(k, tuple(taps))
    if not observations:
        return system
    table = seed_functionals(max(p for p, _ in observations) + 1, k, taps)
    for p, bit in observations:
        system.add(table[p], bit, p)
    return system


def _majority_vote(system: LinearSystem, min_votes: int):
    groups = defaultdict(list)
    for idx, (row, b) in enumerate(zip(system.rows, system.rhs)):
        groups[row].append((idx, b))
    merged = []
    for row, votes in groups.items():
        if len(votes) < min_votes:
            continue
        ones = sum(b for _, b in votes)
        if 2 * ones == len(votes):
            continue
        merged.append((votes[0][0], row, int(2 * ones > len(votes))))
    merged.sort()
    return merged


def solve_seed(system: LinearSystem, vote: bool = False, min_votes: int = 1,
               skip_conflicts: bool = False) -> RecoveredKey:
    """Gaussian elimination over GF(2).

    Rows are processed in order. A dependent row whose rhs disagrees raises
    :class:`InconsistentSystemError`, or is dropped and counted when
    ``skip_conflicts`` is set. With ``vote`` identical rows are first merged
    by majority (ties dropped, groups smaller than ``min_votes`` ignored).
    """
    if not len(system):
        raise ValueError("empty linear system")
    k = system.k
    if vote:
        entries = _majority_vote(system, min_votes)
    else:
        entries = [(i, r, b) for i, (r, b) in enumerate(zip(system.rows, system.rhs))]

    pivots: dict[int, int] = {}  # pivot bit -> augmented row (row << 1 | rhs)
    conflicts = 0
    for idx, row, bit in entries:
        aug = (row << 1) | bit
        for pbit in sorted(pivots, reverse=True):
            if (aug >> (pbit + 1)) & 1:
                aug ^= pivots[pbit]
        if aug >> 1:
            pivots[(aug >> 1).bit_length() - 1] = aug
        elif aug & 1:
            if not skip_conflicts:
                raise InconsistentSystemError(idx)
            conflicts += 1

    rank = len(pivots)
    if rank < k:
        return RecoveredKey(None, rank, False, conflicts)
    # back substitution, lowest pivot first
    value = 0
    for pbit in sorted(pivots):
        aug = pivots[pbit]
        row, bit = aug >> 1, aug & 1
        rest = row & ~(1 << pbit)
        bit ^= (rest & value).bit_count() & 1
        value |= bit << pbit
    if value == 0:
        return RecoveredKey(None, rank, False, conflicts)
    return RecoveredKey(SeedKey.from_int(value, k, system.taps), rank, True, conflicts)


def decrypt_with_seed(transcript, recovered: RecoveredKey, M: int):
    """Regenerate ``L`` from the recovered seed and undo ``E = D xor L``.

    Returns ``(plaintext, confidence)``; confidence is the angular margin of
    Eve's estimate from the nearer threshold boundary, scaled to [0, 1].
    """
    if not recovered.unique:
        raise ValueError("cannot decrypt with a non-unique key")
    n, width = len(transcript), bits_per_symbol(M)
    ks = expand_key(recovered.seed, n * width).reshape(n, width)
    L = ks[:, -1]
    plain = np.asarray(transcript.E, dtype=np.uint8) ^ L
    margin = boundary_margin(transcript.theta_hat)
    confidence = np.where(transcript.uninformative, 0.0, margin / (np.pi / 4))
    return plain, confidence


def boundary_margin(theta_hat):
    """Distance of each estimate from the nearer of the 0 and pi/2 thresholds."""
    m = np.mod(np.asarray(theta_hat), np.pi / 2)
    return np.minimum(m, np.pi / 2 - m)


@dataclass
class AttackReport:
    rank: int
    unique: bool
    seed_hex: str | None
    true_seed_hex: str
    plaintext_bits: int
    conflicts: int
    residual_error: float | None
    eve_raw_error: float

    @property
    def seed_matches(self) -> bool:
        return self.seed_hex == self.true_seed_hex

    def to_text(self) -> str:
        lines = [
            "attack report",
            f"rank: {self.rank}",
            f"unique: {self.unique}",
            f"recovered seed: {self.seed_hex if self.seed_hex else '-'}",
            f"true seed: {self.true_seed_hex}",
            f"seed matches: {self.seed_matches}",
            f"plaintext bits consumed: {self.plaintext_bits}",
            f"discarded conflicting rows: {self.conflicts}",
            f"eve raw threshold error: {self.eve_raw_error:.6g}",
            "residual error rate: " + ("-" if self.residual_error is None else f"{self.residual_error:.6g}"),
        ]
        return "\n".join(lines) + "\n"


def known_plaintext_attack(transcript, true_seed: SeedKey, known_len: int, M: int,
                           offset: int = 0, robust: bool = True) -> AttackReport:
    """Recover the seed from ``known_len`` plaintext symbols and decrypt the rest.

    With ``robust`` the observations are ordered by Eve's boundary margin and
    contradicting rows are discarded instead of aborting.
    """
    known = transcript.D[offset:offset + known_len]
    obs = observed_keystream_bits(transcript, known, offset, M)
    order = None
    if robust:
        margin = boundary_margin(transcript.theta_hat[offset:offset + known_len])
        margin = np.where(transcript.uninformative[offset:offset + known_len], -1.0, margin)
        order = np.argsort(-margin, kind="stable")
    system = build_system(obs, true_seed.k, true_seed.taps, order)
    eve_raw = float(np.mean(transcript.E != (transcript.D ^ transcript.L))) if len(transcript) else 0.0
    if not len(system):
        return AttackReport(0, False, None, true_seed.to_hex(), 0, 0, None, eve_raw)
    rec = solve_seed(system, skip_conflicts=robust)
    residual = None
    if rec.unique:
        plain, _ = decrypt_with_seed(transcript, rec, M)
        held = np.ones(len(transcript), dtype=bool)
        held[offset:offset + known_len] = False
        if held.any():
            residual = float(np.mean(plain[held] != transcript.D[held]))
    return AttackReport(rec.rank, rec.unique, rec.seed.to_hex() if rec.unique else None,
                        true_seed.to_hex(), len(obs), rec.conflicts, residual, eve_raw)
