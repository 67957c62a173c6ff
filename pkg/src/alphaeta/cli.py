"""Command-line experiment runner.

    alphaeta otp-check --M 32 --pulses 10000 --rng-seed 1
    alphaeta demo --M 32 --photons 100 --rng-seed 3
    alphaeta sweep --pulses 100000 --rng-seed 7 --out sweep.csv
    alphaeta attack --M 32 --photons 10000 --known-plaintext 64 --rng-seed 2

A flat ``key=value`` file given with ``--config`` supplies defaults using the
flag names (``M=32``, ``rng-seed=7``, ...); explicit flags win.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis
from .channel import RngHandle
from .cryptanalysis import known_plaintext_attack
from .encoding import ChannelModel, ProtocolParams
from .keystream import DEFAULT_TAPS, InvalidStateError, SeedKey
from .receivers import run_protocol, write_transcript_csv

COMMANDS = ("demo", "sweep", "attack", "otp-check")
EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    rng_seed: int
    M: Optional[int] = None
    mean_photons: Optional[float] = None
    pulses: int = 10_000
    seed_key_hex: Optional[str] = None
    taps: tuple[int, ...] = DEFAULT_TAPS
    channel_model: ChannelModel = ChannelModel.COUNTING
    known_plaintext_len: int = 64
    output_path: Optional[str] = None
    workers: int = 1

    @property
    def k(self) -> int:
        return max(self.taps)

    def seed_key(self, gen: np.random.Generator) -> SeedKey:
        if self.seed_key_hex is None:
            return SeedKey.random(gen, self.k, self.taps)
        return SeedKey.from_hex(self.seed_key_hex, self.k, self.taps)


def _power_of_two(text):
    M = int(text)
    if M < 4 or M & (M - 1):
        raise argparse.ArgumentTypeError("M must be a power of two >= 4")
    return M


def _non_negative(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("photons must be >= 0")
    return v


def _taps(text):
    try:
        taps = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("taps must be comma-separated integers")
    if not taps or min(taps) < 1:
        raise argparse.ArgumentTypeError("taps must be positive integers")
    return taps


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphaeta", description="Simulate and attack the alternating-parity polarization cipher.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat key=value file with defaults for any flag")
    p.add_argument("--M", type=_power_of_two, help="number of polarization states (default 32; sweep: 4,32,128)")
    p.add_argument("--photons", type=_non_negative, help="mean photons per pulse (default 1e4; sweep: 0,1,...,1e4)")
    p.add_argument("--pulses", type=int, default=10_000, help="symbols per run / sweep point (default 10000)")
    p.add_argument("--seed-key", help="LFSR seed as hex (default: drawn from --rng-seed)")
    p.add_argument("--taps", type=_taps, default=DEFAULT_TAPS, help="comma-separated tap positions (default 16,15,13,4)")
    p.add_argument("--channel", choices=[c.value for c in ChannelModel], default="counting")
    p.add_argument("--rng-seed", type=int, help="required; fixes all randomness")
    p.add_argument("--known-plaintext", type=int, default=64, help="known symbols for attack (default 64)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    return p


def _read_config_file(path) -> list[str]:
    args = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        args += [f"--{key}", value]
    return args


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse flags, layering them over an optional config file."""
    parser = build_parser()
    argv = list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)
    first = parser.parse_args(argv)
    if first.config:
        try:
            file_args = _read_config_file(first.config)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        # file values first so that later command-line flags override them
        first = parser.parse_args([argv[0]] + file_args + argv[1:])
    if first.rng_seed is None:
        parser.error("--rng-seed is required for reproducibility")
    if first.pulses < 0:
        parser.error("--pulses must be >= 0")
    if max(first.taps) < 2:
        parser.error("taps must describe a register of length >= 2")
    if first.command == "sweep" and first.pulses < 1000:
        parser.error("sweep needs --pulses >= 1000")
    return RunConfig(
        command=first.command, rng_seed=first.rng_seed, M=first.M, mean_photons=first.photons,
        pulses=first.pulses, seed_key_hex=first.seed_key, taps=tuple(first.taps),
        channel_model=ChannelModel(first.channel), known_plaintext_len=first.known_plaintext,
        output_path=first.out, workers=first.workers,
    )


def _params(cfg: RunConfig, channel=None) -> ProtocolParams:
    return ProtocolParams(cfg.M or 32, 1e4 if cfg.mean_photons is None else cfg.mean_photons,
                          channel or cfg.channel_model)


def _otp_check(cfg: RunConfig):
    gen = RngHandle(cfg.rng_seed).generator()
    seed = cfg.seed_key(gen)
    data = gen.integers(0, 2, cfg.pulses, dtype=np.uint8)
    params = _params(cfg, ChannelModel.NOISELESS)
    t = run_protocol(data, seed, params, RngHandle(cfg.rng_seed, 1))
    ok = int(np.sum((t.D ^ t.L) == t.E))
    expected_key = analysis.key_consumption(len(t), params.M)
    lines = [
        f"{ok}/{len(t)} symbols satisfy D⊕L=E",
        f"key bits consumed: {t.key_bits_consumed} (expected {expected_key})",
    ]
    good = ok == len(t) and t.key_bits_consumed == expected_key
    return "\n".join(lines) + "\n", EXIT_OK if good else EXIT_DOMAIN


def _demo(cfg: RunConfig):
    gen = RngHandle(cfg.rng_seed).generator()
    seed = cfg.seed_key(gen)
    data = gen.integers(0, 2, cfg.pulses, dtype=np.uint8)
    params = _params(cfg)
    t = run_protocol(data, seed, params, RngHandle(cfg.rng_seed, 1))
    out = [f"M={params.M} N={params.mean_photons:g} channel={params.channel_model.value} seed={seed.to_hex()}",
           "  i  D  l  L  theta    theta_hat  E  D^L  B_par  B_mtd"]
    for i in range(min(16, len(t))):
        out.append(f"{i:3d}  {t.D[i]}  {t.l[i]:<2d} {t.L[i]}  {t.theta[i]:.4f}   {t.theta_hat[i]:.4f}     "
                   f"{t.E[i]}  {t.D[i] ^ t.L[i]}    {t.B_parity[i]}      {t.B_mtd[i]}"
                   + ("  (uninformative)" if t.uninformative[i] else ""))
    if len(t):
        i_ab, i_ae, d = analysis.delta_I(t)
        eve = float(np.mean(analysis.eve_threshold_errors(t)))
        out += [f"symbols: {len(t)}",
                f"Bob parity error: {np.mean(t.B_parity != t.D):.6g}",
                f"Eve threshold error (E vs D^L): {eve:.6g}",
                f"identical-record pairing: I_AB={i_ab:.6f} I_AE={i_ae:.6f} delta_I={d:g}",
                f"key bits consumed: {t.key_bits_consumed}"]
    if cfg.output_path:
        write_transcript_csv(t, cfg.output_path)
        out.append(f"transcript written to {cfg.output_path}")
    return "\n".join(out) + "\n", EXIT_OK


def _sweep(cfg: RunConfig):
    photons = analysis.DEFAULT_PHOTONS if cfg.mean_photons is None else (cfg.mean_photons,)
    sizes = analysis.DEFAULT_SIZES if cfg.M is None else (cfg.M,)
    seed = None if cfg.seed_key_hex is None else SeedKey.from_hex(cfg.seed_key_hex, cfg.k, cfg.taps)
    result = analysis.intensity_sweep(analysis.default_grid(photons, sizes), cfg.pulses, cfg.rng_seed, seed,
                                      channel=cfg.channel_model, workers=cfg.workers)
    return result.to_csv(), EXIT_OK


def _attack(cfg: RunConfig):
    gen = RngHandle(cfg.rng_seed).generator()
    seed = cfg.seed_key(gen)
    data = gen.integers(0, 2, cfg.pulses, dtype=np.uint8)
    params = _params(cfg)
    if cfg.known_plaintext_len > cfg.pulses:
        raise UsageError("--known-plaintext exceeds --pulses")
    t = run_protocol(data, seed, params, RngHandle(cfg.rng_seed, 1))
    report = known_plaintext_attack(t, seed, cfg.known_plaintext_len, params.M)
    header = f"M={params.M} N={params.mean_photons:g} channel={params.channel_model.value} pulses={cfg.pulses}\n"
    return header + report.to_text(), EXIT_OK


def execute(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        if cfg.command == "otp-check":
            text, code = _otp_check(cfg)
        elif cfg.command == "demo":
            # --out receives the transcript CSV; the summary still goes to stdout
            text, code = _demo(cfg)
            cfg = replace(cfg, output_path=None)
        elif cfg.command == "sweep":
            text, code = _sweep(cfg)
        else:
            text, code = _attack(cfg)
    except (InvalidStateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if cfg.output_path:
        try:
            Path(cfg.output_path).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        stdout.write(text)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
