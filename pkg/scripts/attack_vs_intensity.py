"""Known-plaintext attack success as a function of pulse brightness.

For each photon number, runs several independent sessions and reports how
often the seed is recovered from a fixed amount of known plaintext, together
with the residual error on the remaining traffic.
"""
import argparse

import numpy as np

from alphaeta.channel import RngHandle
from alphaeta.cryptanalysis import known_plaintext_attack
from alphaeta.encoding import ProtocolParams
from alphaeta.keystream import SeedKey
from alphaeta.receivers import run_protocol


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--M", type=int, default=32)
    p.add_argument("--known", type=int, default=64)
    p.add_argument("--pulses", type=int, default=5000)
    p.add_argument("--sessions", type=int, default=20)
    p.add_argument("--rng-seed", type=int, default=1)
    args = p.parse_args()

    print("N        recovered  mean_residual  mean_eve_raw")
    for i, N in enumerate((1.0, 10.0, 100.0, 1e3, 1e4, 1e5)):
        gen = np.random.default_rng([args.rng_seed, i])
        hits, resid, raw = 0, [], []
        for s in range(args.sessions):
            seed = SeedKey.random(gen)
            t = run_protocol(gen.integers(0, 2, args.pulses), seed, ProtocolParams(args.M, N),
                             RngHandle(args.rng_seed, 1000 * i + s))
            rep = known_plaintext_attack(t, seed, args.known, args.M)
            hits += rep.seed_matches
            raw.append(rep.eve_raw_error)
            if rep.residual_error is not None:
                resid.append(rep.residual_error)
        mean_resid = np.mean(resid) if resid else float("nan")
        print(f"{N:<8g} {hits:>3d}/{args.sessions:<6d} {mean_resid:13.5f}  {np.mean(raw):12.5f}")


if __name__ == "__main__":
    main()
