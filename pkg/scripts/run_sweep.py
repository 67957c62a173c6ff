"""Default intensity sweep: 6 photon numbers x M in {4, 32, 128}.

    python scripts/run_sweep.py --pulses 100000 --rng-seed 7 --out sweep.csv
"""
import argparse
from pathlib import Path

from alphaeta.analysis import default_grid, intensity_sweep


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--pulses", type=int, default=100_000)
    p.add_argument("--rng-seed", type=int, default=7)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("sweep.csv"))
    args = p.parse_args()

    res = intensity_sweep(default_grid(), args.pulses, args.rng_seed, workers=args.workers)
    args.out.write_text(res.to_csv())
    for r in res.rows:
        print(f"M={r.M:4d} N={r.N:8g}  bob_err={r.bob_err:.5f}  eve_err={r.eve_err:.5f} +- {r.eve_err_se:.5f}"
              f"  I_AB={r.I_AB:.4f}  dI={r.delta_I:g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
