"""Sum rate, sensing SINR and harvested power versus AP count.

Runs the three selection methods over seeded scenarios and writes the raw
CSV plus a per-M summary of the seed means.

    python3 scripts/run_ap_sweep.py --ap-counts 16 32 64 --seeds 20 --out sweep.csv
"""

import argparse
import math
import time

from sagin_iscpt.scenario import load_config
from sagin_iscpt.sweep import SweepSpec, batch_means, read_csv, run_sweep


def linear_mean_db(rows, metric):
    lin = [dict(r, **{metric: 10 ** (r[metric] / 10)}) for r in rows]
    return {k: 10 * math.log10(v) if v > 0 else -math.inf
            for k, v in batch_means(lin, metric).items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ap-counts", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--seeds", type=int, default=20, help="seeds 0..N-1")
    ap.add_argument("--mode", choices=("average", "proportional"), default="average")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--config", default=None)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()

    config = load_config(args.config)
    spec = SweepSpec(args.ap_counts, list(range(args.seeds)), output_path=args.out,
                     power_mode=args.mode, record_timing=True, jobs=args.jobs)
    t0 = time.perf_counter()
    rows = read_csv(run_sweep(spec, config))
    print(f"{len(rows)} rows in {time.perf_counter() - t0:.0f} s -> {args.out}")

    rate = batch_means(rows, "sum_rate_bps_hz")
    sinr = linear_mean_db(rows, "sensing_sinr_db")
    power = linear_mean_db(rows, "harvested_power_dbm")
    print(f"{'M':>4} {'method':>7} {'rate b/s/Hz':>12} {'sensing dB':>11} {'power dBm':>10}")
    for m in args.ap_counts:
        for meth in spec.methods:
            key = (m, meth)
            print(f"{m:>4} {meth:>7} {rate[key]:>12.3f} {sinr[key]:>11.2f} {power[key]:>10.2f}")


if __name__ == "__main__":
    main()
