"""Plot a sweep CSV: mean sum rate, sensing SINR and harvested power versus M,
plus a CDF of per-run sum rate split into low and high AP-count bins.

    python3 scripts/plot_sweep.py sweep.csv --out sweep.png

Needs matplotlib (``pip install artifact[plot]``).
"""

import argparse
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from sagin_iscpt.sweep import batch_means, read_csv  # noqa: E402

LABELS = {"ta": "TA (MILP)", "greedy": "Greedy", "none": "No selection"}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("--split", type=int, default=80,
                    help="M <= split counts as the low bin of the CDF")
    ap.add_argument("--out", default="sweep.png")
    args = ap.parse_args()

    with open(args.csv) as fh:
        rows = read_csv(fh.read())
    ms = sorted({r["M"] for r in rows})
    methods = [m for m in LABELS if any(r["method"] == m for r in rows)]
    fig, axes = plt.subplots(1, 4, figsize=(17, 3.8))
    panels = (("sum_rate_bps_hz", "sum rate [bit/s/Hz]", False),
              ("sensing_sinr_db", "sensing SINR [dB]", True),
              ("harvested_power_dbm", "harvested power [dBm]", True))
    for ax, (metric, label, in_db) in zip(axes, panels):
        src = rows
        if in_db:
            src = [dict(r, **{metric: 10 ** (r[metric] / 10)}) for r in rows]
        means = batch_means(src, metric)
        for meth in methods:
            ys = [means[m, meth] for m in ms]
            if in_db:
                ys = [10 * math.log10(y) if y > 0 else np.nan for y in ys]
            ax.plot(ms, ys, marker="o", label=LABELS[meth])
        ax.set_xlabel("number of APs M")
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    axes[0].legend()
    ax = axes[3]
    for meth in methods:
        for low, style in ((True, "-"), (False, "--")):
            vals = np.sort([r["sum_rate_bps_hz"] for r in rows if r["method"] == meth
                            and (r["M"] <= args.split) == low
                            and not math.isnan(r["sum_rate_bps_hz"])])
            if len(vals):
                tag = "low M" if low else "high M"
                ax.step(vals, np.arange(1, len(vals) + 1) / len(vals), style,
                        where="post", label=f"{LABELS[meth]}, {tag}")
    ax.set_xlabel("sum rate [bit/s/Hz]")
    ax.set_ylabel("CDF")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=130)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
