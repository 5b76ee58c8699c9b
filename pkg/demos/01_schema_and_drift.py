"""Schema detection and distribution shift on a small credit-style table.

Builds two CSV snapshots of the same portfolio (before and after a rate
shock), inspects the inferred schema and walks through the per-column
distances that make up the distribution shift.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from shockstab import detect_schema, distribution_shift, ks_statistic, load_csv, tv_distance

rng = np.random.default_rng(7)
workdir = Path(tempfile.mkdtemp(prefix="shockstab-demo-"))


def write_portfolio(path, rate_mean, sector_probs):
    n = 400
    rows = ["age,rate,sector,is_bad"]
    sectors = rng.choice(["retail", "trade", "agro"], size=n, p=sector_probs)
    for i in range(n):
        age = rng.integers(21, 70)
        rate = rng.normal(rate_mean, 0.04)
        bad = int(rng.random() < 0.1)
        rows.append(f"{age},{rate:.4f},{sectors[i]},{bad}")
    path.write_text("\n".join(rows) + "\n")


base_csv = workdir / "base.csv"
shock_csv = workdir / "shock.csv"
write_portfolio(base_csv, rate_mean=0.30, sector_probs=[0.5, 0.3, 0.2])
write_portfolio(shock_csv, rate_mean=0.38, sector_probs=[0.2, 0.55, 0.25])

# --- schema -----------------------------------------------------------------
frame = load_csv(base_csv)
print(f"loaded {frame.row_count} rows, columns: {frame.column_names}")
report = detect_schema(frame)
for col in report.columns:
    if col.kind.value == "numerical":
        print(
            f"  {col.name:8s} numerical   mean={col.mean:8.3f} std={col.std:6.3f} "
            f"skew={col.skewness:+.2f} iqr={col.iqr:.3f}"
        )
    else:
        print(
            f"  {col.name:8s} categorical top={col.top!r} "
            f"({col.percent_top:.1f}% of rows)"
        )

# note: the binary is_bad column is numerical by default (dtype-style rule);
# pass categorical_override=2 to load_csv to route binaries through TV instead

# --- individual distances ---------------------------------------------------
base = load_csv(base_csv)
shock = load_csv(shock_csv)
print("\nper-column distances:")
print("  rate  KS =", round(ks_statistic(base.column("rate").values,
                                         shock.column("rate").values), 4))
print("  sector TV =", round(tv_distance(base.column("sector").values,
                                         shock.column("sector").values), 4))

# --- the aggregate shift ----------------------------------------------------
drift = distribution_shift(base, shock, tau=0.05, excluded={"is_bad"})
print("\ndrift report (label excluded):")
print(json.dumps(drift.to_dict(), indent=2))
print(f"\nDS = {drift.ds:.4f}  ->  {'SHOCK' if drift.is_shock else 'no shock'} at tau={drift.tau}")
