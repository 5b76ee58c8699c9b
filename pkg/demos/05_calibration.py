"""Choosing the logistic slopes from expert anchor points.

Experts pin uplift values for a few known constellations (0 for "no gain",
0.5 for "clear gain", 1 for "decisive"); the grid search then picks the
slope triple that best reproduces them, and a sensitivity sweep confirms
the qualitative picture is slope-robust.
"""

from shockstab import DEFAULT_COEFFICIENTS, calibrate, sensitivity_sweep
from shockstab.calibration import AnchorPoint

# --- expert anchors ---------------------------------------------------------
anchors = [
    # identical models: no uplift, high confidence
    AnchorPoint(0.80, 0.72, 0.80, 0.72, ds=0.20, target_su=0.0, confidence=2.0),
    # B clearly more stable and slightly better shocked: solid uplift
    AnchorPoint(0.80, 0.70, 0.805, 0.79, ds=0.20, target_su=0.5),
    # B dominates on both sides of the shock: near-maximal uplift
    AnchorPoint(0.78, 0.68, 0.84, 0.84, ds=0.20, target_su=1.0),
]

result = calibrate(anchors)
print("grid search over the coarse sweep grid:")
print(f"  best coefficients: k1={result.coeffs.k1:.0f} "
      f"k2={result.coeffs.k2:.0f} k3={result.coeffs.k3:.0f}")
print(f"  weighted squared error: {result.objective:.6f}")
print(f"  evaluated {len(result.grid_trace)} grid points")
worst = max(result.grid_trace, key=lambda t: t[1])
print(f"  worst point: k=({worst[0].k1:.0f},{worst[0].k2:.0f},{worst[0].k3:.0f}) "
      f"objective {worst[1]:.6f}\n")

# --- sensitivity sweep -------------------------------------------------------
records = [
    ("gbm", "without", 0.80, 0.70, 0.80, 0.71),
    ("gbm", 5, 0.80, 0.70, 0.81, 0.76),
    ("gbm", 10, 0.80, 0.70, 0.80, 0.73),
    ("tabnet", "without", 0.77, 0.69, 0.77, 0.69),
    ("tabnet", 5, 0.77, 0.69, 0.78, 0.74),
    ("tabnet", 10, 0.77, 0.69, 0.78, 0.72),
]
report = sensitivity_sweep(records, ds=0.2, baseline=DEFAULT_COEFFICIENTS)
print(f"sensitivity sweep over {len(report.entries)} slope combinations")
print(f"  all cell signs and per-model best levels preserved: {report.all_preserved}")
for entry in report.entries[:3]:
    c = entry["coefficients"]
    print(
        f"  k=({c['k1']:.0f},{c['k2']:.0f},{c['k3']:.0f}) "
        f"signs={entry['all_signs_preserved']} argmax={entry['argmax_preserved']}"
    )
best_by_model = report.entries[0]["argmax_by_model"]
print("  best outlier level per model:",
      {m: v["baseline_level"] for m, v in best_by_model.items()})
