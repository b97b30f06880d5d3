"""
Stability scoring and runtime scaling
=====================================

Two analyses beyond plain accuracy: a stability score built from loss
histories (spread + worst spike + final loss, each min-max normalised
across configurations, lower is better) and a linear fit of training
time against dataset size whose slope ranks time efficiency.
"""

import numpy as np

from qnnbench import fit_time_model, rank_time_models, stability_scores_from_stats

# Loss-history statistics (spread over iterations 11-25, maximum spike
# after iteration 10, final loss) for six configurations; the most stable
# configuration is small in every column.
stats = {
    "QNN-1": (0.003, 0.004, 0.011),
    "QNN-2": (0.009, 0.033, 0.013),
    "QNN-3": (0.004, 0.015, 0.011),
    "QNN-4": (0.006, 0.020, 0.011),
    "QNN-5": (0.002, 0.002, 0.011),
    "QNN-6": (0.002, 0.003, 0.010),
}
scores = stability_scores_from_stats(stats)
print("stability ranking (score = normalised spread + spike + final loss):")
for name in sorted(scores, key=lambda n: scores[n].rank):
    m = scores[name]
    print(f"  {m.rank}. {name}  sc={m.sc:.2f}  (sd={m.sd} ms={m.ms} fl={m.fl})")

# Cross-validation training minutes against training-set size: a straight
# line fits almost perfectly, so training cost is O(n) in samples.
sizes = np.array([800, 1600, 2400, 3200])
minutes = {
    "QNN-1": [26.33, 51.92, 77.52, 104.68],
    "QNN-2": [23.89, 47.44, 72.03, 94.80],
    "QNN-3": [23.71, 47.43, 72.18, 96.83],
    "QNN-4": [24.65, 47.57, 73.34, 96.17],
    "QNN-5": [23.10, 47.54, 68.62, 92.53],
    "QNN-6": [23.51, 45.62, 68.65, 92.71],
}
models = {name: fit_time_model(sizes, t) for name, t in minutes.items()}
ranks = rank_time_models(models)
print("\ntime model minutes = slope*size + intercept:")
for name in sorted(models, key=lambda n: ranks[n]):
    tm = models[name]
    print(
        f"  rank {ranks[name]}: {name}  slope={tm.slope:.3e} "
        f"intercept={tm.intercept:+.2f}  fit_r2={tm.fit_r2:.5f}"
    )
print("\nthe 40-gate configuration is the slowest; the 34-gate ones are fastest")
