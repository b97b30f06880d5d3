"""
Training one quantum regressor
==============================

Generate a synthetic wind-power corpus, scale it on the training split,
fit one quantum configuration for 25 quasi-Newton iterations, and score
the untouched hold-out in kW.
"""

import numpy as np

from qnnbench import (
    QNN_CONFIGS,
    compute_metrics,
    gen_synthetic,
    minmax_apply,
    minmax_fit,
    minmax_invert_target,
    predict,
    residual_stats,
    subset_and_split,
    train,
)
from qnnbench.data import feature_matrix, target_vector

rows = gen_synthetic(1000, seed=11)
split = subset_and_split(rows, 800, seed=11)
X, y = feature_matrix(rows), target_vector(rows)

# The scaler only ever sees the training split.
scaler = minmax_fit(X[split.train_idx], y[split.train_idx])
X_train, y_train = minmax_apply(scaler, X[split.train_idx], y[split.train_idx])
X_test, y_test = minmax_apply(scaler, X[split.test_idx], y[split.test_idx])

model, history = train(QNN_CONFIGS["QNN-1"], X_train, y_train, seed=7)

print("loss per iteration (25 entries, padded after convergence):")
for i in range(0, 25, 4):
    print(f"  iter {i + 1:2d}: {history[i]:.5f}")

# Predictions come out in the scaled space and map back to kW through the
# training scaler; they can dip below zero since nothing clamps them.
pred_kw = minmax_invert_target(scaler, predict(model, X_test))
true_kw = minmax_invert_target(scaler, y_test)
metrics = compute_metrics(true_kw, pred_kw)
stats = residual_stats(true_kw, pred_kw)
print(f"\nhold-out R2 = {metrics.r2:.3f}, RMSE = {metrics.rmse:.1f} kW")
print(f"residual bias = {stats.mean:+.1f} kW, spread = {stats.std:.1f} kW")
print(f"most negative prediction: {pred_kw.min():.1f} kW")

worst = np.argsort(np.abs(pred_kw - true_kw))[-3:]
print("largest misses (true kW -> predicted kW):")
for i in worst:
    print(f"  {true_kw[i]:8.1f} -> {pred_kw[i]:8.1f}")
