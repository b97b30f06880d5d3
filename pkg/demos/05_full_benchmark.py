"""
A complete benchmark run
========================

Drive the full protocol on a small synthetic corpus: seeded subset and
80/20 split, min-max scaling fitted on the training split, 5-fold
cross-validation for two quantum configurations and all three classical
baselines, hold-out scoring, and a report tree of JSON/CSV files.

Everything except wall-clock timings is reproducible bit for bit from
the seed.
"""

import json
import tempfile
from pathlib import Path

from qnnbench import experiment_config_from_dict, run_benchmark

out_dir = Path(tempfile.mkdtemp(prefix="qnnbench_demo_"))
config = experiment_config_from_dict(
    {
        "seed": 17,
        "sizes": [100, 200],
        "models": ["QNN-1", "QNN-6", "kNN", "DTR", "LR"],
        "data": {"synthetic": True, "corpus_size": 400},
        "optimizer": {"max_iter": 25, "grad_tol": 1e-8, "memory": 10},
        "output_dir": str(out_dir),
    }
)
report = run_benchmark(config)

print(f"{'model':7s} {'size':>5s} {'cv R2':>14s} {'cv RMSE kW':>16s} {'holdout R2':>11s}")
for result in report.results:
    print(
        f"{result.model:7s} {result.size:5d} "
        f"{result.cv_mean_r2:+.3f} +/- {result.cv_std_r2:.3f} "
        f"{result.cv_mean_rmse:9.1f} +/- {result.cv_std_rmse:5.1f} "
        f"{result.holdout.r2:+11.3f}"
    )

print("\nreport tree under", out_dir)
for path in sorted(out_dir.rglob("*")):
    if path.is_file():
        print("  ", path.relative_to(out_dir))

summary = json.loads((out_dir / "summary.json").read_text())
print("\ngate counts from the summary:", summary["gate_counts"])
