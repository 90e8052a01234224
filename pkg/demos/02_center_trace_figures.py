"""
Following the centers through both stages
=========================================

Export the per-iteration trace of a two-stage run and draw three views of
it: one coordinate against iteration, the path of every center in the
plane, and the largest center shift on a log axis.
"""

import os

from twostage_kmeans import BlobSpec, TwoStageConfig, generate_blobs, run_two_stage, write_trace_csv
from twostage_kmeans import plots

out = os.environ.get("DEMO_OUT", "demo_output")
os.makedirs(out, exist_ok=True)

# 800 points, 2-d, three clusters that overlap a little
ds, _, _ = generate_blobs(BlobSpec(n=800, d=2, k=3, spread=1.5, separation=4.0, seed=3))
res = run_two_stage(ds, TwoStageConfig(k=3, sample_fraction=0.10, seed=8))
print(f"fast stage: {res.fast.iters} iterations on {len(res.sample_indices)} points")
print(f"slow stage: {res.slow.iters} iterations on {ds.n} points")

centers_csv = os.path.join(out, "trace_centers.csv")
stats_csv = os.path.join(out, "trace_stats.csv")
write_trace_csv(res.trace, centers_csv, stats_csv)

rows = plots.read_center_trace(centers_csv)
stats = plots.read_stats_trace(stats_csv)

###############################################################################
# One coordinate of one center: the slow series begins on the last fast
# value.
plots.plot_coordinate(rows, os.path.join(out, "coordinate.svg"), center=0, dim=0)

###############################################################################
# All three centers in the plane: squares for the fast stage, diamonds for
# the slow stage.
plots.plot_center_path(rows, os.path.join(out, "paths.svg"), dims=(0, 1))

###############################################################################
# Largest squared center shift per iteration.
plots.plot_shift(stats, os.path.join(out, "shift.svg"))

for rec in res.trace:
    print(f"{rec.stage:>4} {rec.iteration:2d}  wcss={rec.wcss:10.3f}  shift={rec.max_shift:.2e}")
print("figures written to", out)
