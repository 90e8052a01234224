"""
Two-stage k-means on synthetic blobs
====================================

Run plain Lloyd k-means and the two-stage variant on the same data and
from the same initial centers, then compare iteration counts, distance
computations and the final within-cluster sum of squares.
"""

import numpy as np

from twostage_kmeans import (
    BlobSpec,
    StageParams,
    TwoStageConfig,
    generate_blobs,
    match_centers,
    run_baseline,
    run_two_stage,
)

# 50,000 points in 5 dimensions, four well separated clusters
ds, true_labels, true_centers = generate_blobs(
    BlobSpec(n=50_000, d=5, k=4, spread=1.0, separation=10.0, seed=1)
)
print(f"dataset: n={ds.n}, d={ds.d}")

###############################################################################
# Plain k-means: random rows as initial centers, stop when no center moves
# more than 1e-6 (squared distance).
base = run_baseline(ds, k=4, params=StageParams(tolerance=1e-6), seed=5)
print(f"baseline:  {base.iters:3d} iterations, {base.distance_count:>10,d} distances, "
      f"WCSS {base.wcss:.2f}")

###############################################################################
# Two-stage: iterate on a 10% sample down to 1e-3, then hand the centers to
# a full-data run down to 1e-6. With the same seed the fast stage starts
# from exactly the same centers as the baseline above.
res = run_two_stage(ds, TwoStageConfig(k=4, sample_fraction=0.10, seed=5))
print(f"fast:      {res.fast.iters:3d} iterations, {res.fast.distance_count:>10,d} distances")
print(f"slow:      {res.slow.iters:3d} iterations, {res.slow.distance_count:>10,d} distances, "
      f"WCSS {res.wcss:.2f}")
print(f"WCSS ratio two-stage / baseline: {res.wcss / base.wcss:.8f}")

###############################################################################
# The slow stage starts exactly where the fast stage stopped.
assert np.array_equal(res.slow.trace[0].start_centers, res.fast.centers)

# Compare with the generating centers. A large distance means the random
# start put two centers inside one cluster and left another cluster with
# none; Lloyd iterations never leave that local minimum, and the split
# cluster converges slowly because its two halves can rotate freely.
_, dist = match_centers(true_centers, res.centers)
print(f"largest distance from a generating center: {dist:.3f}")
