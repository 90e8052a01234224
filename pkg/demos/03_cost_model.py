"""
Counting distance computations
==============================

The cost of Lloyd's algorithm is k * q * n distance evaluations for k
centers, q assignment passes and n points. The two-stage variant pays
k * q_fast * n_fast on the sample plus k * q_slow * n on the full data.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from twostage_kmeans import (
    BlobSpec,
    StageParams,
    TwoStageConfig,
    generate_blobs,
    predicted_cost,
    predicted_two_stage_cost,
    run_baseline,
    run_two_stage,
)
from twostage_kmeans.bench import observed_cost

# 1000 points, 4 clusters, 20 iterations
print("plain k-means:", predicted_cost(4, 20, 1000))
# 18 fast iterations on 100 points, then 2 slow iterations on all 1000
print("two-stage:    ", predicted_two_stage_cost(4, 18, 100, 2, 1000))

###############################################################################
# The engine counts every distance it evaluates, so the model can be checked
# against a real run. Each run makes one pass per iteration plus a final
# relabelling pass.
ds = generate_blobs(BlobSpec(n=20_000, d=3, k=4, seed=2))[0]
base = run_baseline(ds, 4, StageParams(1e-6), seed=1)
two = run_two_stage(ds, TwoStageConfig(k=4, sample_fraction=0.1, seed=1))
print("baseline counted", base.distance_count, "model", observed_cost(base, ds.n))
print("two-stage counted", two.distance_count, "model",
      observed_cost(two, ds.n, n_fast=len(two.sample_indices)))

###############################################################################
# Cost against fast-stage iterations for a 100-point and a 500-point sample.
out = os.environ.get("DEMO_OUT", "demo_output")
os.makedirs(out, exist_ok=True)
q_fast = range(1, 51)
fig, ax = plt.subplots(figsize=(6, 4))
ax.axhline(predicted_cost(4, 20, 1000), color="black", label="k-means, q = 20")
for n_fast, style in ((100, "-"), (500, "--")):
    for q_slow in (2, 5):
        ax.plot(q_fast, [predicted_two_stage_cost(4, q, n_fast, q_slow, 1000) for q in q_fast],
                style, label=f"n_fast={n_fast}, q_slow={q_slow}")
ax.set_xlabel("fast-stage iterations")
ax.set_ylabel("distance computations")
ax.legend(fontsize=8)
fig.savefig(os.path.join(out, "cost_model.svg"), metadata={"Date": None})
