"""
A small speed-up table
======================

Time plain and two-stage k-means over a grid of sample fractions and
tolerances. Absolute times depend on the machine; the grid layout matches
the usual speed-up table: tolerances down the side, fractions across.
"""

import os

from twostage_kmeans import BenchConfig, BlobSpec, emit_report, run_benchmark

cfg = BenchConfig(
    k=4,
    blobs=BlobSpec(n=100_000, d=10, k=4, spread=1.0, separation=10.0, seed=0),
    sample_fractions=(0.10, 0.15, 0.20, 0.30, 0.40),
    tolerances=(1e-1, 1e-2, 1e-3),
    repetitions=3,
    seed=0,
)
report = run_benchmark(cfg, progress=lambda c: print(
    f"  {c.fraction:.0%} / {c.tolerance:.0e}: {c.speedup:.2f}x", flush=True))
print(emit_report(report, "table"))

out = os.environ.get("DEMO_OUT", "demo_output")
os.makedirs(out, exist_ok=True)
with open(os.path.join(out, "bench.json"), "w") as fh:
    fh.write(emit_report(report, "json"))
