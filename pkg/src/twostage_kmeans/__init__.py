"""Lloyd's k-means and a two-stage (sample first, then full data) variant."""

from .dataset import BlobSpec, Dataset, DatasetError, generate_blobs, load_csv, save_csv
from .engine import (
    ClusterResult,
    IterationRecord,
    StageParams,
    assign_points,
    lloyd_step,
    run_lloyd,
    squared_distance,
    update_centers,
    wcss,
    write_trace_csv,
)
from .two_stage import (
    EmptyClusterWarning,
    TwoStageConfig,
    TwoStageResult,
    init_centers_random,
    match_centers,
    run_baseline,
    run_two_stage,
    sample_subset,
)
from .bench import (
    BenchConfig,
    BenchReport,
    emit_report,
    predicted_cost,
    predicted_two_stage_cost,
    run_benchmark,
)

__version__ = "0.1.0"
