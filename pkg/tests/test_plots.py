import numpy as np
import pytest

from twostage_kmeans import plots
from twostage_kmeans.dataset import BlobSpec, generate_blobs
from twostage_kmeans.engine import write_trace_csv
from twostage_kmeans.two_stage import TwoStageConfig, run_two_stage


@pytest.fixture(scope="module")
def blob_trace(tmp_path_factory):
    d = tmp_path_factory.mktemp("trace")
    ds = generate_blobs(BlobSpec(n=20_000, d=2, k=3, seed=1))[0]
    res = run_two_stage(ds, TwoStageConfig(k=3, sample_fraction=0.1, seed=2))
    write_trace_csv(res.trace, d / "c.csv", d / "s.csv")
    return res, d / "c.csv", d / "s.csv"


def test_slow_series_starts_at_fast_final_value(blob_trace):
    res, cpath, _ = blob_trace
    rows = plots.read_center_trace(cpath)
    for c in range(3):
        for j in range(2):
            series = plots.coordinate_series(rows, c, j)
            fx, fy = series["fast"]
            sx, sy = series["slow"]
            assert sx[0] == fx[-1] and sy[0] == fy[-1]
            assert fy[-1] == res.fast.centers[c, j]
            assert sy[-1] == res.slow.centers[c, j]


def test_series_lengths_follow_iteration_counts(blob_trace):
    res, cpath, _ = blob_trace
    series = plots.coordinate_series(plots.read_center_trace(cpath), 0, 0)
    # the slow series carries one extra point: the shared hand-off
    assert len(series["fast"][0]) == res.fast.iters
    assert len(series["slow"][0]) == res.slow.iters + 1


def test_fast_stage_usually_iterates_more():
    fast, slow = [], []
    for seed in range(20):
        ds = generate_blobs(BlobSpec(n=20_000, d=2, k=2, separation=2, seed=seed))[0]
        res = run_two_stage(ds, TwoStageConfig(k=2, sample_fraction=0.1, seed=seed))
        fast.append(res.fast.iters)
        slow.append(res.slow.iters)
    assert np.median(fast) > np.median(slow)


def test_svg_output_is_deterministic(blob_trace, tmp_path):
    _, cpath, spath = blob_trace
    rows = plots.read_center_trace(cpath)
    stats = plots.read_stats_trace(spath)
    for name, fn in (("coord", lambda o: plots.plot_coordinate(rows, o, 1, 0)),
                     ("path", lambda o: plots.plot_center_path(rows, o)),
                     ("shift", lambda o: plots.plot_shift(stats, o))):
        a, b = tmp_path / f"{name}a.svg", tmp_path / f"{name}b.svg"
        fn(a)
        fn(b)
        assert a.read_bytes() == b.read_bytes()


def test_malformed_trace(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("stage,iteration,center_id,dim,value\nfast,1,0\n")
    with pytest.raises(plots.TraceError, match="fields"):
        plots.read_center_trace(p)
    p.write_text("a,b\n")
    with pytest.raises(plots.TraceError, match="header"):
        plots.read_center_trace(p)
    p.write_text("stage,iteration,center_id,dim,value\n")
    with pytest.raises(plots.TraceError, match="empty"):
        plots.read_center_trace(p)


def test_out_of_range_dims(blob_trace, tmp_path):
    rows = plots.read_center_trace(blob_trace[1])
    with pytest.raises(plots.TraceError):
        plots.coordinate_series(rows, 0, 5)
    with pytest.raises(plots.TraceError):
        plots.plot_center_path(rows, tmp_path / "x.svg", dims=(0, 3))
