import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from twostage_kmeans.dataset import (
    BlobSpec,
    Dataset,
    DatasetError,
    generate_blobs,
    load_csv,
    save_csv,
)
from twostage_kmeans.two_stage import match_centers

from . import oracle


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_bytes(text.encode())
    return p


def test_load_simple(tmp_path):
    ds = load_csv(write(tmp_path, "0,0\n1,1\n"))
    assert (ds.n, ds.d) == (2, 2)
    np.testing.assert_array_equal(ds.points, [[0, 0], [1, 1]])


def test_load_header_skipped(tmp_path):
    ds = load_csv(write(tmp_path, "x,y\n0,0\n"), has_header=True)
    assert (ds.n, ds.d) == (1, 2)


def test_load_crlf(tmp_path):
    ds = load_csv(write(tmp_path, "1,2\r\n3,4\r\n"))
    np.testing.assert_array_equal(ds.points, [[1, 2], [3, 4]])


@pytest.mark.parametrize(
    "text, header, message",
    [
        ("0,a\n", False, "non-numeric field, line 1"),
        ("0,1\n2\n", False, "ragged row: expected 2 fields, got 1, line 2"),
        ("x,y\n", True, "no data rows"),
        ("", False, "no data rows"),
        ("1,2\nnan,3\n", False, "non-finite field, line 2"),
    ],
)
def test_load_errors(tmp_path, text, header, message):
    with pytest.raises(DatasetError, match=message):
        load_csv(write(tmp_path, text), has_header=header)


def test_load_missing_file(tmp_path):
    with pytest.raises(DatasetError, match="no such file"):
        load_csv(tmp_path / "nope.csv")


def test_save_renders_rows(tmp_path):
    p = tmp_path / "out.csv"
    save_csv(Dataset([[1, 2]]), p)
    assert p.read_text() == "1.0,2.0\n"
    np.testing.assert_array_equal(load_csv(p).points, [[1, 2]])


def test_save_dyadic_round_trip(tmp_path):
    p = tmp_path / "out.csv"
    save_csv(Dataset([[0.5, 0.25]]), p)
    assert load_csv(p).points.tolist() == [[0.5, 0.25]]


def test_empty_dataset_rejected():
    with pytest.raises(DatasetError):
        Dataset(np.empty((0, 2)))


def test_dataset_is_read_only():
    ds = Dataset([[1.0, 2.0]])
    with pytest.raises(ValueError):
        ds.points[0, 0] = 5.0


@settings(max_examples=50, deadline=None)
@given(
    arrays(
        np.float64,
        st.tuples(st.integers(1, 8), st.integers(1, 4)),
        elements=st.floats(allow_nan=False, allow_infinity=False, width=64),
    )
)
def test_csv_round_trip_is_exact(tmp_path_factory, values):
    p = tmp_path_factory.mktemp("rt") / "d.csv"
    save_csv(Dataset(values), p)
    back = load_csv(p).points
    assert back.tobytes() == Dataset(values).points.tobytes()


# ---------------------------------------------------------------- generator


def test_blob_spec_validation():
    with pytest.raises(ValueError):
        BlobSpec(n=2, d=1, k=3)
    with pytest.raises(ValueError):
        BlobSpec(n=5, d=1, k=0)
    with pytest.raises(ValueError):
        BlobSpec(n=5, d=1, k=2, spread=0)
    with pytest.raises(ValueError):
        BlobSpec(n=5, d=1, k=2, separation=-1)


def test_blobs_degenerate_spread():
    ds, labels, centers = generate_blobs(
        BlobSpec(n=4, d=1, k=2, spread=1e-12, separation=10, seed=3)
    )
    assert abs(centers[0, 0] - centers[1, 0]) >= 10
    for c in range(2):
        vals = ds.points[labels == c, 0]
        assert len(vals) == 2
        assert np.ptp(vals) < 1e-9
        assert abs(vals[0] - centers[c, 0]) < 1e-9


def test_blobs_deterministic():
    spec = BlobSpec(n=500, d=3, k=4, spread=0.5, separation=5, seed=11)
    a, b = generate_blobs(spec), generate_blobs(spec)
    for x, y in zip(a, b):
        x = x.points if isinstance(x, Dataset) else x
        y = y.points if isinstance(y, Dataset) else y
        assert x.tobytes() == y.tobytes()


def test_blobs_seed_changes_output():
    a = generate_blobs(BlobSpec(n=50, d=2, k=2, seed=1))[0].points
    b = generate_blobs(BlobSpec(n=50, d=2, k=2, seed=2))[0].points
    assert not np.array_equal(a, b)


def test_blob_centers_respect_separation():
    _, labels, centers = generate_blobs(BlobSpec(n=60, d=2, k=6, separation=7, seed=5))
    for i in range(6):
        for j in range(i + 1, 6):
            assert np.linalg.norm(centers[i] - centers[j]) >= 7
    assert np.bincount(labels).tolist() == [10] * 6


def test_unplaceable_centers_error():
    # at most 11 centers 10 apart fit on [0, 100]
    with pytest.raises(DatasetError, match="could not place"):
        generate_blobs(BlobSpec(n=30, d=1, k=30, separation=10, seed=0))


def test_oracle_recovers_blob_centers():
    ds, labels, true_centers = generate_blobs(
        BlobSpec(n=10_000, d=2, k=3, spread=1, separation=10, seed=7)
    )
    pts = ds.points.tolist()
    # start the reference Lloyd from the first member of each cluster
    init = [pts[int(np.flatnonzero(labels == c)[0])] for c in range(3)]
    centers, _, _ = oracle.lloyd_fixed_point(pts, init)
    _, dist = match_centers(true_centers, np.array(centers))
    assert dist < 0.1
