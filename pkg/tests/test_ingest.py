"""Tests for CSV loading and densification."""

import os
from pathlib import Path

import numpy as np
import pytest

from core.errors import ConfigError, InsufficientData, IoError, ParseError
from ingest.csv_loader import RawRatingsFile, load_csv
from ingest.densify import densify


@pytest.fixture
def write_csv(tmp_path):
    def _write(text: str, name: str = "ratings.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


class TestLoadCsv:

    def test_plain_records(self, write_csv):
        raw = load_csv(write_csv("u1,i3,3.0\nu1,i6,2.0"))
        assert len(raw) == 2
        assert list(raw) == [("u1", "i3", 3.0), ("u1", "i6", 2.0)]

    def test_header_skipped(self, write_csv):
        raw = load_csv(write_csv("user,item,rating\nu1,i1,4\n"))
        assert list(raw) == [("u1", "i1", 4.0)]

    def test_bad_rating_reports_line(self, write_csv):
        with pytest.raises(ParseError) as exc:
            load_csv(write_csv("u1,i3,3.0\nu1,i1,abc\n"))
        assert exc.value.line == 2
        assert "line 2" in str(exc.value)

    def test_bad_rating_after_header(self, write_csv):
        with pytest.raises(ParseError) as exc:
            load_csv(write_csv("user,item,rating\nu1,i1,4\nu2,i1,nan\n"))
        assert exc.value.line == 3

    def test_blank_lines_ignored(self, write_csv):
        raw = load_csv(write_csv("u1,i1,1\n\nu2,i1,2\n"))
        assert len(raw) == 2

    def test_missing_id(self, write_csv):
        with pytest.raises(ParseError):
            load_csv(write_csv("u1,,3\n"))

    def test_wrong_field_count(self, write_csv):
        with pytest.raises(ParseError):
            load_csv(write_csv("u1,i1\nu2,i2\n"))

    def test_extra_field_reports_line(self, write_csv):
        with pytest.raises(ParseError) as exc:
            load_csv(write_csv("u1,i1,3\nu2,i2,4\nu3,i3,5,9\n"))
        assert exc.value.line == 3
        assert "line 3" in str(exc.value)

    def test_empty_file(self, write_csv):
        assert len(load_csv(write_csv(""))) == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_csv(tmp_path / "nope.csv")

    def test_ids_kept_as_strings(self, write_csv):
        raw = load_csv(write_csv("007,42,5\n"))
        assert list(raw) == [("007", "42", 5.0)]


def grid(n_users: int, n_items: int) -> RawRatingsFile:
    return RawRatingsFile.from_records(
        (f"u{i}", f"i{j}", float((i + j) % 5 + 1)) for i in range(n_users) for j in range(n_items)
    )


class TestDensify:

    def test_full_grid(self):
        gt = densify(grid(4, 8), top_users=4, top_items=8)
        assert gt.shape == (4, 8)
        assert gt.fill_rate == 1.0

    def test_popular_item_retained(self):
        raw = RawRatingsFile.from_records([
            ("alice", "a", 5.0), ("alice", "b", 3.0), ("alice", "c", 1.0),
            ("bob", "a", 4.0),
        ])
        gt = densify(raw, top_users=10, top_items=1)
        assert gt.item_ids == ("a",)
        assert set(gt.user_ids) == {"alice", "bob"}
        assert gt.fill_rate == 1.0

    def test_dimensions_bounded(self):
        gt = densify(grid(10, 12), top_users=3, top_items=5)
        assert gt.shape[0] <= 3
        assert gt.shape[1] <= 5

    def test_values_and_mask(self):
        raw = RawRatingsFile.from_records([
            ("u1", "x", 5.0), ("u1", "y", 2.0), ("u2", "x", 4.0),
        ])
        gt = densify(raw, top_users=2, top_items=2)
        assert gt.user_ids == ("u1", "u2")
        assert gt.item_ids == ("x", "y")
        assert gt.values[0].tolist() == [5.0, 2.0]
        assert gt.available.tolist() == [[True, True], [True, False]]
        assert gt.fill_rate == pytest.approx(0.75)

    def test_duplicates_keep_last(self):
        raw = RawRatingsFile.from_records([("u1", "x", 1.0), ("u1", "x", 4.0)])
        gt = densify(raw, top_users=1, top_items=1)
        assert gt.values[0, 0] == 4.0

    def test_ties_broken_by_id(self):
        raw = RawRatingsFile.from_records([("u1", "b", 1.0), ("u1", "a", 2.0)])
        assert densify(raw, top_users=1, top_items=1).item_ids == ("a",)

    def test_noise_sigma(self):
        assert densify(grid(2, 2), 2, 2, noise_sigma=0.4).noise_sigma == pytest.approx(0.4)

    def test_empty_raw(self):
        with pytest.raises(InsufficientData):
            densify(RawRatingsFile.from_records([]), 5, 5)

    def test_invalid_limits(self):
        with pytest.raises(ConfigError):
            densify(grid(2, 2), 0, 2)

    def test_round_trip_through_csv(self, tmp_path):
        gt = densify(grid(3, 4), 3, 4)
        again = densify(load_csv(gt.to_csv(tmp_path / "gt.csv")), 3, 4)
        assert np.array_equal(np.sort(gt.values, axis=None), np.sort(again.values, axis=None))


@pytest.mark.integration
class TestExternalDataset:
    """Fill-rate check on a real ratings log, e.g. BEWARE_RATINGS_CSV=netflix.csv."""

    @pytest.fixture
    def ratings_path(self):
        path = os.environ.get("BEWARE_RATINGS_CSV")
        if not path or not Path(path).is_file():
            pytest.skip("BEWARE_RATINGS_CSV not set or missing")
        return Path(path)

    def test_densified_fill_rate(self, ratings_path):
        gt = densify(load_csv(ratings_path), top_users=5000, top_items=250)
        assert gt.shape[0] <= 5000 and gt.shape[1] <= 250
        assert 0.8 <= gt.fill_rate <= 0.9
