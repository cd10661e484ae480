import hashlib

import numpy as np
import pytest

from src.errors import DimensionError, FormatError
from src.models import ProcessSpec
from src.spectral import FuncSeries
from src.storage import (
    format_float, read_model, read_series, series_from_csv, series_to_csv, sha256_file, write_bytes,
    write_model, write_series,
)


def test_series_csv_exact(grid16, rng, tmp_path):
    """T1: CSV menyimpan presisi double penuh"""
    series = FuncSeries(rng.standard_normal((5, 16)) * 1e-7, grid16)
    path = write_series(series, tmp_path / "X.csv")
    restored = read_series(path)
    assert restored.T == 5
    assert restored.grid.m == 16
    assert np.array_equal(restored.data, series.data)
    assert path.read_text().splitlines()[0] == "m=16,T=5"


def test_format_float_roundtrip():
    for value in (0.1, 1e-300, -2.5e17, 1 / 3):
        assert float(format_float(value)) == value


def test_series_csv_header_errors():
    """T2: header salah -> FormatError"""
    with pytest.raises(FormatError):
        series_from_csv("")
    with pytest.raises(FormatError):
        series_from_csv("T=2,m=1\n0\n0\n")
    with pytest.raises(FormatError):
        series_from_csv("m=a,T=2\n0\n0\n")


def test_series_csv_dimension_errors():
    """T3: jumlah baris / kolom tidak cocok -> DimensionError"""
    with pytest.raises(DimensionError):
        series_from_csv("m=2,T=3\n0,1\n1,2\n")
    with pytest.raises(DimensionError):
        series_from_csv("m=2,T=2\n0,1\n1\n")


def test_series_csv_non_numeric():
    with pytest.raises(FormatError):
        series_from_csv("m=2,T=2\n0,1\n1,abc\n")


def test_read_missing_files(tmp_path):
    with pytest.raises(FormatError):
        read_series(tmp_path / "missing.csv")
    with pytest.raises(FormatError):
        read_model(ProcessSpec, tmp_path / "missing.json")


def test_model_json_roundtrip(tmp_path):
    spec = ProcessSpec(J=4, rho=-0.3, filter_lags={-2: 0.1, 0: 1.0})
    path = write_model(spec, tmp_path / "spec.json")
    assert read_model(ProcessSpec, path) == spec


def test_series_to_csv_stable(grid16):
    series = FuncSeries(np.ones((2, 16)), grid16)
    assert series_to_csv(series) == series_to_csv(series)


def test_sha256_file(tmp_path):
    path = write_bytes(b"ftsreg", tmp_path / "blob.bin")
    assert sha256_file(path) == hashlib.sha256(b"ftsreg").hexdigest()
