"""
Layer file: CSV untuk FuncSeries, JSON (pydantic) untuk operator, bank,
kurva dan manifest, plus checksum SHA-256.
"""

import csv
import hashlib
import io
import logging
from pathlib import Path
from typing import Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel

from src.errors import DimensionError, FormatError
from src.opcore import GridContext
from src.spectral import FuncSeries

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)
PathLike = Union[str, Path]


def format_float(value: float) -> str:
    """Presisi double penuh (repr round-trip)"""
    return repr(float(value))


def series_to_csv(series: FuncSeries) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"m={series.grid.m}", f"T={series.T}"])
    for row in series.data:
        writer.writerow([format_float(v) for v in row])
    return buffer.getvalue()


def series_from_csv(text: str) -> FuncSeries:
    """Parse CSV dengan header `m=<int>,T=<int>` lalu T baris m float"""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty series CSV")
    if len(header) != 2 or not header[0].startswith("m=") or not header[1].startswith("T="):
        raise FormatError(f"series CSV header must be 'm=<int>,T=<int>', got {','.join(header)!r}")
    try:
        m = int(header[0][2:])
        T = int(header[1][2:])
    except ValueError:
        raise FormatError(f"series CSV header has non-integer sizes: {','.join(header)!r}")
    rows = [row for row in reader if row]
    if len(rows) != T:
        raise DimensionError(f"series CSV declares T={T} but has {len(rows)} rows")
    for idx, row in enumerate(rows):
        if len(row) != m:
            raise DimensionError(f"series CSV row {idx} has {len(row)} values, expected m={m}")
    try:
        data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as e:
        raise FormatError(f"series CSV has a non-numeric value: {e}")
    return FuncSeries(data.reshape(T, m), GridContext(m))


def write_series(series: FuncSeries, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(series_to_csv(series))
    logger.info(f"✓ Series written: {path} (T={series.T}, m={series.grid.m})")
    return path


def read_series(path: PathLike) -> FuncSeries:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"series file not found: {path}")
    return series_from_csv(path.read_text())


def write_model(model: BaseModel, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(model.model_dump_json(indent=2))
    logger.info(f"✓ JSON written: {path}")
    return path


def read_model(cls: Type[ModelT], path: PathLike) -> ModelT:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"JSON file not found: {path}")
    return cls.model_validate_json(path.read_text())


def write_bytes(data: bytes, path: PathLike) -> Path:
    path = Path(path)
    path.write_bytes(data)
    logger.info(f"✓ Artifact written: {path}")
    return path


def sha256_file(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
