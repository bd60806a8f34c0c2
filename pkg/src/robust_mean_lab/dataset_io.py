# SPDX-License-Identifier: MIT
# Copyright (c) 2025 Robust Mean Lab Contributors

"""
Dataset file codecs.

Two formats are supported:
    - CSV: one sample per line, d comma-separated floats, no header
    - RMD1 binary: magic ``RMD1``, uint32 n, uint32 d (little-endian), then
      n*d little-endian float64 values in row-major order

read_dataset() sniffs the format from the first four bytes.
"""

import struct
from pathlib import Path
from typing import Union

import numpy as np

from .constants import DATASET_MAGIC
from .core import Dataset, DatasetLike, as_dataset
from .errors import DatasetFormatError, RobustMeanLabError
from .utils import log_debug

HEADER = struct.Struct("<4sII")
FORMAT_CSV = "csv"
FORMAT_BINARY = "rmd1"

PathLike = Union[str, Path]


def _read_csv(path: Path) -> Dataset:
    try:
        rows = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise DatasetFormatError(f"{path}: malformed CSV ({e})") from e
    try:
        return Dataset(rows)
    except RobustMeanLabError as e:
        raise DatasetFormatError(f"{path}: {e}") from e


def _read_binary(path: Path) -> Dataset:
    payload = path.read_bytes()
    if len(payload) < HEADER.size:
        raise DatasetFormatError(f"{path}: truncated header")
    magic, n, d = HEADER.unpack_from(payload)
    if magic != DATASET_MAGIC:
        raise DatasetFormatError(f"{path}: bad magic {magic!r}")
    expected = HEADER.size + 8 * n * d
    if len(payload) != expected:
        raise DatasetFormatError(f"{path}: expected {expected} bytes, found {len(payload)}")
    values = np.frombuffer(payload, dtype="<f8", offset=HEADER.size, count=n * d)
    try:
        return Dataset(values.reshape(n, d))
    except RobustMeanLabError as e:
        raise DatasetFormatError(f"{path}: {e}") from e


def read_dataset(path: PathLike) -> Dataset:
    """Read a CSV or RMD1 dataset file.

    Raises:
        DatasetFormatError: If the file is malformed, truncated or ragged
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            head = f.read(len(DATASET_MAGIC))
    except OSError as e:
        raise DatasetFormatError(f"{path}: {e}") from e

    if head == DATASET_MAGIC:
        dataset = _read_binary(path)
    else:
        dataset = _read_csv(path)
    log_debug(f"read dataset {path} n={dataset.n} d={dataset.d}")
    return dataset


def write_dataset(X: DatasetLike, path: PathLike, fmt: str = FORMAT_CSV) -> Path:
    """Write a dataset as CSV (17 significant digits, lossless) or RMD1."""
    dataset = as_dataset(X)
    path = Path(path)
    if fmt == FORMAT_CSV:
        np.savetxt(path, dataset.rows, delimiter=",", fmt="%.17g")
    elif fmt == FORMAT_BINARY:
        header = HEADER.pack(DATASET_MAGIC, dataset.n, dataset.d)
        path.write_bytes(header + dataset.rows.astype("<f8").tobytes(order="C"))
    else:
        raise DatasetFormatError(f"unknown dataset format {fmt!r}")
    log_debug(f"wrote dataset {path} n={dataset.n} d={dataset.d} fmt={fmt}")
    return path
