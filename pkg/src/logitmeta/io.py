"""Flat-file formats.

All floats are written with 17 significant digits so files round-trip
exactly.  Matrices and distributions start with a ``dim,<N>`` header row and
are stored row-major.
"""
from __future__ import annotations

import csv
import io
import os
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

PathLike = Union[str, os.PathLike]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def _read(path_or_text: PathLike) -> list:
    text = str(path_or_text)
    if "\n" not in text and Path(text).exists():
        text = Path(text).read_text()
    return [row for row in csv.reader(io.StringIO(text)) if row]


def _dim(rows: list) -> int:
    if not rows or rows[0][0] != "dim":
        raise ValueError("missing 'dim,<N>' header")
    return int(rows[0][1])


def write_distribution(path: PathLike, mu: np.ndarray) -> Path:
    mu = np.asarray(mu, dtype=float)
    return write_rows(path, ["dim", str(mu.shape[0])], ([v] for v in mu))


def read_distribution(path_or_text: PathLike) -> np.ndarray:
    rows = _read(path_or_text)
    n = _dim(rows)
    values = np.array([float(r[0]) for r in rows[1:]])
    if values.shape[0] != n:
        raise ValueError(f"expected {n} entries, found {values.shape[0]}")
    return values


def write_matrix(path: PathLike, P: np.ndarray) -> Path:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("matrix must be square")
    return write_rows(path, ["dim", str(P.shape[0])], P.tolist())


def read_matrix(path_or_text: PathLike) -> np.ndarray:
    rows = _read(path_or_text)
    n = _dim(rows)
    body = rows[1:]
    if len(body) != n or any(len(r) != n for r in body):
        raise ValueError(f"expected a {n}x{n} body")
    return np.array([[float(v) for v in r] for r in body])


def write_curve(path: PathLike, values: np.ndarray, column: str, start: int = 0) -> Path:
    """Two-column ``(t, <column>)`` table, e.g. drift curves or hitting CDFs."""
    return write_rows(path, ["t", column], ((start + t, v) for t, v in enumerate(values)))


def read_curve(path_or_text: PathLike) -> tuple[np.ndarray, np.ndarray]:
    rows = _read(path_or_text)
    body = rows[1:]
    return np.array([int(r[0]) for r in body]), np.array([float(r[1]) for r in body])


def write_trajectories(path: PathLike, traj) -> Path:
    times = traj.times()
    indices = traj.state_indices()
    rows = ((r, int(t), idx) for r, seq in enumerate(indices) for t, idx in zip(times, seq))
    return write_rows(path, ["replica", "t", "stateIndex"], rows)


def write_hitting_samples(path: PathLike, samples) -> Path:
    rows = (
        (r, samples.cap if c else int(t), bool(c))
        for r, (t, c) in enumerate(zip(samples.tau, samples.censored))
    )
    return write_rows(path, ["replica", "tau", "censored"], rows)


def read_hitting_samples(path_or_text: PathLike) -> tuple[np.ndarray, np.ndarray]:
    rows = _read(path_or_text)[1:]
    tau = np.array([int(r[1]) for r in rows], dtype=np.int64)
    cens = np.array([r[2] == "1" for r in rows])
    return tau, cens
