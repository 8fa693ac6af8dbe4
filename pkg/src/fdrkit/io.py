"""CSV and JSON readers/writers for datasets, bases, estimates, benchmarks.

Floating-point cells are written with 17 significant digits, which
round-trips IEEE doubles bit-exactly through the paired readers.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .exceptions import DatasetFormatError, ParameterError
from .fda import Dataset, Grid

_FLOAT_FORMAT = ".17g"


def format_float(x: float) -> str:
    return format(float(x), _FLOAT_FORMAT)


def _parse_float(token: str, row: int, column: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise DatasetFormatError(
            f"could not parse {token!r} as a number", row=row, column=column
        ) from None


def dataset_header(n_points: int) -> list[str]:
    return ["y"] + [f"t_{j}" for j in range(n_points)]


def write_dataset(path, ds: Dataset):
    """Write a dataset as CSV: column y, then t_0 .. t_{p-1}."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset_header(ds.grid.size))
        for yi, row in zip(ds.responses, ds.values):
            writer.writerow([format_float(yi)] + [format_float(v) for v in row])


def read_dataset(path, grid: Grid | None = None) -> Dataset:
    """Read a dataset CSV written by :func:`write_dataset`.

    The grid defaults to uniform on [0, 1] with as many points as there
    are t-columns.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("dataset file is empty", row=1) from None
        expected = dataset_header(len(header) - 1)
        if len(header) < 2 or header != expected:
            raise DatasetFormatError(
                "header must be 'y' followed by consecutive 't_<index>' columns",
                row=1,
            )
        p = len(header) - 1
        ys, rows = [], []
        for lineno, line in enumerate(reader, start=2):
            if len(line) != p + 1:
                raise DatasetFormatError(
                    f"expected {p + 1} cells, found {len(line)}", row=lineno
                )
            ys.append(_parse_float(line[0], lineno, 1))
            rows.append(
                [_parse_float(tok, lineno, j + 2) for j, tok in enumerate(line[1:])]
            )
    if grid is None:
        grid = Grid.uniform(p)
    elif grid.size != p:
        raise ParameterError(f"grid has {grid.size} points but file has {p} columns")
    return Dataset(grid, np.array(rows), np.array(ys))


def write_manifest(path, model: str, seed: int, n: int, noise_sd: float, grid: Grid):
    """JSON manifest recording how a simulated dataset was produced."""
    payload = {
        "model": model,
        "seed": int(seed),
        "n": int(n),
        "noise_sd": float(noise_sd),
        "grid": {
            "points": [float(v) for v in grid.points],
            "weights": [float(v) for v in grid.weights],
        },
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_manifest(path) -> dict:
    payload = json.loads(Path(path).read_text())
    grid = payload.get("grid")
    if grid is not None:
        payload["grid"] = Grid(np.array(grid["points"]), np.array(grid["weights"]))
    return payload


def write_basis_csv(path, basis):
    """Basis functions as CSV: grid column t, then one column per function."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"phi_{j + 1}" for j in range(basis.size)])
        for i, t in enumerate(basis.grid.points):
            writer.writerow(
                [format_float(t)] + [format_float(v) for v in basis.functions[:, i]]
            )


def write_directions_csv(path, estimate):
    """Estimated directions as CSV: grid column t, then one column per direction."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t"] + [f"beta_{j + 1}" for j in range(estimate.n_directions)]
        )
        for i, t in enumerate(estimate.grid.points):
            writer.writerow(
                [format_float(t)]
                + [format_float(v) for v in estimate.directions[:, i]]
            )


def read_directions_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back a directions CSV; returns (grid points, direction rows)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        k = len(header) - 1
        ts, cols = [], []
        for lineno, line in enumerate(reader, start=2):
            ts.append(_parse_float(line[0], lineno, 1))
            cols.append([_parse_float(tok, lineno, j + 2) for j, tok in enumerate(line[1:])])
    return np.array(ts), np.array(cols).T.reshape(k, -1)


def write_estimate_json(path, estimate):
    """JSON sidecar: method, eigenvalues, truncation floor, diagnostics."""
    payload = {
        "method": estimate.method,
        "eigenvalues": [float(v) for v in estimate.eigenvalues],
        "min_eigenvalue": float(estimate.min_eigenvalue),
        "diagnostics": estimate.diagnostics,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def write_indices_csv(path, true_indices: np.ndarray, est_indices: np.ndarray):
    """Scatter data: per direction, true index versus estimated index."""
    true_indices = np.atleast_2d(np.asarray(true_indices, dtype=float).T).T
    est_indices = np.atleast_2d(np.asarray(est_indices, dtype=float).T).T
    k = est_indices.shape[1]
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = []
        for j in range(k):
            header += [f"true_index_{j + 1}", f"est_index_{j + 1}"]
        writer.writerow(header)
        for ti, ei in zip(true_indices, est_indices):
            row = []
            for j in range(k):
                row += [format_float(ti[j]), format_float(ei[j])]
            writer.writerow(row)


_LONG_HEADER = ["model", "method", "basis", "D", "replication", "distance"]
_SUMMARY_HEADER = [
    "model", "method", "basis", "D", "n", "m", "failures",
    "min", "q1", "median", "q3", "max",
]


def write_benchmark_long(path, results):
    """Long-format CSV: one row per (scenario, replication).

    Failed replications keep their row with an empty distance cell.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_LONG_HEADER)
        for res in results:
            for r, dist in enumerate(res.per_replication, start=1):
                cell = format_float(dist) if np.isfinite(dist) else ""
                writer.writerow(
                    [res.model, res.method, res.basis, res.n_components, r, cell]
                )


def read_benchmark_long(path) -> list[dict]:
    """Rows of a long-format benchmark CSV; missing distances become NaN."""
    path = Path(path)
    out = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != _LONG_HEADER:
            raise DatasetFormatError("unexpected benchmark header", row=1)
        for lineno, line in enumerate(reader, start=2):
            out.append(
                {
                    "model": line[0],
                    "method": line[1],
                    "basis": line[2],
                    "D": int(line[3]),
                    "replication": int(line[4]),
                    "distance": _parse_float(line[5], lineno, 6) if line[5] else float("nan"),
                }
            )
    return out


def write_benchmark_summary(path, results):
    """Five-number summaries plus failure counts, one row per scenario."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SUMMARY_HEADER)
        for res in results:
            writer.writerow(
                [
                    res.model,
                    res.method,
                    res.basis,
                    res.n_components,
                    res.n,
                    res.per_replication.size,
                    res.failures,
                ]
                + [format_float(q) for q in res.five_number]
            )
