"""Datasets: CSV loading, train/test splits, z-scoring, Gaussian noise
blending and the synthetic sum-of-two-sines problem."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .numerics import ContractError

NOISE_PROFILES = {
    "none": (),
    "seven": (2.0, 1.0, 0.5, 0.1, 0.005, 0.001, 0.0005),
    "ten": (2.0, 1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001),
}

# training-set sizes; the remainder of each file is the test set
DEFAULT_SPLITS = {
    "boston": 400,
    "abalone": 2000,
    "redwine": 1065,
    "waveform": 3000,
}

TWO_SINES_FORMULA = "y = sin(u) + sin(2u), u evenly spaced on [0, 4*pi]"


class DatasetError(ContractError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    name: str
    x: np.ndarray
    y: np.ndarray
    column_labels: list[str]
    noise_mask: list[bool] = field(default_factory=list)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float).reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DatasetError(f"{self.name}: x {x.shape} and y {y.shape} disagree")
        mask = list(self.noise_mask) or [False] * x.shape[1]
        if len(mask) != x.shape[1] or len(self.column_labels) != x.shape[1]:
            raise DatasetError(f"{self.name}: labels/noise_mask do not match {x.shape[1]} columns")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "noise_mask", [bool(v) for v in mask])
        object.__setattr__(self, "column_labels", list(self.column_labels))

    @property
    def n_rows(self) -> int:
        return self.x.shape[0]

    @property
    def n_cols(self) -> int:
        return self.x.shape[1]

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=int)
        return replace(self, x=self.x[rows], y=self.y[rows])

    def to_csv(self, path, target_column: str = "target") -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([*self.column_labels, target_column])
            for xr, yr in zip(self.x, self.y):
                w.writerow([repr(float(v)) for v in (*xr, *yr)])


@dataclass(frozen=True)
class NoiseProfile:
    sigmas: tuple[float, ...] = ()
    seed: int = 0

    def __post_init__(self):
        if any(not s > 0 for s in self.sigmas):
            raise ContractError("noise standard deviations must be positive")

    @classmethod
    def named(cls, name: str, seed: int = 0) -> "NoiseProfile":
        try:
            return cls(NOISE_PROFILES[name], seed)
        except KeyError:
            raise ContractError(f"unknown noise profile {name!r}") from None


@dataclass(frozen=True)
class Standardization:
    mean: np.ndarray
    scale: np.ndarray
    constant: list[int]

    def apply(self, ds: Dataset) -> Dataset:
        return replace(ds, x=(ds.x - self.mean) / self.scale)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "constant": list(self.constant),
        }


def load_csv(path, target_column: str, name: str | None = None) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if target_column not in header:
            raise DatasetError(f"{path}: target column {target_column!r} not in header {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            vals = []
            for col, cell in zip(header, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DatasetError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {col!r}"
                    ) from None
            rows.append(vals)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    data = np.array(rows)
    t = header.index(target_column)
    keep = [j for j in range(len(header)) if j != t]
    return Dataset(
        name=name or path.stem,
        x=data[:, keep],
        y=data[:, [t]],
        column_labels=[header[j] for j in keep],
    )


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("larsen_elm") / "datasets" / f"{name}.csv"))


def load_boston() -> Dataset:
    """Boston Housing (506 rows, 13 inputs, target ``medv``)."""
    return load_csv(bundled_path("boston_housing"), "medv", name="boston")


def split(ds: Dataset, n_train: int, shuffle_seed: int | None = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffle then prefix/suffix split. ``shuffle_seed=None`` keeps
    file order."""
    if not 1 <= n_train < ds.n_rows:
        raise DatasetError(f"n_train={n_train} outside [1, {ds.n_rows})")
    order = np.arange(ds.n_rows)
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(ds.n_rows)
    return ds.take(order[:n_train]), ds.take(order[n_train:])


def fit_standardization(train: Dataset) -> Standardization:
    mean = train.x.mean(axis=0)
    scale = train.x.std(axis=0)
    constant = [int(j) for j in np.flatnonzero(~(scale > 0.0))]
    scale = np.where(scale > 0.0, scale, 1.0)
    return Standardization(mean, scale, constant)


def standardize(train: Dataset, test: Dataset) -> tuple[Dataset, Dataset, Standardization]:
    """Z-score columns with training statistics only. Constant columns
    become zero and are listed in ``stats.constant``."""
    stats = fit_standardization(train)
    return stats.apply(train), stats.apply(test), stats


def blend_noise(ds: Dataset, profile: NoiseProfile) -> Dataset:
    """Append one N(0, sigma^2) column per sigma and shuffle the column
    order so the noise is interleaved with the original inputs."""
    if not profile.sigmas:
        return ds
    rng = np.random.default_rng(profile.seed)
    noise = rng.normal(size=(ds.n_rows, len(profile.sigmas))) * np.asarray(profile.sigmas)
    x = np.hstack([ds.x, noise])
    labels = ds.column_labels + [f"noise_{s:g}" for s in profile.sigmas]
    mask = ds.noise_mask + [True] * len(profile.sigmas)
    perm = rng.permutation(x.shape[1])
    return Dataset(
        name=ds.name,
        x=x[:, perm],
        y=ds.y,
        column_labels=[labels[j] for j in perm],
        noise_mask=[mask[j] for j in perm],
    )


def two_sines(u):
    u = np.asarray(u, dtype=float)
    return np.sin(u) + np.sin(2.0 * u)


def gen_two_sines(
    n_points: int,
    domain: tuple[float, float] = (0.0, 4.0 * np.pi),
    noise_profile: NoiseProfile | None = None,
) -> Dataset:
    if n_points < 2:
        raise ContractError("n_points must be >= 2")
    u = np.linspace(domain[0], domain[1], n_points)
    ds = Dataset("two_sines", u[:, None], two_sines(u)[:, None], ["u"])
    if noise_profile is not None:
        ds = blend_noise(ds, noise_profile)
    return ds


def stack(parts: Sequence[Dataset], name: str | None = None) -> Dataset:
    first = parts[0]
    for p in parts[1:]:
        if p.column_labels != first.column_labels:
            raise DatasetError("cannot stack datasets with different columns")
    return Dataset(
        name=name or first.name,
        x=np.vstack([p.x for p in parts]),
        y=np.vstack([p.y for p in parts]),
        column_labels=first.column_labels,
        noise_mask=first.noise_mask,
    )


def manifest(ds: Dataset, **extra) -> dict[str, Any]:
    """JSON-ready description of a dataset (shapes, provenance, seeds)."""
    out = {
        "name": ds.name,
        "n_rows": ds.n_rows,
        "n_cols": ds.n_cols,
        "column_labels": ds.column_labels,
        "noise_mask": ds.noise_mask,
    }
    for key, value in extra.items():
        out[key] = value.to_dict() if hasattr(value, "to_dict") else value
    return out


def manifest_json(ds: Dataset, **extra) -> str:
    return json.dumps(manifest(ds, **extra), indent=2, sort_keys=True)
