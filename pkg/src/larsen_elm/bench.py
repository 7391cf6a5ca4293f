"""Experiment harness: repeated runs of ELM / GASEN-ELM / LARSEN-ELM on
noise-blended data, with test MSE, timings and table rendering."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import data
from .elm import elm_predict, elm_train
from .numerics import ContractError, mse
from .pipeline import LarsenConfig, larsen_fit, larsen_predict

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
METHODS = ("elm", "gasen-elm", "larsen-elm")
TIMING_FIELDS = ("fit_seconds", "predict_seconds")
SYNTH_TRAIN, SYNTH_TEST = 2001, 20001


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: str = "boston"  # "boston", "two_sines" or a CSV path
    noise: str = "seven"  # none | seven | ten | custom
    sigmas: tuple[float, ...] = ()  # used when noise == "custom"
    methods: tuple[str, ...] = METHODS
    runs: int = 5
    seed: int = 0
    larsen: LarsenConfig = field(default_factory=LarsenConfig)
    target_column: str | None = None
    n_train: int | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ContractError("runs must be >= 1")
        if not self.methods:
            raise ContractError("at least one method is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ContractError(f"unknown methods {bad}; choose from {METHODS}")
        if self.noise not in (*data.NOISE_PROFILES, "custom"):
            raise ContractError(f"unknown noise profile {self.noise!r}")

    @property
    def sigma_values(self) -> tuple[float, ...]:
        if self.noise == "custom":
            return tuple(self.sigmas)
        return data.NOISE_PROFILES[self.noise]

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["sigmas"] = list(self.sigmas)
        d["methods"] = list(self.methods)
        d["larsen"] = self.larsen.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentSpec":
        d = dict(d)
        d["sigmas"] = tuple(d.get("sigmas", ()))
        d["methods"] = tuple(d["methods"])
        d["larsen"] = LarsenConfig.from_dict(d["larsen"])
        return cls(**d)


@dataclass
class RunRecord:
    method: str
    run: int
    seed: int
    test_mse: float | None = None
    fit_seconds: float | None = None
    predict_seconds: float | None = None
    selected_variables: list[int] = field(default_factory=list)
    noise_variables_kept: int = 0
    selected_members: list[int] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def aggregate(values: Sequence[float]) -> dict[str, float]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return {"mean": float("nan"), "sd": float("nan"), "n": 0}
    sd = float(v.std(ddof=1)) if v.size > 1 else 0.0
    return {"mean": float(v.mean()), "sd": sd, "n": int(v.size)}


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    dataset_label: str
    records: list[RunRecord]
    dataset_manifest: dict[str, Any] = field(default_factory=dict)
    notes: dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def rows(self, method: str) -> list[RunRecord]:
        return [r for r in self.records if r.method == method and r.ok]

    def aggregates(self, key: str = "test_mse") -> dict[str, dict[str, float]]:
        return {
            m: aggregate([getattr(r, key) for r in self.rows(m)]) for m in self.spec.methods
        }

    def has_timing(self) -> bool:
        return any(r.fit_seconds is not None for r in self.records)

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        records = []
        for r in self.records:
            d = asdict(r)
            if not include_timing:
                for k in TIMING_FIELDS:
                    d.pop(k)
            records.append(d)
        out = {
            "schema_version": self.schema_version,
            "dataset": self.dataset_label,
            "spec": self.spec.to_dict(),
            "dataset_manifest": self.dataset_manifest,
            "notes": self.notes,
            "records": records,
            "aggregates": {"test_mse": self.aggregates("test_mse")},
        }
        if include_timing and self.has_timing():
            out["aggregates"]["fit_seconds"] = self.aggregates("fit_seconds")
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    def timing_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "timing": [
                {"method": r.method, "run": r.run, **{k: getattr(r, k) for k in TIMING_FIELDS}}
                for r in self.records
            ],
        }

    def merge_timing(self, timing: dict[str, Any]) -> None:
        by_key = {(t["method"], t["run"]): t for t in timing["timing"]}
        for r in self.records:
            t = by_key.get((r.method, r.run))
            if t:
                r.fit_seconds = t["fit_seconds"]
                r.predict_seconds = t["predict_seconds"]

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ContractError(f"unsupported report schema_version {d.get('schema_version')}")
        return cls(
            spec=ExperimentSpec.from_dict(d["spec"]),
            dataset_label=d["dataset"],
            records=[RunRecord(**r) for r in d["records"]],
            dataset_manifest=d.get("dataset_manifest", {}),
            notes=d.get("notes", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", "method", "run", "seed", "test_mse", "fit_seconds",
                    "predict_seconds", "selected_variables", "noise_variables_kept",
                    "selected_members", "error"])
        for r in self.records:
            w.writerow([
                self.dataset_label, r.method, r.run, r.seed,
                "" if r.test_mse is None else repr(r.test_mse),
                "" if r.fit_seconds is None else repr(r.fit_seconds),
                "" if r.predict_seconds is None else repr(r.predict_seconds),
                " ".join(map(str, r.selected_variables)), r.noise_variables_kept,
                " ".join(map(str, r.selected_members)), r.error or "",
            ])
        return buf.getvalue()

    def save(self, path) -> list[Path]:
        """Write ``<path>`` (deterministic JSON), ``<stem>.timing.json`` and
        ``<stem>.csv``. Wall-clock numbers live only in the sidecars so that
        re-running a spec reproduces the main JSON byte for byte."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        timing = path.with_name(path.stem + ".timing.json")
        table = path.with_suffix(".csv")
        path.write_text(self.to_json(include_timing=False))
        timing.write_text(json.dumps(self.timing_dict(), indent=2, sort_keys=True) + "\n")
        table.write_text(self.to_csv())
        return [path, timing, table]

    @classmethod
    def load(cls, path) -> "ExperimentReport":
        path = Path(path)
        report = cls.from_json(path.read_text())
        timing = path.with_name(path.stem + ".timing.json")
        if timing.exists():
            report.merge_timing(json.loads(timing.read_text()))
        return report


def _run_seeds(master: int, runs: int) -> list[dict[str, int]]:
    out = []
    for ss in np.random.SeedSequence(master).spawn(runs):
        noise, split_, elm, larsen = (int(v) for v in ss.generate_state(4))
        out.append({"noise": noise, "split": split_, "elm": elm, "larsen": larsen})
    return out


def _prepare(spec: ExperimentSpec, seeds: dict[str, int]):
    """Blend noise, split and standardize for one run."""
    profile = data.NoiseProfile(spec.sigma_values, seeds["noise"])
    if spec.dataset == "two_sines":
        train = data.gen_two_sines(SYNTH_TRAIN)
        test = data.gen_two_sines(SYNTH_TEST)
        both = data.blend_noise(data.stack([train, test]), profile)
        train, test = both.take(np.arange(SYNTH_TRAIN)), both.take(np.arange(SYNTH_TRAIN, both.n_rows))
    else:
        ds = load_dataset(spec)
        n_train = spec.n_train or data.DEFAULT_SPLITS.get(ds.name)
        if n_train is None:
            n_train = int(round(0.7 * ds.n_rows))
        train, test = data.split(data.blend_noise(ds, profile), n_train, seeds["split"])
    return data.standardize(train, test)


def load_dataset(spec: ExperimentSpec) -> data.Dataset:
    if spec.dataset == "boston":
        return data.load_boston()
    path = Path(spec.dataset)
    if spec.target_column is None:
        raise ContractError(f"{path}: --target is required for CSV datasets")
    return data.load_csv(path, spec.target_column)


def _fit_method(method: str, spec: ExperimentSpec, seeds, train, test) -> tuple[RunRecord, np.ndarray]:
    rec = RunRecord(method=method, run=-1, seed=seeds["larsen"] if method != "elm" else seeds["elm"])
    if method == "elm":
        cfg = replace(spec.larsen.elm, seed=seeds["elm"])
        t0 = time.perf_counter()
        model = elm_train(train.x, train.y, cfg)
        rec.fit_seconds = time.perf_counter() - t0
        t0 = time.perf_counter()
        pred = elm_predict(model, test.x)
        rec.predict_seconds = time.perf_counter() - t0
        rec.selected_variables = list(range(train.n_cols))
        rec.selected_members = [0]
    else:
        cfg = replace(spec.larsen, lars_enabled=(method == "larsen-elm"), seed=seeds["larsen"])
        t0 = time.perf_counter()
        model = larsen_fit(train.x, train.y, cfg)
        rec.fit_seconds = time.perf_counter() - t0
        t0 = time.perf_counter()
        pred = larsen_predict(model, test.x)
        rec.predict_seconds = time.perf_counter() - t0
        rec.selected_variables = list(model.selection.kept)
        rec.selected_members = list(model.selected)
    rec.noise_variables_kept = sum(train.noise_mask[j] for j in rec.selected_variables)
    rec.test_mse = mse(pred, test.y)
    return rec, pred


def run_experiment(spec: ExperimentSpec, predictions_out=None) -> ExperimentReport:
    """Run every method ``spec.runs`` times. Failed runs are kept as records
    with an ``error`` message and left out of the aggregates.

    For ``two_sines``, ``predictions_out`` (optional path) receives the test
    grid, target and per-method predictions of run 0 as CSV.
    """
    records: list[RunRecord] = []
    manifest: dict[str, Any] = {}
    for run, seeds in enumerate(_run_seeds(spec.seed, spec.runs)):
        train, test, stats = _prepare(spec, seeds)
        if run == 0:
            manifest = data.manifest(train, n_test=test.n_rows, standardization=stats)
        curves = {}
        for method in spec.methods:
            try:
                rec, pred = _fit_method(method, spec, seeds, train, test)
            except Exception as exc:  # recorded, never silently dropped
                log.warning("run %d, %s failed: %s", run, method, exc)
                rec = RunRecord(method=method, run=run, seed=seeds["larsen"], error=repr(exc))
            rec.run = run
            records.append(rec)
            if predictions_out is not None and run == 0 and spec.dataset == "two_sines" and rec.ok:
                curves[method] = pred
        if curves:
            _write_predictions(predictions_out, test, curves)

    notes = {}
    if spec.dataset == "two_sines":
        notes["target_formula"] = data.TWO_SINES_FORMULA
        notes["grid"] = {"train": SYNTH_TRAIN, "test": SYNTH_TEST}
    label = spec.dataset if spec.dataset in ("boston", "two_sines") else Path(spec.dataset).stem
    return ExperimentReport(spec, label, records, manifest, notes)


def _write_predictions(path, test: data.Dataset, curves: dict[str, np.ndarray]) -> None:
    u = np.linspace(0.0, 4.0 * np.pi, test.n_rows)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "y", *curves])
        for i in range(test.n_rows):
            w.writerow([repr(float(u[i])), repr(float(test.y[i, 0])),
                        *(repr(float(c[i, 0])) for c in curves.values())])


# --- rendering -------------------------------------------------------------


def improvement(mse_other: float, mse_new: float) -> float:
    """Relative MSE drop of the new method; positive means the new one is better."""
    return (mse_other - mse_new) / mse_other


def _fmt_improvement(v: float) -> str:
    return f"> {100 * v:.2f}%" if v >= 0 else f"< {100 * -v:.2f}%"


def _noise_label(spec: ExperimentSpec) -> str:
    if spec.noise == "custom":
        return "sigma=" + ",".join(f"{v:g}" for v in spec.sigmas) if spec.sigmas else "none"
    return spec.noise


def _tables(reports: Sequence[ExperimentReport]):
    methods = [m for m in METHODS if any(m in r.spec.methods for r in reports)]
    tables = []
    lead = lambda r: [r.dataset_label, _noise_label(r.spec)]
    mse_rows = [lead(r) + [_cell(r, m, "test_mse") for m in methods] for r in reports]
    tables.append(("Mean square error (mean over runs)", ["dataset", "noise", *methods], mse_rows))
    if any(r.has_timing() for r in reports):
        t_rows = [lead(r) + [_cell(r, m, "fit_seconds") for m in methods] for r in reports]
        tables.append(("Fit time (seconds, mean over runs)", ["dataset", "noise", *methods], t_rows))
    others = [m for m in methods if m != "larsen-elm"]
    if "larsen-elm" in methods and others:
        rows = []
        for r in reports:
            agg = r.aggregates("test_mse")
            new = agg.get("larsen-elm", {}).get("mean", float("nan"))
            row = lead(r)
            for m in others:
                old = agg.get(m, {}).get("mean", float("nan"))
                row.append(_fmt_improvement(improvement(old, new)) if np.isfinite(old * new) else "")
            rows.append(row)
        tables.append((
            "MSE change of larsen-elm vs others ('>' = larsen-elm better)",
            ["dataset", "noise", *[f"larsen-elm & {m}" for m in others]],
            rows,
        ))
    return tables


def _cell(report: ExperimentReport, method: str, key: str) -> str:
    if method not in report.spec.methods:
        return ""
    agg = report.aggregates(key)[method]
    return "" if agg["n"] == 0 else f"{agg['mean']:.4f}"


def render_report(reports: ExperimentReport | Iterable[ExperimentReport], fmt: str = "text") -> str:
    """Tables with methods as columns and datasets as rows: MSE, fit time,
    and the relative MSE change of larsen-elm against each other method."""
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    reports = list(reports)
    tables = _tables(reports)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for title, header, rows in tables:
            w.writerow([f"# {title}"])
            w.writerow(header)
            w.writerows(rows)
        return buf.getvalue()
    if fmt == "text":
        out = []
        for title, header, rows in tables:
            widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
            line = lambda cells: "  ".join(str(c).rjust(wd) for c, wd in zip(cells, widths))
            out += [title, line(header), "  ".join("-" * wd for wd in widths)]
            out += [line(r) for r in rows]
            out.append("")
        return "\n".join(out)
    raise ContractError(f"unknown report format {fmt!r}; use 'text' or 'csv'")
