"""Result records and CSV/JSON writers.

``summary.csv`` holds one row per (scenario, policy, replication, destination
pair). Everything written there is a deterministic function of the config and
seeds, so reruns produce identical bytes; wall-clock timings go to
``timings.csv`` instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import astuple, dataclass, fields
from pathlib import Path


@dataclass
class ResultRecord:
    scenario_id: str
    policy: str
    replication: int
    pair_k: int
    pair_j: int
    avg_age: float
    avg_cost: float
    weighted_total: float
    ci95_low: float | None
    ci95_high: float | None
    weighted_age: float
    final_debt: float | None = None


SUMMARY_COLUMNS = [f.name for f in fields(ResultRecord)]
SWEEP_COLUMNS = ["rank", "scenario_id", "policy", "replications", "mean_weighted_total", "ci95_low",
                 "ci95_high", "mean_weighted_age", "baseline_total"]
TRAJECTORY_COLUMNS = ["scenario_id", "policy", "replication", "slot", "pair_k", "pair_j", "age", "cost", "debt"]
TIMING_COLUMNS = ["scenario_id", "policy", "replication", "wall_clock_s"]


class OutputError(OSError):
    pass


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


class CsvTable:
    """Append-only CSV file with a fixed header, flushed after every write."""

    def __init__(self, path: Path, columns):
        self.path = Path(path)
        try:
            self._fh = open(self.path, "w", newline="")
        except OSError as exc:
            raise OutputError(f"cannot write {self.path}: {exc.strerror}") from exc
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(columns)
        self._fh.flush()

    def write(self, rows):
        try:
            for row in rows:
                self._writer.writerow([_cell(v) for v in row])
            self._fh.flush()
        except OSError as exc:
            raise OutputError(f"cannot write {self.path}: {exc.strerror}") from exc

    def close(self):
        self._fh.close()


class ResultWriter:
    """Incremental writer for one output directory."""

    def __init__(self, directory, trajectories: bool = False):
        self.directory = Path(directory)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"cannot create {self.directory}: {exc.strerror}") from exc
        self.summary = CsvTable(self.directory / "summary.csv", SUMMARY_COLUMNS)
        self.timings = CsvTable(self.directory / "timings.csv", TIMING_COLUMNS)
        self.trajectories = CsvTable(self.directory / "trajectories.csv", TRAJECTORY_COLUMNS) if trajectories else None

    def records(self, records):
        self.summary.write(astuple(r) for r in records)

    def timing(self, scenario_id, policy, replication, seconds):
        self.timings.write([(scenario_id, policy, replication, round(seconds, 6))])

    def trajectory(self, scenario_id, policy, replication, rows):
        if self.trajectories is not None:
            self.trajectories.write((scenario_id, policy, replication, *row) for row in rows)

    def json(self, name: str, payload) -> Path:
        path = self.directory / name
        try:
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc.strerror}") from exc
        return path

    def sweep_summary(self, rows):
        table = CsvTable(self.directory / "sweep_summary.csv", SWEEP_COLUMNS)
        table.write([r.get(c) for c in SWEEP_COLUMNS] for r in rows)
        table.close()

    def close(self):
        for t in (self.summary, self.timings, self.trajectories):
            if t is not None:
                t.close()


def write_results(records, directory, config_echo: dict | None = None) -> Path:
    """Write ``summary.csv`` (and ``config.echo.json`` when given) in one go."""
    w = ResultWriter(directory)
    w.records(records)
    if config_echo is not None:
        w.json("config.echo.json", config_echo)
    w.close()
    return w.directory / "summary.csv"


def read_summary(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
