"""Sample summaries, the two-sample Kolmogorov-Smirnov test and reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from scipy import special

KS_ALPHA = 1e-3


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    variance: float
    std_err: float
    min: float
    max: float
    sorted: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def of(cls, sample) -> "SampleSummary":
        x = np.sort(np.asarray(sample, dtype=float))
        n = x.size
        if n == 0:
            raise ValueError("empty sample")
        var = float(np.var(x, ddof=1)) if n > 1 else 0.0
        return cls(n, float(np.mean(x)), var, math.sqrt(var / n), float(x[0]), float(x[-1]), x)

    def merge(self, other: "SampleSummary") -> "SampleSummary":
        """Summary of the union of both samples (independent of merge order)."""
        return SampleSummary.of(np.concatenate((self.sorted, other.sorted)))


def ks_statistic(a, b) -> float:
    """sup_x |F_a(x) - F_b(x)| for the empirical CDFs of two samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_two_sample(a, b) -> tuple[float, float]:
    """(statistic, asymptotic Kolmogorov p-value) of the two-sample KS test."""
    d = ks_statistic(a, b)
    n, m = len(a), len(b)
    en = math.sqrt(n * m / (n + m))
    return d, float(special.kolmogorov(en * d))


def mean_within(estimate: float, target: float, std_err: float, rel: float = 0.01, n_se: float = 3.0) -> bool:
    """``|estimate - target| <= max(rel * |target|, n_se * std_err)``."""
    return abs(estimate - target) <= max(rel * abs(target), n_se * std_err)


def covariance_with_se(x, y) -> tuple[float, float]:
    """Sample covariance and the standard error of the mean of centered products."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = (x - x.mean()) * (y - y.mean())
    n = z.size
    return float(z.sum() / (n - 1)), float(np.std(z, ddof=1) / math.sqrt(n))


def _plain(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(u) for u in v]
    if isinstance(v, dict):
        return {str(k): _plain(u) for k, u in v.items()}
    return v


@dataclass
class ExperimentReport:
    """Outcome of one named verification experiment.

    `verdict` is derived from `checks`, a list of named booleans computed
    from the statistics and thresholds; it is never set independently.
    """

    name: str
    model: str
    params: dict[str, Any]
    stats: list[dict[str, Any]]
    thresholds: dict[str, Any]
    checks: dict[str, bool]
    seed: int
    runtime_s: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["verdict"] = "pass" if self.verdict else "fail"
        return _plain(d)

    def to_json(self, **kw) -> str:
        kw.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kw)

    def csv_rows(self) -> list[list[str]]:
        verdict = "pass" if self.verdict else "fail"
        rows = []
        for s in self.stats:
            label = s.get("name", "")
            for k, v in s.items():
                if k == "name":
                    continue
                rows.append([self.name, self.model, label, k, json.dumps(_plain(v)), verdict])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", "model", "stat", "field", "value", "verdict"])
        w.writerows(self.csv_rows())
        return buf.getvalue()

    def summary_line(self) -> str:
        return f"[{'PASS' if self.verdict else 'FAIL'}] {self.name} on {self.model}"
