"""Confusion-matrix bookkeeping and the seven derived detection metrics.

"Positive" is the anomaly/attack class throughout.  A rate whose denominator
is zero is reported as None (rendered "NA"), never as 0 or NaN.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

__all__ = ["ConfusionCounts", "MetricsReport", "compute_metrics", "METRIC_FIELDS"]

METRIC_FIELDS = ("accuracy", "detection_rate", "fpr", "tnr", "fnr", "precision", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricsReport:
    accuracy: Optional[float]
    detection_rate: Optional[float]
    fpr: Optional[float]
    tnr: Optional[float]
    fnr: Optional[float]
    precision: Optional[float]
    f1: Optional[float]

    def as_fractions(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_FIELDS}

    def as_percentages(self, ndigits: int = 3) -> dict:
        """Percent strings with fixed decimals, 'NA' where undefined."""
        out = {}
        for name in METRIC_FIELDS:
            v = getattr(self, name)
            out[name] = "NA" if v is None else f"{100.0 * v:.{ndigits}f}"
        return out


def _ratio(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


def compute_metrics(c: ConfusionCounts) -> MetricsReport:
    """Accuracy, detection rate, FPR, TNR, FNR, precision and F1 from counts."""
    if c.total == 0:
        raise ValueError("cannot compute metrics from all-zero counts")
    return MetricsReport(
        accuracy=_ratio(c.tp + c.tn, c.total),
        detection_rate=_ratio(c.tp, c.tp + c.fn),
        fpr=_ratio(c.fp, c.tn + c.fp),
        tnr=_ratio(c.tn, c.tn + c.fp),
        fnr=_ratio(c.fn, c.fn + c.tp),
        precision=_ratio(c.tp, c.tp + c.fp),
        f1=_ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn),
    )
