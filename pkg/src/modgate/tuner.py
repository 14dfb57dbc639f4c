"""Threshold selection under a coverage constraint.

Moderators state the fraction of comments the system should handle on its
own (the coverage); the tuner sweeps the acceptance threshold t_a over a
finite candidate grid, derives the rejection threshold t_r that leaves the
requested share of a development set in the gray zone, and keeps the pair
with the best batched macro-F_beta.  Coverage 1.0 collapses the gray zone
(t_a = t_r): fully automatic moderation.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field

import numpy as np

from .metrics import ScoredSet, macro_f_beta

__all__ = ["Thresholds", "candidate_thresholds", "gray_count", "tune", "decide"]

ACCEPT = "accept"
GRAY = "gray"
REJECT = "reject"


@dataclass(frozen=True)
class Thresholds:
    """An (t_a, t_r) operating point plus the tuning context that chose it."""

    t_a: float
    t_r: float
    coverage: float
    beta: float
    dev_macro_f_beta: float
    tuned_at: str = field(default="")

    def __post_init__(self) -> None:
        if not (0.0 <= self.t_a <= self.t_r <= 1.0):
            raise ValueError("need 0 <= t_a <= t_r <= 1")
        if self.coverage == 1.0 and self.t_a != self.t_r:
            raise ValueError("full coverage forces t_a == t_r")

    def to_dict(self) -> dict:
        return {
            "t_a": self.t_a,
            "t_r": self.t_r,
            "coverage": self.coverage,
            "beta": self.beta,
            "dev_macro_f_beta": self.dev_macro_f_beta,
            "tuned_at": self.tuned_at,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "Thresholds":
        return cls(
            t_a=obj["t_a"],
            t_r=obj["t_r"],
            coverage=obj["coverage"],
            beta=obj["beta"],
            dev_macro_f_beta=obj["dev_macro_f_beta"],
            tuned_at=obj.get("tuned_at", ""),
        )


def candidate_thresholds(p: np.ndarray) -> np.ndarray:
    """Finite sweep grid: 0, 1, and midpoints between adjacent distinct scores.

    Between two candidates no comment changes zone, so sweeping this grid is
    exactly equivalent to sliding thresholds continuously.
    """
    u = np.unique(np.asarray(p, dtype=np.float64))
    mids = (u[:-1] + u[1:]) / 2.0
    return np.unique(np.concatenate(([0.0], mids, [1.0])))


def gray_count(p: np.ndarray, t_a: float, t_r: float) -> int:
    """Number of scores in the closed gray interval [t_a, t_r]."""
    p = np.asarray(p, dtype=np.float64)
    return int(np.count_nonzero((p >= t_a) & (p <= t_r)))


def tune(dev: ScoredSet, coverage: float, beta: float = 2.0, batch_size: int = 100) -> Thresholds:
    """Pick the (t_a, t_r) pair maximizing batched macro-F_beta at the
    requested coverage.

    For each candidate t_a, t_r is the smallest candidate >= t_a whose gray
    zone holds round((1 - coverage) * N) dev comments, or the closest
    achievable count when no candidate hits it exactly.  Ties on the
    objective break toward smaller t_a, then smaller t_r.
    """
    n = len(dev)
    if n == 0:
        raise ValueError("cannot tune on an empty development set")
    if not (0.0 < coverage <= 1.0):
        raise ValueError("coverage must lie in (0, 1]")
    target = round((1.0 - coverage) * n)
    cands = candidate_thresholds(dev.p)
    sorted_p = np.sort(dev.p)

    best: tuple[float, float, float] | None = None  # (f, t_a, t_r)
    for i, t_a in enumerate(cands):
        rs = cands[i:]
        lo = int(np.searchsorted(sorted_p, t_a, side="left"))
        counts = np.searchsorted(sorted_p, rs, side="right") - lo
        j = int(np.argmin(np.abs(counts - target)))  # first minimum -> smallest t_r
        t_r = float(rs[j])
        f = macro_f_beta(dev, float(t_a), t_r, beta, batch_size)
        if best is None or f > best[0]:
            best = (f, float(t_a), t_r)
    f, t_a, t_r = best
    return Thresholds(
        t_a=t_a,
        t_r=t_r,
        coverage=coverage,
        beta=beta,
        dev_macro_f_beta=f,
        tuned_at=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    )


def decide(p: float, th: Thresholds) -> str:
    """Route one probability: reject above t_r, accept below t_a, the closed
    interval in between goes to a human."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    if p > th.t_r:
        return REJECT
    if p < th.t_a:
        return ACCEPT
    return GRAY
