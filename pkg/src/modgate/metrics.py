"""Evaluation metrics: AUC, Spearman correlation, zone precisions, F_beta,
and time-batched macro-F_beta.

Gold labels may be probabilistic.  Ranking metrics binarize them at 0.5
(a tie counts as accept); Spearman uses them as-is.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ScoredSet",
    "PrecisionResult",
    "EvalReport",
    "auc",
    "spearman",
    "precisions",
    "f_beta",
    "macro_f_beta",
    "evaluate",
    "average_ranks",
]


def _is_reject(gold: np.ndarray) -> np.ndarray:
    return gold > 0.5


@dataclass(frozen=True)
class ScoredSet:
    """Parallel system scores and gold labels, with timestamps for batching.

    ``ids`` breaks timestamp ties deterministically; it defaults to input
    position.
    """

    p: np.ndarray
    gold: np.ndarray
    ts: np.ndarray
    ids: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.p)
        if not (len(self.gold) == len(self.ts) == len(self.ids) == n):
            raise ValueError("parallel sequences must share one length")
        if n and (self.p.min() < 0 or self.p.max() > 1):
            raise ValueError("scores must lie in [0, 1]")
        if n and (self.gold.min() < 0 or self.gold.max() > 1):
            raise ValueError("gold labels must lie in [0, 1]")

    @classmethod
    def build(cls, p: Sequence[float], gold: Sequence[float], ts: Sequence[int] | None = None,
              ids: Sequence | None = None) -> "ScoredSet":
        p = np.asarray(p, dtype=np.float64)
        gold = np.asarray(gold, dtype=np.float64)
        ts = np.zeros(len(p), dtype=np.int64) if ts is None else np.asarray(ts, dtype=np.int64)
        ids = np.arange(len(p)) if ids is None else np.asarray(ids)
        return cls(p=p, gold=gold, ts=ts, ids=ids)

    def __len__(self) -> int:
        return len(self.p)

    def take(self, idx: np.ndarray) -> "ScoredSet":
        return ScoredSet(p=self.p[idx], gold=self.gold[idx], ts=self.ts[idx], ids=self.ids[idx])


def average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank span."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(n)
    sx = x[order]
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 1.0 + (i + j) / 2.0
        i = j + 1
    return ranks


def auc(scored: ScoredSet) -> float:
    """Area under the ROC curve, computed as the Mann-Whitney statistic.

    Over all (reject, accept) pairs: the fraction where the rejected
    comment's score exceeds the accepted one's, ties counting one half.
    """
    rej = _is_reject(scored.gold)
    n_pos = int(rej.sum())
    n_neg = len(scored) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: need at least one comment in each class")
    ranks = average_ranks(scored.p)
    rank_sum = float(ranks[rej].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def spearman(scored: ScoredSet) -> float:
    """Spearman correlation between scores and (probabilistic) gold labels:
    Pearson correlation of average ranks."""
    n = len(scored)
    if n < 2:
        raise ValueError("correlation undefined: need at least two points")
    rx = average_ranks(scored.p)
    ry = average_ranks(scored.gold)
    vx = rx - rx.mean()
    vy = ry - ry.mean()
    denom = float(np.sqrt((vx @ vx) * (vy @ vy)))
    if denom == 0.0:
        raise ValueError("correlation undefined: zero variance")
    return float((vx @ vy) / denom)


@dataclass(frozen=True)
class PrecisionResult:
    """Zone precisions plus the raw routing counts behind them."""

    p_accept: float
    p_reject: float
    n_accepted: int
    n_rejected: int
    n_gray: int
    n_correct_accept: int
    n_correct_reject: int


def precisions(scored: ScoredSet, t_a: float, t_r: float) -> PrecisionResult:
    """Route by thresholds and measure both automatic zones.

    p > t_r is system-rejected, p < t_a system-accepted, the closed interval
    [t_a, t_r] is the gray zone.  An empty zone has vacuous precision 1.0,
    which keeps small batches without rejections from zeroing macro scores.
    """
    if t_a > t_r:
        raise ValueError("t_a must not exceed t_r")
    rejected = scored.p > t_r
    accepted = scored.p < t_a
    gold_rej = _is_reject(scored.gold)
    n_rej = int(rejected.sum())
    n_acc = int(accepted.sum())
    correct_rej = int((rejected & gold_rej).sum())
    correct_acc = int((accepted & ~gold_rej).sum())
    return PrecisionResult(
        p_accept=correct_acc / n_acc if n_acc else 1.0,
        p_reject=correct_rej / n_rej if n_rej else 1.0,
        n_accepted=n_acc,
        n_rejected=n_rej,
        n_gray=len(scored) - n_rej - n_acc,
        n_correct_accept=correct_acc,
        n_correct_reject=correct_rej,
    )


def f_beta(p_reject: float, p_accept: float, beta: float) -> float:
    """Weighted harmonic mean (1 + b^2) P_r P_a / (b^2 P_r + P_a).

    beta > 1 emphasizes acceptance precision; 0 when the denominator is 0.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    denom = beta * beta * p_reject + p_accept
    if denom == 0.0:
        return 0.0
    return (1.0 + beta * beta) * p_reject * p_accept / denom


def macro_f_beta(
    scored: ScoredSet, t_a: float, t_r: float, beta: float = 2.0, batch_size: int = 100
) -> float:
    """F_beta macro-averaged over consecutive time batches.

    Comments are ordered by timestamp (ties by id), chunked into batches of
    ``batch_size`` (the final partial batch included), scored per batch with
    the vacuous-precision convention, and averaged.
    """
    if len(scored) == 0:
        raise ValueError("macro F over an empty set is undefined")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    order = np.lexsort((scored.ids, scored.ts))
    chunks = [order[i : i + batch_size] for i in range(0, len(order), batch_size)]
    scores = []
    for chunk in chunks:
        pr = precisions(scored.take(chunk), t_a, t_r)
        scores.append(f_beta(pr.p_reject, pr.p_accept, beta))
    return float(np.mean(scores))


@dataclass
class EvalReport:
    """Headline metrics for one scored dataset."""

    auc: float
    spearman: float | None
    p_accept: float
    p_reject: float
    macro_f_beta: float
    n: int
    t_a: float
    t_r: float
    beta: float

    def to_dict(self) -> dict:
        return {
            "auc": self.auc,
            "spearman": self.spearman,
            "p_accept": self.p_accept,
            "p_reject": self.p_reject,
            "macro_f_beta": self.macro_f_beta,
            "n": self.n,
            "t_a": self.t_a,
            "t_r": self.t_r,
            "beta": self.beta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def evaluate(
    scored: ScoredSet,
    t_a: float = 0.5,
    t_r: float = 0.5,
    beta: float = 2.0,
    batch_size: int = 100,
) -> EvalReport:
    """Full report; Spearman is None when undefined (e.g. constant labels)."""
    try:
        rho = spearman(scored)
    except ValueError:
        rho = None
    pr = precisions(scored, t_a, t_r)
    return EvalReport(
        auc=auc(scored),
        spearman=rho,
        p_accept=pr.p_accept,
        p_reject=pr.p_reject,
        macro_f_beta=macro_f_beta(scored, t_a, t_r, beta, batch_size),
        n=len(scored),
        t_a=t_a,
        t_r=t_r,
        beta=beta,
    )
