"""Training loop: mini-batched Adam with a held-out split, early stopping on
held-out AUC, and float32 checkpointing.

Epoch evaluation runs on the float32-quantized snapshot that a checkpoint
would contain, so the reported best AUC survives a save/load round trip
bit for bit.  A single integer seed drives every random choice (split,
initialization, per-epoch shuffles, dropout), making whole runs repeatable.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .gradcore import AdamConfig, adam_step, load_checkpoint, save_checkpoint
from .metrics import ScoredSet, auc
from .models import ModelConfig, ModelParams, compute_gradients, predict
from .textpipe import Comment, Vocabulary, build_vocab, load_embeddings, random_embeddings

__all__ = ["TrainConfig", "TrainReport", "TrainedModel", "split_heldout", "train",
           "save_trained", "load_trained", "score_comments"]

VOCAB_FILE = "vocab.tsv"


@dataclass
class TrainConfig:
    variant: str
    batch_size: int = 32
    max_epochs: int = 50
    patience: int = 3
    heldout_frac: float = 0.02
    seed: int = 0
    adam: AdamConfig = field(default_factory=AdamConfig)
    embeddings_path: str | None = None
    min_freq: int = 2
    d: int = 300
    m: int = 128
    r: int = 128
    layers: int = 4
    ngram_sizes: tuple[int, ...] = (1, 2, 3, 4)
    kernels_per_size: int = 300
    dropout_p: float = 0.5

    def __post_init__(self) -> None:
        if not (0.0 < self.heldout_frac < 1.0):
            raise ValueError("heldout_frac must lie strictly between 0 and 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            variant=self.variant,
            d=self.d,
            m=self.m,
            r=self.r,
            layers=self.layers,
            ngram_sizes=self.ngram_sizes,
            kernels_per_size=self.kernels_per_size,
            dropout_p=self.dropout_p,
        )


@dataclass
class TrainReport:
    train_loss: list[float]
    heldout_auc: list[float]
    best_epoch: int
    stopped_early: bool
    wall_time_sec: float
    first_epoch_batch_losses: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "heldout_auc": self.heldout_auc,
            "best_epoch": self.best_epoch,
            "stopped_early": self.stopped_early,
            "wall_time_sec": self.wall_time_sec,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class TrainedModel:
    """Everything needed to score new comments: weights plus vocabulary."""

    params: ModelParams
    vocab: Vocabulary
    seed: int | None = None


def split_heldout(data: Sequence[Comment], frac: float, seed) -> tuple[list[Comment], list[Comment]]:
    """Deterministic disjoint split; the held-out side gets round(frac * N)
    comments but never fewer than one."""
    n = len(data)
    if n < 2:
        raise ValueError("need at least two comments to split")
    if not (0.0 < frac < 1.0):
        raise ValueError("frac must lie strictly between 0 and 1")
    n_held = max(1, round(frac * n))
    # own RNG stream; see gen_synthetic for why seeds are namespaced
    perm = np.random.default_rng([0x73706C74, seed]).permutation(n)
    held_idx = set(perm[:n_held].tolist())
    heldout = [data[i] for i in sorted(held_idx)]
    train_part = [data[i] for i in range(n) if i not in held_idx]
    return train_part, heldout


def _encode_labeled(comments: Sequence[Comment], vocab: Vocabulary) -> list[tuple[np.ndarray, float]]:
    return [(vocab.encode(c.tokens), c.gold) for c in comments]


def _heldout_auc(snapshot: ModelParams, encoded, golds, ts) -> float:
    scores = [predict(ids, snapshot).p for ids in encoded]
    return auc(ScoredSet.build(scores, golds, ts))


def train(data: Sequence[Comment], config: TrainConfig) -> tuple[TrainedModel, TrainReport]:
    """Train one variant on labeled comments.

    Epochs iterate freshly shuffled mini-batches (shuffle reseeded per epoch
    from the run seed); after each epoch the float32 snapshot is scored on
    the held-out split, and training stops once the AUC has not improved for
    ``patience`` consecutive epochs.  Returns the best snapshot.
    """
    t0 = time.monotonic()
    for c in data:
        if c.gold is None:
            raise ValueError(f"comment {c.id!r} has no gold label")
    train_part, heldout = split_heldout(data, config.heldout_frac, config.seed)
    vocab = build_vocab(train_part, config.min_freq)

    if config.embeddings_path:
        table, _coverage = load_embeddings(
            config.embeddings_path, vocab, config.d, seed=[config.seed, 0]
        )
    else:
        table = random_embeddings(vocab, config.d, seed=[config.seed, 0])
    model = ModelParams.initialize(config.model_config(), table.matrix, seed=[config.seed, 1])

    encoded_train = _encode_labeled(train_part, vocab)
    heldout_ids = [vocab.encode(c.tokens) for c in heldout]
    heldout_gold = [c.gold for c in heldout]
    heldout_ts = [c.ts for c in heldout]

    best = model.snapshot()
    best_auc = -np.inf
    best_epoch = 0
    bad_epochs = 0
    stopped_early = False
    losses: list[float] = []
    aucs: list[float] = []
    first_epoch_batches: list[float] = []

    n_train = len(encoded_train)
    use_dropout = config.variant == "cnn" and config.dropout_p > 0.0
    for epoch in range(1, config.max_epochs + 1):
        order = np.random.default_rng([config.seed, 2, epoch]).permutation(n_train)
        epoch_loss = 0.0
        for b_start in range(0, n_train, config.batch_size):
            idx = order[b_start : b_start + config.batch_size]
            batch = [encoded_train[i] for i in idx]
            dropout_seed = [config.seed, 3, epoch, b_start] if use_dropout else None
            loss = compute_gradients(batch, model, dropout_seed=dropout_seed)
            adam_step(model.params, config.adam)
            epoch_loss += loss * len(batch)
            if epoch == 1:
                first_epoch_batches.append(loss)
        losses.append(epoch_loss / n_train)

        snap = model.snapshot()
        epoch_auc = _heldout_auc(snap, heldout_ids, heldout_gold, heldout_ts)
        aucs.append(epoch_auc)
        if epoch_auc > best_auc:
            best_auc, best, best_epoch = epoch_auc, snap, epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                stopped_early = True
                break

    report = TrainReport(
        train_loss=losses,
        heldout_auc=aucs,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
        wall_time_sec=time.monotonic() - t0,
        first_epoch_batch_losses=first_epoch_batches,
    )
    return TrainedModel(params=best, vocab=vocab, seed=config.seed), report


def save_trained(path, trained: TrainedModel) -> None:
    """Checkpoint directory: manifest + one float32 file per parameter + the
    vocabulary TSV."""
    manifest = trained.params.manifest(
        vocab_fingerprint=trained.vocab.fingerprint(), seed=trained.seed
    )
    save_checkpoint(path, manifest, trained.params.params)
    trained.vocab.save_tsv(Path(path) / VOCAB_FILE)


def load_trained(path) -> TrainedModel:
    manifest, arrays = load_checkpoint(path)
    vocab = Vocabulary.load_tsv(Path(path) / VOCAB_FILE)
    if manifest.get("vocab_fingerprint") and manifest["vocab_fingerprint"] != vocab.fingerprint():
        raise ValueError("vocabulary file does not match the checkpoint manifest")
    params = ModelParams.from_checkpoint(manifest, arrays)
    return TrainedModel(params=params, vocab=vocab, seed=manifest.get("seed"))


def score_comments(trained: TrainedModel, comments: Sequence[Comment]) -> ScoredSet:
    """Score labeled comments into a ScoredSet for evaluation or tuning."""
    golds = []
    scores = []
    ts = []
    for c in comments:
        if c.gold is None:
            raise ValueError(f"comment {c.id!r} has no gold label")
        scores.append(predict(trained.vocab.encode(c.tokens), trained.params).p)
        golds.append(c.gold)
        ts.append(c.ts)
    return ScoredSet.build(scores, golds, ts)
