"""Desk-scale gradient audit shared by the test suite and ``check-grad``.

Builds a small random instance of one variant (d=8, m=8, attention 6 wide
and 3 deep, 3 kernels per n-gram size), populates analytic gradients for a
two-comment batch, and referees them against central differences.

Every parameter, biases included, gets a small random offset after init:
zero biases would park ReLU kinks exactly at the evaluation point, where
one-sided slopes and central differences legitimately disagree.  Checking
at a generic point tests the same code path without that degeneracy.
"""

from __future__ import annotations

import numpy as np

from .gradcore import cross_entropy, finite_diff_check
from .models import ModelConfig, ModelParams, _forward, compute_gradients

__all__ = ["DESK_CONFIG", "build_instance", "gradient_check"]

_VOCAB_SIZE = 5


def desk_config(variant: str) -> ModelConfig:
    return ModelConfig(
        variant=variant,
        d=8,
        m=8,
        r=6,
        layers=3,
        ngram_sizes=(1, 2, 3),
        kernels_per_size=3,
        dropout_p=0.5,
    )


def build_instance(variant: str, seed) -> tuple[ModelParams, list[tuple[np.ndarray, float]]]:
    """Random small model plus a two-comment batch (k <= 6, OOV id included)."""
    rng = np.random.default_rng(seed)
    cfg = desk_config(variant)
    emb = rng.normal(0.0, 0.5, size=(_VOCAB_SIZE + 1, cfg.d))
    model = ModelParams.initialize(cfg, emb, seed=rng)
    for p in model.params.values():
        p.value += rng.normal(0.0, 0.1, size=p.value.shape)
    batch = []
    for j in range(2):
        k = int(rng.integers(1, 7))
        ids = rng.integers(0, _VOCAB_SIZE + 1, size=k)
        if j == 0:
            ids[0] = _VOCAB_SIZE  # make sure the OOV row gets gradient
        batch.append((ids, float(rng.random())))
    return model, batch


def _batch_loss(batch, model: ModelParams, dropout_seed) -> float:
    train_mode = dropout_seed is not None
    total = 0.0
    for i, (ids, gold) in enumerate(batch):
        tr = _forward(
            ids, model, train_mode=train_mode,
            dropout_seed=(dropout_seed, i) if train_mode else 0,
        )
        total += cross_entropy(tr["p"], gold)
    return total / len(batch)


def gradient_check(variant: str, seed, epsilon: float = 1e-5) -> float:
    """Worst relative error between analytic and numeric gradients.

    The CNN runs in train mode with a seed-fixed dropout mask so the
    dropout scaling path is checked too.
    """
    model, batch = build_instance(variant, seed)
    dropout_seed = int(np.random.default_rng(seed).integers(1 << 31)) if variant == "cnn" else None
    model.zero_grads()
    compute_gradients(batch, model, dropout_seed=dropout_seed)
    return finite_diff_check(
        lambda: _batch_loss(batch, model, dropout_seed), model.params, epsilon=epsilon
    )
