"""Minimal differentiable-computation kernel.

Every trainable tensor in this package is a float64 numpy array wrapped in a
:class:`Param`, which carries its gradient buffer and Adam state.  Model code
computes analytic gradients by hand; :func:`finite_diff_check` is the
central-difference referee used by the test suite and the ``check-grad``
command.  No autograd, no GPU: plain arrays all the way down.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "AdamConfig",
    "Param",
    "glorot_init",
    "sigmoid",
    "relu",
    "softmax_stable",
    "cross_entropy",
    "adam_step",
    "finite_diff_check",
    "save_checkpoint",
    "load_checkpoint",
    "CLAMP",
]

# Probability clamp for the loss; keeps log() finite without affecting any
# tolerance used in tests.
CLAMP = 1e-7

MANIFEST_NAME = "manifest.json"


@dataclass
class AdamConfig:
    """Adam hyperparameters. Defaults are the optimizer's canonical values;
    ``clip_norm`` applies global-norm gradient clipping before the update."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float | None = 5.0

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("betas must lie in [0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


class Param:
    """A learnable tensor: value, gradient, and per-parameter Adam state."""

    __slots__ = ("value", "grad", "adam_m", "adam_v", "step_count")

    def __init__(self, value: np.ndarray):
        self.value = np.ascontiguousarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.adam_m = np.zeros_like(self.value)
        self.adam_v = np.zeros_like(self.value)
        self.step_count = 0

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def zero_grad(self) -> None:
        self.grad[...] = 0.0

    def __repr__(self) -> str:  # pragma: no cover
        return f"Param(shape={self.value.shape}, steps={self.step_count})"


def glorot_init(fan_in: int, fan_out: int, seed) -> np.ndarray:
    """Uniform Glorot draw of shape ``(fan_out, fan_in)``.

    Entries are i.i.d. uniform on [-L, L] with L = sqrt(6 / (fan_in + fan_out)).
    ``seed`` may be an int or a numpy Generator.
    """
    if fan_in < 1 or fan_out < 1:
        raise ValueError("fan_in and fan_out must be >= 1")
    rng = np.random.default_rng(seed)
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


def sigmoid(x):
    """Elementwise logistic function, overflow-safe for any finite input."""
    x = np.asarray(x, dtype=np.float64)
    t = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))


def relu(x):
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def softmax_stable(scores) -> np.ndarray:
    """Softmax of a 1-D score sequence, shifted by the max for stability."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("softmax of an empty sequence is undefined")
    if not np.all(np.isfinite(s)):
        raise ValueError("softmax requires finite scores")
    e = np.exp(s - s.max())
    return e / e.sum()


def cross_entropy(p: float, y: float) -> float:
    """Binary cross-entropy with soft targets.

    ``p`` is clamped to [CLAMP, 1 - CLAMP] so perfect or degenerate
    predictions stay finite.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError("p and y must lie in [0, 1]")
    ph = min(max(p, CLAMP), 1.0 - CLAMP)
    return -(y * math.log(ph) + (1.0 - y) * math.log(1.0 - ph))


def adam_step(params: Mapping[str, Param], cfg: AdamConfig) -> None:
    """One bias-corrected Adam update over all params, then zero the grads.

    Global-norm clipping (when ``cfg.clip_norm`` is set) rescales all
    gradients jointly before the update.  Raises on non-finite gradients,
    naming the offending parameter.
    """
    for name, p in params.items():
        if not np.all(np.isfinite(p.grad)):
            raise ValueError(f"non-finite gradient in parameter '{name}'")
    scale = 1.0
    if cfg.clip_norm is not None:
        total = math.sqrt(sum(float(np.sum(p.grad * p.grad)) for p in params.values()))
        if total > cfg.clip_norm > 0.0:
            scale = cfg.clip_norm / total
    for p in params.values():
        g = p.grad if scale == 1.0 else p.grad * scale
        p.step_count += 1
        t = p.step_count
        p.adam_m *= cfg.beta1
        p.adam_m += (1.0 - cfg.beta1) * g
        p.adam_v *= cfg.beta2
        p.adam_v += (1.0 - cfg.beta2) * (g * g)
        m_hat = p.adam_m / (1.0 - cfg.beta1**t)
        v_hat = p.adam_v / (1.0 - cfg.beta2**t)
        p.value -= cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
        p.grad[...] = 0.0


def finite_diff_check(
    f: Callable[[], float],
    params: Mapping[str, Param],
    epsilon: float = 1e-5,
) -> float:
    """Compare analytic gradients against central differences.

    ``f`` re-evaluates the scalar objective from the current param values;
    the analytic gradient must already be stored in each ``Param.grad``.
    Every entry of every param is perturbed by +/- epsilon in place (and
    restored).  Returns the worst relative error
    ``|a - n| / max(1e-8, |a| + |n|)`` over all entries.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    worst = 0.0
    for p in params.values():
        flat = p.value.reshape(-1)
        gflat = p.grad.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + epsilon
            f_plus = f()
            flat[i] = orig - epsilon
            f_minus = f()
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * epsilon)
            analytic = gflat[i]
            err = abs(analytic - numeric) / max(1e-8, abs(analytic) + abs(numeric))
            if err > worst:
                worst = err
    return worst


def save_checkpoint(path, manifest: dict, params: Mapping[str, Param]) -> None:
    """Write a checkpoint directory.

    Layout: ``manifest.json`` plus one raw little-endian float32 file per
    parameter (row-major, filename = parameter name).  The manifest gains a
    ``shapes`` map so files can be reloaded without outside knowledge.
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    mani = dict(manifest)
    mani.setdefault("format_version", 1)
    mani["shapes"] = {name: list(p.value.shape) for name, p in params.items()}
    (root / MANIFEST_NAME).write_text(
        json.dumps(mani, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for name, p in params.items():
        data = np.ascontiguousarray(p.value, dtype="<f4").tobytes()
        (root / name).write_bytes(data)


def load_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Read a checkpoint directory back into (manifest, name -> float64 array)."""
    root = Path(path)
    mani_path = root / MANIFEST_NAME
    if not mani_path.is_file():
        raise FileNotFoundError(f"no checkpoint manifest at {mani_path}")
    manifest = json.loads(mani_path.read_text(encoding="utf-8"))
    arrays: dict[str, np.ndarray] = {}
    for name, shape in manifest["shapes"].items():
        raw = (root / name).read_bytes()
        n_expected = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(raw, dtype="<f4")
        if arr.size != n_expected:
            raise ValueError(
                f"parameter file '{name}' holds {arr.size} floats, expected {n_expected}"
            )
        arrays[name] = arr.astype(np.float64).reshape(shape)
    return manifest, arrays


def checkpoint_exists(path) -> bool:
    return os.path.isfile(os.path.join(path, MANIFEST_NAME))
