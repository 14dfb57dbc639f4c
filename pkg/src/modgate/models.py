"""Scoring models for comment moderation.

All variants output p = P(reject | comment):

* ``rnn``      GRU chain, logistic head on the last hidden state.
* ``a_rnn``    GRU chain, deep-MLP attention over hidden states, head on the
               attention-weighted sum of hidden states.
* ``da_rnn``   like ``a_rnn`` but the attention MLP reads raw word embeddings
               instead of hidden states (the weighted sum is still over
               hidden states).
* ``eq_rnn``   uniform weights: head on the mean hidden state.
* ``da_cent``  no recurrence: attention over embeddings, head on the
               attention-weighted embedding centroid.
* ``eq_cent``  head on the plain embedding centroid.
* ``cnn``      n-gram convolutions over embeddings, max-pooling, dropout,
               logistic head.
* word list    per-word rejection precision baseline (:func:`list_build`,
               :func:`list_score`).

Forward passes cache everything needed for backprop; gradients are derived
by hand and validated against central differences (see gradcore).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .gradcore import CLAMP, Param, cross_entropy, glorot_init, relu, sigmoid, softmax_stable
from .textpipe import Comment, Vocabulary

__all__ = [
    "VARIANTS",
    "ModelConfig",
    "ModelParams",
    "Prediction",
    "WordList",
    "gru_step",
    "gru_forward",
    "attention_weights",
    "predict",
    "compute_gradients",
    "list_build",
    "list_score",
    "save_wordlist",
    "load_wordlist",
    "NeuralScorer",
    "ListScorer",
]

# Neural variants; the word-list baseline lives outside ModelParams.
VARIANTS = ("rnn", "a_rnn", "da_rnn", "eq_rnn", "da_cent", "eq_cent", "cnn")

_GRU_VARIANTS = frozenset({"rnn", "a_rnn", "da_rnn", "eq_rnn"})
_ATTN_VARIANTS = frozenset({"a_rnn", "da_rnn", "da_cent"})


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters.

    Defaults match the full-scale setup (d=300, m=r=128, 4 attention layers,
    300 kernels per n-gram size); every dimension is configurable so tests
    can run desk-scale instances.
    """

    variant: str
    d: int = 300
    m: int = 128
    r: int = 128
    layers: int = 4
    ngram_sizes: tuple[int, ...] = (1, 2, 3, 4)
    kernels_per_size: int = 300
    dropout_p: float = 0.5

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.layers < 2:
            raise ValueError("attention MLP needs at least 2 layers")
        if not (0.0 <= self.dropout_p < 1.0):
            raise ValueError("dropout_p must lie in [0, 1)")
        if self.variant == "cnn":
            if not self.ngram_sizes or any(n < 1 for n in self.ngram_sizes):
                raise ValueError("ngram sizes must be positive")
            if self.kernels_per_size < 1:
                raise ValueError("kernels_per_size must be >= 1")

    @property
    def uses_gru(self) -> bool:
        return self.variant in _GRU_VARIANTS

    @property
    def uses_attention(self) -> bool:
        return self.variant in _ATTN_VARIANTS

    @property
    def attention_input_dim(self) -> int:
        # a_rnn attends over hidden states; the direct variants read embeddings.
        return self.m if self.variant == "a_rnn" else self.d

    @property
    def head_input_dim(self) -> int:
        if self.variant in ("da_cent", "eq_cent"):
            return self.d
        if self.variant == "cnn":
            return self.kernels_per_size * len(self.ngram_sizes)
        return self.m


@dataclass
class Prediction:
    """p = P(reject | comment), plus per-token attention when the variant
    produces it and the cached forward trace when requested."""

    p: float
    attention: np.ndarray | None = None
    trace: dict | None = field(default=None, repr=False)


class ModelParams:
    """Named parameter bundle for one variant.

    Parameter names double as checkpoint filenames; iteration order is the
    insertion order used at init, which keeps runs reproducible.
    """

    def __init__(self, config: ModelConfig, params: dict[str, Param]):
        self.config = config
        self.params = params

    def __getitem__(self, name: str) -> Param:
        return self.params[name]

    def value(self, name: str) -> np.ndarray:
        return self.params[name].value

    def zero_grads(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    @property
    def vocab_rows(self) -> int:
        return self.params["E"].value.shape[0]

    @classmethod
    def initialize(cls, config: ModelConfig, embeddings: np.ndarray, seed) -> "ModelParams":
        """Glorot-initialized parameters; biases start at zero.

        ``embeddings`` is the (|V| + 1, d) initial table (pretrained or
        random); it becomes the trainable "E" parameter.
        """
        if embeddings.shape[1] != config.d:
            raise ValueError(
                f"embedding width {embeddings.shape[1]} does not match config d={config.d}"
            )
        rng = np.random.default_rng(seed)
        d, m, r = config.d, config.m, config.r
        params: dict[str, Param] = {"E": Param(embeddings.copy())}
        if config.uses_gru:
            for gate in ("h", "z", "r"):
                params[f"W_{gate}"] = Param(glorot_init(d, m, rng))
                params[f"U_{gate}"] = Param(glorot_init(m, m, rng))
                params[f"b_{gate}"] = Param(np.zeros(m))
        if config.uses_attention:
            in_dim = config.attention_input_dim
            for j in range(1, config.layers):
                params[f"attn_W{j}"] = Param(glorot_init(in_dim if j == 1 else r, r, rng))
                params[f"attn_b{j}"] = Param(np.zeros(r))
            params[f"attn_W{config.layers}"] = Param(glorot_init(r, 1, rng))
            params[f"attn_b{config.layers}"] = Param(np.zeros(1))
        if config.variant == "cnn":
            for n in config.ngram_sizes:
                bank = glorot_init(n * d, config.kernels_per_size, rng)
                params[f"cnn_W_n{n}"] = Param(bank.reshape(config.kernels_per_size, n, d))
                params[f"cnn_b_n{n}"] = Param(np.zeros(config.kernels_per_size))
        params["W_p"] = Param(glorot_init(config.head_input_dim, 1, rng))
        params["b_p"] = Param(np.zeros(1))
        return cls(config, params)

    def snapshot(self) -> "ModelParams":
        """Float32-quantized copy with fresh optimizer state.

        Checkpoints store 32-bit floats, so evaluating and saving the same
        quantized snapshot makes save/load round trips exact.
        """
        quantized = {
            name: Param(p.value.astype(np.float32).astype(np.float64))
            for name, p in self.params.items()
        }
        return ModelParams(self.config, quantized)

    def manifest(self, vocab_fingerprint: str = "", seed=None) -> dict:
        cfg = self.config
        mani = {
            "variant": cfg.variant,
            "d": cfg.d,
            "m": cfg.m,
            "r": cfg.r,
            "l": cfg.layers,
            "vocab_fingerprint": vocab_fingerprint,
            "seed": seed,
        }
        if cfg.variant == "cnn":
            mani["ngram_sizes"] = list(cfg.ngram_sizes)
            mani["kernels_per_size"] = cfg.kernels_per_size
            mani["dropout_p"] = cfg.dropout_p
        return mani

    @classmethod
    def from_checkpoint(cls, manifest: dict, arrays: dict[str, np.ndarray]) -> "ModelParams":
        config = ModelConfig(
            variant=manifest["variant"],
            d=manifest["d"],
            m=manifest["m"],
            r=manifest["r"],
            layers=manifest["l"],
            ngram_sizes=tuple(manifest.get("ngram_sizes", (1, 2, 3, 4))),
            kernels_per_size=manifest.get("kernels_per_size", 300),
            dropout_p=manifest.get("dropout_p", 0.5),
        )
        return cls(config, {name: Param(arr) for name, arr in arrays.items()})


# ---------------------------------------------------------------------------
# GRU chain
# ---------------------------------------------------------------------------


def gru_step(
    x: np.ndarray, h_prev: np.ndarray, params: Mapping[str, Param]
) -> tuple[np.ndarray, dict]:
    """One GRU step.

    r = sigmoid(W_r x + U_r h_prev + b_r)        reset gate
    z = sigmoid(W_z x + U_z h_prev + b_z)        update gate
    h~ = tanh(W_h x + U_h (r * h_prev) + b_h)    candidate state
    h = (1 - z) * h_prev + z * h~

    Returns the new state and a gate trace {"r", "z", "h_tilde"}.
    """
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    r = sigmoid(params["W_r"].value @ x + params["U_r"].value @ h_prev + params["b_r"].value)
    z = sigmoid(params["W_z"].value @ x + params["U_z"].value @ h_prev + params["b_z"].value)
    h_tilde = np.tanh(
        params["W_h"].value @ x + params["U_h"].value @ (r * h_prev) + params["b_h"].value
    )
    h = (1.0 - z) * h_prev + z * h_tilde
    return h, {"r": r, "z": z, "h_tilde": h_tilde}


def gru_forward(X: np.ndarray, params: Mapping[str, Param]) -> tuple[np.ndarray, dict]:
    """Run the GRU chain over embedded tokens X of shape (k, d), from h_0 = 0.

    Returns H of shape (k, m) and the trace arrays needed for backprop.
    Input projections are batched up front; the recurrence itself is
    necessarily sequential.
    """
    Wh, Wz, Wr = params["W_h"].value, params["W_z"].value, params["W_r"].value
    Uh, Uz, Ur = params["U_h"].value, params["U_z"].value, params["U_r"].value
    bh, bz, br = params["b_h"].value, params["b_z"].value, params["b_r"].value
    k = X.shape[0]
    m = bh.shape[0]
    H = np.empty((k, m))
    R = np.empty((k, m))
    Z = np.empty((k, m))
    HN = np.empty((k, m))
    Hprev = np.empty((k, m))
    if k:
        PH = X @ Wh.T + bh
        PZ = X @ Wz.T + bz
        PR = X @ Wr.T + br
        h = np.zeros(m)
        for t in range(k):
            Hprev[t] = h
            r = sigmoid(PR[t] + Ur @ h)
            z = sigmoid(PZ[t] + Uz @ h)
            hn = np.tanh(PH[t] + Uh @ (r * h))
            h = (1.0 - z) * h + z * hn
            R[t], Z[t], HN[t], H[t] = r, z, hn, h
    return H, {"R": R, "Z": Z, "HN": HN, "Hprev": Hprev}


def _gru_backward(
    trace: dict, dH: np.ndarray, model: ModelParams, dX: np.ndarray
) -> None:
    """Backprop through time; accumulates param grads and input grads dX."""
    X = trace["X"]
    R, Z, HN, Hprev = trace["R"], trace["Z"], trace["HN"], trace["Hprev"]
    p = model.params
    Wh, Wz, Wr = p["W_h"].value, p["W_z"].value, p["W_r"].value
    Uh, Uz, Ur = p["U_h"].value, p["U_z"].value, p["U_r"].value
    k, m = dH.shape
    DC = np.empty((k, m))
    DAZ = np.empty((k, m))
    DAR = np.empty((k, m))
    dh_next = np.zeros(m)
    for t in range(k - 1, -1, -1):
        dh = dH[t] + dh_next
        z, hn, hp, r = Z[t], HN[t], Hprev[t], R[t]
        dz = dh * (hn - hp)
        dc = (dh * z) * (1.0 - hn * hn)
        daz = dz * z * (1.0 - z)
        u = Uh.T @ dc  # gradient wrt (r * h_prev)
        dar = (u * hp) * r * (1.0 - r)
        dh_next = dh * (1.0 - z) + u * r + Uz.T @ daz + Ur.T @ dar
        DC[t], DAZ[t], DAR[t] = dc, daz, dar
    p["W_h"].grad += DC.T @ X
    p["U_h"].grad += DC.T @ (R * Hprev)
    p["b_h"].grad += DC.sum(axis=0)
    p["W_z"].grad += DAZ.T @ X
    p["U_z"].grad += DAZ.T @ Hprev
    p["b_z"].grad += DAZ.sum(axis=0)
    p["W_r"].grad += DAR.T @ X
    p["U_r"].grad += DAR.T @ Hprev
    p["b_r"].grad += DAR.sum(axis=0)
    dX += DC @ Wh + DAZ @ Wz + DAR @ Wr


# ---------------------------------------------------------------------------
# Attention MLP
# ---------------------------------------------------------------------------


def _attention_forward(U: np.ndarray, model: ModelParams) -> tuple[np.ndarray, list[np.ndarray]]:
    """Score every position with a shared MLP, softmax across positions.

    Layers 1..l-1 are ReLU, layer l is a scalar affine map.  Returns the
    weights (k,) and the per-layer activations [inputs, A1, .., A_{l-1}].
    """
    layers = model.config.layers
    acts = [U]
    A = U
    for j in range(1, layers):
        A = relu(A @ model.value(f"attn_W{j}").T + model.value(f"attn_b{j}"))
        acts.append(A)
    scores = (A @ model.value(f"attn_W{layers}").T + model.value(f"attn_b{layers}")).ravel()
    return softmax_stable(scores), acts


def _attention_backward(
    da: np.ndarray, a: np.ndarray, acts: list[np.ndarray], model: ModelParams
) -> np.ndarray:
    """Backprop through softmax and the MLP; returns gradients wrt inputs (k, w)."""
    layers = model.config.layers
    ds = a * (da - float(a @ da))  # softmax jacobian applied to da
    p = model.params
    p[f"attn_W{layers}"].grad += (ds @ acts[layers - 1])[None, :]
    p[f"attn_b{layers}"].grad += ds.sum()
    dA = np.outer(ds, p[f"attn_W{layers}"].value.ravel())
    for j in range(layers - 1, 0, -1):
        dpre = dA * (acts[j] > 0.0)
        p[f"attn_W{j}"].grad += dpre.T @ acts[j - 1]
        p[f"attn_b{j}"].grad += dpre.sum(axis=0)
        dA = dpre @ p[f"attn_W{j}"].value
    return dA


def attention_weights(inputs: np.ndarray, model: ModelParams) -> np.ndarray:
    """Attention weights for a (k, w) input sequence; positive, sum to 1."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if inputs.shape[0] == 0:
        raise ValueError("attention over an empty sequence is undefined")
    a, _ = _attention_forward(inputs, model)
    return a


# ---------------------------------------------------------------------------
# CNN
# ---------------------------------------------------------------------------


def _dropout_mask(n: int, p_drop: float, seed) -> np.ndarray:
    # Inverted scaling: inference applies no mask and needs no rescale.
    if p_drop <= 0.0:
        return np.ones(n)
    rng = np.random.default_rng(seed)
    keep = 1.0 - p_drop
    return (rng.random(n) < keep).astype(np.float64) / keep


def _cnn_forward(X: np.ndarray, model: ModelParams, train_mode: bool, dropout_seed) -> dict:
    cfg = model.config
    k = X.shape[0]
    feats = []
    per_size = []
    for n in cfg.ngram_sizes:
        Xn = X if k >= n else np.vstack([X, np.zeros((n - k, cfg.d))])
        windows = sliding_window_view(Xn, (n, cfg.d)).reshape(-1, n * cfg.d)
        bank = model.value(f"cnn_W_n{n}").reshape(cfg.kernels_per_size, n * cfg.d)
        resp = relu(windows @ bank.T + model.value(f"cnn_b_n{n}"))  # (n_windows, K)
        argmax = resp.argmax(axis=0)
        pooled = resp[argmax, np.arange(resp.shape[1])]
        feats.append(pooled)
        per_size.append({"n": n, "windows": windows, "argmax": argmax, "pooled": pooled,
                         "pad_rows": Xn.shape[0]})
    features = np.concatenate(feats)
    mask = _dropout_mask(features.size, cfg.dropout_p, dropout_seed) if train_mode else None
    return {"per_size": per_size, "features": features, "mask": mask}


def _cnn_backward(trace: dict, dfeat: np.ndarray, model: ModelParams, dX: np.ndarray) -> None:
    cfg = model.config
    k = dX.shape[0]
    offset = 0
    for entry in trace["cnn"]["per_size"]:
        n = entry["n"]
        K = cfg.kernels_per_size
        dpool = dfeat[offset : offset + K]
        offset += K
        active = entry["pooled"] > 0.0  # ReLU already zeroed inactive kernels
        if not np.any(active):
            continue
        windows = entry["windows"]
        dresp = np.zeros((windows.shape[0], K))
        cols = np.nonzero(active)[0]
        dresp[entry["argmax"][cols], cols] = dpool[cols]
        bank = model.params[f"cnn_W_n{n}"]
        bank.grad += (dresp.T @ windows).reshape(K, n, cfg.d)
        model.params[f"cnn_b_n{n}"].grad += dresp.sum(axis=0)
        dwin = dresp @ bank.value.reshape(K, n * cfg.d)  # (n_windows, n*d)
        dXn = np.zeros((entry["pad_rows"], cfg.d))
        for w in range(windows.shape[0]):
            dXn[w : w + n] += dwin[w].reshape(n, cfg.d)
        dX += dXn[:k]


# ---------------------------------------------------------------------------
# Prediction and gradients
# ---------------------------------------------------------------------------


def _forward(
    ids: np.ndarray,
    model: ModelParams,
    attention_override: np.ndarray | None = None,
    train_mode: bool = False,
    dropout_seed=0,
) -> dict:
    cfg = model.config
    k = int(len(ids))
    if k == 0:
        # Empty comments carry no evidence; score them dead-center so the
        # service routes them to a human.
        attn = np.zeros(0) if cfg.uses_attention else None
        return {"k": 0, "p": 0.5, "attention": attn}
    ids = np.asarray(ids, dtype=np.int64)
    if ids.min() < 0 or ids.max() >= model.vocab_rows:
        raise ValueError("token id outside the embedding table")
    X = model.value("E")[ids]
    trace: dict = {"k": k, "ids": ids, "X": X, "variant": cfg.variant}

    H = None
    if cfg.uses_gru:
        H, gtr = gru_forward(X, model.params)
        trace.update(gtr)
        trace["H"] = H

    attention = None
    if cfg.uses_attention:
        attn_in = H if cfg.variant == "a_rnn" else X
        if attention_override is not None:
            a = np.asarray(attention_override, dtype=np.float64)
            if a.shape != (k,):
                raise ValueError("attention override must have one weight per token")
            trace["attn_overridden"] = True
        else:
            a, acts = _attention_forward(attn_in, model)
            trace["attn_acts"] = acts
        trace["a"] = a
        attention = a

    if cfg.variant == "rnn":
        v = H[-1]
    elif cfg.variant == "a_rnn" or cfg.variant == "da_rnn":
        v = trace["a"] @ H
    elif cfg.variant == "eq_rnn":
        v = H.mean(axis=0)
    elif cfg.variant == "da_cent":
        v = trace["a"] @ X
    elif cfg.variant == "eq_cent":
        v = X.mean(axis=0)
    else:  # cnn
        ctr = _cnn_forward(X, model, train_mode, dropout_seed)
        trace["cnn"] = ctr
        v = ctr["features"] if ctr["mask"] is None else ctr["features"] * ctr["mask"]

    z_out = float(model.value("W_p")[0] @ v + model.value("b_p")[0])
    trace["v"] = v
    trace["p"] = float(sigmoid(z_out))
    trace["attention"] = attention
    return trace


def _backward(trace: dict, dz: float, model: ModelParams) -> None:
    """Accumulate analytic gradients for one example given dL/dz_out."""
    cfg = model.config
    p = model.params
    v = trace["v"]
    p["W_p"].grad += dz * v[None, :]
    p["b_p"].grad += dz
    gv = dz * p["W_p"].value.ravel()

    k = trace["k"]
    X = trace["X"]
    dX = np.zeros_like(X)

    if cfg.variant == "rnn":
        dH = np.zeros_like(trace["H"])
        dH[-1] = gv
        _gru_backward(trace, dH, model, dX)
    elif cfg.variant == "eq_rnn":
        dH = np.tile(gv / k, (k, 1))
        _gru_backward(trace, dH, model, dX)
    elif cfg.variant in ("a_rnn", "da_rnn"):
        H, a = trace["H"], trace["a"]
        da = H @ gv
        dH = np.outer(a, gv)
        if not trace.get("attn_overridden"):
            d_in = _attention_backward(da, a, trace["attn_acts"], model)
            if cfg.variant == "a_rnn":
                dH += d_in
            else:
                dX += d_in
        _gru_backward(trace, dH, model, dX)
    elif cfg.variant == "da_cent":
        a = trace["a"]
        da = X @ gv
        dX += np.outer(a, gv)
        if not trace.get("attn_overridden"):
            dX += _attention_backward(da, a, trace["attn_acts"], model)
    elif cfg.variant == "eq_cent":
        dX += gv / k
    else:  # cnn
        mask = trace["cnn"]["mask"]
        dfeat = gv if mask is None else gv * mask
        _cnn_backward(trace, dfeat, model, dX)

    np.add.at(p["E"].grad, trace["ids"], dX)


def predict(
    ids: Sequence[int] | np.ndarray,
    model: ModelParams,
    attention_override: np.ndarray | None = None,
    train_mode: bool = False,
    dropout_seed=0,
    want_trace: bool = False,
) -> Prediction:
    """Score one encoded comment.

    ``attention_override`` substitutes the computed attention weights (used
    by the ablation-identity tests).  ``train_mode`` only matters for the
    CNN, where it enables the dropout mask derived from ``dropout_seed``.
    """
    trace = _forward(
        np.asarray(ids, dtype=np.int64),
        model,
        attention_override=attention_override,
        train_mode=train_mode,
        dropout_seed=dropout_seed,
    )
    return Prediction(
        p=trace["p"],
        attention=trace.get("attention"),
        trace=trace if want_trace else None,
    )


def compute_gradients(
    batch: Sequence[tuple[np.ndarray, float]],
    model: ModelParams,
    dropout_seed=None,
) -> float:
    """Mean cross-entropy over a batch of (token ids, gold) pairs, with
    analytic gradients accumulated into the model's params.

    When ``dropout_seed`` is given the CNN runs in train mode with a mask
    derived deterministically from (seed, example index); repeated calls at
    the same seed see identical masks, which is what lets finite differences
    check the dropout path.
    """
    if len(batch) == 0:
        raise ValueError("empty batch")
    scale = 1.0 / len(batch)
    total = 0.0
    train_mode = dropout_seed is not None
    for i, (ids, gold) in enumerate(batch):
        if gold is None:
            raise ValueError("unlabeled comment in training batch")
        trace = _forward(
            ids,
            model,
            train_mode=train_mode,
            dropout_seed=(dropout_seed, i) if train_mode else 0,
        )
        prob = trace["p"]
        total += cross_entropy(prob, gold)
        if trace["k"] == 0:
            continue  # constant p = 0.5, no gradient
        if CLAMP < prob < 1.0 - CLAMP:
            dz = (prob - gold) * scale
        else:
            dz = 0.0  # loss is clamped flat here
        _backward(trace, dz, model)
    return total * scale


# ---------------------------------------------------------------------------
# Word-precision list baseline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordList:
    """Per-word rejection precision over a labeled training set.

    ``entries`` maps token -> (document frequency, rejected_df / df).  Only
    tokens occurring in strictly more than ``min_df`` comments are kept.
    """

    entries: dict[str, tuple[int, float]]
    min_df: int


def list_build(comments: Sequence[Comment], min_df: int) -> WordList:
    """Count document frequencies and rejection precision per word.

    Probabilistic gold labels are thresholded at 0.5 (ties count as accept).
    Duplicated tokens within one comment count once.
    """
    labeled = [c for c in comments if c.gold is not None]
    if not labeled:
        raise ValueError("word list needs at least one labeled comment")
    df: dict[str, int] = {}
    rejected_df: dict[str, int] = {}
    for c in labeled:
        is_reject = c.gold > 0.5
        for tok in set(c.tokens):
            df[tok] = df.get(tok, 0) + 1
            if is_reject:
                rejected_df[tok] = rejected_df.get(tok, 0) + 1
    entries = {
        tok: (n, rejected_df.get(tok, 0) / n)
        for tok, n in df.items()
        if n > min_df
    }
    return WordList(entries=entries, min_df=min_df)


def list_score(tokens: Sequence[str], wordlist: WordList) -> float:
    """Max precision over the listed tokens of a comment; 0.0 if none listed."""
    best = 0.0
    entries = wordlist.entries
    for tok in tokens:
        e = entries.get(tok)
        if e is not None and e[1] > best:
            best = e[1]
    return best


def save_wordlist(path, wordlist: WordList) -> None:
    """TSV dump "token<TAB>doc_freq<TAB>precision", best precision first."""
    rows = sorted(wordlist.entries.items(), key=lambda kv: (-kv[1][1], kv[0]))
    with Path(path).open("w", encoding="utf-8") as fh:
        for tok, (n, prec) in rows:
            fh.write(f"{tok}\t{n}\t{prec!r}\n")


def load_wordlist(path, min_df: int = 0) -> WordList:
    entries: dict[str, tuple[int, float]] = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"bad word list row, line {n}")
        entries[parts[0]] = (int(parts[1]), float(parts[2]))
    return WordList(entries=entries, min_df=min_df)


# ---------------------------------------------------------------------------
# Scorer facades used by the service, evaluator, and CLI
# ---------------------------------------------------------------------------


class NeuralScorer:
    """Scores Comments with a trained ModelParams + Vocabulary pair."""

    def __init__(self, model: ModelParams, vocab: Vocabulary, version: str = ""):
        self.model = model
        self.vocab = vocab
        self.version = version or f"{model.config.variant}:{vocab.fingerprint()[:12]}"

    def score(self, comment: Comment) -> Prediction:
        return predict(self.vocab.encode(comment.tokens), self.model)


class ListScorer:
    """Scores Comments with a word-precision list."""

    def __init__(self, wordlist: WordList, version: str = "list"):
        self.wordlist = wordlist
        self.version = version

    def score(self, comment: Comment) -> Prediction:
        return Prediction(p=list_score(comment.tokens, self.wordlist), attention=None)
