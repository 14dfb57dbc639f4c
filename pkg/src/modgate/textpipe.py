"""Text plumbing: tokenization, vocabulary, embeddings, dataset I/O, and a
synthetic corpus generator.

Tokenization is deliberately simple and language-agnostic: lowercase, maximal
runs of Unicode letters/digits become word tokens, every other non-space
character is its own token.  Vocabularies are frozen after construction and
reserve one out-of-vocabulary index past the last real token.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .gradcore import glorot_init

__all__ = [
    "Comment",
    "Vocabulary",
    "EmbeddingTable",
    "FormatError",
    "tokenize",
    "build_vocab",
    "random_embeddings",
    "load_embeddings",
    "read_dataset",
    "write_dataset",
    "gen_synthetic",
    "MAX_TOKENS",
]

# Word tokens are maximal alnum runs; underscore counts as punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+|[^\w\s]|_", re.UNICODE)

# Comments are truncated to this many tokens before modeling; real comment
# streams have medians well under 50 tokens, so truncation is rare.
MAX_TOKENS = 512

OOV_TOKEN = "<oov>"


class FormatError(ValueError):
    """Malformed input file; carries the offending line number when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        super().__init__(message)
        self.path = path
        self.line = line


def tokenize(text: str) -> list[str]:
    """Lowercase and split into word and punctuation tokens.

    >>> tokenize("You IDIOT!!")
    ['you', 'idiot', '!', '!']
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Comment:
    """One unit of moderation.

    ``gold`` is the probability the comment should be rejected (0.0 / 1.0 for
    binary labels, in between for probabilistic ones) or None when unlabeled.
    """

    id: str
    text: str
    tokens: tuple[str, ...]
    gold: float | None = None
    ts: int = 0

    def __post_init__(self) -> None:
        if self.gold is not None and not (0.0 <= self.gold <= 1.0):
            raise ValueError(f"gold label {self.gold!r} outside [0, 1]")

    @classmethod
    def from_text(cls, id: str, text: str, gold: float | None = None, ts: int = 0) -> "Comment":
        toks = tuple(tokenize(text)[:MAX_TOKENS])
        return cls(id=id, text=text, tokens=toks, gold=gold, ts=ts)

    @property
    def k(self) -> int:
        return len(self.tokens)


class Vocabulary:
    """Frozen token -> index map with a reserved out-of-vocabulary slot.

    Indices 0..size-1 are real tokens ordered by descending training-set
    document frequency (ties alphabetical); ``oov_index`` == size.
    """

    def __init__(self, tokens: Sequence[str], doc_freq: dict[str, int], min_freq: int):
        self.index_to_token: tuple[str, ...] = tuple(tokens)
        self.token_to_index: dict[str, int] = {t: i for i, t in enumerate(self.index_to_token)}
        if len(self.token_to_index) != len(self.index_to_token):
            raise ValueError("duplicate tokens in vocabulary")
        self.doc_freq = dict(doc_freq)
        self.min_freq = min_freq

    @property
    def size(self) -> int:
        return len(self.index_to_token)

    @property
    def oov_index(self) -> int:
        return len(self.index_to_token)

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        oov = self.oov_index
        get = self.token_to_index.get
        return np.fromiter((get(t, oov) for t in tokens), dtype=np.int64)

    def decode(self, ids: Iterable[int]) -> list[str]:
        toks = self.index_to_token
        n = len(toks)
        return [toks[i] if 0 <= i < n else OOV_TOKEN for i in ids]

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    def to_tsv(self) -> str:
        lines = [
            f"{tok}\t{i}\t{self.doc_freq.get(tok, 0)}"
            for i, tok in enumerate(self.index_to_token)
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def save_tsv(self, path) -> None:
        Path(path).write_text(self.to_tsv(), encoding="utf-8")

    @classmethod
    def load_tsv(cls, path, min_freq: int = 1) -> "Vocabulary":
        rows: list[tuple[str, int, int]] = []
        text = Path(path).read_text(encoding="utf-8")
        for n, line in enumerate(text.splitlines(), start=1):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"bad vocabulary row, line {n}", path=path, line=n)
            rows.append((parts[0], int(parts[1]), int(parts[2])))
        rows.sort(key=lambda r: r[1])
        if [r[1] for r in rows] != list(range(len(rows))):
            raise FormatError("vocabulary indices are not contiguous", path=path)
        return cls([r[0] for r in rows], {r[0]: r[2] for r in rows}, min_freq)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_tsv().encode("utf-8")).hexdigest()


def build_vocab(corpus: Iterable, min_freq: int = 2) -> Vocabulary:
    """Build a vocabulary from texts or Comments.

    Document frequency counts each token once per comment; tokens seen in
    fewer than ``min_freq`` comments map to the OOV index.  Index order is
    descending document frequency, ties alphabetical, so two runs over the
    same corpus agree exactly.
    """
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    df: Counter[str] = Counter()
    for item in corpus:
        toks = item.tokens if isinstance(item, Comment) else tokenize(item)
        df.update(set(toks))
    kept = [t for t, n in df.items() if n >= min_freq]
    kept.sort(key=lambda t: (-df[t], t))
    return Vocabulary(kept, {t: df[t] for t in kept}, min_freq)


@dataclass(frozen=True)
class EmbeddingTable:
    """Dense word embeddings: one row per vocabulary token plus an OOV row."""

    matrix: np.ndarray  # (|V| + 1, d), float64

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2:
            raise ValueError("embedding matrix must be 2-D")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("embedding matrix contains non-finite entries")

    @property
    def d(self) -> int:
        return self.matrix.shape[1]

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]


def _random_row(d: int, rng: np.random.Generator) -> np.ndarray:
    # One embedding row drawn with the Glorot scheme for a (1, d) tensor.
    return glorot_init(1, d, rng).ravel()


def random_embeddings(vocab: Vocabulary, d: int, seed) -> EmbeddingTable:
    """Random init for every row, including the OOV row."""
    rng = np.random.default_rng(seed)
    rows = [_random_row(d, rng) for _ in range(vocab.size + 1)]
    return EmbeddingTable(np.vstack(rows) if rows else np.zeros((1, d)))


def load_embeddings(path, vocab: Vocabulary, d: int, seed=0) -> tuple[EmbeddingTable, float]:
    """Load pretrained vectors in word-vector text format.

    Format: header line ``<count> <dim>``, then one ``<token> <v1> .. <vdim>``
    line per word.  Vocabulary tokens present in the file keep their vectors;
    missing tokens and the OOV row get random rows (drawn deterministically
    from ``seed`` in index order, so results do not depend on file order).
    Returns the table and the fraction of the vocabulary found.
    """
    path = Path(path)
    rng = np.random.default_rng(seed)
    matrix = np.empty((vocab.size + 1, d))
    for i in range(vocab.size + 1):
        matrix[i] = _random_row(d, rng)

    found: set[int] = set()
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise FormatError("embedding header must be '<count> <dim>', line 1", path=path, line=1)
        try:
            file_dim = int(parts[1])
        except ValueError:
            raise FormatError("embedding header must be '<count> <dim>', line 1", path=path, line=1)
        if file_dim != d:
            raise FormatError(
                f"embedding dimension mismatch: file has {file_dim}, expected {d}",
                path=path,
                line=1,
            )
        for n, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split(" ")
            if len(cols) != d + 1:
                raise FormatError(
                    f"expected {d + 1} fields, got {len(cols)}, line {n}", path=path, line=n
                )
            token = cols[0]
            idx = vocab.token_to_index.get(token)
            if idx is None or idx in found:
                continue
            try:
                vec = np.array([float(x) for x in cols[1:]])
            except ValueError:
                raise FormatError(f"non-numeric embedding value, line {n}", path=path, line=n)
            matrix[idx] = vec
            found.add(idx)
    coverage = len(found) / vocab.size if vocab.size else 1.0
    return EmbeddingTable(matrix), coverage


def read_dataset(path) -> list[Comment]:
    """Read a JSON-lines dataset: {"id", "text", "label"?, "ts"?} per line."""
    path = Path(path)
    out: list[Comment] = []
    with path.open("r", encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise FormatError(f"invalid JSON, line {n}", path=path, line=n)
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise FormatError(f"missing required field, line {n}", path=path, line=n)
            label = obj.get("label")
            if label is not None:
                if not isinstance(label, (int, float)) or not (0.0 <= label <= 1.0):
                    raise FormatError(f"label out of range, line {n}", path=path, line=n)
                label = float(label)
            ts = obj.get("ts", 0)
            if not isinstance(ts, int):
                raise FormatError(f"ts must be an integer, line {n}", path=path, line=n)
            out.append(Comment.from_text(str(obj["id"]), str(obj["text"]), gold=label, ts=ts))
    return out


def write_dataset(path, comments: Iterable[Comment]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for c in comments:
            obj: dict = {"id": c.id, "text": c.text}
            if c.gold is not None:
                obj["label"] = c.gold
            obj["ts"] = c.ts
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


# Lexicons for the synthetic corpus are fixed across seeds so document
# frequencies stay comparable between generated datasets.
_LEXICON_SEED = 20150101
_N_BENIGN = 2000
_N_TRIGGER = 50


def _pseudo_words(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    consonants = "bdfgklmnprstvz"
    vowels = "aeiou"
    words: list[str] = []
    while len(words) < count:
        n_syll = int(rng.integers(2, 4))
        w = "".join(
            consonants[rng.integers(len(consonants))] + vowels[rng.integers(len(vowels))]
            for _ in range(n_syll)
        )
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def _lexicons() -> tuple[list[str], list[str]]:
    rng = np.random.default_rng(_LEXICON_SEED)
    taken: set[str] = set()
    benign = _pseudo_words(rng, _N_BENIGN, taken)
    triggers = _pseudo_words(rng, _N_TRIGGER, taken)
    return benign, triggers


def gen_synthetic(n: int, reject_ratio: float, seed: int) -> list[Comment]:
    """Deterministic stand-in corpus with planted rejection triggers.

    Each comment draws 5..40 tokens from a 2,000-word benign lexicon;
    rejected comments additionally contain 1..3 tokens from a disjoint
    50-word trigger lexicon, so the presence of a trigger separates the
    classes perfectly.  Timestamps increase strictly with position.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if not (0.0 < reject_ratio < 1.0):
        raise ValueError("reject_ratio must lie strictly between 0 and 1")
    benign, triggers = _lexicons()
    # stream-namespaced so a seed shared with other components (e.g. the
    # trainer's held-out split) cannot produce correlated permutations
    rng = np.random.default_rng([0x67656E, seed])
    n_reject = int(round(n * reject_ratio))
    labels = np.zeros(n, dtype=bool)
    labels[rng.permutation(n)[:n_reject]] = True

    out: list[Comment] = []
    base_ts = 1_500_000_000
    for i in range(n):
        k = int(rng.integers(5, 41))
        toks = [benign[j] for j in rng.integers(0, len(benign), size=k)]
        if labels[i]:
            n_trig = int(rng.integers(1, 4))
            positions = rng.choice(k, size=min(n_trig, k), replace=False)
            for pos in positions:
                toks[pos] = triggers[int(rng.integers(0, len(triggers)))]
        text = " ".join(toks)
        out.append(
            Comment.from_text(
                id=f"s{i:06d}", text=text, gold=1.0 if labels[i] else 0.0, ts=base_ts + i
            )
        )
    return out


def trigger_lexicon() -> frozenset[str]:
    """The planted trigger words of :func:`gen_synthetic` (for oracle scans)."""
    return frozenset(_lexicons()[1])
