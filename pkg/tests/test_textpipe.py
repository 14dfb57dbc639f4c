import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modgate.textpipe import (
    MAX_TOKENS,
    Comment,
    FormatError,
    Vocabulary,
    build_vocab,
    gen_synthetic,
    load_embeddings,
    random_embeddings,
    read_dataset,
    tokenize,
    trigger_lexicon,
    write_dataset,
)


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_lowercase_and_punct_split(self):
        assert tokenize("You IDIOT!!") == ["you", "idiot", "!", "!"]

    def test_unicode_letters_are_word_chars(self):
        assert tokenize("καλό σχόλιο") == ["καλό", "σχόλιο"]

    def test_digits_in_words(self):
        assert tokenize("win 3-0 vs APOEL") == ["win", "3", "-", "0", "vs", "apoel"]

    def test_underscore_is_punctuation(self):
        assert tokenize("a_b") == ["a", "_", "b"]

    @given(st.text(max_size=200))
    @settings(max_examples=200)
    def test_idempotent_on_joined_output(self, text):
        once = tokenize(text)
        assert tokenize(" ".join(once)) == once


class TestComment:
    def test_gold_range_validated(self):
        with pytest.raises(ValueError):
            Comment.from_text("x", "hi", gold=1.5)

    def test_truncation(self):
        text = " ".join(f"w{i}" for i in range(MAX_TOKENS + 40))
        c = Comment.from_text("x", text)
        assert c.k == MAX_TOKENS


class TestVocabulary:
    def test_min_freq_1_keeps_all(self):
        v = build_vocab(["a b", "a"], min_freq=1)
        assert set(v.index_to_token) == {"a", "b"}

    def test_min_freq_2_drops_rare(self):
        v = build_vocab(["a b", "a"], min_freq=2)
        assert set(v.index_to_token) == {"a"}
        assert v.encode(["b"])[0] == v.oov_index

    def test_empty_corpus(self):
        v = build_vocab([], min_freq=1)
        assert v.size == 0
        assert v.oov_index == 0

    def test_document_frequency_not_term_frequency(self):
        # "a" twice in one comment still counts one document
        v = build_vocab(["a a", "b"], min_freq=2)
        assert "a" not in v

    def test_order_by_frequency_then_alpha(self):
        v = build_vocab(["b c", "b c", "a c"], min_freq=1)
        assert v.index_to_token == ("c", "b", "a")

    def test_oov_index_reserved(self):
        v = build_vocab(["a b"], min_freq=1)
        assert v.oov_index == v.size
        assert v.oov_index not in v.token_to_index.values()

    def test_accepts_comments(self):
        comments = [Comment.from_text("1", "a b"), Comment.from_text("2", "a")]
        v = build_vocab(comments, min_freq=2)
        assert set(v.index_to_token) == {"a"}

    @given(st.lists(st.text(alphabet="abcdef ", max_size=20), max_size=30))
    @settings(max_examples=100)
    def test_deterministic(self, corpus):
        v1 = build_vocab(corpus, min_freq=1)
        v2 = build_vocab(corpus, min_freq=1)
        assert v1.index_to_token == v2.index_to_token

    @given(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=30))
    @settings(max_examples=100)
    def test_encode_decode_round_trip(self, tokens):
        v = build_vocab([" ".join(tokens)], min_freq=1)
        assert v.decode(v.encode(tokens)) == tokens

    def test_tsv_round_trip(self, tmp_path):
        v = build_vocab(["a b c", "a b", "a"], min_freq=1)
        path = tmp_path / "vocab.tsv"
        v.save_tsv(path)
        v2 = Vocabulary.load_tsv(path)
        assert v2.index_to_token == v.index_to_token
        assert v2.doc_freq == v.doc_freq
        assert v2.fingerprint() == v.fingerprint()


class TestEmbeddings:
    def _write(self, path, lines):
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def test_full_coverage(self, tmp_path):
        vocab = build_vocab(["a b"], min_freq=1)
        path = tmp_path / "vec.txt"
        self._write(path, ["2 3", "a 1 2 3", "b 4 5 6"])
        table, coverage = load_embeddings(path, vocab, 3)
        assert coverage == 1.0
        np.testing.assert_array_equal(table.matrix[vocab.token_to_index["a"]], [1, 2, 3])
        np.testing.assert_array_equal(table.matrix[vocab.token_to_index["b"]], [4, 5, 6])

    def test_missing_token_randomized(self, tmp_path):
        vocab = build_vocab(["a zzz"], min_freq=1)
        path = tmp_path / "vec.txt"
        self._write(path, ["1 3", "a 1 2 3"])
        table, coverage = load_embeddings(path, vocab, 3, seed=7)
        assert coverage == 0.5
        row = table.matrix[vocab.token_to_index["zzz"]]
        assert not np.array_equal(row, [1, 2, 3])
        limit = math.sqrt(6.0 / (1 + 3))
        assert np.all(np.abs(row) <= limit)

    def test_deterministic_fallback(self, tmp_path):
        vocab = build_vocab(["a zzz"], min_freq=1)
        path = tmp_path / "vec.txt"
        self._write(path, ["1 3", "a 1 2 3"])
        t1, _ = load_embeddings(path, vocab, 3, seed=7)
        t2, _ = load_embeddings(path, vocab, 3, seed=7)
        np.testing.assert_array_equal(t1.matrix, t2.matrix)

    def test_wrong_field_count_names_line(self, tmp_path):
        vocab = build_vocab(["a b"], min_freq=1)
        path = tmp_path / "vec.txt"
        self._write(path, ["2 3", "a 1 2 3", "b 4 5 6 7"])
        with pytest.raises(FormatError, match="line 3"):
            load_embeddings(path, vocab, 3)

    def test_dimension_mismatch(self, tmp_path):
        vocab = build_vocab(["a"], min_freq=1)
        path = tmp_path / "vec.txt"
        self._write(path, ["1 4", "a 1 2 3 4"])
        with pytest.raises(FormatError, match="mismatch"):
            load_embeddings(path, vocab, 3)

    def test_non_numeric_value(self, tmp_path):
        vocab = build_vocab(["a"], min_freq=1)
        path = tmp_path / "vec.txt"
        self._write(path, ["1 2", "a 1 oops"])
        with pytest.raises(FormatError, match="line 2"):
            load_embeddings(path, vocab, 2)

    def test_random_embeddings_shape(self):
        vocab = build_vocab(["a b c"], min_freq=1)
        table = random_embeddings(vocab, 4, seed=0)
        assert table.matrix.shape == (4, 4)
        assert table.d == 4


class TestDatasetIO:
    def test_single_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "1", "text": "hello there", "label": 0.25, "ts": 9}\n')
        (c,) = read_dataset(path)
        assert c.id == "1" and c.gold == 0.25 and c.ts == 9
        assert c.tokens == ("hello", "there")

    def test_label_out_of_range(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "1", "text": "x"}\n{"id": "2", "text": "y", "label": 1.3}\n')
        with pytest.raises(FormatError, match="label out of range, line 2"):
            read_dataset(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text("")
        assert read_dataset(path) == []

    def test_non_json_line(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "1", "text": "x"}\nnot json\n')
        with pytest.raises(FormatError, match="line 2"):
            read_dataset(path)

    def test_missing_field(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"id": "1"}\n')
        with pytest.raises(FormatError, match="missing required field, line 1"):
            read_dataset(path)

    def test_round_trip(self, tmp_path):
        comments = [
            Comment.from_text("1", "καλό σχόλιο!", gold=0.0, ts=5),
            Comment.from_text("2", "spam spam", ts=6),
        ]
        path = tmp_path / "d.jsonl"
        write_dataset(path, comments)
        back = read_dataset(path)
        assert [c.id for c in back] == ["1", "2"]
        assert back[0].gold == 0.0 and back[1].gold is None
        assert back[0].tokens == comments[0].tokens


class TestSynthetic:
    def test_exact_reject_count(self):
        data = gen_synthetic(100, 0.3, seed=1)
        assert sum(1 for c in data if c.gold == 1.0) == 30

    def test_deterministic(self):
        a = gen_synthetic(50, 0.4, seed=9)
        b = gen_synthetic(50, 0.4, seed=9)
        assert [(c.text, c.gold, c.ts) for c in a] == [(c.text, c.gold, c.ts) for c in b]

    def test_trigger_separability_scan(self):
        # exhaustive scan: the planted-trigger predicate classifies perfectly
        triggers = trigger_lexicon()
        data = gen_synthetic(400, 0.25, seed=3)
        for c in data:
            has_trigger = any(t in triggers for t in c.tokens)
            assert has_trigger == (c.gold == 1.0)

    def test_token_counts_and_timestamps(self):
        data = gen_synthetic(200, 0.5, seed=2)
        assert all(5 <= c.k <= 40 for c in data)
        ts = [c.ts for c in data]
        assert all(b > a for a, b in zip(ts, ts[1:]))

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            gen_synthetic(0, 0.3, seed=0)
        with pytest.raises(ValueError):
            gen_synthetic(10, 1.0, seed=0)

    def test_text_tokenizes_back_to_itself(self):
        data = gen_synthetic(20, 0.3, seed=4)
        for c in data:
            assert list(c.tokens) == c.text.split(" ")
