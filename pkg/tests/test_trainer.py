import numpy as np
import pytest

from modgate.gradcore import AdamConfig
from modgate.metrics import auc
from modgate.models import predict
from modgate.textpipe import gen_synthetic
from modgate.trainer import (
    TrainConfig,
    load_trained,
    save_trained,
    score_comments,
    split_heldout,
    train,
)


def small_config(variant="eq_cent", **kw):
    defaults = dict(
        variant=variant,
        batch_size=16,
        max_epochs=2,
        patience=3,
        heldout_frac=0.1,
        seed=7,
        d=12,
        m=10,
        r=6,
        layers=3,
        min_freq=2,
    )
    defaults.update(kw)
    return TrainConfig(**defaults)


class TestSplit:
    def test_two_percent_of_hundred(self):
        data = gen_synthetic(100, 0.3, seed=0)
        train_part, heldout = split_heldout(data, 0.02, seed=1)
        assert len(heldout) == 2
        assert len(train_part) == 98

    def test_floor_at_one(self):
        data = gen_synthetic(2, 0.5, seed=0)
        _, heldout = split_heldout(data, 0.02, seed=1)
        assert len(heldout) == 1

    def test_deterministic_and_disjoint(self):
        data = gen_synthetic(50, 0.3, seed=0)
        t1, h1 = split_heldout(data, 0.2, seed=9)
        t2, h2 = split_heldout(data, 0.2, seed=9)
        assert [c.id for c in t1] == [c.id for c in t2]
        assert [c.id for c in h1] == [c.id for c in h2]
        assert not ({c.id for c in t1} & {c.id for c in h1})
        assert len(t1) + len(h1) == 50

    def test_too_small_errors(self):
        with pytest.raises(ValueError):
            split_heldout(gen_synthetic(1, 0.5, seed=0), 0.02, seed=0)


class TestTrain:
    def test_unlabeled_rejected(self):
        from modgate.textpipe import Comment

        data = [Comment.from_text(str(i), "hello world") for i in range(10)]
        with pytest.raises(ValueError):
            train(data, small_config())

    def test_zero_epochs_returns_initial_model(self):
        data = gen_synthetic(60, 0.3, seed=1)
        trained, report = train(data, small_config(max_epochs=0))
        assert report.best_epoch == 0
        assert report.stopped_early is False
        assert report.train_loss == [] and report.heldout_auc == []
        # the returned model still scores
        s = score_comments(trained, data[:10])
        assert np.all((s.p >= 0) & (s.p <= 1))

    def test_bitwise_identical_checkpoints_for_same_seed(self, tmp_path):
        data = gen_synthetic(100, 0.3, seed=2)
        cfg = small_config(variant="a_rnn", max_epochs=2)
        t1, r1 = train(data, cfg)
        t2, r2 = train(data, cfg)
        assert r1.train_loss == r2.train_loss
        assert r1.heldout_auc == r2.heldout_auc
        save_trained(tmp_path / "c1", t1)
        save_trained(tmp_path / "c2", t2)
        files1 = sorted(f.name for f in (tmp_path / "c1").iterdir())
        files2 = sorted(f.name for f in (tmp_path / "c2").iterdir())
        assert files1 == files2
        for name in files1:
            assert (tmp_path / "c1" / name).read_bytes() == (tmp_path / "c2" / name).read_bytes()

    def test_first_epoch_loss_decreases_on_separable_corpus(self):
        data = gen_synthetic(400, 0.3, seed=3)
        _, report = train(data, small_config(variant="eq_cent", max_epochs=1, batch_size=16))
        batches = report.first_epoch_batch_losses
        assert batches[-1] < batches[0]

    def test_best_auc_survives_round_trip_exactly(self, tmp_path):
        data = gen_synthetic(120, 0.3, seed=4)
        trained, report = train(data, small_config(variant="rnn", max_epochs=2))
        best_auc = report.heldout_auc[report.best_epoch - 1]
        save_trained(tmp_path / "ck", trained)
        loaded = load_trained(tmp_path / "ck")
        _, heldout = split_heldout(data, 0.1, seed=7)
        scored = score_comments(loaded, heldout)
        assert auc(scored) == pytest.approx(best_auc, abs=1e-12)

    def test_round_trip_preserves_predictions_exactly(self, tmp_path):
        data = gen_synthetic(100, 0.3, seed=5)
        trained, _ = train(data, small_config(variant="da_cent", max_epochs=1))
        save_trained(tmp_path / "ck", trained)
        loaded = load_trained(tmp_path / "ck")
        for c in data[:20]:
            before = predict(trained.vocab.encode(c.tokens), trained.params).p
            after = predict(loaded.vocab.encode(c.tokens), loaded.params).p
            assert after == before

    def test_early_stopping_flag(self):
        data = gen_synthetic(100, 0.3, seed=2)
        # patience 1 with a flat model stops quickly
        cfg = small_config(variant="eq_cent", max_epochs=30, patience=1,
                           adam=AdamConfig(lr=1e-9))
        _, report = train(data, cfg)
        assert report.stopped_early
        assert len(report.train_loss) < 30
        assert report.best_epoch <= len(report.train_loss)

    def test_vocab_fingerprint_mismatch_detected(self, tmp_path):
        data = gen_synthetic(100, 0.3, seed=5)
        trained, _ = train(data, small_config(max_epochs=1))
        save_trained(tmp_path / "ck", trained)
        vocab_file = tmp_path / "ck" / "vocab.tsv"
        vocab_file.write_text(vocab_file.read_text().replace("\t", "\t", 1) + "zzz\t999\t1\n")
        with pytest.raises(ValueError, match="vocabulary"):
            load_trained(tmp_path / "ck")
