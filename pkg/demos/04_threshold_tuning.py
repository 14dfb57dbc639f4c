"""Threshold tuning: trade moderator workload against zone precision.

Scores a development set with a quick model, then sweeps the desired
coverage from fully automatic (100%) down to 40%, showing how the gray
zone widens and both precisions recover.

Run:  python demos/04_threshold_tuning.py
"""

from modgate import gen_synthetic, tune
from modgate.metrics import precisions
from modgate.trainer import TrainConfig, score_comments, split_heldout, train
from modgate.tuner import gray_count

data = gen_synthetic(n=2500, reject_ratio=0.3, seed=29)
train_part, dev_part = split_heldout(data, 0.3, seed=29)

# a lightly trained model keeps the score distribution interestingly noisy
cfg = TrainConfig(variant="eq_cent", d=16, max_epochs=3, seed=3)
trained, _ = train(train_part, cfg)
dev = score_comments(trained, dev_part)
print(f"tuning on {len(dev)} scored dev comments\n")

print(f"{'coverage':>9} {'t_a':>8} {'t_r':>8} {'gray':>6} {'P_accept':>9} {'P_reject':>9} {'macro_F2':>9}")
for coverage in (1.0, 0.9, 0.8, 0.6, 0.4):
    th = tune(dev, coverage, beta=2.0, batch_size=100)
    pr = precisions(dev, th.t_a, th.t_r)
    gray = gray_count(dev.p, th.t_a, th.t_r)
    print(f"{coverage:9.0%} {th.t_a:8.4f} {th.t_r:8.4f} {gray:6d} "
          f"{pr.p_accept:9.3f} {pr.p_reject:9.3f} {th.dev_macro_f_beta:9.4f}")

print("\ncoverage 100% forces t_a == t_r: every comment is decided automatically;")
print("lower coverage routes the uncertain middle to human moderators.")
