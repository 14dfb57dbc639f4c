"""The moderation service end to end, over HTTP.

Starts the service on an ephemeral port with a freshly trained model,
submits comments, works the gray queue like a moderator would, re-tunes
coverage, and shows that a restart replays the journal exactly.

Run:  python demos/05_moderation_service.py
"""

import json
import tempfile
import threading
import urllib.request
from pathlib import Path

from modgate import ModerationService, gen_synthetic, make_http_server
from modgate.models import NeuralScorer
from modgate.trainer import TrainConfig, score_comments, split_heldout, train


def call(method, url, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(url, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode())


data = gen_synthetic(n=4000, reject_ratio=0.3, seed=31)
train_part, dev_part = split_heldout(data, 0.2, seed=31)
trained, _ = train(train_part, TrainConfig(variant="a_rnn", d=32, m=32, r=16, layers=3,
                                           max_epochs=4, patience=4, seed=4))
scorer = NeuralScorer(trained.params, trained.vocab)

workdir = Path(tempfile.mkdtemp())
store = workdir / "journal.jsonl"
service = ModerationService(store, scorer=scorer)
service.register_dev_set(score_comments(trained, dev_part))
service.set_coverage(0.85)

httpd = make_http_server(service, port=0)
threading.Thread(target=httpd.serve_forever, daemon=True).start()
base = f"http://127.0.0.1:{httpd.server_address[1]}"
print(f"service listening at {base}, journal at {store}\n")


def by_score(lo, hi, count):
    picked = []
    for c in dev_part:
        p = scorer.score(c).p
        if lo <= p <= hi:
            picked.append(c.text)
        if len(picked) == count:
            break
    return picked


th = service.thresholds
samples = (
    by_score(0.0, th.t_a, 3)          # clear accepts
    + by_score(th.t_a, th.t_r, 3)     # uncertain: will queue for a human
    + by_score(th.t_r, 1.0, 3)        # clear rejects
)
for i, text in enumerate(samples):
    out = call("POST", f"{base}/api/comments", {"text": text, "ts": 1000 + i})
    print(f"  {out['id']}  p={out['p']:.3f}  {out['decision']}")

queue = call("GET", f"{base}/api/queue?limit=10")
print(f"\ngray queue holds {queue['total']} item(s)")
for item in queue["items"]:
    decided = call("POST", f"{base}/api/queue/{item['id']}/decision",
                   {"label": "accept", "moderator": "demo-mod"})
    print(f"  moderator accepted {item['id']} -> {decided['decision']}")

th = call("PUT", f"{base}/api/thresholds", {"coverage": 0.95})
print(f"\nre-tuned for 95% coverage: t_a={th['t_a']:.3f} t_r={th['t_r']:.3f} "
      f"projected workload {th['projected_workload']:.1%}")

metrics = call("GET", f"{base}/api/metrics")
print(f"counters: {metrics['counters']}")

httpd.shutdown()
httpd.server_close()
service.close()

# a restart replays the append-only journal into identical state
reloaded = ModerationService(store, scorer=scorer)
print(f"\nafter restart: counters match: {reloaded.counters == service.counters}, "
      f"{len(reloaded.items)} items replayed")
reloaded.close()
