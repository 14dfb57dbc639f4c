"""Command-line entry point.

Commands: train, eval, tune, score, build-list, gen-synth, serve, check-grad.
Every run echoes its resolved configuration (seed included) so results can
be reproduced from the log alone.  Exit codes: 0 success, 1 usage error,
2 data or model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import models
from .gradcheck import gradient_check
from .gradcore import AdamConfig
from .metrics import ScoredSet, evaluate
from .models import (
    ListScorer,
    NeuralScorer,
    list_build,
    load_wordlist,
    save_wordlist,
)
from .service import ModerationService, make_http_server
from .textpipe import FormatError, gen_synthetic, read_dataset, write_dataset
from .trainer import TrainConfig, load_trained, save_trained, train
from .tuner import Thresholds, candidate_thresholds, gray_count, tune

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _echo_config(args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    print("config:", json.dumps(resolved, default=str))


def _variant(name: str) -> str:
    v = name.replace("-", "_")
    if v not in models.VARIANTS and v != "list":
        raise FormatError(f"unknown variant {name!r}")
    return v


def _load_scorer(path: str):
    """A checkpoint directory yields a NeuralScorer, a TSV file a ListScorer."""
    p = Path(path)
    if p.is_dir():
        tm = load_trained(p)
        return NeuralScorer(tm.params, tm.vocab)
    return ListScorer(load_wordlist(p))


def _score_dataset(scorer, comments) -> ScoredSet:
    scores, golds, ts = [], [], []
    for c in comments:
        if c.gold is None:
            raise FormatError(f"comment {c.id!r} has no gold label")
        scores.append(scorer.score(c).p)
        golds.append(c.gold)
        ts.append(c.ts)
    return ScoredSet.build(scores, golds, ts)


# -- commands -----------------------------------------------------------------


def _cmd_gen_synth(args) -> int:
    comments = gen_synthetic(args.n, args.ratio, args.seed)
    write_dataset(args.out, comments)
    n_rej = sum(1 for c in comments if c.gold == 1.0)
    print(f"wrote {len(comments)} comments ({n_rej} rejected) to {args.out}")
    return 0


def _cmd_train(args) -> int:
    data = read_dataset(args.data)
    cfg = TrainConfig(
        variant=_variant(args.variant),
        batch_size=args.batch_size,
        max_epochs=args.epochs,
        patience=args.patience,
        heldout_frac=args.heldout_frac,
        seed=args.seed,
        adam=AdamConfig(lr=args.lr),
        embeddings_path=args.embeddings,
        min_freq=args.min_freq,
        d=args.d,
        m=args.m,
        r=args.r,
        layers=args.l,
    )
    trained, report = train(data, cfg)
    save_trained(args.out, trained)
    report_path = Path(args.out) / "train_report.json"
    report_path.write_text(report.to_json() + "\n", encoding="utf-8")
    best = report.heldout_auc[report.best_epoch - 1] if report.best_epoch else float("nan")
    print(
        f"trained {cfg.variant} for {len(report.train_loss)} epochs"
        f" (best epoch {report.best_epoch}, held-out AUC {best:.4f});"
        f" checkpoint in {args.out}"
    )
    return 0


def _cmd_eval(args) -> int:
    scorer = _load_scorer(args.model)
    scored = _score_dataset(scorer, read_dataset(args.data))
    t_a, t_r = 0.5, 0.5
    if args.thresholds:
        th = Thresholds.from_dict(json.loads(Path(args.thresholds).read_text()))
        t_a, t_r = th.t_a, th.t_r
    report = evaluate(scored, t_a=t_a, t_r=t_r, beta=args.beta, batch_size=args.batch_size)
    rows = [
        ("auc", report.auc),
        ("spearman", report.spearman),
        ("p_accept", report.p_accept),
        ("p_reject", report.p_reject),
        ("macro_f_beta", report.macro_f_beta),
    ]
    for name, value in rows:
        print(f"{name:>14}  {'-' if value is None else f'{value:.6f}'}")
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
        print(f"report written to {args.out}")
    return 0


def _cmd_tune(args) -> int:
    scorer = _load_scorer(args.model)
    dev = _score_dataset(scorer, read_dataset(args.dev))
    th = tune(dev, args.coverage, beta=args.beta, batch_size=args.batch_size)
    if args.verify:
        ref = _exhaustive_tune(dev, args.coverage, args.beta, args.batch_size)
        ok = (th.t_a, th.t_r, th.dev_macro_f_beta) == ref
        print(f"verify: {'ok' if ok else 'MISMATCH'} (exhaustive sweep)")
        if not ok:
            return DATA_ERROR
    workload = gray_count(dev.p, th.t_a, th.t_r) / len(dev)
    print(
        f"t_a={th.t_a:.6f} t_r={th.t_r:.6f} macro_F{args.beta:g}={th.dev_macro_f_beta:.6f}"
        f" gray={workload:.3f}"
    )
    if args.out:
        Path(args.out).write_text(th.to_json() + "\n", encoding="utf-8")
        print(f"thresholds written to {args.out}")
    return 0


def _exhaustive_tune(dev: ScoredSet, coverage, beta, batch_size):
    """Slow reference sweep over every candidate pair (used by --verify)."""
    from .metrics import macro_f_beta

    n = len(dev)
    target = round((1.0 - coverage) * n)
    cands = candidate_thresholds(dev.p)
    best = None
    for t_a in cands:
        feasible = []
        for t_r in cands[cands >= t_a]:
            cnt = gray_count(dev.p, float(t_a), float(t_r))
            feasible.append((abs(cnt - target), float(t_r)))
        err, t_r = min(feasible, key=lambda e: (e[0], e[1]))
        f = macro_f_beta(dev, float(t_a), t_r, beta, batch_size)
        if best is None or f > best[2]:
            best = (float(t_a), t_r, f)
    return best


def _cmd_score(args) -> int:
    scorer = _load_scorer(args.model)
    comments = read_dataset(args.data)
    lines = []
    for c in comments:
        pred = scorer.score(c)
        obj = {"id": c.id, "p": pred.p}
        if pred.attention is not None:
            obj["attention"] = [
                {"token": t, "weight": float(w)} for t, w in zip(c.tokens, pred.attention)
            ]
        lines.append(json.dumps(obj, ensure_ascii=False))
    out = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
        print(f"scored {len(comments)} comments into {args.out}")
    else:
        sys.stdout.write(out)
    return 0


def _cmd_build_list(args) -> int:
    comments = read_dataset(args.data)
    wl = list_build(comments, args.min_df)
    save_wordlist(args.out, wl)
    print(f"word list with {len(wl.entries)} entries (doc freq > {args.min_df}) in {args.out}")
    return 0


def _cmd_serve(args) -> int:
    scorer = _load_scorer(args.model) if args.model else None
    service = ModerationService(args.store, scorer=scorer)
    if args.dev:
        dev_scored = _score_dataset(scorer, read_dataset(args.dev))
        service.register_dev_set(dev_scored)
        if args.coverage is not None:
            th, workload = service.set_coverage(args.coverage)
            print(f"thresholds tuned: t_a={th.t_a:.4f} t_r={th.t_r:.4f} workload={workload:.3f}")
    server = make_http_server(service, host=args.host, port=args.port)
    # flush so parent processes awaiting the address see it through a pipe
    print(
        f"listening on http://{server.server_address[0]}:{server.server_address[1]}",
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:  # pragma: no cover
        pass
    finally:
        server.server_close()
        service.close()
    return 0


def _cmd_check_grad(args) -> int:
    """Finite-difference audit of one variant at a desk-scale configuration."""
    variant = _variant(args.variant)
    if variant == "list":
        raise FormatError("the word-list baseline has no gradients to check")
    err = gradient_check(variant, args.seed, epsilon=args.epsilon)
    print(f"max relative gradient error for {variant}: {err:.3e}")
    return 0 if err < 1e-3 else DATA_ERROR


# -- argument wiring ------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="modgate", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a synthetic labeled corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ratio", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_synth)

    p = sub.add_parser("train", help="train a scoring model")
    p.add_argument("--data", required=True)
    p.add_argument("--variant", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--patience", type=int, default=3)
    p.add_argument("--heldout-frac", type=float, default=0.02)
    p.add_argument("--min-freq", type=int, default=2)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--d", type=int, default=300)
    p.add_argument("--m", type=int, default=128)
    p.add_argument("--r", type=int, default=128)
    p.add_argument("--l", type=int, default=4)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a labeled dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--thresholds", default=None)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--batch-size", type=int, default=100)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("tune", help="tune thresholds for a target coverage")
    p.add_argument("--dev", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--coverage", type=float, required=True)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--batch-size", type=int, default=100)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("score", help="score a dataset, one JSON line per comment")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("build-list", help="build the word-precision list baseline")
    p.add_argument("--data", required=True)
    p.add_argument("--min-df", type=int, default=10)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_build_list)

    p = sub.add_parser("serve", help="run the moderation service")
    p.add_argument("--model", default=None)
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8171)
    p.add_argument("--dev", default=None)
    p.add_argument("--coverage", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("check-grad", help="finite-difference gradient audit")
    p.add_argument("--variant", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.set_defaults(func=_cmd_check_grad)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    _echo_config(args)
    try:
        return args.func(args)
    except (FormatError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
