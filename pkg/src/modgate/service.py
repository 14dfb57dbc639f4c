"""Moderation service: scores incoming comments, routes them to accept /
reject / gray, keeps the gray queue for human moderators, and records every
decision in an append-only JSON-lines journal that is replayed at startup.

Human decisions are ground truth: automatic decisions are never altered, but
they can be audited after the fact, and the live metrics compare audited
automatic decisions against their audit labels.  Model and threshold swaps
are atomic; every item pins the versions that scored it.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .metrics import ScoredSet, auc, f_beta, spearman
from .textpipe import Comment
from .tuner import Thresholds, decide, gray_count, tune

__all__ = [
    "QueueItem",
    "ModerationService",
    "ServiceError",
    "NotFoundError",
    "ConflictError",
    "BadRequestError",
    "make_http_server",
]

AUTO_ACCEPT = "auto_accept"
AUTO_REJECT = "auto_reject"
GRAY_PENDING = "gray_pending"
HUMAN_ACCEPT = "human_accept"
HUMAN_REJECT = "human_reject"

DECISIONS = (AUTO_ACCEPT, AUTO_REJECT, GRAY_PENDING, HUMAN_ACCEPT, HUMAN_REJECT)

_ROUTE_TO_DECISION = {"accept": AUTO_ACCEPT, "reject": AUTO_REJECT, "gray": GRAY_PENDING}


class ServiceError(Exception):
    code = "error"
    http_status = 500


class BadRequestError(ServiceError):
    code = "bad_request"
    http_status = 400


class NotFoundError(ServiceError):
    code = "not_found"
    http_status = 404


class ConflictError(ServiceError):
    code = "conflict"
    http_status = 409


@dataclass
class QueueItem:
    """One scored comment with its routing outcome and any human follow-up."""

    id: str
    text: str
    ts: int
    p: float
    attention: list[dict] | None
    decision: str
    model_version: str
    thresholds_version: int
    decided_by: str | None = None
    decided_at: int | None = None
    audit_label: str | None = None
    audited_by: str | None = None
    audited_at: int | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "ts": self.ts,
            "p": self.p,
            "attention": self.attention,
            "decision": self.decision,
            "model_version": self.model_version,
            "thresholds_version": self.thresholds_version,
            "decided_by": self.decided_by,
            "decided_at": self.decided_at,
            "audit_label": self.audit_label,
            "audited_by": self.audited_by,
            "audited_at": self.audited_at,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "QueueItem":
        return cls(**obj)


def _default_thresholds() -> Thresholds:
    # Fully automatic until a dev set is registered and coverage is chosen.
    return Thresholds(t_a=0.5, t_r=0.5, coverage=1.0, beta=2.0, dev_macro_f_beta=0.0)


class ModerationService:
    """Scoring, routing, review queue, and threshold control over one journal.

    ``scorer`` is anything with a ``score(Comment) -> Prediction`` method and
    a ``version`` string (see models.NeuralScorer / models.ListScorer).
    """

    def __init__(self, store_path, scorer=None, thresholds: Thresholds | None = None):
        self.store_path = Path(store_path)
        self.scorer = scorer
        self._lock = threading.RLock()
        self.items: dict[str, QueueItem] = {}
        self.counters: dict[str, int] = {d: 0 for d in DECISIONS}
        self.thresholds_history: dict[int, Thresholds] = {}
        self.thresholds_version = 0
        self.dev_set: ScoredSet | None = None
        self._seq = 0
        self._replay()
        if self.thresholds_version == 0:
            self._activate_thresholds(thresholds or _default_thresholds())
        self._journal = self.store_path.open("a", encoding="utf-8")

    # -- journal ------------------------------------------------------------

    def _replay(self) -> None:
        if not self.store_path.exists():
            self.store_path.parent.mkdir(parents=True, exist_ok=True)
            self.store_path.touch()
            return
        with self.store_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "comment":
            item = QueueItem.from_dict(event["item"])
            self.items[item.id] = item
            self.counters[item.decision] += 1
            self._seq = max(self._seq, int(item.id[1:]) if item.id[1:].isdigit() else self._seq)
        elif kind == "decision":
            item = self.items[event["id"]]
            self.counters[item.decision] -= 1
            item.decision = HUMAN_ACCEPT if event["label"] == "accept" else HUMAN_REJECT
            item.decided_by = event["moderator"]
            item.decided_at = event["decided_at"]
            self.counters[item.decision] += 1
        elif kind == "audit":
            item = self.items[event["id"]]
            item.audit_label = event["label"]
            item.audited_by = event["moderator"]
            item.audited_at = event["audited_at"]
        elif kind == "thresholds":
            th = Thresholds.from_dict(event["thresholds"])
            version = event["version"]
            self.thresholds_history[version] = th
            self.thresholds_version = max(self.thresholds_version, version)
        elif kind == "dev_set":
            self.dev_set = ScoredSet.build(event["p"], event["gold"], event["ts"])
        else:
            raise ValueError(f"unknown journal event {kind!r}")

    def _append(self, event: dict) -> None:
        self._journal.write(json.dumps(event, ensure_ascii=False) + "\n")
        self._journal.flush()

    def close(self) -> None:
        self._journal.close()

    # -- configuration ------------------------------------------------------

    @property
    def thresholds(self) -> Thresholds:
        return self.thresholds_history[self.thresholds_version]

    def _activate_thresholds(self, th: Thresholds) -> None:
        self.thresholds_version += 1
        self.thresholds_history[self.thresholds_version] = th

    def register_dev_set(self, dev: ScoredSet) -> None:
        """Register (and journal) the development scores used by set_coverage."""
        with self._lock:
            self.dev_set = dev
            self._append(
                {
                    "event": "dev_set",
                    "p": dev.p.tolist(),
                    "gold": dev.gold.tolist(),
                    "ts": dev.ts.tolist(),
                }
            )

    def set_coverage(self, coverage: float) -> tuple[Thresholds, float]:
        """Re-tune thresholds for the requested coverage and swap them in.

        Returns the new thresholds and the projected human workload: the
        fraction of dev comments falling in the new gray zone.
        """
        with self._lock:
            if self.dev_set is None:
                raise BadRequestError("no development set registered")
            try:
                th = tune(self.dev_set, coverage, beta=2.0, batch_size=100)
            except ValueError as exc:
                raise BadRequestError(str(exc)) from exc
            self._activate_thresholds(th)
            workload = gray_count(self.dev_set.p, th.t_a, th.t_r) / len(self.dev_set)
            self._append(
                {
                    "event": "thresholds",
                    "version": self.thresholds_version,
                    "thresholds": th.to_dict(),
                    "projected_workload": workload,
                }
            )
            return th, workload

    def projected_workload(self) -> float | None:
        with self._lock:
            if self.dev_set is None:
                return None
            th = self.thresholds
            return gray_count(self.dev_set.p, th.t_a, th.t_r) / len(self.dev_set)

    # -- scoring and routing -------------------------------------------------

    def score_and_route(self, text: str, ts: int | None = None) -> QueueItem:
        """Tokenize, score, decide, persist. Returns the stored item."""
        if self.scorer is None:
            raise BadRequestError("no active model")
        if not isinstance(text, str):
            raise BadRequestError("text must be a string")
        with self._lock:
            self._seq += 1
            cid = f"c{self._seq:06d}"
            comment = Comment.from_text(
                id=cid, text=text, ts=int(ts) if ts is not None else int(time.time())
            )
            pred = self.scorer.score(comment)
            route = decide(pred.p, self.thresholds)
            attention = None
            if pred.attention is not None:
                attention = [
                    {"token": tok, "weight": float(w)}
                    for tok, w in zip(comment.tokens, pred.attention)
                ]
            item = QueueItem(
                id=cid,
                text=text,
                ts=comment.ts,
                p=float(pred.p),
                attention=attention,
                decision=_ROUTE_TO_DECISION[route],
                model_version=self.scorer.version,
                thresholds_version=self.thresholds_version,
            )
            self.items[cid] = item
            self.counters[item.decision] += 1
            self._append({"event": "comment", "item": item.to_dict()})
            return item

    def queue(self, status: str = "gray", limit: int = 50, offset: int = 0) -> tuple[list[QueueItem], int]:
        """Gray-pending items ordered by timestamp then id, paginated."""
        if status not in ("gray", "gray_pending"):
            raise BadRequestError(f"unsupported queue status {status!r}")
        if limit < 0 or offset < 0:
            raise BadRequestError("limit and offset must be non-negative")
        with self._lock:
            pending = [it for it in self.items.values() if it.decision == GRAY_PENDING]
            pending.sort(key=lambda it: (it.ts, it.id))
            return pending[offset : offset + limit], len(pending)

    def get_item(self, item_id: str) -> QueueItem:
        with self._lock:
            item = self.items.get(item_id)
            if item is None:
                raise NotFoundError(f"unknown item {item_id!r}")
            return item

    def moderator_decide(self, item_id: str, label: str, moderator: str, at: int = 0) -> QueueItem:
        """Record a human decision on a gray item.

        Repeating the same decision is a no-op success; a conflicting repeat
        or a decision on a non-gray item is an error.
        """
        if label not in ("accept", "reject"):
            raise BadRequestError(f"label must be 'accept' or 'reject', got {label!r}")
        with self._lock:
            item = self.get_item(item_id)
            human = HUMAN_ACCEPT if label == "accept" else HUMAN_REJECT
            if item.decision == human:
                return item  # idempotent repeat
            if item.decision in (HUMAN_ACCEPT, HUMAN_REJECT):
                raise ConflictError(
                    f"item {item_id} already decided as {item.decision}"
                )
            if item.decision != GRAY_PENDING:
                raise ConflictError(f"item {item_id} is not in gray zone")
            self.counters[item.decision] -= 1
            item.decision = human
            item.decided_by = moderator
            item.decided_at = at
            self.counters[human] += 1
            self._append(
                {
                    "event": "decision",
                    "id": item_id,
                    "label": label,
                    "moderator": moderator,
                    "decided_at": at,
                }
            )
            return item

    def record_audit(self, item_id: str, label: str, moderator: str, at: int = 0) -> QueueItem:
        """Attach a human audit label to an automatic decision.

        The automatic decision itself is never altered; audits only feed the
        live precision metrics.
        """
        if label not in ("accept", "reject"):
            raise BadRequestError(f"label must be 'accept' or 'reject', got {label!r}")
        with self._lock:
            item = self.get_item(item_id)
            if item.decision not in (AUTO_ACCEPT, AUTO_REJECT):
                raise ConflictError("only automatic decisions can be audited")
            if item.audit_label is not None:
                if item.audit_label == label:
                    return item
                raise ConflictError(
                    f"item {item_id} already audited as {item.audit_label}"
                )
            item.audit_label = label
            item.audited_by = moderator
            item.audited_at = at
            self._append(
                {
                    "event": "audit",
                    "id": item_id,
                    "label": label,
                    "moderator": moderator,
                    "audited_at": at,
                }
            )
            return item

    # -- observability --------------------------------------------------------

    def live_metrics(self) -> dict:
        """Precision of automatic decisions against audit labels, plus counters.

        Zones without any audited item report the vacuous precision 1.0;
        AUC / Spearman over audited items are null when undefined.
        """
        with self._lock:
            audited = [
                it
                for it in self.items.values()
                if it.audit_label is not None and it.decision in (AUTO_ACCEPT, AUTO_REJECT)
            ]
            rej = [it for it in audited if it.decision == AUTO_REJECT]
            acc = [it for it in audited if it.decision == AUTO_ACCEPT]
            p_reject = (
                sum(1 for it in rej if it.audit_label == "reject") / len(rej) if rej else 1.0
            )
            p_accept = (
                sum(1 for it in acc if it.audit_label == "accept") / len(acc) if acc else 1.0
            )
            auc_val = rho = None
            if audited:
                scored = ScoredSet.build(
                    [it.p for it in audited],
                    [1.0 if it.audit_label == "reject" else 0.0 for it in audited],
                    [it.ts for it in audited],
                )
                try:
                    auc_val = auc(scored)
                except ValueError:
                    auc_val = None
                try:
                    rho = spearman(scored)
                except ValueError:
                    rho = None
            beta = self.thresholds.beta
            return {
                "auc": auc_val,
                "spearman": rho,
                "p_accept": p_accept,
                "p_reject": p_reject,
                "f_beta": f_beta(p_reject, p_accept, beta),
                "beta": beta,
                "n_audited": len(audited),
                "counters": dict(self.counters),
                "total_items": len(self.items),
            }


# ---------------------------------------------------------------------------
# HTTP facade
# ---------------------------------------------------------------------------


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, ensure_ascii=False) + "\n").encode("utf-8")


def make_http_server(service: ModerationService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """HTTP wrapper over one ModerationService.

    Routes:
      POST /api/comments                   {text, ts?}
      GET  /api/queue?status=gray&limit=&offset=
      POST /api/queue/{id}/decision        {label, moderator}
      GET  /api/items/{id}
      POST /api/items/{id}/audit           {label, moderator}
      GET  /api/thresholds
      PUT  /api/thresholds                 {coverage}
      GET  /api/metrics
    Errors come back as {"error": code, "message": msg} with 400/404/409.
    """

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send(self, status: int, obj) -> None:
            body = _json_bytes(obj)
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _error(self, exc: ServiceError) -> None:
            self._send(exc.http_status, {"error": exc.code, "message": str(exc)})

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if not raw:
                return {}
            try:
                obj = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError):
                raise BadRequestError("request body must be JSON")
            if not isinstance(obj, dict):
                raise BadRequestError("request body must be a JSON object")
            return obj

        def _dispatch(self, method: str) -> None:
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            try:
                if method == "POST" and parts == ["api", "comments"]:
                    body = self._body()
                    if "text" not in body:
                        raise BadRequestError("missing field 'text'")
                    item = service.score_and_route(body["text"], body.get("ts"))
                    self._send(200, {
                        "id": item.id,
                        "p": item.p,
                        "decision": item.decision,
                        "attention": item.attention,
                        "model_version": item.model_version,
                        "thresholds_version": item.thresholds_version,
                    })
                elif method == "GET" and len(parts) == 3 and parts[:2] == ["api", "items"]:
                    self._send(200, service.get_item(parts[2]).to_dict())
                elif method == "GET" and parts == ["api", "queue"]:
                    q = parse_qs(url.query)
                    items, total = service.queue(
                        status=q.get("status", ["gray"])[0],
                        limit=int(q.get("limit", ["50"])[0]),
                        offset=int(q.get("offset", ["0"])[0]),
                    )
                    self._send(200, {"items": [it.to_dict() for it in items], "total": total})
                elif (
                    method == "POST"
                    and len(parts) == 4
                    and parts[:2] == ["api", "queue"]
                    and parts[3] == "decision"
                ):
                    body = self._body()
                    item = service.moderator_decide(
                        parts[2], body.get("label", ""), body.get("moderator", ""),
                        at=int(body.get("at", 0)),
                    )
                    self._send(200, item.to_dict())
                elif (
                    method == "POST"
                    and len(parts) == 4
                    and parts[:2] == ["api", "items"]
                    and parts[3] == "audit"
                ):
                    body = self._body()
                    item = service.record_audit(
                        parts[2], body.get("label", ""), body.get("moderator", ""),
                        at=int(body.get("at", 0)),
                    )
                    self._send(200, item.to_dict())
                elif method == "GET" and parts == ["api", "thresholds"]:
                    out = service.thresholds.to_dict()
                    out["version"] = service.thresholds_version
                    out["projected_workload"] = service.projected_workload()
                    self._send(200, out)
                elif method == "PUT" and parts == ["api", "thresholds"]:
                    body = self._body()
                    if "coverage" not in body:
                        raise BadRequestError("missing field 'coverage'")
                    try:
                        coverage = float(body["coverage"])
                    except (TypeError, ValueError):
                        raise BadRequestError("coverage must be a number")
                    th, workload = service.set_coverage(coverage)
                    out = th.to_dict()
                    out["version"] = service.thresholds_version
                    out["projected_workload"] = workload
                    self._send(200, out)
                elif method == "GET" and parts == ["api", "metrics"]:
                    self._send(200, service.live_metrics())
                else:
                    raise NotFoundError(f"no route for {method} {url.path}")
            except ServiceError as exc:
                self._error(exc)
            except ValueError as exc:
                self._error(BadRequestError(str(exc)))

        def do_GET(self):
            self._dispatch("GET")

        def do_POST(self):
            self._dispatch("POST")

        def do_PUT(self):
            self._dispatch("PUT")

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

    return ThreadingHTTPServer((host, port), Handler)
