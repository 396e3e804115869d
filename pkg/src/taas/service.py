"""JSON-over-HTTP request/response surface for the scoring engine.

Endpoints:
  GET  /health                      -> {"status": "ok"}
  POST /score-offers                -> {"scores": [TrustScore | error entry]}
  GET  /get-trust?evaluator=&target=[&offer_id=] -> TrustScore
  POST /ingest-event                -> UpdateOutcome summary

All error responses carry {"error": {"code", "message"}}. Requests are
handled concurrently; event ingestion funnels through the engine's single
update consumer so per-target ordering is preserved.
"""

from __future__ import annotations

import json
import logging
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlparse

from taas.engine import EventConsumer, ScoreFailure, TrustEngine
from taas.model import StakeholderId, TrustError, TrustEvent

log = logging.getLogger(__name__)

MAX_OFFER_IDS = 10_000


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code


def _parse_stakeholder(value: Any, field: str) -> StakeholderId:
    try:
        if isinstance(value, str):
            return StakeholderId(value)
        return StakeholderId.from_dict(value)
    except (TypeError, KeyError, ValueError):
        raise ApiError(400, "MALFORMED_PAYLOAD", f"bad stakeholder in {field!r}") from None


class _Handler(BaseHTTPRequestHandler):
    engine: TrustEngine
    consumer: EventConsumer

    # silence the default stderr access log; route through logging instead
    def log_message(self, fmt: str, *args: Any) -> None:
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, body: dict[str, Any]) -> None:
        payload = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _fail(self, status: int, code: str, message: str) -> None:
        self._send(status, {"error": {"code": code, "message": message}})

    def _read_json(self) -> Any:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise ApiError(400, "MALFORMED_PAYLOAD", "body is not valid JSON") from None

    def do_GET(self) -> None:  # noqa: N802 (stdlib naming)
        try:
            url = urlparse(self.path)
            if url.path == "/health":
                self._send(200, {"status": "ok"})
            elif url.path == "/get-trust":
                self._get_trust(parse_qs(url.query))
            else:
                self._fail(404, "NOT_FOUND", f"no such endpoint: {url.path}")
        except ApiError as exc:
            self._fail(exc.status, exc.code, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("unhandled error")
            self._fail(500, "INTERNAL", str(exc))

    def do_POST(self) -> None:  # noqa: N802
        try:
            url = urlparse(self.path)
            if url.path == "/score-offers":
                self._score_offers(self._read_json())
            elif url.path == "/ingest-event":
                self._ingest_event(self._read_json())
            else:
                self._fail(404, "NOT_FOUND", f"no such endpoint: {url.path}")
        except ApiError as exc:
            self._fail(exc.status, exc.code, str(exc))
        except TrustError as exc:
            self._fail(409, exc.code, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            log.exception("unhandled error")
            self._fail(500, "INTERNAL", str(exc))

    def _score_offers(self, body: Any) -> None:
        if not isinstance(body, dict):
            raise ApiError(400, "MALFORMED_PAYLOAD", "body must be a JSON object")
        evaluator = _parse_stakeholder(body.get("evaluator"), "evaluator")
        offer_ids = body.get("offer_ids")
        if not isinstance(offer_ids, list) or not offer_ids:
            raise ApiError(400, "INVALID_REQUEST", "offer_ids must be a non-empty list")
        if len(offer_ids) > MAX_OFFER_IDS:
            raise ApiError(400, "INVALID_REQUEST", f"offer_ids exceeds {MAX_OFFER_IDS}")
        now = int(body.get("now") or time.time())
        results = self.engine.score_offer_ids(evaluator, [str(i) for i in offer_ids], now)
        self._send(
            200,
            {
                "scores": [
                    r.to_dict() if not isinstance(r, ScoreFailure) else r.to_dict()
                    for r in results
                ]
            },
        )

    def _get_trust(self, query: dict[str, list[str]]) -> None:
        try:
            evaluator = StakeholderId(query["evaluator"][0])
            target = StakeholderId(query["target"][0])
        except (KeyError, ValueError):
            raise ApiError(400, "INVALID_REQUEST", "evaluator and target are required") from None
        offer_id = query.get("offer_id", [None])[0]
        score = self.engine.get_trust(evaluator, target, offer_id)
        if score is None:
            raise ApiError(404, "NO_SCORE", "no stored trust score for that pair")
        self._send(200, score.to_dict())

    def _ingest_event(self, body: Any) -> None:
        if not isinstance(body, dict):
            raise ApiError(400, "MALFORMED_PAYLOAD", "body must be a JSON object")
        try:
            event = TrustEvent.from_dict(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError(400, "MALFORMED_PAYLOAD", f"bad event: {exc}") from None
        try:
            outcome = self.consumer.submit(event).result(timeout=30)
        except TrustError as exc:
            status = 404 if exc.code == "NO_SCORE" else 409
            raise ApiError(status, exc.code, str(exc)) from None
        self._send(200, outcome.to_dict())


def make_server(
    bind: tuple[str, int], engine: TrustEngine
) -> tuple[ThreadingHTTPServer, EventConsumer]:
    """Build the HTTP server; raises TrustError(BIND_FAILURE) if bind fails."""
    consumer = EventConsumer(engine)
    handler = type("BoundHandler", (_Handler,), {"engine": engine, "consumer": consumer})
    try:
        server = ThreadingHTTPServer(bind, handler)
    except OSError as exc:
        consumer.close()
        raise TrustError(f"cannot bind {bind[0]}:{bind[1]}: {exc}", code="BIND_FAILURE") from exc
    return server, consumer


def serve(bind: tuple[str, int], engine: TrustEngine) -> None:
    """Run the service until interrupted."""
    server, consumer = make_server(bind, engine)
    log.info("listening on %s:%d", *bind)
    try:
        server.serve_forever()
    finally:
        consumer.close()
        server.server_close()
