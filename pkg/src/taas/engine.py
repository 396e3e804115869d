"""The scoring pipeline: gather evidence, assess, persist, publish.

Each offer flows through three phases. Gathering reads the catalog, the
statistics table, a Data Lake snapshot taken once per batch, and the private
store. Compute runs the configured assessor. Storage persists the new score
versions, publishes the evaluator's satisfaction to the Data Lake, and folds
the score into the recommender list.

When no prior trust relationship exists for (evaluator, target) the cold
start path is taken: every configured source is queried exhaustively (full
Data Lake scan plus full catalog read) to synthesize a context, and the
resulting score is flagged cold_start.
"""

from __future__ import annotations

import logging
import queue
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

from taas.computation import Assessor, make_assessor
from taas.gathering import (
    RecommenderList,
    Sources,
    TrustContext,
    average_by_target,
    collect_direct,
    collect_recommendations,
    feedback_window_counts,
)
from taas.model import (
    DEFAULT_POLICIES,
    EventKind,
    ModelConfig,
    NoRecommendersError,
    PolicyRule,
    ProductOffer,
    SourceUnavailableError,
    StakeholderId,
    TrustError,
    TrustEvent,
    TrustScore,
    VersionConflictError,
)
from taas.timing import Timings, now_ns
from taas.updates import UpdateOutcome, apply_event
from taas.storage import DataLakeView

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoreFailure:
    """Per-offer failure entry; a batch never aborts on one bad offer."""

    offer_id: str
    code: str
    message: str

    def to_dict(self) -> dict:
        return {
            "offer_id": self.offer_id,
            "error": {"code": self.code, "message": self.message},
        }


ScoreResult = Union[TrustScore, ScoreFailure]


def cold_start_bootstrap(
    evaluator: StakeholderId,
    target: StakeholderId,
    offer: ProductOffer,
    sources: Sources,
    cfg: ModelConfig,
    now: int,
) -> TrustContext:
    """Exhaustively synthesize a context when no prior relationship exists.

    The full Data Lake scan discovers recommenders, their histories, the
    evaluator's own rating history, and the per-window feedback counts in
    one pass; the catalog is read in full to anchor the offer. Pillars that
    remain without evidence default to the neutral prior downstream.
    """
    try:
        all_offers = sources.catalog.all_offers()
    except Exception as exc:
        raise SourceUnavailableError("catalog", str(exc)) from exc
    if offer.offer_id not in {o.offer_id for o in all_offers}:
        raise SourceUnavailableError("catalog", f"offer {offer.offer_id} not in catalog")

    missing: list[str] = []
    provider_stats = ()
    offer_stats = ()
    try:
        provider_stats = sources.stats.provider_windows(target, cfg.num_windows)
        offer_stats = sources.stats.offer_windows(target, offer.offer_type, cfg.num_windows)
    except Exception:
        missing.append("stats")

    about_target = []
    by_reporter: dict[str, list] = {}
    try:
        for entry in sources.datalake.scan():
            by_reporter.setdefault(entry.reporter.id, []).append(entry)
            if entry.target == target:
                about_target.append(entry)
    except Exception:
        missing.append("datalake")

    feedback_counts = feedback_window_counts(about_target, now, cfg)
    ctx = TrustContext(
        evaluator=evaluator,
        target=target,
        offer=offer,
        now=now,
        provider_stats=provider_stats,
        offer_stats=offer_stats,
        feedback_counts=feedback_counts,
        prior_score=None,
        cold_start=True,
        degraded=bool(missing),
        missing_sources=tuple(missing),
    )

    try:
        provider_recs, offer_recs, histories = collect_recommendations(
            target,
            (),
            sources.datalake,
            cfg,
            offer.offer_type,
            exclude=(evaluator,),
        )
    except NoRecommendersError:
        provider_recs, offer_recs, histories = (), (), {}

    evaluator_history = average_by_target(by_reporter.get(evaluator.id, ()))
    return replace(
        ctx,
        recommendations=provider_recs,
        offer_recommendations=offer_recs,
        recommender_histories=histories,
        evaluator_history=evaluator_history,
    )


class TrustEngine:
    """Wires sources, assessor, stores, and the recommender list together."""

    def __init__(
        self,
        cfg: ModelConfig,
        sources: Sources,
        policies: Optional[dict[EventKind, PolicyRule]] = None,
        owner: Optional[StakeholderId] = None,
        workers: int = 1,
        force_cold_start: bool = False,
    ) -> None:
        self.cfg = cfg
        self.sources = sources
        self.policies = dict(policies) if policies is not None else dict(DEFAULT_POLICIES)
        self.owner = owner or StakeholderId("taas-instance")
        self.workers = max(1, workers)
        self.force_cold_start = force_cold_start
        self.assessor: Assessor = make_assessor(cfg.assessor)
        self.recommenders = RecommenderList()
        self._event_lock = threading.Lock()

    # ------------------------------------------------------------------
    # scoring

    def _recommender_trust(
        self, evaluator: StakeholderId, ctx: TrustContext
    ) -> dict[str, float]:
        by_entry = {
            e.recommender.id: e.last_trust for e in self.recommenders.snapshot()
        }
        trust: dict[str, float] = {}
        for rec in (*ctx.recommendations, *ctx.offer_recommendations):
            rid = rec.recommender.id
            if rid in trust:
                continue
            stored = self.sources.store.get_latest_score(
                evaluator, rec.recommender, None
            )
            if stored is not None:
                trust[rid] = stored.score
            elif rid in by_entry:
                trust[rid] = by_entry[rid]
            else:
                trust[rid] = self.cfg.cold_start_prior
        return trust

    def _gather(
        self,
        evaluator: StakeholderId,
        offer: ProductOffer,
        datalake: DataLakeView,
        now: int,
    ) -> TrustContext:
        target = offer.provider
        sources = replace(self.sources, datalake=datalake)
        prior = (
            None
            if self.force_cold_start
            else sources.store.get_latest_score(evaluator, target, None)
        )
        if prior is None:
            ctx = cold_start_bootstrap(evaluator, target, offer, sources, self.cfg, now)
        else:
            ctx = collect_direct(evaluator, target, offer, sources, self.cfg, now)
            try:
                provider_recs, offer_recs, histories = collect_recommendations(
                    target,
                    self.recommenders.snapshot(),
                    datalake,
                    self.cfg,
                    offer.offer_type,
                    exclude=(evaluator,),
                )
            except NoRecommendersError:
                provider_recs, offer_recs, histories = (), (), {}
            evaluator_history = average_by_target(
                datalake.entries_by_reporter(evaluator)
            )
            ctx = replace(
                ctx,
                recommendations=provider_recs,
                offer_recommendations=offer_recs,
                recommender_histories=histories,
                evaluator_history=evaluator_history,
            )
        return replace(ctx, recommender_trust=self._recommender_trust(evaluator, ctx))

    def _persist(
        self, evaluator: StakeholderId, offer: ProductOffer, assessed: TrustScore, now: int
    ) -> TrustScore:
        store = self.sources.store
        target = offer.provider

        # Provider-level record first: it is the prior for future passes and
        # the subject of event updates.
        while True:
            provider_score = replace(
                assessed,
                offer_id=None,
                version=store.next_version(evaluator, target, None),
            )
            try:
                store.put_trust_score(provider_score)
                break
            except VersionConflictError:
                continue

        while True:
            offer_score = replace(
                assessed,
                offer_id=offer.offer_id,
                version=store.next_version(evaluator, target, offer.offer_id),
            )
            try:
                store.put_trust_score(offer_score)
                break
            except VersionConflictError:
                continue

        # Publish the evaluator's satisfaction (and nothing more) to the lake.
        self.sources.datalake.append(
            reporter=evaluator,
            target=target,
            rating=round(assessed.satisfaction, 4),
            interaction_id=f"{evaluator.id}/{offer.offer_id}/{provider_score.version}",
            recorded_at=now,
            offer_type=offer.offer_type,
        )
        self.recommenders.update(provider_score, self.cfg)
        return offer_score

    def score_offer(
        self,
        evaluator: StakeholderId,
        offer: ProductOffer,
        now: int,
        datalake: Optional[DataLakeView] = None,
        timings: Optional[Timings] = None,
    ) -> TrustScore:
        """Run the full gather -> compute -> store pipeline for one offer."""
        if datalake is None:
            datalake = self.sources.datalake.snapshot()
        if timings is not None:
            t = now_ns()
        ctx = self._gather(evaluator, offer, datalake, now)
        if timings is not None:
            timings.add("gathering", now_ns() - t)
        score = self.assessor.assess(ctx, self.cfg, timings)
        if timings is not None:
            t = now_ns()
        stored = self._persist(evaluator, offer, score, now)
        if timings is not None:
            timings.add("storage", now_ns() - t)
        return stored

    def score_offers(
        self,
        evaluator: StakeholderId,
        offers: Sequence[ProductOffer],
        now: int,
        timings: Optional[Timings] = None,
    ) -> list[ScoreResult]:
        """Score a batch against one Data Lake snapshot, preserving order.

        Per-offer failures become ScoreFailure entries. With workers > 1 the
        offers are evaluated concurrently and reassembled in input order;
        sequential mode (the default) additionally guarantees replay-stable
        version chains.
        """
        snapshot = self.sources.datalake.snapshot()

        def run(offer: ProductOffer) -> ScoreResult:
            try:
                return self.score_offer(evaluator, offer, now, snapshot, timings)
            except TrustError as exc:
                return ScoreFailure(offer.offer_id, exc.code, str(exc))

        if self.workers == 1 or len(offers) <= 1:
            return [run(offer) for offer in offers]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(run, offers))

    def score_offer_ids(
        self,
        evaluator: StakeholderId,
        offer_ids: Sequence[str],
        now: int,
        timings: Optional[Timings] = None,
    ) -> list[ScoreResult]:
        """Resolve catalog ids then score; unknown ids become failure entries."""
        resolved: list[Union[ProductOffer, ScoreFailure]] = []
        for offer_id in offer_ids:
            try:
                offer = self.sources.catalog.get(offer_id)
            except Exception as exc:
                resolved.append(ScoreFailure(offer_id, "SOURCE_UNAVAILABLE", str(exc)))
                continue
            if offer is None:
                resolved.append(
                    ScoreFailure(offer_id, "UNKNOWN_OFFER", f"offer {offer_id} not in catalog")
                )
            else:
                resolved.append(offer)

        offers = [r for r in resolved if isinstance(r, ProductOffer)]
        scored = iter(self.score_offers(evaluator, offers, now, timings))
        return [r if isinstance(r, ScoreFailure) else next(scored) for r in resolved]

    # ------------------------------------------------------------------
    # reads and events

    def get_trust(
        self,
        evaluator: StakeholderId,
        target: StakeholderId,
        offer_id: Optional[str] = None,
    ) -> Optional[TrustScore]:
        return self.sources.store.get_latest_score(evaluator, target, offer_id)

    def ingest_event(self, event: TrustEvent) -> UpdateOutcome:
        """Apply one runtime event against the instance owner's records."""
        with self._event_lock:
            return apply_event(
                self.owner, event, self.policies, self.sources.store, self.cfg
            )


class EventConsumer:
    """Single consumer draining an event queue for an engine.

    Producers enqueue concurrently; per-target ordering follows queue order.
    Each ingest returns a Future resolved by the consumer thread.
    """

    def __init__(self, engine: TrustEngine) -> None:
        self._engine = engine
        self._queue: "queue.Queue[tuple[TrustEvent, Future] | None]" = queue.Queue()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            event, future = item
            try:
                future.set_result(self._engine.ingest_event(event))
            except Exception as exc:
                future.set_exception(exc)

    def submit(self, event: TrustEvent) -> "Future[UpdateOutcome]":
        future: "Future[UpdateOutcome]" = Future()
        self._queue.put((event, future))
        return future

    def close(self) -> None:
        self._queue.put(None)
        self._thread.join(timeout=5)
