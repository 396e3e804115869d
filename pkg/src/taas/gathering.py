"""Evidence gathering: direct history, recommendations, recommender list.

Direct trust evidence is the target's own asset/SLA statistics plus the
evaluator's stored prior score. Indirect evidence is third-party
recommendations pulled from the shared Data Lake, either through the
evaluator's dynamic list of trustworthy recommenders or, for newcomers, by
discovering any reporter that has rated the target. Nothing in this module
ever reads a stakeholder's domain label.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

from taas import kernels
from taas.model import (
    ModelConfig,
    NoRecommendersError,
    OfferType,
    ProductOffer,
    ProviderStats,
    Recommendation,
    SourceUnavailableError,
    StakeholderId,
    TrustScore,
    validate_stats,
    window_for_age,
)
from taas.storage import DataLakeEntry, PrivateStore

History = tuple[tuple[str, float], ...]


class Catalog:
    """Offer snapshot source, loadable from a JSON-lines file."""

    def __init__(self, offers: Iterable[ProductOffer] = ()) -> None:
        self._offers: list[ProductOffer] = list(offers)
        self._by_id = {o.offer_id: o for o in self._offers}

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "Catalog":
        offers = []
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    offers.append(ProductOffer.from_dict(json.loads(line)))
        return cls(offers)

    def to_jsonl(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for offer in self._offers:
                fh.write(json.dumps(offer.to_dict(), separators=(",", ":")) + "\n")

    def get(self, offer_id: str) -> ProductOffer | None:
        return self._by_id.get(offer_id)

    def all_offers(self) -> tuple[ProductOffer, ...]:
        return tuple(self._offers)

    def __len__(self) -> int:
        return len(self._offers)


class StatsTable:
    """Per-provider, per-offer-type, per-window counter source.

    Rows are stored at offer-type granularity; provider-level stats are the
    counter-wise sum across types within each window.
    """

    def __init__(self) -> None:
        self._rows: dict[tuple[str, str, int], ProviderStats] = {}
        self._types: dict[str, set[str]] = {}

    def put(self, provider: StakeholderId, offer_type: OfferType, stats: ProviderStats) -> None:
        validate_stats(stats)
        self._rows[(provider.id, offer_type.value, stats.window_index)] = stats
        self._types.setdefault(provider.id, set()).add(offer_type.value)

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "StatsTable":
        table = cls()
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                table.put(
                    StakeholderId(str(doc["provider"])),
                    OfferType.parse(doc["offer_type"]),
                    ProviderStats.from_dict(doc),
                )
        return table

    def to_jsonl(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for (provider, offer_type, _), stats in sorted(self._rows.items()):
                doc: dict[str, Any] = {"provider": provider, "offer_type": offer_type}
                doc.update(stats.to_dict())
                fh.write(json.dumps(doc, separators=(",", ":")) + "\n")

    def _zero(self, window_index: int) -> ProviderStats:
        return ProviderStats(0, 0, 0, 0, 0, 0, 0, 0, window_index=window_index)

    def offer_windows(
        self, provider: StakeholderId, offer_type: OfferType, num_windows: int
    ) -> tuple[ProviderStats, ...]:
        """Per-window stats for one offer type; empty when none exist at all.

        A provider with some history gets zero-filled gaps; a provider or
        type with no rows yields an empty tuple so the satisfaction pillar
        can fall back to the neutral prior instead of scoring silence.
        """
        if offer_type.value not in self._types.get(provider.id, ()):
            return ()
        return tuple(
            self._rows.get((provider.id, offer_type.value, k), self._zero(k))
            for k in range(1, num_windows + 1)
        )

    def provider_windows(
        self, provider: StakeholderId, num_windows: int
    ) -> tuple[ProviderStats, ...]:
        types = sorted(self._types.get(provider.id, ()))
        if not types:
            return ()
        out = []
        for k in range(1, num_windows + 1):
            sums = [0] * 8
            for t in types:
                row = self._rows.get((provider.id, t, k))
                if row is not None:
                    for i, v in enumerate(row.as_tuple()):
                        sums[i] += v
            out.append(ProviderStats(*sums, window_index=k))
        return tuple(out)

    def has_provider(self, provider: StakeholderId) -> bool:
        return provider.id in self._types


@dataclass
class Sources:
    """The handles one scoring pass reads from."""

    catalog: Catalog
    datalake: Any  # DataLake or DataLakeView
    stats: StatsTable
    store: PrivateStore


@dataclass(frozen=True)
class RecommenderEntry:
    """One member of the dynamic trustworthy-recommender list."""

    recommender: StakeholderId
    last_trust: float
    updated_at: int

    def decayed_trust(self, now: int, half_life: float) -> float:
        age = max(0, now - self.updated_at)
        return kernels.decay_value(self.last_trust, 0.0, age, half_life)


@dataclass(frozen=True)
class TrustContext:
    """Everything the assessor needs to score one offer, frozen in time.

    recommendations hold one provider-level rating per recommender;
    offer_recommendations hold the same recommenders' latest rating scoped
    to the offer's type. recommender_trust carries the evaluator's last
    trust score per recommender and evaluator_history / recommender_histories
    carry per-target average ratings for the similarity credibility check.
    """

    evaluator: StakeholderId
    target: StakeholderId
    offer: ProductOffer
    now: int
    provider_stats: tuple[ProviderStats, ...] = ()
    offer_stats: tuple[ProviderStats, ...] = ()
    recommendations: tuple[Recommendation, ...] = ()
    offer_recommendations: tuple[Recommendation, ...] = ()
    recommender_histories: Mapping[str, History] = field(default_factory=dict)
    recommender_trust: Mapping[str, float] = field(default_factory=dict)
    evaluator_history: History = ()
    feedback_counts: tuple[int, ...] = ()
    prior_score: Optional[TrustScore] = None
    cold_start: bool = False
    degraded: bool = False
    missing_sources: tuple[str, ...] = ()

    def to_canonical_dict(self) -> dict[str, Any]:
        """Domain-free canonical form; byte-stable input to the assessor."""
        return {
            "evaluator": self.evaluator.id,
            "target": self.target.id,
            "offer_id": self.offer.offer_id,
            "offer_type": self.offer.offer_type.value,
            "now": self.now,
            "provider_stats": [s.to_dict() for s in self.provider_stats],
            "offer_stats": [s.to_dict() for s in self.offer_stats],
            "recommendations": [r.to_dict() for r in self.recommendations],
            "offer_recommendations": [r.to_dict() for r in self.offer_recommendations],
            "recommender_histories": {
                rid: list(map(list, hist))
                for rid, hist in sorted(self.recommender_histories.items())
            },
            "recommender_trust": dict(sorted(self.recommender_trust.items())),
            "evaluator_history": list(map(list, self.evaluator_history)),
            "feedback_counts": list(self.feedback_counts),
            "prior_score": self.prior_score.to_dict() if self.prior_score else None,
            "cold_start": self.cold_start,
            "degraded": self.degraded,
            "missing_sources": list(self.missing_sources),
        }


def average_by_target(entries: Iterable[DataLakeEntry]) -> History:
    """Collapse raw feedback into per-target average ratings, id-sorted."""
    sums: dict[str, list[float]] = {}
    for entry in entries:
        acc = sums.setdefault(entry.target.id, [0.0, 0])
        acc[0] += entry.rating
        acc[1] += 1
    return tuple((tid, acc[0] / acc[1]) for tid, acc in sorted(sums.items()))


def feedback_window_counts(
    entries: Iterable[DataLakeEntry], now: int, cfg: ModelConfig
) -> tuple[int, ...]:
    """Per-window counts of feedback entries, window 1 being the newest."""
    counts = [0] * cfg.num_windows
    for entry in entries:
        k = window_for_age(now - entry.recorded_at, cfg.window_seconds)
        if 1 <= k <= cfg.num_windows:
            counts[k - 1] += 1
    return tuple(counts)


def collect_direct(
    evaluator: StakeholderId,
    target: StakeholderId,
    offer: ProductOffer,
    sources: Sources,
    cfg: ModelConfig,
    now: int,
) -> TrustContext:
    """Assemble the direct-evidence part of a context.

    A failing catalog aborts the collection (there is nothing trustworthy to
    score against); failures of the statistics or Data Lake handles degrade
    the context instead, flagging the missing source so the assessor can
    fall back to priors for the affected pillars. No source is mutated.
    """
    try:
        if sources.catalog.get(offer.offer_id) is None:
            raise SourceUnavailableError("catalog", f"offer {offer.offer_id} not in catalog")
    except SourceUnavailableError:
        raise
    except Exception as exc:
        raise SourceUnavailableError("catalog", str(exc)) from exc

    missing: list[str] = []
    provider_stats: tuple[ProviderStats, ...] = ()
    offer_stats: tuple[ProviderStats, ...] = ()
    try:
        provider_stats = sources.stats.provider_windows(target, cfg.num_windows)
        offer_stats = sources.stats.offer_windows(target, offer.offer_type, cfg.num_windows)
    except Exception:
        missing.append("stats")

    feedback_counts: tuple[int, ...] = (0,) * cfg.num_windows
    try:
        feedback_counts = feedback_window_counts(sources.datalake.query(target), now, cfg)
    except Exception:
        missing.append("datalake")

    prior = sources.store.get_latest_score(evaluator, target, None)
    return TrustContext(
        evaluator=evaluator,
        target=target,
        offer=offer,
        now=now,
        provider_stats=provider_stats,
        offer_stats=offer_stats,
        feedback_counts=feedback_counts,
        prior_score=prior,
        degraded=bool(missing),
        missing_sources=tuple(missing),
    )


def _latest_by_scope(
    entries: Sequence[DataLakeEntry], offer_type: OfferType
) -> tuple[DataLakeEntry | None, DataLakeEntry | None]:
    """Latest any-scope entry and latest entry matching the offer type."""
    overall: DataLakeEntry | None = None
    typed: DataLakeEntry | None = None
    for entry in entries:
        if overall is None or (entry.recorded_at, entry.sequence) >= (
            overall.recorded_at,
            overall.sequence,
        ):
            overall = entry
        if entry.offer_type == offer_type and (
            typed is None
            or (entry.recorded_at, entry.sequence) >= (typed.recorded_at, typed.sequence)
        ):
            typed = entry
    return overall, typed


def collect_recommendations(
    target: StakeholderId,
    entries: Sequence[RecommenderEntry],
    datalake: Any,
    cfg: ModelConfig,
    offer_type: OfferType,
    exclude: Sequence[StakeholderId] = (),
) -> tuple[tuple[Recommendation, ...], tuple[Recommendation, ...], dict[str, History]]:
    """Recommendations about a target plus each recommender's rating history.

    Recommenders come from the given list; when it is empty, any Data Lake
    reporter with at least one entry about the target is discovered instead
    (newest opinion first, capped at the configured list size). Recommenders
    that never rated the target are excluded. Raises NO_RECOMMENDERS when
    neither route yields anyone.
    """
    skip = {target.id} | {s.id for s in exclude}
    candidates: list[StakeholderId] = []
    for entry in entries:
        if entry.recommender.id not in skip:
            candidates.append(entry.recommender)
    if not candidates:
        candidates = [r for r in datalake.reporters_for(target) if r.id not in skip]
        if not candidates:
            raise NoRecommendersError(f"no recommenders available for {target.id}")
    candidates = candidates[: cfg.recommender_list_size]

    provider_recs: list[Recommendation] = []
    offer_recs: list[Recommendation] = []
    histories: dict[str, History] = {}
    for recommender in candidates:
        about_target = [
            e for e in datalake.entries_by_reporter(recommender) if e.target == target
        ]
        if not about_target:
            continue
        overall, typed = _latest_by_scope(about_target, offer_type)
        assert overall is not None
        provider_recs.append(
            Recommendation(
                recommender=recommender,
                target=target,
                rating=overall.rating,
                issued_at=overall.recorded_at,
                offer_type=None,
            )
        )
        if typed is not None:
            offer_recs.append(
                Recommendation(
                    recommender=recommender,
                    target=target,
                    rating=typed.rating,
                    issued_at=typed.recorded_at,
                    offer_type=typed.offer_type,
                )
            )
        histories[recommender.id] = average_by_target(
            datalake.entries_by_reporter(recommender)
        )
    return tuple(provider_recs), tuple(offer_recs), histories


def update_recommender_list(
    entries: Sequence[RecommenderEntry], new_score: TrustScore, cfg: ModelConfig
) -> tuple[RecommenderEntry, ...]:
    """Fold a fresh score into the list, evict stale trust, cap the size.

    Eviction uses the time-decayed trust (half-life shared with the decay
    law) against the recommender threshold; survivors are ordered by decayed
    trust, ties broken by id, and truncated to the configured size.
    """
    now = new_score.computed_at
    merged: dict[str, RecommenderEntry] = {e.recommender.id: e for e in entries}
    merged[new_score.target.id] = RecommenderEntry(
        recommender=new_score.target,
        last_trust=new_score.score,
        updated_at=new_score.computed_at,
    )
    scored = []
    for entry in merged.values():
        decayed = entry.decayed_trust(now, cfg.decay_half_life)
        if decayed >= cfg.recommender_threshold:
            scored.append((decayed, entry))
    scored.sort(key=lambda pair: (-pair[0], pair[1].recommender.id))
    return tuple(entry for _, entry in scored[: cfg.recommender_list_size])


class RecommenderList:
    """Thread-safe holder of the dynamic recommender list.

    Updates for distinct targets may race; the lock makes each fold atomic
    and the last writer wins per target.
    """

    def __init__(self, entries: Iterable[RecommenderEntry] = ()) -> None:
        self._entries: tuple[RecommenderEntry, ...] = tuple(entries)
        self._lock = threading.Lock()

    def snapshot(self) -> tuple[RecommenderEntry, ...]:
        return self._entries

    def update(self, new_score: TrustScore, cfg: ModelConfig) -> tuple[RecommenderEntry, ...]:
        with self._lock:
            self._entries = update_recommender_list(self._entries, new_score, cfg)
            return self._entries
