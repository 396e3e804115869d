"""Deterministic synthetic marketplace worlds and scenario runs.

Every provider gets a latent quality drawn uniformly in [0, 1]. Honest
raters (the evaluator included) publish that quality plus small Gaussian
noise; bad-mouthing raters publish the mirrored value 1 - quality; random
raters publish uniform noise. Asset and SLA counters are generated so that
availability and violation handling track the latent quality, which makes
ranking fidelity measurable. All randomness flows from one seeded generator,
so a fixed seed reproduces the world, the scores, and the report byte for
byte. Wall-clock timings are therefore reported separately, never inside
the deterministic report document.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

from taas.computation import similarity_credibility
from taas.configio import dump_config_document
from taas.engine import ScoreFailure, TrustEngine
from taas.gathering import Catalog, Sources, StatsTable, average_by_target
from taas.kernels import BACKEND
from taas.model import (
    ConfigError,
    EventKind,
    ModelConfig,
    OfferType,
    PolicyRule,
    ProductOffer,
    ProviderStats,
    StakeholderId,
    TrustEvent,
    TrustScore,
)
from taas.storage import DataLake, PrivateStore
from taas.timing import Timings
from taas.updates import evaluate_triggers

RATING_NOISE_SIGMA = 0.05
WORLD_NOW = 1_700_000_000  # fixed epoch anchor; never wall clock


class DishonestyMode(Enum):
    BAD_MOUTH = "BAD_MOUTH"
    RANDOM = "RANDOM"


@dataclass(frozen=True)
class ScenarioSpec:
    """Shape of a synthetic world; fully reproducible from the seed."""

    seed: int = 42
    num_providers: int = 20
    offers_per_provider: int = 5
    offer_type_mix: Mapping[str, float] = field(
        default_factory=lambda: {t.value: 1.0 for t in OfferType}
    )
    honest_recommenders: int = 5
    dishonest_recommenders: int = 5
    dishonesty_mode: DishonestyMode = DishonestyMode.BAD_MOUTH
    sla_violation_rate: float = 0.2
    windows: int = 3
    window_seconds: int = 86400

    def __post_init__(self) -> None:
        for name in ("num_providers", "offers_per_provider", "honest_recommenders",
                     "dishonest_recommenders", "windows"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 <= self.sla_violation_rate <= 1.0:
            raise ValueError("sla_violation_rate must be in [0, 1]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "num_providers": self.num_providers,
            "offers_per_provider": self.offers_per_provider,
            "offer_type_mix": dict(self.offer_type_mix),
            "honest_recommenders": self.honest_recommenders,
            "dishonest_recommenders": self.dishonest_recommenders,
            "dishonesty_mode": self.dishonesty_mode.value,
            "sla_violation_rate": self.sla_violation_rate,
            "windows": self.windows,
            "window_seconds": self.window_seconds,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ScenarioSpec":
        kwargs = dict(doc)
        if "dishonesty_mode" in kwargs:
            kwargs["dishonesty_mode"] = DishonestyMode(kwargs["dishonesty_mode"])
        return cls(**kwargs)


@dataclass
class World:
    """A generated marketplace snapshot plus its ground truth."""

    spec: ScenarioSpec
    now: int
    evaluator: StakeholderId
    providers: list[StakeholderId]
    quality: dict[str, float]
    recommenders: list[StakeholderId]
    honest: dict[str, bool]
    offers: list[ProductOffer]
    stats_rows: list[tuple[StakeholderId, OfferType, ProviderStats]]
    feedback: list[dict[str, Any]]  # append-order Data Lake records, minus seq

    def catalog(self) -> Catalog:
        return Catalog(self.offers)

    def stats_table(self) -> StatsTable:
        table = StatsTable()
        for provider, offer_type, stats in self.stats_rows:
            table.put(provider, offer_type, stats)
        return table

    def datalake(self, path: str | Path | None = None) -> DataLake:
        lake = DataLake(path)
        for record in self.feedback:
            lake.append(
                reporter=StakeholderId(record["reporter"]),
                target=StakeholderId(record["target"]),
                rating=record["rating"],
                interaction_id=record["interaction_id"],
                recorded_at=record["recorded_at"],
                offer_type=OfferType.parse(record["offer_type"]) if record["offer_type"] else None,
            )
        return lake

    def sources(self, store: PrivateStore | None = None,
                datalake_path: str | Path | None = None) -> Sources:
        return Sources(
            catalog=self.catalog(),
            datalake=self.datalake(datalake_path),
            stats=self.stats_table(),
            store=store or PrivateStore(),
        )


def _clamp(value: float) -> float:
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def _honest_rating(rng: random.Random, quality: float) -> float:
    return _clamp(quality + rng.gauss(0.0, RATING_NOISE_SIGMA))


def _dishonest_rating(rng: random.Random, quality: float, mode: DishonestyMode) -> float:
    if mode is DishonestyMode.BAD_MOUTH:
        return _clamp(1.0 - quality)
    return rng.random()


def _stats_for(rng: random.Random, quality: float, rate: float, window: int) -> ProviderStats:
    ia = rng.randint(20, 60)
    aa = min(ia, round(ia * _clamp(quality + rng.gauss(0.0, RATING_NOISE_SIGMA))))
    ial = rng.randint(5, 20)
    aal = min(ial, round(ial * _clamp(quality + rng.gauss(0.0, RATING_NOISE_SIGMA))))
    pv = rng.randint(4, 12)
    mv = min(pv, round(pv * _clamp(quality + rng.gauss(0.0, RATING_NOISE_SIGMA))))
    ev = min(pv - mv, round((pv - mv) * rate))
    npv = round(pv * rate * _clamp(1.0 - quality + rng.gauss(0.0, RATING_NOISE_SIGMA)))
    return ProviderStats(aa, ia, aal, ial, pv, mv, ev, npv, window_index=window)


def generate_world(spec: ScenarioSpec) -> World:
    """Build the catalog, per-window stats, and Data Lake population."""
    rng = random.Random(spec.seed)
    now = WORLD_NOW
    evaluator = StakeholderId("consumer-0", domain="domain-0")

    providers = []
    quality = {}
    for i in range(spec.num_providers):
        sid = StakeholderId(f"prov-{i:03d}", domain=f"domain-{i % 3 + 1}")
        providers.append(sid)
        quality[sid.id] = rng.random()

    recommenders = []
    honest = {}
    for i in range(spec.honest_recommenders):
        sid = StakeholderId(f"rec-h-{i:03d}", domain=f"domain-{i % 3 + 1}")
        recommenders.append(sid)
        honest[sid.id] = True
    for i in range(spec.dishonest_recommenders):
        sid = StakeholderId(f"rec-d-{i:03d}", domain=f"domain-{i % 3 + 1}")
        recommenders.append(sid)
        honest[sid.id] = False

    type_names = sorted(spec.offer_type_mix)
    type_weights = [float(spec.offer_type_mix[t]) for t in type_names]
    locations = ("north", "south", "east", "west")

    offers: list[ProductOffer] = []
    offered_types: dict[str, list[OfferType]] = {}
    horizon = spec.windows * spec.window_seconds
    for i, provider in enumerate(providers):
        seen: list[OfferType] = []
        for j in range(spec.offers_per_provider):
            offer_type = OfferType.parse(rng.choices(type_names, weights=type_weights)[0])
            if offer_type not in seen:
                seen.append(offer_type)
            offers.append(
                ProductOffer(
                    offer_id=f"offer-{i:03d}-{j:03d}",
                    provider=provider,
                    offer_type=offer_type,
                    location=locations[rng.randrange(len(locations))],
                    created_at=now - rng.randrange(1, max(2, horizon)),
                )
            )
        offered_types[provider.id] = seen

    stats_rows: list[tuple[StakeholderId, OfferType, ProviderStats]] = []
    for provider in providers:
        q = quality[provider.id]
        for offer_type in offered_types[provider.id]:
            for k in range(1, spec.windows + 1):
                stats_rows.append(
                    (provider, offer_type, _stats_for(rng, q, spec.sla_violation_rate, k))
                )

    feedback: list[dict[str, Any]] = []
    counter = 0
    raters = [evaluator, *recommenders]

    def emit(reporter: StakeholderId, target: StakeholderId,
             rating: float, recorded_at: int, offer_type: OfferType | None) -> None:
        nonlocal counter
        counter += 1
        feedback.append(
            {
                "reporter": reporter.id,
                "target": target.id,
                "rating": round(rating, 4),
                "interaction_id": f"seed{spec.seed}-{counter:06d}",
                "recorded_at": recorded_at,
                "offer_type": offer_type.value if offer_type else None,
            }
        )

    for k in range(1, spec.windows + 1):
        for rater in raters:
            for provider in providers:
                q = quality[provider.id]
                if honest.get(rater.id, True):
                    rating = _honest_rating(rng, q)
                else:
                    rating = _dishonest_rating(rng, q, spec.dishonesty_mode)
                age = (k - 1) * spec.window_seconds + rng.randrange(1, spec.window_seconds)
                emit(rater, provider, rating, now - age, None)

    # Offer-type-scoped opinions land in the newest window only.
    for rater in raters:
        for provider in providers:
            q = quality[provider.id]
            for offer_type in offered_types[provider.id]:
                if honest.get(rater.id, True):
                    rating = _honest_rating(rng, q)
                else:
                    rating = _dishonest_rating(rng, q, spec.dishonesty_mode)
                emit(rater, provider, rating, now - rng.randrange(1, spec.window_seconds), offer_type)

    return World(
        spec=spec,
        now=now,
        evaluator=evaluator,
        providers=providers,
        quality=quality,
        recommenders=recommenders,
        honest=honest,
        offers=offers,
        stats_rows=stats_rows,
        feedback=feedback,
    )


def write_world(world: World, out_dir: str | Path) -> dict[str, Path]:
    """Emit the world fixtures as files; same seed gives identical bytes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "catalog": out / "catalog.jsonl",
        "stats": out / "stats.jsonl",
        "datalake": out / "datalake.jsonl",
        "world": out / "world.json",
    }
    world.catalog().to_jsonl(paths["catalog"])
    world.stats_table().to_jsonl(paths["stats"])
    if paths["datalake"].exists():
        paths["datalake"].unlink()
    world.datalake(paths["datalake"])
    meta = {
        "spec": world.spec.to_dict(),
        "now": world.now,
        "evaluator": world.evaluator.to_dict(),
        "providers": [
            {"id": p.id, "domain": p.domain, "quality": world.quality[p.id]}
            for p in world.providers
        ],
        "recommenders": [
            {"id": r.id, "domain": r.domain, "honest": world.honest[r.id]}
            for r in world.recommenders
        ],
    }
    paths["world"].write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths


def _scripted_events(world: World) -> list[TrustEvent]:
    """Deterministic post-scoring event stream derived from the world."""
    events: list[TrustEvent] = []
    table = world.stats_table()
    for i, provider in enumerate(world.providers):
        newest = table.provider_windows(provider, 1)[0]
        base = world.now + 7200 * (i + 1)
        unhandled = newest.unmanaged_violations + newest.unpredicted_violations
        if unhandled > 0:
            magnitude = min(1.0, unhandled / max(newest.predicted_violations, 1))
            events.append(
                TrustEvent(
                    kind=EventKind.SLA_VIOLATION,
                    target=provider,
                    occurred_at=base,
                    magnitude=round(magnitude, 4),
                )
            )
        events.append(
            TrustEvent(
                kind=EventKind.SUCCESSFUL_INTERACTION,
                target=provider,
                occurred_at=base + 1800,
                magnitude=round(world.quality[provider.id], 4),
            )
        )
    return events


def _ranks(values: Sequence[float]) -> list[float]:
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    rx, ry = _ranks(xs), _ranks(ys)
    n = len(xs)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0.0 or vy == 0.0:
        return 0.0
    return cov / (vx * vy) ** 0.5


def run_scenario(
    spec: ScenarioSpec,
    cfg: ModelConfig,
    policies: Optional[dict[EventKind, PolicyRule]] = None,
) -> tuple[dict[str, Any], dict[str, Any]]:
    """Generate a world, score every offer, apply the scripted events.

    Returns (report, timings). The report is fully deterministic for a fixed
    seed; wall-clock phase and pillar timings live in the separate timings
    document because they can never be reproducible.
    """
    if spec.windows != cfg.num_windows:
        raise ConfigError(
            f"scenario windows ({spec.windows}) must match config windows ({cfg.num_windows})"
        )
    if spec.window_seconds != cfg.window_seconds:
        raise ConfigError("scenario window_seconds must match config window_seconds")

    world = generate_world(spec)
    sources = world.sources()
    engine = TrustEngine(cfg, sources, policies, owner=world.evaluator, workers=1)

    pre_snapshot = sources.datalake.snapshot()
    evaluator_history = average_by_target(pre_snapshot.entries_by_reporter(world.evaluator))

    timings = Timings()
    start = time.perf_counter()
    results = engine.score_offers(world.evaluator, world.offers, world.now, timings)
    total_seconds = time.perf_counter() - start

    events = _scripted_events(world)
    outcomes = evaluate_triggers(
        world.evaluator, events, engine.policies, sources.store, cfg
    )

    by_provider: dict[str, list[TrustScore]] = {p.id: [] for p in world.providers}
    failures = []
    for result in results:
        if isinstance(result, ScoreFailure):
            failures.append(result.to_dict())
        else:
            by_provider[result.target.id].append(result)

    provider_rows = []
    mean_scores = []
    qualities = []
    for provider in world.providers:
        scores = [s.score for s in by_provider[provider.id]]
        latest = sources.store.get_latest_score(world.evaluator, provider, None)
        mean = sum(scores) / len(scores) if scores else None
        row = {
            "id": provider.id,
            "quality": world.quality[provider.id],
            "offers_scored": len(scores),
            "score_mean": mean,
            "score_min": min(scores) if scores else None,
            "score_max": max(scores) if scores else None,
            "cold_start_scores": sum(1 for s in by_provider[provider.id] if s.cold_start),
            "score_after_events": latest.score if latest else None,
        }
        provider_rows.append(row)
        if mean is not None:
            mean_scores.append(mean)
            qualities.append(world.quality[provider.id])

    recommender_rows = [
        {
            "id": rec.id,
            "honest": world.honest[rec.id],
            "credibility": similarity_credibility(
                evaluator_history,
                average_by_target(pre_snapshot.entries_by_reporter(rec)),
                cfg.cold_start_prior,
            ),
        }
        for rec in world.recommenders
    ]

    event_rows = [outcome.to_dict() for outcome in outcomes]

    report = {
        "scenario": spec.to_dict(),
        "config": dump_config_document(cfg, policies),
        "engine": {"assessor": cfg.assessor, "kernel_backend": BACKEND},
        "providers": provider_rows,
        "recommenders": recommender_rows,
        "offers": [r.to_dict() for r in results],
        "failures": failures,
        "events": event_rows,
        "spearman_quality_vs_score": (
            spearman(qualities, mean_scores) if len(mean_scores) >= 2 else None
        ),
        "datalake_entries": len(sources.datalake),
    }
    timings_doc = {
        "total_seconds": total_seconds,
        "phase_seconds": timings.phase_seconds(),
        "pillar_seconds": timings.pillar_seconds(),
    }
    return report, timings_doc


def render_report(report: dict[str, Any]) -> str:
    """Human-readable table for the scenario report."""
    lines = []
    lines.append(f"providers: {len(report['providers'])}  "
                 f"offers: {len(report['offers'])}  "
                 f"datalake entries: {report['datalake_entries']}")
    corr = report.get("spearman_quality_vs_score")
    if corr is not None:
        lines.append(f"spearman(quality, score): {corr:+.4f}")
    lines.append("")
    lines.append(f"{'provider':<12} {'quality':>8} {'mean':>8} {'min':>8} "
                 f"{'max':>8} {'after events':>13}")
    for row in report["providers"]:
        def fmt(v: Optional[float]) -> str:
            return f"{v:.4f}" if v is not None else "-"
        lines.append(
            f"{row['id']:<12} {fmt(row['quality']):>8} {fmt(row['score_mean']):>8} "
            f"{fmt(row['score_min']):>8} {fmt(row['score_max']):>8} "
            f"{fmt(row['score_after_events']):>13}"
        )
    lines.append("")
    lines.append(f"{'recommender':<12} {'honest':>7} {'credibility':>12}")
    for row in report["recommenders"]:
        lines.append(
            f"{row['id']:<12} {str(row['honest']):>7} {row['credibility']:>12.4f}"
        )
    return "\n".join(lines)
