"""The trust assessor: from a gathered context to a trust score.

The score combines four pillars:

  * satisfaction: a window-weighted reputation built from asset availability
    and SLA-violation handling, blended between the provider as a whole and
    the specific offer, each reinforced by trust-weighted recommendations;
  * credibility: how closely each recommender's past ratings agree with the
    evaluator's own ratings over commonly rated targets;
  * transaction context: how much feedback about the target has been
    published to the shared Data Lake per time window;
  * community context: credibility-weighted community ratings scaled by how
    many recommenders actually participated.

Final combination: T = alpha * S * Cr * TF + beta * CF, clamped to [0, 1].
Assessors are pure: the same context and config always produce the same
score, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from taas import kernels
from taas.gathering import History, TrustContext
from taas.model import (
    ConfigError,
    EmptyAggregationError,
    ModelConfig,
    ProviderStats,
    Recommendation,
    TimeWindowWeights,
    TrustScore,
    WindowMismatchError,
)
from taas.timing import Timings, now_ns


@dataclass(frozen=True)
class SatisfactionBreakdown:
    """Provider and offer satisfaction plus their weighted blend."""

    provider_satisfaction: float
    offer_satisfaction: float
    combined: float


def provider_reputation(
    stats_per_window: Sequence[ProviderStats], eps: TimeWindowWeights
) -> float:
    """Window-weighted reputation over validated per-window counters."""
    if len(stats_per_window) != len(eps):
        raise WindowMismatchError(
            f"{len(stats_per_window)} stats windows for {len(eps)} weights"
        )
    return kernels.provider_reputation(
        [s.as_tuple() for s in stats_per_window], eps.weights
    )


def aggregate_recommendations(pairs: Sequence[tuple[float, float]]) -> float:
    """Mean of rating * recommender-trust products; empty input is an error."""
    if not pairs:
        raise EmptyAggregationError("no recommendations to aggregate")
    ratings = [p[0] for p in pairs]
    trusts = [p[1] for p in pairs]
    return kernels.aggregate_recommendations(ratings, trusts)


def _satisfaction_side(
    stats: Sequence[ProviderStats],
    recs: Sequence[Recommendation],
    trust_of: Mapping[str, float],
    cfg: ModelConfig,
) -> float:
    rep = provider_reputation(stats, cfg.window_weights)
    if not recs:
        # Lone-evaluator convention: with no recommendations the aggregation
        # degenerates to the multiplicative identity.
        return rep
    pairs = [
        (r.rating, trust_of.get(r.recommender.id, cfg.cold_start_prior)) for r in recs
    ]
    return rep * aggregate_recommendations(pairs)


def provider_satisfaction(ctx: TrustContext, cfg: ModelConfig) -> float:
    """Reputation across all the provider's assets, reinforced by recommendations."""
    return _satisfaction_side(
        ctx.provider_stats, ctx.recommendations, ctx.recommender_trust, cfg
    )


def offer_satisfaction(ctx: TrustContext, cfg: ModelConfig) -> float:
    """Same construction, restricted to assets and ratings of the offer's type."""
    return _satisfaction_side(
        ctx.offer_stats, ctx.offer_recommendations, ctx.recommender_trust, cfg
    )


def satisfaction(ps: float, po: float, cfg: ModelConfig) -> SatisfactionBreakdown:
    """Blend provider and offer satisfaction with the psi/phi weights."""
    return SatisfactionBreakdown(ps, po, cfg.psi * ps + cfg.phi * po)


def similarity_credibility(
    evaluator_history: History, recommender_history: History, prior: float
) -> float:
    """Credibility of a recommender from rating agreement with the evaluator.

    Histories are per-target average ratings. With no commonly rated target
    there is nothing to compare and the neutral prior is returned.
    """
    mine = dict(evaluator_history)
    theirs = dict(recommender_history)
    common = sorted(mine.keys() & theirs.keys())
    if not common:
        return prior
    return kernels.similarity_credibility(
        [mine[t] for t in common], [theirs[t] for t in common]
    )


def transaction_context_factor(
    feedback_counts: Sequence[int], cfg: ModelConfig
) -> float:
    """Reward published feedback volume; floored so silence is not fatal."""
    if len(feedback_counts) != cfg.num_windows:
        raise WindowMismatchError(
            f"{len(feedback_counts)} feedback counts for {cfg.num_windows} windows"
        )
    return kernels.transaction_factor(
        feedback_counts, cfg.window_weights.weights, cfg.tf_floor, cfg.tf_reference_count
    )


def community_context_factor(
    recs: Sequence[Recommendation],
    credibilities: Mapping[str, float],
    cfg: ModelConfig,
) -> float:
    """Credibility-weighted community rating, scaled by participation.

    No recommendations, or a community whose total credibility mass is zero,
    yields the neutral prior.
    """
    if not recs:
        return cfg.cold_start_prior
    ratings = [r.rating for r in recs]
    creds = [credibilities[r.recommender.id] for r in recs]
    if sum(creds) == 0.0:
        return cfg.cold_start_prior
    return kernels.community_factor(ratings, creds, cfg.recommender_list_size)


def final_trust(
    sat: SatisfactionBreakdown, cr: float, tf: float, cf: float, cfg: ModelConfig
) -> float:
    """T = alpha * S * Cr * TF + beta * CF, clamped to [0, 1]."""
    return kernels.final_trust(sat.combined, cr, tf, cf, cfg.alpha, cfg.beta)


class Assessor(Protocol):
    """A named scoring strategy mapping a context to a score."""

    name: str

    def assess(
        self, ctx: TrustContext, cfg: ModelConfig, timings: Timings | None = None
    ) -> TrustScore: ...


class PeerTrustAssessor:
    """The adapted peer-trust scoring strategy (the only one built in)."""

    name = "peertrust"

    def assess(
        self, ctx: TrustContext, cfg: ModelConfig, timings: Timings | None = None
    ) -> TrustScore:
        prior = cfg.cold_start_prior

        if timings is not None:
            t = now_ns()
        ps = provider_satisfaction(ctx, cfg) if ctx.provider_stats else prior
        po = offer_satisfaction(ctx, cfg) if ctx.offer_stats else prior
        sat = satisfaction(ps, po, cfg)
        if timings is not None:
            t2 = now_ns()
            timings.add("satisfaction", t2 - t)
            t = t2

        consulted = sorted(
            {r.recommender.id for r in ctx.recommendations}
            | {r.recommender.id for r in ctx.offer_recommendations}
        )
        credibilities = {
            rid: similarity_credibility(
                ctx.evaluator_history, ctx.recommender_histories.get(rid, ()), prior
            )
            for rid in consulted
        }
        if consulted:
            cr = sum(credibilities[rid] for rid in consulted) / len(consulted)
        else:
            cr = prior
        if timings is not None:
            t2 = now_ns()
            timings.add("credibility", t2 - t)
            t = t2

        if ctx.feedback_counts:
            tf = transaction_context_factor(ctx.feedback_counts, cfg)
        else:
            tf = cfg.tf_floor
        if timings is not None:
            t2 = now_ns()
            timings.add("tf", t2 - t)
            t = t2

        cf = community_context_factor(ctx.recommendations, credibilities, cfg)
        if timings is not None:
            timings.add("cf", now_ns() - t)

        # the final blend is one kernel call; its cost is below the timer's
        # own resolution and is deliberately left out of the attribution
        score_value = final_trust(sat, cr, tf, cf, cfg)
        return TrustScore(
            evaluator=ctx.evaluator,
            target=ctx.target,
            offer_id=ctx.offer.offer_id,
            score=score_value,
            satisfaction=sat.combined,
            credibility=cr,
            transaction_factor=tf,
            community_factor=cf,
            version=(ctx.prior_score.version + 1) if ctx.prior_score else 1,
            computed_at=ctx.now,
            cold_start=ctx.cold_start,
        )


_ASSESSORS = {PeerTrustAssessor.name: PeerTrustAssessor}


def make_assessor(name: str) -> Assessor:
    """Look up a scoring strategy by its configured name."""
    try:
        return _ASSESSORS[name]()
    except KeyError:
        raise ConfigError(f"unknown assessor: {name!r}") from None
