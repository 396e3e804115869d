"""Event-driven score maintenance: rewards, punishments, and time decay.

Punishments shrink a score multiplicatively, T' = T * (1 - weight *
magnitude); rewards close a fraction of the remaining headroom, T' = T +
(1 - T) * weight * magnitude. Both keep T inside [0, 1] under arbitrary
event sequences. Decay regresses a score toward the neutral cold-start
prior rather than toward zero: absence of evidence means ignorance, not
hostility.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Union

from taas import kernels
from taas.model import (
    DeltaMode,
    EventKind,
    ModelConfig,
    NoRuleError,
    NoScoreError,
    PolicyRule,
    StakeholderId,
    TrustEvent,
    TrustScore,
)
from taas.storage import PrivateStore

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UpdateOutcome:
    """Result of one applied event; applied_rule is None for decay ticks."""

    previous: TrustScore
    updated: TrustScore
    event: TrustEvent
    applied_rule: Optional[PolicyRule]
    below_threshold: bool

    def to_dict(self) -> dict:
        return {
            "event": self.event.to_dict(),
            "previous_score": self.previous.score,
            "updated_score": self.updated.score,
            "version": self.updated.version,
            "applied_rule": self.applied_rule.to_dict() if self.applied_rule else None,
            "below_threshold": self.below_threshold,
        }


@dataclass(frozen=True)
class SkippedEvent:
    """An event that could not be applied; the stream keeps going."""

    event: TrustEvent
    code: str
    message: str

    def to_dict(self) -> dict:
        return {
            "event": self.event.to_dict(),
            "error": {"code": self.code, "message": self.message},
        }


def apply_decay(score: TrustScore, now: int, cfg: ModelConfig) -> TrustScore:
    """Regress a score toward the neutral prior; returns the next version."""
    elapsed = max(0, now - score.computed_at)
    decayed = kernels.decay_value(
        score.score, cfg.cold_start_prior, elapsed, cfg.decay_half_life
    )
    return replace(
        score,
        score=decayed,
        version=score.version + 1,
        computed_at=max(now, score.computed_at),
    )


def apply_event(
    evaluator: StakeholderId,
    event: TrustEvent,
    rules: Mapping[EventKind, PolicyRule],
    store: PrivateStore,
    cfg: ModelConfig,
) -> UpdateOutcome:
    """Recompute and persist the stored score hit by one event.

    The event targets the evaluator's record for (target, offer_id). Decay
    ticks route to the decay law; every other kind needs a policy rule.
    """
    previous = store.get_latest_score(evaluator, event.target, event.offer_id)
    if previous is None:
        raise NoScoreError(
            f"no trust relationship for {evaluator.id} -> {event.target.id}"
            f"{f' (offer {event.offer_id})' if event.offer_id else ''}"
        )

    if event.kind is EventKind.DECAY_TICK:
        updated = apply_decay(previous, event.occurred_at, cfg)
        rule = None
    else:
        rule = rules.get(event.kind)
        if rule is None:
            raise NoRuleError(f"no policy rule for event kind {event.kind.value}")
        if rule.delta_mode is DeltaMode.PUNISH:
            value = kernels.punish_value(previous.score, rule.weight, event.magnitude)
        else:
            value = kernels.reward_value(previous.score, rule.weight, event.magnitude)
        updated = replace(
            previous,
            score=value,
            version=previous.version + 1,
            computed_at=max(event.occurred_at, previous.computed_at),
        )

    store.put_trust_score(updated)
    return UpdateOutcome(
        previous=previous,
        updated=updated,
        event=event,
        applied_rule=rule,
        below_threshold=updated.score < cfg.recommender_threshold,
    )


def evaluate_triggers(
    evaluator: StakeholderId,
    events: Iterable[TrustEvent],
    rules: Mapping[EventKind, PolicyRule],
    store: PrivateStore,
    cfg: ModelConfig,
) -> list[Union[UpdateOutcome, SkippedEvent]]:
    """Apply an occurred_at-ordered event stream, never halting on one failure."""
    outcomes: list[Union[UpdateOutcome, SkippedEvent]] = []
    for event in events:
        try:
            outcomes.append(apply_event(evaluator, event, rules, store, cfg))
        except (NoScoreError, NoRuleError) as exc:
            log.warning("skipping %s event for %s: %s", event.kind.value, event.target.id, exc)
            outcomes.append(SkippedEvent(event=event, code=exc.code, message=str(exc)))
    return outcomes
