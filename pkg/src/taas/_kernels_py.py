"""Pure-Python scoring kernels.

This module is the reference implementation and the fallback when the
compiled extension (taas._kernels_c) is unavailable. The two implementations
mirror each other expression for expression so they produce bit-identical
IEEE-754 results; keep any edit in lockstep with _kernels_c.pyx.

Degenerate-count conventions for the windowed reputation:
  * a zero asset denominator contributes 0 to its ratio,
  * a zero predicted-violation count zeroes the managed ratio and pins the
    violation denominator at 1,
  * the violation ratio is capped at 1 because unpredicted violations can
    exceed the predicted count in raw data.
Together these keep each window's reputation inside [0, 1].
"""

from __future__ import annotations

from math import sqrt

from typing import Sequence

StatTuple = Sequence[float]


def reputation_window(
    aa: float,
    ia: float,
    aal: float,
    ial: float,
    pv: float,
    mv: float,
    ev: float,
    npv: float,
) -> float:
    """Single-window reputation from asset availability and SLA handling."""
    avail = aa / ia if ia > 0 else 0.0
    avail_loc = aal / ial if ial > 0 else 0.0
    managed = mv / pv if pv > 0 else 0.0
    violations = (ev + npv) / (pv if pv > 0 else 1.0)
    if violations > 1.0:
        violations = 1.0
    return ((avail + avail_loc + 2.0 * managed - 2.0 * violations) + 2.0) / 6.0


def provider_reputation(stats: Sequence[StatTuple], eps: Sequence[float]) -> float:
    """Window-weighted reputation; stats[k] pairs with eps[k], newest first."""
    total = 0.0
    for k in range(len(eps)):
        aa, ia, aal, ial, pv, mv, ev, npv = stats[k]
        total += eps[k] * reputation_window(aa, ia, aal, ial, pv, mv, ev, npv)
    return total


def aggregate_recommendations(ratings: Sequence[float], trusts: Sequence[float]) -> float:
    """Mean of ratings weighted by the recommender's last trust score."""
    total = 0.0
    n = len(ratings)
    for i in range(n):
        total += ratings[i] * trusts[i]
    return total / n


def similarity_credibility(mine: Sequence[float], theirs: Sequence[float]) -> float:
    """1 minus the RMS rating distance over commonly rated targets."""
    total = 0.0
    n = len(mine)
    for i in range(n):
        diff = mine[i] - theirs[i]
        total += diff * diff
    return 1.0 - sqrt(total / n)


def transaction_factor(
    counts: Sequence[float], eps: Sequence[float], floor: float, reference: float
) -> float:
    """Publication-volume factor in [floor, 1], saturating at reference."""
    coverage = 0.0
    for k in range(len(eps)):
        ratio = counts[k] / reference
        if ratio > 1.0:
            ratio = 1.0
        coverage += eps[k] * ratio
    return floor + (1.0 - floor) * coverage


def community_factor(
    ratings: Sequence[float], credibilities: Sequence[float], list_size: float
) -> float:
    """Credibility-weighted community rating scaled by participation."""
    weighted = 0.0
    mass = 0.0
    n = len(ratings)
    for i in range(n):
        weighted += ratings[i] * credibilities[i]
        mass += credibilities[i]
    participation = n / list_size
    if participation > 1.0:
        participation = 1.0
    return (weighted / mass) * participation


def final_trust(
    satisfaction: float,
    credibility: float,
    tf: float,
    cf: float,
    alpha: float,
    beta: float,
) -> float:
    """Blend the credibility-and-context weighted satisfaction with the community factor."""
    value = alpha * (satisfaction * credibility * tf) + beta * cf
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def decay_value(score: float, prior: float, elapsed: float, half_life: float) -> float:
    """Exponential regression of a score toward the neutral prior."""
    return prior + (score - prior) * 2.0 ** (-(elapsed / half_life))


def reward_value(score: float, weight: float, magnitude: float) -> float:
    """Move a score toward 1 by a fraction of the remaining headroom."""
    return score + (1.0 - score) * weight * magnitude


def punish_value(score: float, weight: float, magnitude: float) -> float:
    """Shrink a score multiplicatively."""
    return score * (1.0 - weight * magnitude)
