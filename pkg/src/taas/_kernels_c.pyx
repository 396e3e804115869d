# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled scoring kernels.

Mirror of taas._kernels_py expression for expression; both must produce
bit-identical IEEE-754 doubles. Do not enable fast-math or reassociation.
"""

from libc.math cimport pow, sqrt


cpdef double reputation_window(
    double aa,
    double ia,
    double aal,
    double ial,
    double pv,
    double mv,
    double ev,
    double npv,
):
    """Single-window reputation from asset availability and SLA handling."""
    cdef double avail = aa / ia if ia > 0 else 0.0
    cdef double avail_loc = aal / ial if ial > 0 else 0.0
    cdef double managed = mv / pv if pv > 0 else 0.0
    cdef double violations = (ev + npv) / (pv if pv > 0 else 1.0)
    if violations > 1.0:
        violations = 1.0
    return ((avail + avail_loc + 2.0 * managed - 2.0 * violations) + 2.0) / 6.0


cpdef double provider_reputation(object stats, object eps):
    """Window-weighted reputation; stats[k] pairs with eps[k], newest first."""
    cdef double total = 0.0
    cdef double aa, ia, aal, ial, pv, mv, ev, npv
    cdef Py_ssize_t k
    for k in range(len(eps)):
        aa, ia, aal, ial, pv, mv, ev, npv = stats[k]
        total += (<double> eps[k]) * reputation_window(aa, ia, aal, ial, pv, mv, ev, npv)
    return total


cpdef double aggregate_recommendations(object ratings, object trusts):
    """Mean of ratings weighted by the recommender's last trust score."""
    cdef double total = 0.0
    cdef Py_ssize_t n = len(ratings)
    cdef Py_ssize_t i
    for i in range(n):
        total += (<double> ratings[i]) * (<double> trusts[i])
    return total / n


cpdef double similarity_credibility(object mine, object theirs):
    """1 minus the RMS rating distance over commonly rated targets."""
    cdef double total = 0.0
    cdef double diff
    cdef Py_ssize_t n = len(mine)
    cdef Py_ssize_t i
    for i in range(n):
        diff = (<double> mine[i]) - (<double> theirs[i])
        total += diff * diff
    return 1.0 - sqrt(total / n)


cpdef double transaction_factor(object counts, object eps, double floor, double reference):
    """Publication-volume factor in [floor, 1], saturating at reference."""
    cdef double coverage = 0.0
    cdef double ratio
    cdef Py_ssize_t k
    for k in range(len(eps)):
        ratio = (<double> counts[k]) / reference
        if ratio > 1.0:
            ratio = 1.0
        coverage += (<double> eps[k]) * ratio
    return floor + (1.0 - floor) * coverage


cpdef double community_factor(object ratings, object credibilities, double list_size):
    """Credibility-weighted community rating scaled by participation."""
    cdef double weighted = 0.0
    cdef double mass = 0.0
    cdef Py_ssize_t n = len(ratings)
    cdef Py_ssize_t i
    cdef double participation
    for i in range(n):
        weighted += (<double> ratings[i]) * (<double> credibilities[i])
        mass += (<double> credibilities[i])
    participation = n / list_size
    if participation > 1.0:
        participation = 1.0
    return (weighted / mass) * participation


cpdef double final_trust(
    double satisfaction,
    double credibility,
    double tf,
    double cf,
    double alpha,
    double beta,
):
    """Blend the credibility-and-context weighted satisfaction with the community factor."""
    cdef double value = alpha * (satisfaction * credibility * tf) + beta * cf
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


cpdef double decay_value(double score, double prior, double elapsed, double half_life):
    """Exponential regression of a score toward the neutral prior."""
    return prior + (score - prior) * pow(2.0, -(elapsed / half_life))


cpdef double reward_value(double score, double weight, double magnitude):
    """Move a score toward 1 by a fraction of the remaining headroom."""
    return score + (1.0 - score) * weight * magnitude


cpdef double punish_value(double score, double weight, double magnitude):
    """Shrink a score multiplicatively."""
    return score * (1.0 - weight * magnitude)
