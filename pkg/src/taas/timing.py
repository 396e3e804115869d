"""Lightweight accumulating timers for phase and pillar attribution.

The instrumented pipeline sections are tiny (microseconds), so the hot paths
time themselves with explicit perf_counter_ns reads guarded by "is the
collector present" checks instead of context-manager dispatch; the collector
itself is just a name -> nanoseconds dict.
"""

from __future__ import annotations

import time

PHASES = ("gathering", "compute", "storage")
PILLARS = ("satisfaction", "credibility", "tf", "cf")

now_ns = time.perf_counter_ns


class Timings:
    """Accumulates nanoseconds per named section across many operations.

    The compute phase is attributed bottom-up as the sum of its timed
    sections (the four pillars plus the final combination), which keeps the
    pillar breakdown and the phase total consistent by construction.
    """

    __slots__ = ("ns",)

    def __init__(self) -> None:
        self.ns: dict[str, int] = {}

    def add(self, name: str, nanos: int) -> None:
        self.ns[name] = self.ns.get(name, 0) + nanos

    def seconds(self, name: str) -> float:
        return self.ns.get(name, 0) / 1e9

    def compute_seconds(self) -> float:
        return sum(self.seconds(name) for name in PILLARS)

    def phase_seconds(self) -> dict[str, float]:
        return {
            "gathering": self.seconds("gathering"),
            "compute": self.compute_seconds(),
            "storage": self.seconds("storage"),
        }

    def pillar_seconds(self) -> dict[str, float]:
        return {name: self.seconds(name) for name in PILLARS}
