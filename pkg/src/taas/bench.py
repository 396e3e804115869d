"""Benchmark harness: pipeline scaling shape and kernel backend comparison.

The pipeline bench scores N synthetic offers sequentially, once cold and
once warm per count. Cold mode starts from empty stores and forces the
exhaustive cold-start path for every offer; warm mode seeds a provider-level
prior for every provider so the indexed warm path is taken throughout. Both
modes gather against identical Data Lake contents, so the cold/warm gap
isolates the cold-start cost. Phase durations are measured per section;
the compute phase is attributed bottom-up from its pillar sections, which
is what makes the reported sums reconcile.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence

from taas import kernels
from taas.engine import ScoreFailure, TrustEngine
from taas.model import EventKind, ModelConfig, PolicyRule, StakeholderId, TrustScore
from taas.sim import ScenarioSpec, World, generate_world
from taas.storage import PrivateStore
from taas.timing import PHASES, PILLARS, Timings


@dataclass(frozen=True)
class BenchReport:
    """One measured pipeline pass over a fixed number of offers."""

    offers: int
    total_seconds: float
    phase_seconds: dict[str, float]
    pillar_seconds: dict[str, float]
    cold_start: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "offers": self.offers,
            "total_seconds": self.total_seconds,
            "phase_seconds": dict(self.phase_seconds),
            "pillar_seconds": dict(self.pillar_seconds),
            "cold_start": self.cold_start,
        }

    def phase_sum(self) -> float:
        return sum(self.phase_seconds[p] for p in PHASES)

    def pillar_sum(self) -> float:
        return sum(self.pillar_seconds[p] for p in PILLARS)


def _bench_spec(count: int, template: Optional[ScenarioSpec] = None) -> ScenarioSpec:
    base = template or ScenarioSpec()
    providers = min(base.num_providers, count) or 1
    per_provider = max(1, count // providers)
    providers = max(1, -(-count // per_provider))  # ceil so at least count offers exist
    return ScenarioSpec(
        seed=base.seed,
        num_providers=providers,
        offers_per_provider=per_provider,
        offer_type_mix=base.offer_type_mix,
        honest_recommenders=base.honest_recommenders,
        dishonest_recommenders=base.dishonest_recommenders,
        dishonesty_mode=base.dishonesty_mode,
        sla_violation_rate=base.sla_violation_rate,
        windows=base.windows,
        window_seconds=base.window_seconds,
    )


def _seed_warm_priors(world: World, store: PrivateStore, cfg: ModelConfig) -> None:
    prior = cfg.cold_start_prior
    for provider in world.providers:
        store.put_trust_score(
            TrustScore(
                evaluator=world.evaluator,
                target=provider,
                score=prior,
                satisfaction=prior,
                credibility=prior,
                transaction_factor=cfg.tf_floor,
                community_factor=prior,
                version=1,
                computed_at=world.now - 1,
            )
        )


def _run_pass(
    world: World,
    cfg: ModelConfig,
    policies: Optional[dict[EventKind, PolicyRule]],
    offers_wanted: int,
    cold: bool,
) -> BenchReport:
    store = PrivateStore()
    sources = world.sources(store=store)
    if not cold:
        _seed_warm_priors(world, store, cfg)
    engine = TrustEngine(
        cfg,
        sources,
        policies,
        owner=world.evaluator,
        workers=1,
        force_cold_start=cold,
    )
    offers = world.offers[:offers_wanted]
    timings = Timings()
    start = time.perf_counter()
    results = engine.score_offers(world.evaluator, offers, world.now, timings)
    total = time.perf_counter() - start
    failures = [r for r in results if isinstance(r, ScoreFailure)]
    if failures:
        raise RuntimeError(f"bench pass had {len(failures)} failed offers")
    return BenchReport(
        offers=len(offers),
        total_seconds=total,
        phase_seconds=timings.phase_seconds(),
        pillar_seconds=timings.pillar_seconds(),
        cold_start=cold,
    )


def run_bench(
    counts: Sequence[int],
    cfg: ModelConfig,
    policies: Optional[dict[EventKind, PolicyRule]] = None,
    template: Optional[ScenarioSpec] = None,
) -> list[BenchReport]:
    """One cold and one warm report per offer count, in count order."""
    reports = []
    for count in counts:
        world = generate_world(_bench_spec(count, template))
        for cold in (True, False):
            reports.append(_run_pass(world, cfg, policies, count, cold))
    return reports


def render_bench(reports: Sequence[BenchReport]) -> str:
    lines = [
        f"{'offers':>7} {'mode':>5} {'total s':>9} {'gather s':>9} "
        f"{'compute s':>9} {'store s':>9} {'credibility s':>13}"
    ]
    for r in reports:
        lines.append(
            f"{r.offers:>7} {'cold' if r.cold_start else 'warm':>5} "
            f"{r.total_seconds:>9.3f} {r.phase_seconds['gathering']:>9.3f} "
            f"{r.phase_seconds['compute']:>9.3f} {r.phase_seconds['storage']:>9.3f} "
            f"{r.pillar_seconds['credibility']:>13.3f}"
        )
    return "\n".join(lines)


# ----------------------------------------------------------------------
# kernel backend comparison

def _kernel_workloads(iterations: int) -> dict[str, tuple]:
    import random

    rng = random.Random(7)
    stats = []
    for _ in range(64):
        ia = rng.randint(1, 50)
        aa = rng.randint(0, ia)
        ial = rng.randint(1, 20)
        aal = rng.randint(0, ial)
        pv = rng.randint(0, 12)
        mv = rng.randint(0, pv) if pv else 0
        ev = rng.randint(0, pv - mv) if pv - mv > 0 else 0
        npv = rng.randint(0, 6)
        stats.append((aa, ia, aal, ial, pv, mv, ev, npv))
    eps = (0.6, 0.3, 0.1)
    ratings = [rng.random() for _ in range(10)]
    trusts = [rng.random() for _ in range(10)]
    mine = [rng.random() for _ in range(20)]
    theirs = [rng.random() for _ in range(20)]
    counts = [rng.randint(0, 40) for _ in range(3)]
    return {
        "provider_reputation": ("provider_reputation", (stats[:3], eps)),
        "similarity_credibility": ("similarity_credibility", (mine, theirs)),
        "aggregate_recommendations": ("aggregate_recommendations", (ratings, trusts)),
        "transaction_factor": ("transaction_factor", (counts, eps, 0.5, 20.0)),
        "community_factor": ("community_factor", (ratings, trusts, 10.0)),
        "final_trust": ("final_trust", (0.7, 0.86, 0.75, 0.5, 0.7, 0.3)),
        "decay_value": ("decay_value", (0.9, 0.5, 86400.0, 604800.0)),
    }


def compare_kernels(iterations: int = 200_000) -> dict[str, Any]:
    """Time every kernel on both backends and check they agree bitwise."""
    backends = kernels.available_backends()
    workloads = _kernel_workloads(iterations)
    rows: dict[str, Any] = {}
    for label, (fn_name, args) in workloads.items():
        row: dict[str, Any] = {}
        values = {}
        for backend_name, module in backends.items():
            fn = getattr(module, fn_name)
            loops = range(iterations)
            start = time.perf_counter_ns()
            for _ in loops:
                value = fn(*args)
            elapsed = time.perf_counter_ns() - start
            row[backend_name] = {"ns_per_call": elapsed / iterations, "value": value}
            values[backend_name] = value
        if len(values) == 2:
            row["bit_identical"] = values["pure"] == values["native"]
            row["speedup"] = (
                row["pure"]["ns_per_call"] / row["native"]["ns_per_call"]
            )
        rows[label] = row
    return {
        "iterations": iterations,
        "active_backend": kernels.BACKEND,
        "backends": sorted(backends),
        "kernels": rows,
    }


def render_kernel_comparison(doc: Mapping[str, Any]) -> str:
    both = len(doc["backends"]) == 2
    header = f"{'kernel':<26} {'pure ns':>9}"
    if both:
        header += f" {'native ns':>10} {'speedup':>8} {'identical':>10}"
    lines = [f"active backend: {doc['active_backend']}", header]
    for label, row in doc["kernels"].items():
        line = f"{label:<26} {row['pure']['ns_per_call']:>9.1f}"
        if both:
            line += (
                f" {row['native']['ns_per_call']:>10.1f}"
                f" {row['speedup']:>8.2f}x"
                f" {str(row['bit_identical']):>10}"
            )
        lines.append(line)
    if both:
        speedups = [row["speedup"] for row in doc["kernels"].values()]
        lines.append(f"median speedup: {statistics.median(speedups):.2f}x")
    return "\n".join(lines)
