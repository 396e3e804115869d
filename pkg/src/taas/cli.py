"""Command line surface: score, simulate, bench, serve, validate-config.

The config path comes from --config or the TAAS_CONFIG environment variable;
without either, documented defaults apply. Machine-readable output goes to
stdout, errors to stderr as "CODE: message", with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any

from taas import bench as bench_mod
from taas import sim as sim_mod
from taas.configio import dump_config_document, resolve_config
from taas.engine import ScoreFailure, TrustEngine
from taas.gathering import Catalog, Sources, StatsTable
from taas.model import StakeholderId, TrustError
from taas.storage import DataLake, PrivateStore


def _die(code: str, message: str) -> int:
    print(f"{code}: {message}", file=sys.stderr)
    return 2


def _load_scenario(path: str | None) -> sim_mod.ScenarioSpec:
    if path is None:
        return sim_mod.ScenarioSpec()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise TrustError(f"scenario file not found: {path}", code="FILE_NOT_FOUND") from None
    except json.JSONDecodeError as exc:
        raise TrustError(f"scenario file is not valid JSON: {exc}", code="CONFIG_INVALID") from exc
    try:
        return sim_mod.ScenarioSpec.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise TrustError(f"bad scenario: {exc}", code="CONFIG_INVALID") from exc


def _write_or_print(doc: Any, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate_config(args: argparse.Namespace) -> int:
    cfg, policies = resolve_config(args.config)
    _write_or_print(dump_config_document(cfg, policies), None)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    cfg, policies = resolve_config(args.config)
    catalog_path = Path(args.catalog)
    if not catalog_path.exists():
        raise TrustError(f"catalog file not found: {args.catalog}", code="FILE_NOT_FOUND")
    catalog = Catalog.from_jsonl(catalog_path)
    if len(catalog) == 0:
        raise TrustError(f"catalog file has no offers: {args.catalog}", code="EMPTY_CATALOG")

    stats = StatsTable()
    if args.stats:
        if not Path(args.stats).exists():
            raise TrustError(f"stats file not found: {args.stats}", code="FILE_NOT_FOUND")
        stats = StatsTable.from_jsonl(args.stats)
    datalake = DataLake(args.datalake) if args.datalake else DataLake()
    store = PrivateStore(args.store) if args.store else PrivateStore()

    evaluator = StakeholderId(args.evaluator)
    engine = TrustEngine(
        cfg,
        Sources(catalog=catalog, datalake=datalake, stats=stats, store=store),
        policies,
        owner=evaluator,
        workers=args.workers,
    )
    now = args.now if args.now is not None else int(time.time())
    offers = catalog.all_offers()
    results = engine.score_offers(evaluator, offers, now)
    _write_or_print([r.to_dict() for r in results], args.out)
    return 1 if all(isinstance(r, ScoreFailure) for r in results) else 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg, policies = resolve_config(args.config)
    spec = _load_scenario(args.scenario)
    report, timings = sim_mod.run_scenario(spec, cfg, policies)
    if args.out:
        _write_or_print(report, args.out)
    if args.timings:
        _write_or_print(timings, args.timings)
    if args.world_dir:
        sim_mod.write_world(sim_mod.generate_world(spec), args.world_dir)
    print(sim_mod.render_report(report))
    print(
        f"\nphases: gathering {timings['phase_seconds']['gathering']:.3f}s  "
        f"compute {timings['phase_seconds']['compute']:.3f}s  "
        f"storage {timings['phase_seconds']['storage']:.3f}s  "
        f"(total {timings['total_seconds']:.3f}s)"
    )
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg, policies = resolve_config(args.config)
    try:
        counts = [int(c) for c in args.counts.split(",") if c.strip()]
    except ValueError:
        raise TrustError(f"bad counts: {args.counts!r}", code="CONFIG_INVALID") from None
    if not counts:
        raise TrustError("no offer counts given", code="CONFIG_INVALID")
    template = _load_scenario(args.scenario)
    reports = bench_mod.run_bench(counts, cfg, policies, template)
    if args.out:
        _write_or_print([r.to_dict() for r in reports], args.out)
    print(bench_mod.render_bench(reports))
    return 0


def cmd_bench_kernels(args: argparse.Namespace) -> int:
    doc = bench_mod.compare_kernels(args.iterations)
    if args.out:
        _write_or_print(doc, args.out)
    print(bench_mod.render_kernel_comparison(doc))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from taas import service as service_mod

    cfg, policies = resolve_config(args.config)
    host, _, port = args.bind.rpartition(":")
    catalog = Catalog.from_jsonl(args.catalog) if args.catalog else Catalog()
    stats = StatsTable.from_jsonl(args.stats) if args.stats else StatsTable()
    datalake = DataLake(args.datalake) if args.datalake else DataLake()
    store = PrivateStore(args.store) if args.store else PrivateStore()
    engine = TrustEngine(
        cfg,
        Sources(catalog=catalog, datalake=datalake, stats=stats, store=store),
        policies,
        owner=StakeholderId(args.owner),
        workers=args.workers,
    )
    service_mod.serve((host or "127.0.0.1", int(port)), engine)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="config document path (or set TAAS_CONFIG)")

    p = sub.add_parser("validate-config", help="parse and validate a config document")
    add_config(p)
    p.set_defaults(func=cmd_validate_config)

    p = sub.add_parser("score", help="score every offer in a catalog file")
    add_config(p)
    p.add_argument("--evaluator", required=True, help="evaluating stakeholder id")
    p.add_argument("--catalog", required=True, help="offer catalog (JSON lines)")
    p.add_argument("--stats", help="provider statistics fixture (JSON lines)")
    p.add_argument("--datalake", help="shared feedback log path")
    p.add_argument("--store", help="private store journal path")
    p.add_argument("--now", type=int, help="score at this epoch second")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write scores to this file instead of stdout")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("simulate", help="run a synthetic marketplace scenario")
    add_config(p)
    p.add_argument("--scenario", help="scenario spec file (JSON)")
    p.add_argument("--out", help="write the deterministic report here")
    p.add_argument("--timings", help="write wall-clock timings here")
    p.add_argument("--world-dir", help="also materialize the world fixtures")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="pipeline scaling benchmark (cold and warm)")
    add_config(p)
    p.add_argument("--counts", default="100,500,1000")
    p.add_argument("--scenario", help="scenario template file (JSON)")
    p.add_argument("--out", help="write bench reports here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bench-kernels", help="compare compiled and pure kernels")
    p.add_argument("--iterations", type=int, default=200_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench_kernels)

    p = sub.add_parser("serve", help="run the scoring service")
    add_config(p)
    p.add_argument("--bind", default="127.0.0.1:8420")
    p.add_argument("--owner", default="taas-instance", help="instance owner stakeholder id")
    p.add_argument("--catalog")
    p.add_argument("--stats")
    p.add_argument("--datalake")
    p.add_argument("--store")
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrustError as exc:
        return _die(exc.code, str(exc))
    except FileNotFoundError as exc:
        return _die("FILE_NOT_FOUND", str(exc))
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
