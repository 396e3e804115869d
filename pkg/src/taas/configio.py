"""Loading and dumping the engine configuration document.

The document is a flat JSON object whose keys mirror ModelConfig field names
exactly, plus an optional "policies" subtree mapping event kinds to
reward/punishment rules. Unknown keys are an error.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Mapping

from taas.model import (
    DEFAULT_POLICIES,
    ConfigError,
    DeltaMode,
    EventKind,
    ModelConfig,
    PolicyRule,
    validate_config,
)

CONFIG_PATH_ENV = "TAAS_CONFIG"


def parse_config_document(
    doc: Mapping[str, Any],
) -> tuple[ModelConfig, dict[EventKind, PolicyRule]]:
    if not isinstance(doc, Mapping):
        raise ConfigError("config document must be a JSON object")
    model_doc = {k: v for k, v in doc.items() if k != "policies"}
    cfg = validate_config(ModelConfig.from_dict(model_doc))
    policies = dict(DEFAULT_POLICIES)
    for kind_token, rule_doc in (doc.get("policies") or {}).items():
        try:
            kind = EventKind.parse(kind_token)
            rule = PolicyRule(
                event_kind=kind,
                delta_mode=DeltaMode(rule_doc["mode"]),
                weight=float(rule_doc["weight"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad policy rule for {kind_token!r}: {exc}") from exc
        policies[kind] = rule
    return cfg, policies


def dump_config_document(
    cfg: ModelConfig, policies: Mapping[EventKind, PolicyRule] | None = None
) -> dict[str, Any]:
    doc: dict[str, Any] = cfg.to_dict()
    if policies is not None:
        doc["policies"] = {
            kind.value: {"mode": rule.delta_mode.value, "weight": rule.weight}
            for kind, rule in sorted(policies.items(), key=lambda kv: kv[0].value)
        }
    return doc


def load_config(path: str | Path) -> tuple[ModelConfig, dict[EventKind, PolicyRule]]:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", code="FILE_NOT_FOUND") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return parse_config_document(doc)


def resolve_config(path: str | None) -> tuple[ModelConfig, dict[EventKind, PolicyRule]]:
    """Load from an explicit path, the TAAS_CONFIG env var, or defaults."""
    if path is None:
        path = os.environ.get(CONFIG_PATH_ENV) or None
    if path is None:
        return ModelConfig(), dict(DEFAULT_POLICIES)
    return load_config(path)
