"""Gateway configuration: one dataclass of documented defaults, loadable from
a YAML file with ALERTGATE_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .learning import RewardTable


@dataclass(frozen=True)
class GatewayConfig:
    # triage
    digest_window_hours: float = 4.0
    dedup_window_minutes: float = 30.0
    urgency_issue_threshold: float = 0.8

    # user model
    availability_threshold: float = 0.6
    max_defer_hours: float = 24.0

    # notifier
    ack_timeout_minutes: float = 15.0
    max_attempts: int = 3

    # learning
    learning_rate: float = 0.05
    epsilon_start: float = 1.0
    epsilon_decay: float = 0.999
    epsilon_floor: float = 0.02
    ignored_ttl_hours: float = 24.0
    suppress_ttl_hours: float = 24.0
    rewards: RewardTable = field(default_factory=RewardTable)

    # ingestion
    ewma_beta: float = 0.2
    poll_target_events: float = 1.0
    poll_rate_floor: float = 1e-6
    poll_min_seconds: float = 1.0
    poll_max_seconds: float = 3600.0

    # alert engine
    cluster_threshold: float = 0.5
    recommendation_min_support: int = 5
    pending_history_days: int = 14
    unmatched_pool_size: int = 500

    # service
    snapshot_every_records: int = 2000
    api_token: str | None = None

    def to_dict(self) -> dict:
        doc: dict = {}
        for f in fields(self):
            value = getattr(self, f.name)
            doc[f.name] = value.to_dict() if isinstance(value, RewardTable) else value
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "GatewayConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs: dict[str, Any] = {}
        for key, value in doc.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            if key == "rewards":
                value = RewardTable.from_dict(value)
            kwargs[key] = value
        return cls(**kwargs)


def load_config(path: str | Path | None = None, env: Mapping[str, str] | None = None) -> GatewayConfig:
    """File first, then environment. ALERTGATE_<UPPER_KEY> overrides any
    scalar field; reward overrides are not exposed via environment."""
    doc: dict = {}
    if path is not None:
        loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ValueError("config file must hold a mapping")
            doc.update(loaded)
    config = GatewayConfig.from_dict(doc)

    env = os.environ if env is None else env
    overrides: dict[str, Any] = {}
    for f in fields(GatewayConfig):
        if f.name == "rewards":
            continue
        raw = env.get(f"ALERTGATE_{f.name.upper()}")
        if raw is None:
            continue
        current = getattr(config, f.name)
        if f.name == "api_token":
            overrides[f.name] = raw or None
        elif isinstance(current, bool):
            overrides[f.name] = raw.lower() in ("1", "true", "yes")
        elif isinstance(current, int) and not isinstance(current, bool):
            overrides[f.name] = int(raw)
        else:
            overrides[f.name] = float(raw)
    if overrides:
        config = replace(config, **overrides)
    return config
