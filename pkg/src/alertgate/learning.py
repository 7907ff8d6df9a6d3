"""Feedback-driven policy: reward mapping and a per-user contextual bandit.

One linear value model per action (issue, aggregate, suppress), trained by
SGD on scalar rewards derived from how the user treated each notification.
Exploration is epsilon-greedy with multiplicative decay. All randomness is
counter-based off the state's seed, so replaying the same update sequence
reproduces the same weights and the same exploration choices bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Mapping, Sequence

from .clock import format_ts, parse_ts
from .errors import DimensionMismatch, NonFiniteReward
from .model import ActionKind, SignalKind, TraceEntry
from .rng import prf_choice, prf_float

FEATURE_DIM = 6
DEFAULT_LEARNING_RATE = 0.05
DEFAULT_EPSILON_DECAY = 0.999
DEFAULT_EPSILON_FLOOR = 0.02

ACTION_ORDER = (ActionKind.ISSUE, ActionKind.AGGREGATE, ActionKind.SUPPRESS)
ACTION_INDEX = {a: i for i, a in enumerate(ACTION_ORDER)}


@dataclass(frozen=True)
class RewardTable:
    """Scalar reward for each terminal outcome. Magnitudes are configuration;
    only the sign structure (engagement positive, the rest negative) is
    load-bearing."""

    opened_immediately: float = 1.0
    acted: float = 1.0
    opened_later: float = 0.5
    dismissed: float = -0.25
    ignored: float = -0.5
    deleted_unopened: float = -1.0
    marked_irrelevant: float = -1.0
    suppress_quiet: float = 0.25
    suppress_complaint: float = -1.0

    def to_dict(self) -> dict:
        return {
            "opened_immediately": self.opened_immediately,
            "acted": self.acted,
            "opened_later": self.opened_later,
            "dismissed": self.dismissed,
            "ignored": self.ignored,
            "deleted_unopened": self.deleted_unopened,
            "marked_irrelevant": self.marked_irrelevant,
            "suppress_quiet": self.suppress_quiet,
            "suppress_complaint": self.suppress_complaint,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RewardTable":
        return cls(**{k: float(v) for k, v in doc.items()})


DEFAULT_REWARDS = RewardTable()


def reward_of(signal: SignalKind, table: RewardTable = DEFAULT_REWARDS) -> float:
    """Reward for a notification's terminal signal."""
    return {
        SignalKind.OPENED_IMMEDIATELY: table.opened_immediately,
        SignalKind.ACTED: table.acted,
        SignalKind.OPENED_LATER: table.opened_later,
        SignalKind.DISMISSED: table.dismissed,
        SignalKind.IGNORED: table.ignored,
        SignalKind.DELETED_UNOPENED: table.deleted_unopened,
        SignalKind.MARKED_IRRELEVANT: table.marked_irrelevant,
    }[signal]


def suppress_reward(complained: bool, table: RewardTable = DEFAULT_REWARDS) -> float:
    """Suppressed alerts have no notification to react to; the outcome is
    quiet acceptance after the TTL or an explicit missed-alert complaint."""
    return table.suppress_complaint if complained else table.suppress_quiet


@dataclass(frozen=True)
class PolicyState:
    user_id: str
    weights: tuple[tuple[float, ...], ...] = ((0.0,) * FEATURE_DIM,) * 3
    epsilon: float = 1.0
    epsilon_decay: float = DEFAULT_EPSILON_DECAY
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR
    update_count: int = 0
    learning_rate: float = DEFAULT_LEARNING_RATE
    rng_seed: int = 0
    draw_count: int = 0

    def __post_init__(self) -> None:
        if len(self.weights) != 3 or any(len(w) != FEATURE_DIM for w in self.weights):
            raise ValueError("weights must be 3 vectors of dimension 6")
        for w in self.weights:
            if any(not math.isfinite(v) for v in w):
                raise ValueError("weights must be finite")

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "weights": [list(w) for w in self.weights],
            "epsilon": self.epsilon,
            "epsilon_decay": self.epsilon_decay,
            "epsilon_floor": self.epsilon_floor,
            "update_count": self.update_count,
            "learning_rate": self.learning_rate,
            "rng_seed": self.rng_seed,
            "draw_count": self.draw_count,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PolicyState":
        return cls(
            user_id=doc["user_id"],
            weights=tuple(tuple(float(v) for v in w) for w in doc["weights"]),
            epsilon=float(doc["epsilon"]),
            epsilon_decay=float(doc.get("epsilon_decay", DEFAULT_EPSILON_DECAY)),
            epsilon_floor=float(doc.get("epsilon_floor", DEFAULT_EPSILON_FLOOR)),
            update_count=int(doc["update_count"]),
            learning_rate=float(doc.get("learning_rate", DEFAULT_LEARNING_RATE)),
            rng_seed=int(doc.get("rng_seed", 0)),
            draw_count=int(doc.get("draw_count", 0)),
        )


@dataclass(frozen=True)
class RewardRecord:
    decision_id: str
    action: ActionKind
    features: tuple[float, ...]
    reward: float
    settled_at: datetime

    def to_dict(self) -> dict:
        return {
            "decision_id": self.decision_id,
            "action": self.action.value,
            "features": list(self.features),
            "reward": self.reward,
            "settled_at": format_ts(self.settled_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RewardRecord":
        return cls(
            decision_id=doc["decision_id"],
            action=ActionKind(doc["action"]),
            features=tuple(float(v) for v in doc["features"]),
            reward=float(doc["reward"]),
            settled_at=parse_ts(doc["settled_at"]),
        )


def _dot(w: Sequence[float], x: Sequence[float]) -> float:
    return sum(wi * xi for wi, xi in zip(w, x))


def select_action(
    state: PolicyState, x: Sequence[float]
) -> tuple[ActionKind, tuple[TraceEntry, ...], PolicyState]:
    """Epsilon-greedy choice over the three per-action value estimates.

    Returns the action, a trace naming the Q values and whether exploration
    fired, and the state with its draw counter advanced. Ties in the greedy
    branch break toward issue, then aggregate, then suppress.
    """
    if len(x) != FEATURE_DIM:
        raise DimensionMismatch(f"expected {FEATURE_DIM} features, got {len(x)}")

    q = [_dot(state.weights[i], x) for i in range(3)]
    explore_draw = prf_float(state.rng_seed, "explore", state.draw_count)
    draws_used = 1
    explored = explore_draw < state.epsilon
    if explored:
        idx = prf_choice(3, state.rng_seed, "action", state.draw_count + 1)
        draws_used = 2
    else:
        idx = 0
        for i in range(1, 3):
            if q[i] > q[idx]:
                idx = i

    trace: tuple[TraceEntry, ...] = (
        ("learned.q_issue", q[0]),
        ("learned.q_aggregate", q[1]),
        ("learned.q_suppress", q[2]),
        ("learned.epsilon", state.epsilon),
        ("learned.explored", 1.0 if explored else 0.0),
    )
    advanced = replace(state, draw_count=state.draw_count + draws_used)
    return ACTION_ORDER[idx], trace, advanced


def greedy_action(state: PolicyState, x: Sequence[float]) -> ActionKind:
    """The argmax action with no exploration and no state change."""
    if len(x) != FEATURE_DIM:
        raise DimensionMismatch(f"expected {FEATURE_DIM} features, got {len(x)}")
    q = [_dot(state.weights[i], x) for i in range(3)]
    idx = 0
    for i in range(1, 3):
        if q[i] > q[idx]:
            idx = i
    return ACTION_ORDER[idx]


def update_policy(state: PolicyState, record: RewardRecord) -> PolicyState:
    """SGD step on the taken action's weights only, plus epsilon decay."""
    if len(record.features) != FEATURE_DIM:
        raise DimensionMismatch(
            f"expected {FEATURE_DIM} features, got {len(record.features)}"
        )
    if not math.isfinite(record.reward):
        raise NonFiniteReward(f"reward {record.reward} is not finite")

    idx = ACTION_INDEX[record.action]
    w = state.weights[idx]
    x = record.features
    residual = record.reward - _dot(w, x)
    updated = tuple(wi + state.learning_rate * residual * xi for wi, xi in zip(w, x))
    weights = tuple(updated if i == idx else state.weights[i] for i in range(3))
    epsilon = max(state.epsilon_floor, state.epsilon * state.epsilon_decay)
    return replace(
        state,
        weights=weights,
        epsilon=epsilon,
        update_count=state.update_count + 1,
    )
