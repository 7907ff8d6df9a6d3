"""Alertgate: a user-aware alert and notification gateway.

Ingests events from watched systems, turns them into classified alerts,
decides per user whether to issue, suppress, or aggregate each one, and
schedules deliveries around learned availability. Ships with a
deterministic simulation harness and an HTTP API for the web console.
"""

__version__ = "0.1.0"
