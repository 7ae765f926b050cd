"""Shared resource limits for the search-based operations.

Searches are exact only when they exhaust a reachable component, so
every high-level answer is three-valued and carries the budget it ran
under. HOMOTOPY_FORGE_THREADS caps how many worker threads the batch
certifiers may use (default 1: fully sequential, always deterministic).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

DEFAULT_STATE_BUDGET = 5_000_000
DEFAULT_PATCH_NODES = 200_000


@dataclass(frozen=True)
class Budgets:
    states: int = DEFAULT_STATE_BUDGET  # visited maps per homotopy search
    m_max: int | None = None  # planner length horizon; None = 2 * |X|
    padding_max: int = 4  # stationary padding tried in loop searches
    exact_threshold: int = 10  # |X| up to which covers are made exact
    patch_nodes: int = DEFAULT_PATCH_NODES  # nodes per patch-planner search

    def with_states(self, states: int) -> "Budgets":
        return replace(self, states=states)

    def planner_horizon(self, n_points: int) -> int:
        return self.m_max if self.m_max is not None else 2 * n_points


def worker_count(task_count: int) -> int:
    """Thread cap from HOMOTOPY_FORGE_THREADS, clamped to the task count."""
    raw = os.environ.get("HOMOTOPY_FORGE_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        k = 1
    return max(1, min(k, task_count))
