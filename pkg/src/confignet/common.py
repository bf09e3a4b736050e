"""Pieces shared by the three incremental builders."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


class ConfigurationFailure(RuntimeError):
    """No candidate node passed the acceptance test.

    ``diagnostics`` carries the best scores seen so the caller can report why.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def draw_candidates(rng, lam, count, d):
    """Draw ``count`` nodes uniformly from [-lam, lam]^(d+1).

    Each candidate consumes d+1 consecutive deviates, weights first then bias,
    so the k-th candidate is the same however the batch is later evaluated.
    """
    A = rng.uniform(-lam, lam, size=(count, d + 1))
    return A[:, :d], A[:, d]


def residual_rmse(E):
    E = np.asarray(E)
    if E.size == 0:
        return 0.0
    return float(np.sqrt(np.sum(E * E) / E.size))


def pick_best(total, ok):
    """Index of the largest ``total`` among ``ok`` entries; lowest index wins ties."""
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return None
    return int(idx[np.argmax(total[idx])])


@dataclass
class TrialReport:
    algorithm: str
    seed: int
    nodes_used: int = 0
    residual_history: list = field(default_factory=list)
    initial_rmse: float = 0.0
    train_rmse: float = 0.0
    test_rmse: float | None = None
    train_accuracy: float | None = None
    test_accuracy: float | None = None
    wall_time_seconds: float = 0.0
    escalation_events: int = 0
    flags: list = field(default_factory=list)
    accepted_lambda: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def failed(self):
        return any(f.startswith("configuration_failure") for f in self.flags)

    def to_dict(self, timing=False):
        doc = asdict(self)
        if not timing:
            doc.pop("wall_time_seconds")
        return doc
