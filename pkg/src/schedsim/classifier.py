"""Online naive Bayes over discretized feature vectors.

Binary classes ("good" / "bad") with Laplace-smoothed incremental counts.
Scores are kept in log domain: the unsmoothed per-class product of up to
ten conditionals can underflow a float well before the counts get large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError

GOOD = "good"
BAD = "bad"
LABELS = (GOOD, BAD)

# exp() overflows around 709; beyond this gap the posterior saturates anyway.
_MAX_LOG_GAP = 700.0


@dataclass(frozen=True)
class Posterior:
    """Normalized two-class posterior plus the raw log scores."""

    p_good: float
    log_score_good: float
    log_score_bad: float

    @property
    def p_bad(self) -> float:
        return 1.0 - self.p_good


class NaiveBayesClassifier:
    """Incremental counts realizing P(class) and P(feature level | class)."""

    def __init__(self, n_features: int = 8, levels: int = 10, alpha: float = 1.0):
        if n_features < 1:
            raise ConfigError(f"n_features must be >= 1, got {n_features}")
        if levels < 2:
            raise ConfigError(f"levels must be >= 2, got {levels}")
        if alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {alpha}")
        self.n_features = n_features
        self.levels = levels
        self.alpha = float(alpha)
        self.class_counts: dict[str, int] = {GOOD: 0, BAD: 0}
        self.cond_counts: dict[str, list[list[int]]] = {
            label: [[0] * levels for _ in range(n_features)] for label in LABELS
        }

    @property
    def total_observations(self) -> int:
        return self.class_counts[GOOD] + self.class_counts[BAD]

    def _check_features(self, features: Sequence[int]) -> None:
        if len(features) != self.n_features:
            raise ValueError(
                f"feature vector has length {len(features)}, classifier expects {self.n_features}"
            )
        for j, level in enumerate(features):
            if not 1 <= level <= self.levels:
                raise ValueError(f"feature {j}: level {level} outside [1, {self.levels}]")

    def observe(self, features: Sequence[int], label: str) -> None:
        """Record one labeled vector, updating class and conditional counts."""
        if label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {label!r}")
        self._check_features(features)
        self.class_counts[label] += 1
        table = self.cond_counts[label]
        for j, level in enumerate(features):
            table[j][level - 1] += 1

    def _log_score(self, features: Sequence[int], label: str) -> float:
        a = self.alpha
        class_count = self.class_counts[label]
        score = math.log((class_count + a) / (self.total_observations + 2.0 * a))
        log_denom = math.log(class_count + self.levels * a)
        table = self.cond_counts[label]
        for j, level in enumerate(features):
            score += math.log(table[j][level - 1] + a) - log_denom
        return score

    def posterior(self, features: Sequence[int]) -> Posterior:
        """Smoothed posterior P(good | features), normalized across both classes."""
        self._check_features(features)
        log_good = self._log_score(features, GOOD)
        log_bad = self._log_score(features, BAD)
        gap = log_bad - log_good
        if gap >= _MAX_LOG_GAP:
            p_good = 0.0
        elif gap <= -_MAX_LOG_GAP:
            p_good = 1.0
        else:
            p_good = 1.0 / (1.0 + math.exp(gap))
        return Posterior(p_good, log_good, log_bad)

    def classify(self, features: Sequence[int]) -> str:
        """Return "good" iff p_good >= 0.5; the tie goes to "good"."""
        return GOOD if self.posterior(features).p_good >= 0.5 else BAD

    def counts_snapshot(self) -> dict:
        """JSON-serializable copy of the count tables for run reports."""
        return {
            "n_features": self.n_features,
            "levels": self.levels,
            "alpha": self.alpha,
            "class_counts": dict(self.class_counts),
            "cond_counts": {label: [list(row) for row in self.cond_counts[label]] for label in LABELS},
        }

    def check_marginals(self) -> None:
        """Assert that conditional counts sum back to the class counts."""
        for label in LABELS:
            for j, row in enumerate(self.cond_counts[label]):
                if sum(row) != self.class_counts[label]:
                    raise AssertionError(
                        f"marginal mismatch: class {label}, feature {j}: "
                        f"{sum(row)} != {self.class_counts[label]}"
                    )
