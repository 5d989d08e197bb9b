"""Centroid-distance test between a test opening and its baseline.

The observed ``(white wins, black wins)`` points of two matches are
compared.  Their Euclidean distance is scaled by the spread of simulated
repetitions of both matches, and the ratio is referred to Student's t with
``2 * repetitions - 2`` degrees of freedom.  Rejected comparisons are then
graded by direction: an innovation that moved the outcome vector against
the innovating side fails (F), one that helped succeeds (A), anything else
is benign (C).
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .model import DomainError, OutcomeCounts, estimate_vector
from .montecarlo import (
    SimulatedCluster,
    centroid,
    derive_seed,
    euclidean_distance,
    pooled_radial_stdev,
    simulate_experiment,
)
from .rules import Color

log = logging.getLogger(__name__)

COMPARISON_BUDGET = 5
EPSILON_STANDARD_ERRORS = 2.0

_BASELINE_ROLE = 0
_TEST_ROLE = 1


class Decision(enum.Enum):
    REJECT = "Reject"
    FAIL_TO_REJECT = "FailToReject"

    @property
    def label(self) -> str:
        return "Reject H0" if self is Decision.REJECT else "Fail to reject"


class Category(enum.Enum):
    A = "A"  # innovation succeeded
    C = "C"  # benign
    F = "F"  # innovation failed


class DegenerateDispersionError(DomainError):
    """Both clusters collapsed to single points although the counts differ.

    ``result`` carries the certain rejection (``p = 0``) flagged degenerate.
    """

    def __init__(self, message: str, result: ComparisonResult):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class ComparisonResult:
    distance: float
    pooled_stdev: float
    t_value: float
    p_value: float
    alpha: float
    decision: Decision
    delta_pw: float
    delta_pb: float
    innovator: Optional[Color]
    category: Optional[Category]
    epsilon: float = 0.0
    simulated_distance: float = 0.0
    degenerate: bool = False
    test_cluster: Optional[SimulatedCluster] = field(default=None, repr=False, compare=False)
    base_cluster: Optional[SimulatedCluster] = field(default=None, repr=False, compare=False)

    @property
    def rejected(self) -> bool:
        return self.decision is Decision.REJECT


def bonferroni_alpha(family_alpha: float, comparisons: int) -> float:
    if comparisons < 1:
        raise ValueError(f"need at least one comparison, got {comparisons}")
    return family_alpha / comparisons


def simulate_counts(
    counts: OutcomeCounts, repetitions: int, seed: int, role: int
) -> SimulatedCluster:
    """Simulated repetitions of an observed match, on the stream for ``role``."""
    return simulate_experiment(
        estimate_vector(counts), counts.total, repetitions, derive_seed(seed, role)
    )


def _decisive_margin_se(a: SimulatedCluster, b: SimulatedCluster) -> float:
    """Standard error of the change in ``p_w - p_b`` between two clusters."""
    var = 0.0
    for cluster in (a, b):
        margin = (cluster.points[:, 0] - cluster.points[:, 1]).astype(float)
        if len(margin) > 1:
            var += float(np.var(margin, ddof=1)) / cluster.games_per_match**2
    return math.sqrt(var)


def classify(result: ComparisonResult, innovator: Color) -> Category:
    """Grade an innovation A (succeeded), C (benign) or F (failed)."""
    if result.decision is Decision.FAIL_TO_REJECT:
        return Category.C
    if innovator is Color.WHITE:
        advantage = result.delta_pw - result.delta_pb
    else:
        advantage = result.delta_pb - result.delta_pw
    if advantage > result.epsilon:
        return Category.A
    if advantage < -result.epsilon:
        return Category.F
    # decisive rates moved but neither side gained
    return Category.C


def compare_clusters(
    test_counts: OutcomeCounts,
    base_counts: OutcomeCounts,
    test_cluster: SimulatedCluster,
    base_cluster: SimulatedCluster,
    alpha: float,
    innovator: Optional[Color] = None,
) -> ComparisonResult:
    """Test statistics for two observed matches given their simulated clusters."""
    distance = math.hypot(
        test_counts.white - base_counts.white, test_counts.black - base_counts.black
    )
    stdev = pooled_radial_stdev(test_cluster, base_cluster)
    n = test_counts.total
    delta_pw = (test_counts.white - base_counts.white) / n
    delta_pb = (test_counts.black - base_counts.black) / n
    sim_distance = euclidean_distance(centroid(test_cluster), centroid(base_cluster))
    common = dict(
        pooled_stdev=stdev,
        alpha=alpha,
        delta_pw=delta_pw,
        delta_pb=delta_pb,
        innovator=innovator,
        category=None,
        epsilon=EPSILON_STANDARD_ERRORS * _decisive_margin_se(test_cluster, base_cluster),
        simulated_distance=sim_distance,
        test_cluster=test_cluster,
        base_cluster=base_cluster,
    )
    if stdev == 0.0:
        if distance == 0.0:
            result = ComparisonResult(
                distance=0.0, t_value=0.0, p_value=1.0, decision=Decision.FAIL_TO_REJECT, **common
            )
        else:
            result = ComparisonResult(
                distance=distance,
                t_value=math.inf,
                p_value=0.0,
                decision=Decision.REJECT,
                degenerate=True,
                **common,
            )
            if innovator is not None:
                result = replace(result, category=classify(result, innovator))
            raise DegenerateDispersionError(
                f"zero simulated dispersion but the observed points are {distance:.3f} apart",
                result,
            )
    else:
        t_value = distance / stdev
        df = len(test_cluster) + len(base_cluster) - 2
        p_value = float(min(1.0, 2.0 * stats.t.sf(t_value, df)))
        decision = Decision.REJECT if p_value < alpha else Decision.FAIL_TO_REJECT
        result = ComparisonResult(
            distance=distance, t_value=t_value, p_value=p_value, decision=decision, **common
        )
    if innovator is not None:
        result = replace(result, category=classify(result, innovator))
    return result


def _check_inputs(test_counts: OutcomeCounts, base_counts: OutcomeCounts, repetitions: int, alpha: float):
    if test_counts.total != base_counts.total:
        raise DomainError(
            f"matches differ in size ({test_counts.total} vs {base_counts.total} games)"
        )
    if test_counts.total <= 0:
        raise DomainError("matches must contain at least one game")
    if repetitions < 2:
        raise ValueError(f"repetitions must be at least 2, got {repetitions}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def compare(
    test_counts: OutcomeCounts,
    base_counts: OutcomeCounts,
    repetitions: int = 1000,
    seed: int = 0,
    alpha: float = 0.001,
    innovator: Optional[Color] = None,
) -> ComparisonResult:
    """Test H0: both matches were generated by the same outcome vector.

    The headline distance is between the observed count points; the
    simulated clusters supply the dispersion.  When ``innovator`` is given
    the result is also classified.
    """
    _check_inputs(test_counts, base_counts, repetitions, alpha)
    base_cluster = simulate_counts(base_counts, repetitions, seed, _BASELINE_ROLE)
    test_cluster = simulate_counts(test_counts, repetitions, seed, _TEST_ROLE)
    return compare_clusters(test_counts, base_counts, test_cluster, base_cluster, alpha, innovator)


@dataclass(frozen=True)
class LabeledCounts:
    label: str
    counts: OutcomeCounts
    innovator: Optional[Color] = None
    name: str = ""


@dataclass(frozen=True)
class ComparisonRow:
    test: LabeledCounts
    baseline: LabeledCounts
    result: Optional[ComparisonResult]
    error: Optional[str] = None


def run_comparison_table(
    baseline: LabeledCounts,
    tests: Sequence[LabeledCounts],
    family_alpha: float = 0.005,
    repetitions: int = 1000,
    seed: int = 0,
) -> list[ComparisonRow]:
    """Compare every test opening against one baseline, in input order.

    The per-comparison level is ``family_alpha / len(tests)``.  All rows share
    one simulated baseline cluster, so each row equals :func:`compare` run
    with the same seed and level.  A failing row records its error and the
    remaining rows still run.
    """
    if not tests:
        raise ValueError("no test openings to compare")
    if len(tests) > COMPARISON_BUDGET:
        warnings.warn(
            f"{len(tests)} comparisons against {baseline.label} exceed the budget of"
            f" {COMPARISON_BUDGET}; the per-comparison level shrinks accordingly",
            stacklevel=2,
        )
    alpha = bonferroni_alpha(family_alpha, len(tests))
    base_cluster: Optional[SimulatedCluster] = None
    rows = []
    for test in tests:
        try:
            _check_inputs(test.counts, baseline.counts, repetitions, alpha)
            if base_cluster is None:
                base_cluster = simulate_counts(baseline.counts, repetitions, seed, _BASELINE_ROLE)
            test_cluster = simulate_counts(test.counts, repetitions, seed, _TEST_ROLE)
            result = compare_clusters(
                test.counts, baseline.counts, test_cluster, base_cluster, alpha, test.innovator
            )
            rows.append(ComparisonRow(test, baseline, result))
        except DegenerateDispersionError as exc:
            log.warning("%s vs %s: %s", test.label, baseline.label, exc)
            rows.append(ComparisonRow(test, baseline, exc.result, str(exc)))
        except (DomainError, ValueError) as exc:
            log.warning("%s vs %s failed: %s", test.label, baseline.label, exc)
            rows.append(ComparisonRow(test, baseline, None, str(exc)))
    return rows
