# correlation/montecarlo.py

import logging
from fractions import Fraction

from construction.schedule import ConstructionSchedule, LevelSet, common_stage
from construction.words import SPACER, level_label
from correlation.engine import CorrelationResult
from tools.streams import clopper_pearson, make_rng, uniform_positions

logger = logging.getLogger(__name__)


def _labelled_in(schedule, J, position, n, levels: LevelSet) -> bool:
    label = level_label(schedule, J, position, n)
    return label != SPACER and levels.contains(label)


def correlation_montecarlo(
    schedule: ConstructionSchedule,
    A: LevelSet,
    B: LevelSet,
    m: int,
    J: int,
    samples: int,
    seed: int,
    confidence: float = 0.99,
    stream: int = 0,
) -> CorrelationResult:
    """
    Estimate the windowed count w_J #{i < h_J - m : label(i) in A, label(i+m) in B}
    from uniform positions of the stage-J tower. The interval is Clopper-Pearson
    on the hit fraction, scaled by μ(X_J).
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    if m < 0:
        raise ValueError(f"lag must be nonnegative, got {m}")
    A, B = common_stage(schedule, A, B)
    n = A.stage
    h = schedule.height(J)

    rng = make_rng(seed, stream, m)
    hits = 0
    for i in uniform_positions(rng, h, samples):
        if i + m >= h:
            continue
        if _labelled_in(schedule, J, i, n, A) and _labelled_in(schedule, J, i + m, n, B):
            hits += 1

    mu_j = float(schedule.stage_measure(J))
    p_lo, p_hi = clopper_pearson(hits, samples, confidence)
    cap = float(min(A.measure(schedule), B.measure(schedule)))
    estimate = mu_j * hits / samples
    lo = min(mu_j * p_lo, cap)
    hi = max(min(mu_j * p_hi, cap), lo)
    logger.debug("mc lag=%d stage=%d hits=%d/%d", m, J, hits, samples)
    return CorrelationResult(m=m, lo=lo, hi=hi, stage=J, method="monte-carlo", estimate=estimate)


def covers(result: CorrelationResult, exact) -> bool:
    value = float(exact) if isinstance(exact, Fraction) else exact
    return result.lo <= value <= result.hi
