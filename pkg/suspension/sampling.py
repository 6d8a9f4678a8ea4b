# suspension/sampling.py

import logging
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from construction.schedule import ConstructionSchedule, LevelSet
from correlation.engine import CorrelationEngine, WordOracle
from suspension.poisson import joint_probability
from tools.errors import UnresolvablePosition
from tools.streams import clopper_pearson, make_rng

logger = logging.getLogger(__name__)


class JointCounts(BaseModel):
    """Empirical law of (|x ∩ A|, |x ∩ R^{-m} B|)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    lag: int
    samples: int
    mode: Literal["pieces", "full"]
    counts: Dict[Tuple[int, int], int]
    stage: Optional[int] = None
    # means of the sampled marginals
    mu_a: Optional[Fraction] = None
    mu_b: Optional[Fraction] = None

    def frequency(self, k: int, n: int) -> float:
        return self.counts.get((k, n), 0) / self.samples

    def interval(self, k: int, n: int, confidence: float = 0.99) -> Tuple[float, float]:
        return clopper_pearson(self.counts.get((k, n), 0), self.samples, confidence)

    def marginal_a(self, k: int) -> float:
        return sum(v for (a, _), v in self.counts.items() if a == k) / self.samples


def _tally(x: np.ndarray, y: np.ndarray) -> Dict[Tuple[int, int], int]:
    pairs, freq = np.unique(np.stack([x, y], axis=1), axis=0, return_counts=True)
    return {(int(a), int(b)): int(c) for (a, b), c in zip(pairs, freq)}


def _sample_pieces(rng, c: Fraction, mu_a: Fraction, mu_b: Fraction, samples: int):
    only_a = rng.poisson(float(mu_a - c), size=samples)
    both = rng.poisson(float(c), size=samples)
    only_b = rng.poisson(float(mu_b - c), size=samples)
    return only_a + both, both + only_b


def _sample_full(rng, oracle: WordOracle, m: int, samples: int, truncate: bool = False):
    """
    Poisson process over the stage-J levels of A ∪ R^{-m}B. Every level has
    width w_J, so point locations are uniform level indices.

    With truncate on, the process lives on the stage-J tower alone: A levels
    in the top m carry no R^{-m}B mass and B levels in the bottom m are dropped.
    """
    h = oracle.height
    if m >= h:
        raise UnresolvablePosition(f"lag {m} does not fit inside stage {oracle.J} (height {h})")
    if not truncate:
        if m and oracle.in_a[h - m:].any():
            raise UnresolvablePosition(f"A reaches the top {m} levels of stage {oracle.J}; use a deeper stage")
        if m and oracle.in_b[:m].any():
            raise UnresolvablePosition(f"R^-{m} B leaves the bottom of stage {oracle.J}; use a deeper stage")

    shifted_b = np.zeros(h, dtype=bool)
    shifted_b[: h - m] = oracle.in_b[m:]
    region = oracle.in_a | shifted_b
    in_a = oracle.in_a[region]
    in_b = shifted_b[region]
    levels = int(region.sum())

    mean = float(oracle.w * levels)
    totals = rng.poisson(mean, size=samples)
    owners = np.repeat(np.arange(samples), totals)
    picks = rng.integers(0, levels, size=int(totals.sum())) if levels else np.zeros(0, dtype=np.int64)
    x = np.bincount(owners, weights=in_a[picks].astype(np.float64), minlength=samples).astype(np.int64)
    y = np.bincount(owners, weights=in_b[picks].astype(np.float64), minlength=samples).astype(np.int64)
    mu_b = oracle.w * int(np.count_nonzero(shifted_b))
    return x, y, mu_b


def sample_joint_counts(
    schedule: ConstructionSchedule,
    A: LevelSet,
    B: LevelSet,
    m: int,
    J: int,
    samples: int,
    seed: int,
    mode: str = "pieces",
    stream: int = 0,
    max_len: int = 1_000_000,
    truncate: bool = False,
) -> JointCounts:
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    rng = make_rng(seed, stream, m)
    if mode == "pieces":
        engine = CorrelationEngine(schedule, A, B)
        c = engine.correlate(m).lo
        x, y = _sample_pieces(rng, c, engine.mu_a, engine.mu_b, samples)
        mu_a, mu_b = engine.mu_a, engine.mu_b
    elif mode == "full":
        oracle = WordOracle(schedule, A, B, J, max_len)
        x, y, mu_b = _sample_full(rng, oracle, m, samples, truncate)
        mu_a = oracle.mu_a
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    logger.debug("sampled %d configurations at lag %d (%s)", samples, m, mode)
    return JointCounts(
        lag=m, samples=samples, mode=mode, counts=_tally(x, y),
        stage=J if mode == "full" else None, mu_a=mu_a, mu_b=mu_b,
    )


class AgreementCell(BaseModel):
    k: int
    n: int
    analytic: float
    frequency: float
    ci_lo: float
    ci_hi: float
    inside: bool


def compare_with_analytic(
    counts: JointCounts, c, mu_a, mu_b, k_max: int, confidence: float = 0.99
) -> List[AgreementCell]:
    cells = []
    for k in range(k_max + 1):
        for n in range(k_max + 1):
            analytic = float(joint_probability(c, mu_a, mu_b, k, n))
            lo, hi = counts.interval(k, n, confidence)
            cells.append(
                AgreementCell(
                    k=k, n=n, analytic=analytic, frequency=counts.frequency(k, n),
                    ci_lo=lo, ci_hi=hi, inside=lo <= analytic <= hi,
                )
            )
    return cells
