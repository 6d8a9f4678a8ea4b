# suspension/poisson.py

import logging
from fractions import Fraction
from math import factorial
from typing import List, Literal, Optional, Sequence

import mpmath
from pydantic import BaseModel, ConfigDict, Field

from construction.schedule import ConstructionSchedule, LevelSet, common_stage
from correlation.engine import CorrelationEngine
from tools.errors import EngineInconsistency, OverlappingRegions

logger = logging.getLogger(__name__)

mpmath.mp.dps = 30


class PoissonProb(BaseModel):
    """coef * e^exponent, both exact rationals."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coef: Fraction
    exponent: Fraction

    def __mul__(self, other: "PoissonProb") -> "PoissonProb":
        return PoissonProb(coef=self.coef * other.coef, exponent=self.exponent + other.exponent)

    def to_mpf(self):
        exponent = mpmath.mpf(self.exponent.numerator) / self.exponent.denominator
        return mpmath.mpf(self.coef.numerator) / self.coef.denominator * mpmath.exp(exponent)

    def __float__(self) -> float:
        return float(self.to_mpf())

    def format(self) -> str:
        return f"({self.coef}) * exp({self.exponent})"


def poisson_term(mu: Fraction, k: int) -> PoissonProb:
    """P(Pois(mu) = k) = mu^k / k! e^{-mu}."""
    mu = Fraction(mu)
    return PoissonProb(coef=mu ** k / factorial(k), exponent=-mu)


class ConfigurationEvent(BaseModel):
    """C_{A,k}: exactly k configuration points in region A."""

    model_config = ConfigDict(frozen=True)

    region: LevelSet
    k: int = Field(ge=0)


def poisson_event_prob(schedule: ConstructionSchedule, events: Sequence[ConfigurationEvent]) -> PoissonProb:
    regions = common_stage(schedule, *(e.region for e in events))
    for i in range(len(regions)):
        if regions[i].is_empty():
            raise ValueError("configuration events need regions of positive measure")
        for other in regions[i + 1:]:
            if not regions[i].is_disjoint(other):
                raise OverlappingRegions("configuration event regions must be pairwise disjoint")
    result = PoissonProb(coef=Fraction(1), exponent=Fraction(0))
    for event, region in zip(events, regions):
        result = result * poisson_term(region.measure(schedule), event.k)
    return result


def joint_probability(c, mu_a, mu_b, k: int, n: int) -> PoissonProb:
    """
    P(|x ∩ A| = k, |x ∩ R^{-m} B| = n) when μ(A ∩ R^{-m} B) = c. The three
    pieces A∖R^{-m}B, A∩R^{-m}B, R^{-m}B∖A carry independent Poisson counts.
    """
    c, mu_a, mu_b = Fraction(c), Fraction(mu_a), Fraction(mu_b)
    if c < 0 or c > min(mu_a, mu_b):
        raise EngineInconsistency(f"overlap {c} outside [0, min({mu_a}, {mu_b})]")
    coef = Fraction(0)
    for t in range(min(k, n) + 1):
        coef += (
            c ** t / factorial(t)
            * (mu_a - c) ** (k - t) / factorial(k - t)
            * (mu_b - c) ** (n - t) / factorial(n - t)
        )
    return PoissonProb(coef=coef, exponent=-(mu_a + mu_b - c))


def joint_shifted_event_prob(
    schedule: ConstructionSchedule,
    A: LevelSet,
    k: int,
    B: LevelSet,
    n: int,
    m: int,
    engine: Optional[CorrelationEngine] = None,
) -> PoissonProb:
    engine = engine or CorrelationEngine(schedule, A, B)
    c = engine.correlate(m).lo
    return joint_probability(c, engine.mu_a, engine.mu_b, k, n)


def normalization_mass(c, mu_a, mu_b, k_max: int) -> float:
    """Σ_{k, n <= k_max} of the joint law; tends to 1 as k_max grows."""
    total = mpmath.mpf(0)
    for k in range(k_max + 1):
        for n in range(k_max + 1):
            total += joint_probability(c, mu_a, mu_b, k, n).to_mpf()
    return float(total)


# ----------------------------------------------------------------------
# INHERITANCE
# ----------------------------------------------------------------------


class InheritanceRow(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    sequence: Literal["rigidity", "mixing"]
    lag: int
    overlap: Fraction
    joint: PoissonProb
    target: PoissonProb
    difference: float
    bound: Optional[float] = None
    status: Literal["pass", "fail", "inconclusive"]


class InheritanceReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: int
    rows: List[InheritanceRow]
    note: str = (
        "cylinder events only; the Gaussian automorphism with the same correlation "
        "sequence is not constructed"
    )

    @property
    def verdict(self) -> str:
        statuses = [r.status for r in self.rows]
        if "fail" in statuses:
            return "FAIL"
        return "INCONCLUSIVE" if "inconclusive" in statuses else "PASS"


def suspension_inheritance_report(
    schedule: ConstructionSchedule,
    A: LevelSet,
    k: int,
    rigidity_lags: Sequence[int],
    mixing_lags: Sequence[int],
    B: Optional[LevelSet] = None,
    n: Optional[int] = None,
) -> InheritanceReport:
    """
    Along rigidity lags the joint probability of C_{A,k} and its shift must sit
    within μ(A Δ R^{-h}A) of μ*(C_{A,k}). Along mixing lags with zero overlap it
    must equal μ*(C_{A,k}) μ*(C_{B,n}) exactly.
    """
    B = A if B is None else B
    n = k if n is None else n
    self_engine = CorrelationEngine(schedule, A, A)
    cross_engine = CorrelationEngine(schedule, A, B)
    mu_a = self_engine.mu_a
    target_a = poisson_term(mu_a, k)

    rows = []
    for h in rigidity_lags:
        c = self_engine.correlate(h).lo
        joint = joint_probability(c, mu_a, mu_a, k, k)
        diff = abs(float(joint.to_mpf() - target_a.to_mpf()))
        bound = float(2 * (mu_a - c))
        rows.append(
            InheritanceRow(
                sequence="rigidity", lag=h, overlap=c, joint=joint, target=target_a,
                difference=diff, bound=bound, status="pass" if diff <= bound + 1e-15 else "fail",
            )
        )

    product = poisson_term(cross_engine.mu_a, k) * poisson_term(cross_engine.mu_b, n)
    for m in mixing_lags:
        result = cross_engine.correlate(m)
        joint = joint_probability(result.lo, cross_engine.mu_a, cross_engine.mu_b, k, n)
        diff = abs(float(joint.to_mpf() - product.to_mpf()))
        if result.lo == 0:
            status = "pass" if joint == product else "fail"
        else:
            status = "inconclusive"
        rows.append(
            InheritanceRow(
                sequence="mixing", lag=m, overlap=result.lo, joint=joint, target=product,
                difference=diff, status=status,
            )
        )
    return InheritanceReport(k=k, rows=rows)
