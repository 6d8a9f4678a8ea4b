# spectral/coefficients.py

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import trapezoid

from construction.schedule import ConstructionSchedule, LevelSet
from correlation.engine import CorrelationEngine
from tools.errors import ToleranceUnreachable

logger = logging.getLogger(__name__)


class Coefficient(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: int
    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        return self.lo if self.exact else (self.lo + self.hi) / 2


class SpectralSequence(BaseModel):
    """
    σ̂(m) = <U^m f, f> for f the normalized indicator of `levels`,
    i.e. μ(R^m A ∩ A) / μ(A). Stored for m >= 0; σ̂(-m) = σ̂(m).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    levels: LevelSet
    coefficients: List[Coefficient]

    def table(self) -> Dict[int, Coefficient]:
        return {c.m: c for c in self.coefficients}

    def value(self, m: int) -> Fraction:
        return self.table()[abs(m)].value

    def symmetric(self) -> List[Tuple[int, Coefficient]]:
        rows = [(-c.m, c) for c in reversed(self.coefficients) if c.m > 0]
        return rows + [(c.m, c) for c in self.coefficients]


def spectral_coefficients(
    schedule: ConstructionSchedule,
    A: LevelSet,
    lags: Sequence[int],
    tolerance: Fraction = Fraction(0),
    engine: Optional[CorrelationEngine] = None,
) -> SpectralSequence:
    if any(m < 0 for m in lags):
        raise ValueError("spectral lags must be nonnegative")
    engine = engine or CorrelationEngine(schedule, A, A)
    if engine.mu_a <= 0:
        raise ValueError("the spectral vector needs μ(A) > 0")

    coefficients = []
    for m in sorted(set(lags)):
        try:
            result = engine.correlate(m, tolerance)
        except ToleranceUnreachable as e:
            result = e.result
        c = Coefficient(m=m, lo=result.lo / engine.mu_a, hi=result.hi / engine.mu_a)
        if not (0 <= c.lo <= c.hi <= 1):
            raise AssertionError(f"coefficient at lag {m} leaves [0, 1]")
        if m == 0 and c.lo != 1:
            raise AssertionError("σ̂(0) must be 1")
        coefficients.append(c)
    return SpectralSequence(levels=engine.A, coefficients=coefficients)


class FejerDensity(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    order: int
    theta: np.ndarray
    density: np.ndarray
    raw_minimum: float
    integral: float


def fejer_density(seq: SpectralSequence, order: int, grid_points: int = 512) -> FejerDensity:
    """
    Cesàro mean (1/2π)[1 + 2 Σ_{m=1}^{N} (1 - m/(N+1)) σ̂(m) cos mθ] on a
    uniform grid of [0, 2π). Rounding below zero is clipped; the raw minimum
    is kept for the report.
    """
    table = seq.table()
    missing = [m for m in range(order + 1) if m not in table]
    if missing:
        raise ValueError(f"coefficients missing for lags {missing[:5]}")
    theta = np.linspace(0.0, 2 * np.pi, grid_points, endpoint=False)
    m = np.arange(1, order + 1)
    weights = (1 - m / (order + 1)) * np.array([float(table[k].value) for k in m])
    raw = (1 + 2 * np.cos(np.outer(theta, m)) @ weights) / (2 * np.pi)
    density = np.clip(raw, 0.0, None)

    closed_theta = np.append(theta, 2 * np.pi)
    closed = np.append(density, density[0])
    integral = float(trapezoid(closed, closed_theta))
    return FejerDensity(
        order=order, theta=theta, density=density, raw_minimum=float(raw.min()), integral=integral
    )


def toeplitz_psd_check(seq: SpectralSequence, lags: Sequence[int], tolerance: float = 1e-9) -> Tuple[float, bool]:
    """Smallest eigenvalue of [σ̂(m_a - m_b)] and whether it clears -tolerance."""
    lags = list(lags)
    matrix = np.array([[float(seq.value(a - b)) for b in lags] for a in lags])
    smallest = float(np.linalg.eigvalsh(matrix).min())
    return smallest, smallest >= -tolerance
