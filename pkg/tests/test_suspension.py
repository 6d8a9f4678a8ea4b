# tests/test_suspension.py

import math
import os
import sys
from fractions import Fraction

import pytest

# Ensure project root is on sys.path
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(ROOT_DIR)

from construction.schedule import ConstructionSchedule, ExplicitSpacers, LevelSet  # noqa: E402
from correlation.engine import CorrelationEngine  # noqa: E402
from suspension.poisson import (  # noqa: E402
    ConfigurationEvent,
    PoissonProb,
    joint_probability,
    joint_shifted_event_prob,
    normalization_mass,
    poisson_event_prob,
    poisson_term,
    suspension_inheritance_report,
)
from suspension.sampling import compare_with_analytic, sample_joint_counts  # noqa: E402
from synthesis.mixing_set import FamilyEntry, MixingSetSpec  # noqa: E402
from synthesis.theorems import synthesize_theorem1  # noqa: E402
from tools.errors import EngineInconsistency, OverlappingRegions, UnresolvablePosition  # noqa: E402


def small_schedule():
    # W3 = 0 0 s 0 0 s 0 0 s s s
    schedule = ConstructionSchedule(h1=1)
    schedule.advance_stage(2, ExplicitSpacers(values=(0, 1)))
    schedule.advance_stage(3, ExplicitSpacers(values=(0, 0, 2)))
    return schedule


def padded_schedule():
    # W2 = 0 1 2 s 0 1 2 s s, W3 = W2 W2 s s W2 s
    schedule = ConstructionSchedule(h1=3)
    schedule.advance_stage(2, ExplicitSpacers(values=(1, 2)))
    schedule.advance_stage(3, ExplicitSpacers(values=(0, 2, 1)))
    return schedule


def test_poisson_term_is_exact():
    term = poisson_term(Fraction(2), 3)
    assert term == PoissonProb(coef=Fraction(4, 3), exponent=Fraction(-2))
    assert float(term) == pytest.approx(4 / 3 * math.exp(-2), rel=1e-12)
    assert term.format() == "(4/3) * exp(-2)"


def test_event_probability_over_disjoint_regions():
    schedule = small_schedule()
    events = [
        ConfigurationEvent(region=LevelSet.parse("2:0"), k=1),
        ConfigurationEvent(region=LevelSet.parse("2:1"), k=2),
    ]
    prob = poisson_event_prob(schedule, events)
    assert prob == PoissonProb(coef=Fraction(1, 16), exponent=Fraction(-1))

    overlapping = [
        ConfigurationEvent(region=LevelSet.parse("2:0-1"), k=1),
        ConfigurationEvent(region=LevelSet.parse("2:1"), k=1),
    ]
    with pytest.raises(OverlappingRegions):
        poisson_event_prob(schedule, overlapping)


def test_joint_probability_limits():
    mu = Fraction(1, 2)
    independent = joint_probability(0, mu, mu, 2, 1)
    assert independent == poisson_term(mu, 2) * poisson_term(mu, 1)

    same = joint_probability(mu, mu, mu, 2, 2)
    assert same == poisson_term(mu, 2)
    assert joint_probability(mu, mu, mu, 2, 1).coef == 0

    with pytest.raises(EngineInconsistency):
        joint_probability(Fraction(3, 4), mu, mu, 1, 1)


def test_normalization_mass_tends_to_one():
    mass = normalization_mass(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), k_max=20)
    assert mass == pytest.approx(1.0, abs=1e-12)


def test_joint_shifted_event_uses_exact_overlap():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    prob = joint_shifted_event_prob(schedule, A, 1, A, 1, 1)
    assert prob == joint_probability(Fraction(1, 2), 1, 1, 1, 1)


def test_inheritance_along_theorem1_sequences():
    spec = MixingSetSpec(
        kind="interval-family",
        entries=[FamilyEntry(a=100 ** i, L=(i + 2) * 100 ** i, multiplicity=i + 1) for i in range(1, 6)],
    )
    schedule, _ = synthesize_theorem1(spec, stages=6)
    A = LevelSet.parse("1:0")
    rigidity = [schedule.height(j) for j in range(2, 5)]
    mixing = spec.sample_lags(10, 70001, 999999, seed=4)
    report = suspension_inheritance_report(schedule, A, 1, rigidity, mixing)
    assert report.verdict == "PASS"
    rigid_rows = [r for r in report.rows if r.sequence == "rigidity"]
    assert [r.difference <= r.bound for r in rigid_rows] == [True] * 3
    assert all(r.joint == r.target for r in report.rows if r.sequence == "mixing")
    assert "cylinder" in report.note


def test_sampled_pieces_agree_with_analytic_law():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    counts = sample_joint_counts(schedule, A, A, 1, 3, samples=20000, seed=12)
    cells = compare_with_analytic(counts, Fraction(1, 2), 1, 1, k_max=4)
    assert sum(c.inside for c in cells) >= len(cells) - 3
    assert counts.marginal_a(0) == pytest.approx(math.exp(-1), abs=0.02)


def test_sampled_full_process_agrees_with_analytic_law():
    schedule = padded_schedule()
    A = LevelSet.parse("1:0")
    B = LevelSet.parse("1:2")
    counts = sample_joint_counts(schedule, A, B, 1, 3, samples=20000, seed=5, mode="full")
    assert counts.mode == "full"
    cells = compare_with_analytic(counts, 0, 1, 1, k_max=4)
    assert sum(c.inside for c in cells) >= len(cells) - 3


def test_sampling_is_reproducible():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    first = sample_joint_counts(schedule, A, A, 1, 3, samples=500, seed=8)
    second = sample_joint_counts(schedule, A, A, 1, 3, samples=500, seed=8)
    assert first.counts == second.counts


def test_full_mode_refuses_unresolvable_shift():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    with pytest.raises(UnresolvablePosition):
        sample_joint_counts(schedule, A, A, 3, 3, samples=10, seed=1, mode="full")


def test_truncated_full_mode_samples_the_stage_tower():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    with pytest.raises(UnresolvablePosition):
        sample_joint_counts(schedule, A, A, 1, 3, samples=10, seed=1, mode="full")

    counts = sample_joint_counts(schedule, A, A, 1, 3, samples=20000, seed=3, mode="full", truncate=True)
    assert counts.stage == 3
    assert counts.mu_a == 1
    # the B level at position 0 of W3 has no preimage inside the tower
    assert counts.mu_b == Fraction(5, 6)
    c = CorrelationEngine(schedule, A, A).window(1, 3).lo
    assert c == Fraction(1, 2)
    cells = compare_with_analytic(counts, c, counts.mu_a, counts.mu_b, k_max=4)
    assert sum(c.inside for c in cells) >= len(cells) - 3


def test_truncated_full_mode_still_needs_the_lag_inside_the_tower():
    schedule = small_schedule()
    A = LevelSet.parse("1:0")
    with pytest.raises(UnresolvablePosition):
        sample_joint_counts(schedule, A, A, 11, 3, samples=10, seed=1, mode="full", truncate=True)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
