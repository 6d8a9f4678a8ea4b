# synthesis/audit.py
#
# Post-hoc audit of a synthesized schedule. Works from the finished schedule
# and the input document only; it shares no code path with the synthesizers.

from bisect import bisect_left
from typing import List, Optional, Tuple

from pydantic import BaseModel

from construction.schedule import ConstructionSchedule


class AuditCheck(BaseModel):
    stage: int
    description: str
    window: Optional[Tuple[int, int]] = None
    ok: bool


class AuditReport(BaseModel):
    theorem: str
    checks: List[AuditCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def windows(self) -> List[Tuple[int, int]]:
        return [c.window for c in self.checks if c.window is not None]

    def format(self, schedule: ConstructionSchedule) -> str:
        lines = [f"Synthesis audit (theorem {self.theorem})", ""]
        lines.append("stage  r  h_j  spacers_total")
        for rec in schedule.records:
            lines.append(f"{rec.j}  {rec.r}  {rec.h}  {sum(rec.spacer_values)}")
        lines.append(f"{schedule.last_stage}  -  {schedule.height(schedule.last_stage)}  -")
        lines.append("")
        lines.append("checks:")
        for c in self.checks:
            mark = "ok  " if c.ok else "FAIL"
            where = f" [{c.window[0]}, {c.window[1]}]" if c.window else ""
            lines.append(f"  {mark} stage {c.stage}: {c.description}{where}")
        lines.append("")
        passed = sum(c.ok for c in self.checks)
        lines.append(f"{passed}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"


def _inside_any(window, blocks) -> bool:
    return any(lo <= window[0] and window[1] <= hi for lo, hi in blocks)


def _misses(window, members) -> bool:
    k = bisect_left(members, window[0])
    return k == len(members) or members[k] > window[1]


def audit_theorem1(schedule: ConstructionSchedule, spec, growth: int = 1) -> AuditReport:
    blocks = [
        (n * e.a, n * e.a + e.L) for e in (spec.entries or []) for n in range(1, e.multiplicity + 1)
    ]
    checks = []
    for rec in schedule.records:
        j, r, h = rec.j, rec.r, rec.h
        values = rec.spacer_values
        h_next = h * r + sum(values)
        checks.append(AuditCheck(stage=j, description=f"r_{j} = max({j}, 2)", ok=r == max(j, 2)))
        checks.append(
            AuditCheck(
                stage=j,
                description="spacers only over the last column",
                ok=all(v == 0 for v in values[:-1]),
            )
        )
        checks.append(
            AuditCheck(stage=j, description=f"s_{j} >= {growth} r_{j} h_{j}", ok=values[-1] >= growth * r * h)
        )
        for n in range(1, r + 1):
            window = (n * h_next - r * h, n * h_next + r * h)
            if spec.kind == "interval-family":
                ok = _inside_any(window, blocks)
                what = f"safety window n={n} inside a family block"
            else:
                ok = _misses(window, spec.members) and window[1] <= spec.horizon
                what = f"safety window n={n} clear of the set"
            checks.append(AuditCheck(stage=j, description=what, window=window, ok=ok))
    return AuditReport(theorem="1", checks=checks)


def audit_theorem2(schedule: ConstructionSchedule, spec, growth: int = 1, rule: str = "half") -> AuditReport:
    intervals = [(e.a, e.a + e.L) for e in spec.entries]
    checks = []
    for rec in schedule.records:
        j, h = rec.j, rec.h
        values = rec.spacer_values
        h_next = 2 * h + sum(values)
        half = h if rule == "half" else 2 * h
        window = (h_next - half, h_next + half)
        checks.append(AuditCheck(stage=j, description="r = 2 with spacers (0, s)", ok=rec.r == 2 and values[0] == 0))
        checks.append(AuditCheck(stage=j, description=f"s_{j} >= {growth} h_{j}", ok=values[1] >= growth * h))
        checks.append(
            AuditCheck(stage=j, description="non-mixing window inside a listed interval", window=window,
                       ok=_inside_any(window, intervals))
        )
    return AuditReport(theorem="2", checks=checks)


def audit_theorem3(schedule: ConstructionSchedule, pool, growth_factor: int = 8, growth: int = 1) -> AuditReport:
    checks = []
    for rec in schedule.records:
        j, h = rec.j, rec.h
        h_next = 2 * h + sum(rec.spacer_values)
        checks.append(
            AuditCheck(stage=j + 1, description=f"h_{j + 1} = {h_next} is in the pool",
                       ok=pool.smallest_at_least(h_next) == h_next)
        )
        checks.append(
            AuditCheck(stage=j, description=f"h_{j + 1} >= {growth_factor} h_{j}", ok=h_next >= growth_factor * h)
        )
        checks.append(
            AuditCheck(stage=j, description=f"s_{j} = h_{j + 1} - 2 h_{j} >= {growth} h_{j}",
                       ok=rec.spacer_values == (0, h_next - 2 * h) and h_next - 2 * h >= growth * h)
        )
    return AuditReport(theorem="3", checks=checks)


def audit_staircase(schedule: ConstructionSchedule, plan) -> AuditReport:
    checks = []
    for rec, stage in zip(schedule.records, plan.stages):
        if stage.type == "mixing":
            expected = tuple(range(1, max(rec.j, 2) + 1))
        else:
            expected = tuple(range(1, stage.q + 1)) * stage.n
        checks.append(
            AuditCheck(stage=rec.j, description=f"{stage.type} stage spacers", ok=rec.spacer_values == expected)
        )
    report = schedule.check_measure_mode()
    checks.append(
        AuditCheck(stage=schedule.last_stage, description=f"running measure below bound {plan.measure_bound}",
                   ok=report["ok"])
    )
    return AuditReport(theorem="staircase", checks=checks)
