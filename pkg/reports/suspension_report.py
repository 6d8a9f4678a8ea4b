# reports/suspension_report.py

import logging

from correlation.engine import CorrelationEngine
from reports.sp_report import largest_materializable_stage
from suspension.poisson import normalization_mass, suspension_inheritance_report
from suspension.sampling import compare_with_analytic, sample_joint_counts
from tools.csv_formatter import CsvFormatter
from tools.errors import ScheduleError, ToleranceUnreachable, UnresolvablePosition

logger = logging.getLogger(__name__)

MC_COLUMNS = ["lag", "stage", "k", "n", "analytic_prob", "mc_freq", "ci_lo", "ci_hi", "status"]


class SuspensionReport:
    """
    Lifts rigidity and mixing to the Poisson suspension: exact cylinder
    probabilities along both sequences, plus joint counts sampled from the
    process on the stage-J tower at the requested lags.
    """

    def __init__(self):
        self.formatter = CsvFormatter()

    def analyze(self, schedule, A, B, k, n, rigidity_lags, mixing_lags, mc_lags, config, run_logger):
        try:
            inheritance = suspension_inheritance_report(schedule, A, k, rigidity_lags, mixing_lags, B, n)
        except ToleranceUnreachable as e:
            summary = {"verdict": "INCONCLUSIVE", "reason": str(e)}
            run_logger.log_report("suspension", summary)
            return summary

        rows = [
            {
                "sequence": r.sequence,
                "lag": r.lag,
                "overlap": r.overlap,
                "joint": float(r.joint),
                "target": float(r.target),
                "difference": r.difference,
                "bound": r.bound,
                "status": r.status,
            }
            for r in inheritance.rows
        ]
        run_logger.write_csv(
            "inheritance.csv",
            self.formatter.frame(
                rows, ["sequence", "lag", "overlap", "joint", "target", "difference", "bound", "status"]
            ),
        )

        engine = CorrelationEngine(schedule, A, B)
        laws = [
            (r.overlap, engine.mu_a, engine.mu_a if r.sequence == "rigidity" else engine.mu_b)
            for r in inheritance.rows
        ]
        J = largest_materializable_stage(schedule, config.max_word_len)
        mc_rows = []
        unresolved = []
        inside = total = 0
        for index, m in enumerate(mc_lags):
            try:
                counts = sample_joint_counts(
                    schedule, A, B, m, J, config.samples, config.seed,
                    mode="full", stream=index, max_len=config.max_word_len, truncate=True,
                )
                c = engine.window(m, J).lo
            except (UnresolvablePosition, ToleranceUnreachable, ScheduleError) as e:
                logger.warning("lag %d left unsampled: %s", m, e)
                unresolved.append(m)
                mc_rows.append({"lag": m, "stage": J, "status": "inconclusive"})
                continue

            laws.append((c, counts.mu_a, counts.mu_b))
            cells = compare_with_analytic(counts, c, counts.mu_a, counts.mu_b, config.k_max, config.confidence)
            for cell in cells:
                mc_rows.append(
                    {
                        "lag": m,
                        "stage": J,
                        "k": cell.k,
                        "n": cell.n,
                        "analytic_prob": cell.analytic,
                        "mc_freq": cell.frequency,
                        "ci_lo": cell.ci_lo,
                        "ci_hi": cell.ci_hi,
                        "status": "inside" if cell.inside else "outside",
                    }
                )
                inside += cell.inside
                total += 1
        run_logger.write_csv("poisson.csv", self.formatter.frame(mc_rows, MC_COLUMNS))

        coverage = inside / total if total else None
        # nominal coverage is `confidence` per cell; allow sampling slack
        mc_ok = coverage is None or coverage >= config.confidence - 0.05
        verdict = inheritance.verdict
        if verdict != "FAIL" and (unresolved or not mc_ok):
            verdict = "INCONCLUSIVE"

        summary = {
            "verdict": verdict,
            "k": k,
            "n": n,
            "inheritance_rows": len(inheritance.rows),
            "mc_mode": "full",
            "mc_stage": J,
            "mc_cells": total,
            "mc_coverage": coverage,
            "mc_unresolved": unresolved,
            "normalization_mass": min(
                (normalization_mass(c, mu_a, mu_b, config.k_max) for c, mu_a, mu_b in laws), default=None
            ),
            "note": inheritance.note,
        }
        run_logger.log_report("suspension", summary)
        return summary
