# reports/sp_report.py

from correlation.verifiers import sp_completeness
from tools.csv_formatter import CsvFormatter


def largest_materializable_stage(schedule, max_len: int) -> int:
    J = 1
    for j in range(1, schedule.last_stage + 1):
        if schedule.height(j) <= max_len:
            J = j
    return J


def default_sweep_stage(schedule, max_len: int) -> int:
    """Largest materializable stage that leaves one built stage above it to certify zeros."""
    J = largest_materializable_stage(schedule, max_len)
    return max(1, min(J, schedule.last_stage - 1))


class SpReport:
    """
    Desk-scale (sp) completeness: every positive-correlation lag of the
    materialized word is listed with its decomposition, and every lag
    without one is certified zero.
    """

    def __init__(self):
        self.formatter = CsvFormatter()

    def _rows(self, rows):
        return [
            {
                "lag": row.lag,
                "lo": row.result.lo,
                "hi": row.result.hi,
                "stage_used": row.result.stage,
                "form": "" if row.form is None else row.form.format(),
                "p": None if row.form is None else row.form.p,
                "residual": None if row.form is None else row.form.residual,
                "status": row.status,
            }
            for row in rows
        ]

    def analyze(self, schedule, A, B, config, run_logger, J=None):
        J = J or default_sweep_stage(schedule, config.max_word_len)
        n = max(A.stage, B.stage)
        s_max = config.s_max if config.s_max is not None else schedule.height(n)
        report = sp_completeness(
            schedule, A, B, J, s_max, config.p_max, cutoff=1, max_len=config.max_word_len
        )
        columns = ["lag", "lo", "hi", "stage_used", "form", "p", "residual", "status"]
        run_logger.write_csv("sp_forms.csv", self.formatter.frame(self._rows(report.rows), columns))
        run_logger.write_csv("sp_candidates.csv", self.formatter.frame(self._rows(report.candidate_rows), columns))

        statuses = [r.status for r in report.candidate_rows]
        summary = {
            "verdict": report.verdict,
            "stage": J,
            "s_max": s_max,
            "p_max": config.p_max,
            "positive_lags": len(report.rows),
            "observed_s_max": report.observed_s_max,
            "observed_p_max": report.observed_p_max,
            "mixing_candidates": len(report.mixing_candidates),
            "candidates_certified_zero": statuses.count("pass"),
            "candidates_unresolved": statuses.count("inconclusive"),
        }
        run_logger.log_report("sp", summary)
        return summary
