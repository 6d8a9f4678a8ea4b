# reports/kappa_report.py

from correlation.verifiers import kappa_mixing_check
from tools.csv_formatter import CsvFormatter
from tools.errors import UnidentifiableKappa


def kappa_sequence(schedule):
    """k_i = h_i + 1 + ... + q_i, one lag per rigid staircase stage."""
    return [
        rec.h + rec.spacers.q * (rec.spacers.q + 1) // 2
        for rec in schedule.records
        if rec.spacers.kind == "repeated-staircase"
    ]


class KappaReport:
    """Solves κ per lag and judges convergence over the last three lags."""

    def __init__(self):
        self.formatter = CsvFormatter()

    def analyze(self, schedule, A, B, lags, config, run_logger):
        try:
            report = kappa_mixing_check(
                schedule, lags, A, B,
                tolerance=config.tolerance,
                kappa_tolerance=config.kappa_tolerance,
            )
        except UnidentifiableKappa as e:
            summary = {"verdict": "INCONCLUSIVE", "reason": str(e)}
            run_logger.log_report("kappa", summary)
            return summary

        rows = [
            {
                "lag": row.lag,
                "lo": row.result.lo,
                "hi": row.result.hi,
                "kappa_lo": row.kappa_lo,
                "kappa_hi": row.kappa_hi,
                "kappa": float(row.kappa),
                "stage_used": row.result.stage,
            }
            for row in report.rows
        ]
        run_logger.write_csv(
            "kappa.csv",
            self.formatter.frame(rows, ["lag", "lo", "hi", "kappa_lo", "kappa_hi", "kappa", "stage_used"]),
        )
        verdict = "PASS" if report.converged else "INCONCLUSIVE"
        summary = {
            "verdict": verdict,
            "converged": report.converged,
            "spread": None if report.spread is None else str(report.spread),
            "estimate": None if report.estimate is None else str(report.estimate),
            "lags": len(report.rows),
        }
        run_logger.log_report("kappa", summary)
        return summary
