# reports/mixing_report.py

from correlation.verifiers import verify_mixing_along
from tools.csv_formatter import CsvFormatter


def resolvable_ceiling(schedule) -> int:
    """Largest lag whose top-of-tower term vanishes at the last built stage."""
    if schedule.last_stage < 2:
        return 0
    return schedule.record(schedule.last_stage - 1).spacer_values[-1]


class MixingReport:
    """
    Checks that correlations vanish (infinite measure) or approach
    μ(A)μ(B)/μ(X) (finite measure) along the sampled mixing lags.
    """

    def __init__(self):
        self.formatter = CsvFormatter()

    def analyze(self, schedule, A, B, lags, cutoff, config, run_logger):
        report = verify_mixing_along(
            schedule,
            lags,
            A,
            B,
            threshold=config.mixing_threshold,
            cutoff=cutoff,
            tolerance=config.tolerance,
        )
        rows = [
            {
                "lag": row.lag,
                "lo": row.result.lo,
                "hi": row.result.hi,
                "method": row.result.method,
                "stage_used": row.result.stage,
                "status": row.status,
            }
            for row in report.rows
        ]
        run_logger.write_csv(
            "mixing.csv",
            self.formatter.frame(rows, ["lag", "lo", "hi", "method", "stage_used", "status"]),
        )
        summary = {
            "verdict": report.verdict,
            "mode": report.mode,
            "cutoff": report.cutoff,
            "target": str(report.target),
            "lags": len(report.rows),
            "counts": report.counts,
        }
        run_logger.log_report("mixing", summary)
        return summary
