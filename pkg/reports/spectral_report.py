# reports/spectral_report.py

from spectral.coefficients import fejer_density, spectral_coefficients, toeplitz_psd_check
from tools.csv_formatter import CsvFormatter
from tools.streams import make_rng

CLIP_SLACK = 1e-12


class SpectralReport:
    """
    Emits the coefficient sequence σ̂(m) of the normalized indicator of A,
    a Fejér density estimate (a visual aid only) and Toeplitz spot checks.
    """

    def __init__(self):
        self.formatter = CsvFormatter()

    def analyze(self, schedule, A, order, extra_lags, config, run_logger, psd_trials: int = 20):
        lags = list(range(order + 1)) + [m for m in extra_lags if m > order]
        sequence = spectral_coefficients(schedule, A, lags, config.tolerance)
        run_logger.write_csv("spectral.csv", self.formatter.spectral(sequence))

        fejer = fejer_density(sequence, order, config.fejer_grid)
        run_logger.write_csv("fejer.csv", self.formatter.density(fejer))

        rng = make_rng(config.seed, 11)
        worst = None
        psd_ok = True
        size = min(6, order + 1)
        for _ in range(psd_trials):
            subset = sorted(int(x) for x in rng.choice(order + 1, size=size, replace=False))
            smallest, ok = toeplitz_psd_check(sequence, subset, config.psd_tolerance)
            worst = smallest if worst is None else min(worst, smallest)
            psd_ok = psd_ok and ok

        all_exact = all(c.exact for c in sequence.coefficients)
        nonnegative = fejer.raw_minimum >= -CLIP_SLACK
        if not (psd_ok and nonnegative):
            verdict = "FAIL" if all_exact else "INCONCLUSIVE"
        else:
            verdict = "PASS" if all_exact else "INCONCLUSIVE"

        summary = {
            "verdict": verdict,
            "order": order,
            "coefficients": len(sequence.coefficients),
            "all_exact": all_exact,
            "fejer_raw_minimum": fejer.raw_minimum,
            "fejer_integral": fejer.integral,
            "toeplitz_min_eigenvalue": worst,
            "label": "Fejér density is a visual aid; the coefficient sequence is the result",
            "rigidity_witness": "h_j",
        }
        run_logger.log_report("spectral", summary)
        return summary
