# tools/csv_formatter.py

from fractions import Fraction

import pandas as pd


class CsvFormatter:
    """
    Turns laboratory results into pandas frames of preformatted strings.
    Integers print in full decimal, rationals as p/q, floats with 17
    significant digits, so written CSVs are lossless and byte-stable.
    """

    @staticmethod
    def number(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, int):
            return str(value)
        if isinstance(value, Fraction):
            return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        if isinstance(value, float):
            return format(value, ".17g")
        return str(value)

    @classmethod
    def frame(cls, rows, columns) -> pd.DataFrame:
        data = [[cls.number(row.get(c)) for c in columns] for row in rows]
        return pd.DataFrame(data, columns=columns, dtype=str)

    # ------------------------------
    # per-output layouts
    # ------------------------------
    @classmethod
    def correlations(cls, results) -> pd.DataFrame:
        rows = [
            {"lag": r.m, "lo": r.lo, "hi": r.hi, "method": r.method, "stage_used": r.stage}
            for r in results
        ]
        return cls.frame(rows, ["lag", "lo", "hi", "method", "stage_used"])

    @classmethod
    def schedule_table(cls, schedule) -> pd.DataFrame:
        rows = []
        for j in range(1, schedule.last_stage + 1):
            row = {"stage": j, "h": schedule.height(j), "w": schedule.width(j), "measure": schedule.stage_measure(j)}
            if j < schedule.last_stage:
                record = schedule.record(j)
                row.update({"r": record.r, "kind": record.spacers.kind, "spacer_total": sum(record.spacer_values)})
            rows.append(row)
        return cls.frame(rows, ["stage", "r", "kind", "spacer_total", "h", "w", "measure"])

    @classmethod
    def spectral(cls, sequence) -> pd.DataFrame:
        rows = []
        for m, c in sequence.symmetric():
            value = c.value
            rows.append(
                {
                    "m": m,
                    "coefficient_numerator": value.numerator,
                    "coefficient_denominator": value.denominator,
                    "float": float(value),
                    "exact": c.exact,
                }
            )
        return cls.frame(rows, ["m", "coefficient_numerator", "coefficient_denominator", "float", "exact"])

    @classmethod
    def density(cls, fejer) -> pd.DataFrame:
        rows = [{"theta": float(t), "density": float(d)} for t, d in zip(fejer.theta, fejer.density)]
        return cls.frame(rows, ["theta", "density"])
