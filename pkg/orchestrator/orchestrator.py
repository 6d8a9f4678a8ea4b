# orchestrator/orchestrator.py

from concurrent.futures import ThreadPoolExecutor

from tqdm import tqdm

from construction.schedule import LevelSet
from construction.schedule_io import serialize_schedule
from correlation.engine import CorrelationEngine, WordOracle
from correlation.montecarlo import correlation_montecarlo
from reports.kappa_report import KappaReport, kappa_sequence
from reports.mixing_report import MixingReport, resolvable_ceiling
from reports.rigidity_report import RigidityReport, default_rigidity_stages
from reports.sp_report import SpReport, largest_materializable_stage
from reports.spectral_report import SpectralReport
from reports.suspension_report import SuspensionReport
from runs.run_log import RunLogger
from synthesis.generator import load_any_schedule, run_synthesis
from synthesis.mixing_set import load_document, parse_mixing_set
from tools.config_tool import RunConfig
from tools.csv_formatter import CsvFormatter
from tools.errors import ConfigError, LabError, ToleranceUnreachable

VERIFY_KINDS = ("rigidity", "mixing", "kappa", "sp", "suspension", "spectral")


class LabOrchestrator:
    """
    Runs one CLI command end to end: loads inputs, fans lag sweeps out to a
    worker pool, hands results to the report classes and persists the run.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.args = dict(config.arguments)
        self.formatter = CsvFormatter()

        self.rigidity_report = RigidityReport()
        self.mixing_report = MixingReport()
        self.kappa_report = KappaReport()
        self.sp_report = SpReport()
        self.suspension_report = SuspensionReport()
        self.spectral_report = SpectralReport()

    # ----------------------------------------------------------------------
    # RUN
    # ----------------------------------------------------------------------

    def run(self):
        print("\n" + "=" * 60)
        print(f"🔬 Running '{self.config.command}'...")
        print("=" * 60)

        run_logger = RunLogger(self.config.output_dir, self.config.command, self.config.digest())
        run_logger.log_config(self.config.canonical_json())

        handler = getattr(self, f"cmd_{self.config.command}")
        try:
            summary = handler(run_logger)
        except LabError as e:
            run_logger.log_error(e)
            print(f"\n❌ {type(e).__name__}: {e}")
            raise

        verdict = summary.get("verdict", "PASS")
        run_logger.finalize_and_persist(verdict, summary, self.config.canonical_json())
        print(f"\n🏁 Verdict: {verdict}")
        return verdict, run_logger

    # ----------------------------------------------------------------------
    # HELPERS
    # ----------------------------------------------------------------------

    def _sweep(self, fn, items, desc: str):
        """Ordered map over items; worker count never changes the output order."""
        items = list(items)
        if self.config.workers <= 1:
            return [fn(x) for x in tqdm(items, desc=desc, leave=False)]
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            return list(tqdm(pool.map(fn, items), total=len(items), desc=desc, leave=False))

    def _schedule(self):
        if not self.config.schedule_path:
            raise ConfigError("this command needs --schedule")
        schedule = load_any_schedule(self.config.schedule_path, self.config)
        print(f"📐 Loaded schedule: {schedule.last_stage} stages, h_last={schedule.height(schedule.last_stage)}")
        return schedule

    def _level_sets(self, schedule):
        if "A" not in self.args:
            raise ConfigError("this command needs --A")
        A = LevelSet.parse(self.args["A"]).validate_for(schedule)
        B = LevelSet.parse(self.args["B"]).validate_for(schedule) if self.args.get("B") else A
        return A, B

    def _mixing_lags(self, schedule, A, B):
        if self.args.get("lags"):
            return sorted(int(m) for m in self.args["lags"])
        spec_path = self.args.get("mixing_spec") or self.config.spec_path
        if not spec_path:
            return []
        spec = load_document(spec_path, parse_mixing_set)
        n = max(A.stage, B.stage)
        low = self._cutoff(schedule, A, B)
        high = resolvable_ceiling(schedule)
        lags = spec.sample_lags(int(self.args.get("sample_count", 50)), max(low, 1), high, self.config.seed)
        print(f"🎯 Sampled {len(lags)} mixing lags in [{low}, {high}] (reference stage {n})")
        return lags

    def _cutoff(self, schedule, A, B) -> int:
        if self.args.get("cutoff") is not None:
            return int(self.args["cutoff"])
        n = max(A.stage, B.stage)
        return schedule.height(min(n + 1, schedule.last_stage))

    def _rigidity_stages(self, schedule, A):
        if self.args.get("stages"):
            return [int(j) for j in self.args["stages"]]
        return default_rigidity_stages(schedule, A)

    # ----------------------------------------------------------------------
    # COMMANDS
    # ----------------------------------------------------------------------

    def cmd_synth(self, run_logger):
        theorem = str(self.args.get("theorem", "1"))
        stages = int(self.args.get("stages", 5))
        if not self.config.spec_path:
            raise ConfigError("synth needs --spec")
        print(f"🧮 Synthesizing theorem {theorem} schedule with {stages} stages from {self.config.spec_path}")

        outcome = run_synthesis(theorem, self.config.spec_path, stages, self.config)
        schedule = outcome.schedule
        run_logger.log_step("synthesis", theorem=theorem, stages=schedule.last_stage)

        run_logger.write_text("schedule.json", serialize_schedule(schedule))
        run_logger.write_text("audit.txt", outcome.audit.format(schedule))
        choices = [c.model_dump() for c in outcome.choices]
        for row in choices:
            row["windows"] = " ".join(f"[{a},{b}]" for a, b in row["windows"])
        run_logger.write_csv(
            "choices.csv",
            self.formatter.frame(choices, ["j", "r", "h", "h_next", "spacer", "source", "windows"]),
        )

        summary = {
            "verdict": "PASS" if outcome.audit.ok else "FAIL",
            "theorem": theorem,
            "stages": schedule.last_stage,
            "heights": [str(h) for h in schedule.heights()],
            "audit_checks": len(outcome.audit.checks),
        }
        if outcome.extra is not None:
            summary["staircase"] = {
                "admissibility_sum": str(outcome.extra.admissibility_sum),
                "within_budget": outcome.extra.within_budget,
                "block_shifts": [str(x) for x in outcome.extra.block_shifts],
                "candidate_lags": [[str(m) for m in lags] for lags in outcome.extra.candidate_lags],
                "lags_in_targets": outcome.extra.lags_in_targets,
                "block_shifts_in_targets": outcome.extra.block_shifts_in_targets,
            }
        print(f"   Audit: {sum(c.ok for c in outcome.audit.checks)}/{len(outcome.audit.checks)} checks passed")
        return summary

    def cmd_build(self, run_logger):
        schedule = self._schedule()
        schedule.check_recursions()
        measure = schedule.check_measure_mode()
        run_logger.write_text("schedule.json", serialize_schedule(schedule))
        run_logger.write_csv("stages.csv", self.formatter.schedule_table(schedule))
        return {"verdict": "PASS" if measure["ok"] else "FAIL", "measure": measure}

    def cmd_corr(self, run_logger):
        schedule = self._schedule()
        A, B = self._level_sets(schedule)
        lags = [int(m) for m in self.args.get("lags", [])]
        method = self.args.get("method", "exact")
        print(f"📈 Correlating {len(lags)} lags ({method})")

        if method == "exact":
            engine = CorrelationEngine(schedule, A, B, memo_cap=self.config.memo_cap)

            def one(m):
                try:
                    return engine.correlate(m, self.config.tolerance, self.config.stage_limit)
                except ToleranceUnreachable as e:
                    return e.result

            results = self._sweep(one, lags, "exact")
        elif method == "bruteforce":
            J = int(self.args.get("stage") or largest_materializable_stage(schedule, self.config.max_word_len))
            oracle = WordOracle(schedule, A, B, J, self.config.max_word_len)
            results = self._sweep(oracle.correlate, lags, "brute-force")
        elif method == "montecarlo":
            J = int(self.args.get("stage") or schedule.last_stage)
            index = {m: i for i, m in enumerate(lags)}

            def one(m):
                return correlation_montecarlo(
                    schedule, A, B, m, J, self.config.samples, self.config.seed,
                    self.config.confidence, stream=index[m],
                )

            results = self._sweep(one, lags, "monte-carlo")
        else:
            raise ConfigError(f"unknown correlation method {method!r}")

        run_logger.write_csv("correlations.csv", self.formatter.correlations(results))
        exact = sum(r.is_exact for r in results)
        return {"verdict": "PASS", "method": method, "lags": len(results), "exact": exact}

    def cmd_verify(self, run_logger):
        kind = self.args.get("kind")
        if kind not in VERIFY_KINDS:
            raise ConfigError(f"verify --kind must be one of {', '.join(VERIFY_KINDS)}")
        schedule = self._schedule()
        A, B = self._level_sets(schedule)
        print(f"\n🤖 Running {kind} report...")

        if kind == "rigidity":
            return self.rigidity_report.analyze(schedule, A, self._rigidity_stages(schedule, A), run_logger)
        if kind == "mixing":
            lags = self._mixing_lags(schedule, A, B)
            return self.mixing_report.analyze(
                schedule, A, B, lags, self._cutoff(schedule, A, B), self.config, run_logger
            )
        if kind == "kappa":
            lags = [int(m) for m in self.args.get("lags") or kappa_sequence(schedule)]
            return self.kappa_report.analyze(schedule, A, B, lags, self.config, run_logger)
        if kind == "sp":
            return self.sp_report.analyze(schedule, A, B, self.config, run_logger)
        if kind == "suspension":
            return self._suspension(schedule, A, B, run_logger)
        return self._spectral(schedule, A, B, run_logger)

    def cmd_poisson(self, run_logger):
        schedule = self._schedule()
        A, B = self._level_sets(schedule)
        return self._suspension(schedule, A, B, run_logger)

    def cmd_spectral(self, run_logger):
        schedule = self._schedule()
        A, B = self._level_sets(schedule)
        return self._spectral(schedule, A, B, run_logger)

    def _suspension(self, schedule, A, B, run_logger):
        k = int(self.args.get("k", 1))
        n = int(self.args.get("n", k))
        rigidity_lags = [schedule.height(j) for j in self._rigidity_stages(schedule, A)]
        mixing_lags = self._mixing_lags(schedule, A, B)
        mc_lags = [int(m) for m in self.args.get("mc_lags") or (rigidity_lags[:1] + mixing_lags[:1])]
        print(f"🎲 Poisson suspension: {len(rigidity_lags)} rigidity lags, {len(mixing_lags)} mixing lags")
        return self.suspension_report.analyze(
            schedule, A, B, k, n, rigidity_lags, mixing_lags, mc_lags, self.config, run_logger
        )

    def _spectral(self, schedule, A, B, run_logger):
        order = int(self.args.get("order", 64))
        extra = [schedule.height(j) for j in self._rigidity_stages(schedule, A)]
        extra += self._mixing_lags(schedule, A, A)
        print(f"🌀 Spectral coefficients up to order {order} plus {len(extra)} witness lags")
        return self.spectral_report.analyze(schedule, A, order, extra, self.config, run_logger)
