#!/usr/bin/env python3

import argparse
import json
import os
import sys

# Ensure project root is importable
ROOT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.append(ROOT_DIR)

from load_env import load_lab_env  # noqa: E402
from orchestrator.orchestrator import VERIFY_KINDS, LabOrchestrator  # noqa: E402
from tools.config_tool import ConfigTool  # noqa: E402
from tools.errors import ConfigError, LabError, SynthesisStall  # noqa: E402

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STALL = 2
EXIT_FAIL = 3


def _int_list(text: str):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankone_lab",
        description="Rank-one cutting-and-stacking laboratory",
    )
    parser.add_argument("--defaults", help="Path to lab defaults JSON")
    parser.add_argument("--output", dest="output_dir", help="Directory for run folders")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tolerance", help="Rational tolerance for exact correlations, e.g. 1/1000")
    parser.add_argument("--max-word-len", dest="max_word_len", type=int)
    parser.add_argument("--stage-limit", dest="stage_limit", type=int)
    parser.add_argument("--memo-cap", dest="memo_cap", type=int)
    parser.add_argument("--workers", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Synthesize a schedule from a theorem input file")
    synth.add_argument("--theorem", choices=["1", "2", "3", "staircase"], required=True)
    synth.add_argument("--spec", dest="spec_path", required=True)
    synth.add_argument("--stages", type=int, default=5)
    synth.add_argument("--growth", type=int, help="Growth constant for the theorem's gap conditions")
    synth.add_argument("--growth-factor", dest="growth_factor", type=int)
    synth.add_argument("--window", dest="theorem2_window", choices=["half", "full"])

    build = sub.add_parser("build", help="Expand and check a schedule file")
    build.add_argument("--schedule", dest="schedule_path", required=True)

    def level_args(p, lags_required=False):
        p.add_argument("--schedule", dest="schedule_path", required=True)
        p.add_argument("--A", required=True, help='Level set, e.g. "2:0-3,7"')
        p.add_argument("--B", help="Second level set (defaults to A)")
        p.add_argument("--lags", type=_int_list, required=lags_required)

    corr = sub.add_parser("corr", help="Correlate level sets along explicit lags")
    level_args(corr, lags_required=True)
    corr.add_argument("--method", choices=["exact", "bruteforce", "montecarlo"], default="exact")
    corr.add_argument("--stage", type=int, help="Evaluation stage for bruteforce/montecarlo")
    corr.add_argument("--samples", type=int)
    corr.add_argument("--confidence", type=float)

    verify = sub.add_parser("verify", help="Run a rigidity/mixing/kappa/sp/suspension/spectral report")
    level_args(verify)
    verify.add_argument("--kind", choices=VERIFY_KINDS, required=True)
    verify.add_argument("--mixing-spec", dest="mixing_spec", help="Mixing-set file to sample lags from")
    verify.add_argument("--sample-count", dest="sample_count", type=int)
    verify.add_argument("--cutoff", type=int)
    verify.add_argument("--stages", type=_int_list)
    verify.add_argument("--threshold", dest="mixing_threshold")
    verify.add_argument("--s-max", dest="s_max", type=int)
    verify.add_argument("--p-max", dest="p_max", type=int)
    verify.add_argument("--k", type=int)
    verify.add_argument("--n", type=int)
    verify.add_argument("--order", type=int)

    spectral = sub.add_parser("spectral", help="Spectral coefficients and Fejér density of A")
    level_args(spectral)
    spectral.add_argument("--order", type=int, default=64)
    spectral.add_argument("--mixing-spec", dest="mixing_spec")
    spectral.add_argument("--sample-count", dest="sample_count", type=int)
    spectral.add_argument("--stages", type=_int_list)

    poisson = sub.add_parser("poisson", help="Poisson suspension inheritance and sampling")
    level_args(poisson)
    poisson.add_argument("--k", type=int, default=1)
    poisson.add_argument("--n", type=int)
    poisson.add_argument("--mixing-spec", dest="mixing_spec")
    poisson.add_argument("--sample-count", dest="sample_count", type=int)
    poisson.add_argument("--stages", type=_int_list)
    poisson.add_argument("--mc-lags", dest="mc_lags", type=_int_list)
    poisson.add_argument("--samples", type=int)

    return parser


# options that land on RunConfig fields; everything else is a command argument
CONFIG_FIELDS = {
    "output_dir", "seed", "tolerance", "max_word_len", "stage_limit", "memo_cap", "workers",
    "spec_path", "schedule_path", "growth_factor", "theorem2_window", "samples", "confidence",
    "mixing_threshold", "s_max", "p_max",
}


def split_options(ns: argparse.Namespace):
    values = vars(ns).copy()
    values.pop("command")
    values.pop("defaults", None)
    overrides = {k: values.pop(k) for k in list(values) if k in CONFIG_FIELDS}

    growth = values.pop("growth", None)
    if growth is not None:
        overrides["theorem1_growth"] = growth
        overrides["theorem23_growth"] = growth

    arguments = {k: v for k, v in values.items() if v is not None}
    overrides["arguments"] = arguments
    return overrides


def print_config(config):
    print("\n===== RANK-ONE LAB CONFIG =====")
    print(json.dumps(json.loads(config.canonical_json()), indent=2))
    print(f"workers: {config.workers}  output: {config.output_dir}")
    print("===============================\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    load_lab_env()
    try:
        config = ConfigTool(ns.defaults).build_run_config(ns.command, split_options(ns))
    except ConfigError as e:
        print(f"❌ Configuration error: {e}")
        return EXIT_USAGE
    print_config(config)

    orchestrator = LabOrchestrator(config)
    try:
        verdict, run_logger = orchestrator.run()
    except SynthesisStall as e:
        print(f"⛔ Synthesis stalled at stage {e.stage}: need a block of length {e.required_length}")
        return EXIT_STALL
    except (ConfigError, LabError) as e:
        print(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("\n⏹️ Stopped manually.")
        return EXIT_USAGE

    print(f"📁 Results in {run_logger.run_dir}")
    return EXIT_FAIL if verdict == "FAIL" else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
