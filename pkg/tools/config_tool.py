import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tools.errors import ConfigError


class RunConfig(BaseModel):
    """
    Everything one command run depends on. Two runs with equal RunConfig
    produce byte-identical CSV and report files.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, arbitrary_types_allowed=True)

    command: Literal["synth", "build", "corr", "verify", "spectral", "poisson"]
    spec_path: Optional[str] = None
    schedule_path: Optional[str] = None
    output_dir: str = "lab_runs"

    max_word_len: int = 1_000_000
    stage_limit: int = 64
    tolerance: Fraction = Fraction(0)
    memo_cap: Optional[int] = None
    s_max: Optional[int] = None
    p_max: int = 8
    mixing_threshold: Fraction = Fraction(1, 100)
    kappa_tolerance: Fraction = Fraction(1, 20)

    h1: int = 1
    w1: Fraction = Fraction(1)
    growth_factor: int = 8
    theorem1_growth: int = 1
    theorem23_growth: int = 1
    theorem2_window: Literal["half", "full"] = "half"

    samples: int = 100_000
    seed: int = 20240601
    confidence: float = 0.99
    k_max: int = 6

    fejer_grid: int = 512
    psd_tolerance: float = 1e-9

    workers: int = 1

    # command-specific arguments (lags, level sets, theorem, stages, ...)
    arguments: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("tolerance", "w1", "mixing_threshold", "kappa_tolerance", mode="before")
    @classmethod
    def _parse_fraction(cls, value):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e

    @model_validator(mode="after")
    def _check_limits(self):
        positive = {
            "max_word_len": self.max_word_len,
            "stage_limit": self.stage_limit,
            "p_max": self.p_max,
            "h1": self.h1,
            "growth_factor": self.growth_factor,
            "samples": self.samples,
            "k_max": self.k_max,
            "fejer_grid": self.fejer_grid,
            "workers": self.workers,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        if self.w1 <= 0:
            raise ValueError("w1 must be positive")
        if self.memo_cap is not None and self.memo_cap <= 0:
            raise ValueError("memo_cap must be positive when set")
        if self.s_max is not None and self.s_max < 0:
            raise ValueError("s_max must be nonnegative when set")
        if not 0 < self.confidence < 1:
            raise ValueError("confidence must lie in (0, 1)")
        return self

    def canonical_json(self) -> str:
        payload = self.model_dump()
        # output placement and worker count never change results
        payload.pop("output_dir", None)
        payload.pop("workers", None)
        return json.dumps(payload, sort_keys=True, default=str)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


class ConfigTool:
    """
    Loads laboratory defaults from a JSON file and merges them with CLI values.

    Expected JSON structure (sections are flattened into RunConfig fields):

    {
      "construction": { "max_word_len": 1000000, "stage_limit": 64 },
      "correlation":  { "tolerance": "0", "p_max": 8, ... },
      "sampling":     { "samples": 100000, "seed": 20240601, ... },
      "runtime":      { "workers": 1, "output_dir": "lab_runs" }
    }
    """

    WORKERS_ENV = "RANKONE_WORKERS"

    def __init__(self, defaults_path: str | None = None) -> None:
        base_dir = Path(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
        default_path = base_dir / "lab_defaults.json"
        self.path = Path(defaults_path or default_path)

    def load_defaults(self) -> Dict[str, Any]:
        if not self.path.exists():
            raise ConfigError(f"Defaults file not found at: {self.path}")

        with self.path.open("r", encoding="utf-8") as f:
            sections = json.load(f)

        flat: Dict[str, Any] = {}
        for section, values in sections.items():
            if not isinstance(values, dict):
                raise ConfigError(f"section {section!r} must be an object")
            for key, value in values.items():
                if key in flat:
                    raise ConfigError(f"duplicate default key {key!r}")
                flat[key] = value
        return flat

    def build_run_config(self, command: str, overrides: Dict[str, Any]) -> RunConfig:
        values = self.load_defaults()
        values.update({k: v for k, v in overrides.items() if v is not None})

        workers = os.getenv(self.WORKERS_ENV)
        if workers:
            try:
                values["workers"] = int(workers)
            except ValueError as e:
                raise ConfigError(f"{self.WORKERS_ENV} must be an integer, got {workers!r}") from e

        values["command"] = command
        try:
            return RunConfig(**values)
        except ValueError as e:
            raise ConfigError(str(e)) from e
