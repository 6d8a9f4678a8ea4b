import os
import json
from datetime import datetime, timezone
from fractions import Fraction


class LabEncoder(json.JSONEncoder):
    """JSON encoder for datetimes and exact rationals."""
    def default(self, obj):
        if isinstance(obj, datetime):
            return obj.isoformat()
        if isinstance(obj, Fraction):
            return str(obj)
        return super().default(obj)


class RunLogger:
    """
    Writes every step of one command run into a structured JSONL trail.
    Each line is a JSON entry representing one event. CSV, text reports and
    results.json sit next to it and carry no wall-clock data.
    """

    def __init__(self, output_dir: str, command: str, digest: str):
        self.output_dir = output_dir
        os.makedirs(self.output_dir, exist_ok=True)

        # Run id is the config digest, so reruns land in the same directory
        self.run_id = digest[:8]
        self.command = command
        self.run_dir = os.path.join(self.output_dir, f"run_{command}_{self.run_id}")
        os.makedirs(self.run_dir, exist_ok=True)

        self.log_path = os.path.join(self.run_dir, "run_trail.jsonl")
        self.results_path = os.path.join(self.run_dir, "results.json")
        self.files = []

        with open(self.log_path, "w") as f:
            f.write("")  # create empty file

        print(f"[RunLogger] Run ID: {self.run_id}")
        print(f"[RunLogger] Logging to: {self.run_dir}")

    # ----------------------------------------------------------------------
    # INTERNAL UTILS
    # ----------------------------------------------------------------------

    def _timestamp(self):
        return datetime.now(timezone.utc).isoformat()

    def _write(self, entry: dict):
        """Append a JSON entry as a single line."""
        entry["timestamp"] = self._timestamp()
        entry["run_id"] = self.run_id

        with open(self.log_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry, cls=LabEncoder) + "\n")

    def path(self, name: str) -> str:
        return os.path.join(self.run_dir, name)

    # ----------------------------------------------------------------------
    # PUBLIC LOGGING METHODS (called by orchestrator & reports)
    # ----------------------------------------------------------------------

    def log_config(self, config_json: str):
        self._write({"type": "config", "config": json.loads(config_json)})

    def log_step(self, step: str, **payload):
        self._write({"type": step, **payload})

    def log_report(self, kind: str, summary: dict):
        """
        Store one verification report summary.
        REQUIRED BY every reports/*.py analyze()
        """
        self._write({"type": f"{kind}_report", "summary": summary})

    def log_error(self, error: Exception):
        self._write({"type": "error", "error": type(error).__name__, "message": str(error)})

    def write_csv(self, name: str, frame) -> str:
        """Write a pandas frame of preformatted strings; byte-stable across runs."""
        path = self.path(name)
        frame.to_csv(path, index=False, lineterminator="\n")
        self.files.append(name)
        self._write({"type": "csv", "file": name, "rows": len(frame)})
        print(f"   💾 CSV written: {name} ({len(frame)} rows)")
        return path

    def write_text(self, name: str, text: str) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        self.files.append(name)
        self._write({"type": "file", "file": name})
        print(f"   💾 File written: {name}")
        return path

    def finalize_and_persist(self, verdict: str, summary: dict, config_json: str):
        """
        Finalize the run with its verdict. Creates results.json.
        Called by the orchestrator after the command completes.
        """
        self._write({"type": "run_summary", "verdict": verdict})

        results = {
            "run_id": self.run_id,
            "command": self.command,
            "verdict": verdict,
            "summary": summary,
            "config": json.loads(config_json),
            "files": sorted(self.files),
        }

        with open(self.results_path, "w", encoding="utf-8") as f:
            json.dump(results, f, indent=2, sort_keys=True, cls=LabEncoder)
            f.write("\n")

        print(f"\n✅ [RunLogger] Run finalized!")
        print(f"   📋 Run ID: {self.run_id}")
        print(f"   📁 Directory: {self.run_dir}")
        print(f"   📄 Results: {os.path.basename(self.results_path)}")
