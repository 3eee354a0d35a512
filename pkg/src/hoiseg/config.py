"""Pipeline configuration: one declarative JSON file, overridable from the
command line, hashed into every output manifest for reproducibility."""

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .fsm import default_window_params


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    # detection filtering
    min_score: float = 0.8
    # hand status FSM; None derives window/threshold from fps
    window_len: int | None = None
    window_threshold: int | None = None
    strict_window: bool = False
    # clip filtering and reconnection
    min_duration_s: float = 0.5
    boundary_fraction: float = 0.2
    similarity_provider: str = "none"
    sim_threshold: float | str = 0.5  # number, or "roc:<pairs.csv>"
    similarity_polarity: str = "similarity"
    reconnect_max_gap_s: float | None = None
    # fusion
    iosa_threshold: float = 0.5
    attention_fallback: str = "right"

    def validate(self) -> "PipelineConfig":
        problems = []
        if not (0.0 <= self.min_score <= 1.0):
            problems.append(f"min_score must be in [0, 1], got {self.min_score}")
        if (self.window_len is None) != (self.window_threshold is None):
            problems.append("window_len and window_threshold must be set together")
        if self.window_len is not None:
            if self.window_len < 1:
                problems.append(f"window_len must be >= 1, got {self.window_len}")
            elif self.window_threshold is not None and not (
                1 <= self.window_threshold <= self.window_len
            ):
                problems.append(
                    f"window_threshold must be in [1, window_len], got "
                    f"{self.window_threshold}"
                )
        if self.min_duration_s < 0:
            problems.append(f"min_duration_s must be >= 0, got {self.min_duration_s}")
        if not (0.0 < self.boundary_fraction <= 1.0):
            problems.append(
                f"boundary_fraction must be in (0, 1], got {self.boundary_fraction}"
            )
        if isinstance(self.sim_threshold, str):
            if not self.sim_threshold.startswith("roc:"):
                problems.append(
                    f"sim_threshold must be a number or 'roc:<pairs.csv>', "
                    f"got {self.sim_threshold!r}"
                )
            elif self.similarity_provider == "none":
                problems.append("roc sim_threshold requires a similarity provider")
        elif not (0.0 <= self.sim_threshold <= 1.0):
            problems.append(f"sim_threshold must be in [0, 1], got {self.sim_threshold}")
        if self.similarity_polarity not in ("similarity", "distance"):
            problems.append(
                f"similarity_polarity must be 'similarity' or 'distance', "
                f"got {self.similarity_polarity!r}"
            )
        if self.reconnect_max_gap_s is not None and self.reconnect_max_gap_s < 0:
            problems.append(
                f"reconnect_max_gap_s must be >= 0, got {self.reconnect_max_gap_s}"
            )
        if self.iosa_threshold < 0:
            problems.append(f"iosa_threshold must be >= 0, got {self.iosa_threshold}")
        if self.attention_fallback not in ("left", "right"):
            problems.append(
                f"attention_fallback must be 'left' or 'right', "
                f"got {self.attention_fallback!r}"
            )
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def window_params(self, fps: float) -> tuple[int, int]:
        if self.window_len is not None:
            return self.window_len, self.window_threshold
        return default_window_params(fps)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def with_overrides(self, **overrides) -> "PipelineConfig":
        """New config with any non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return dataclasses.replace(self, **changes)


def load_config(path) -> PipelineConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    try:
        return PipelineConfig().with_overrides(**data)
    except TypeError as exc:
        raise ConfigError(str(exc))
