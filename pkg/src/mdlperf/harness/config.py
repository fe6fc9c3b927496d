"""Experiment configuration (flat JSON) and SNR grid handling."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from ..scenario import MODELS, STOCHASTIC, Scenario, make_scenario


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    L: int = 10
    n: int = 100
    doas_deg: list[float] = field(default_factory=lambda: [-2.0, 2.0])
    model: str = STOCHASTIC
    noise_var: float = 1.0
    snr_start: float = -6.0
    snr_stop: float = 2.0
    snr_step: float = 0.25
    trials: int = 2000
    seed: int = 0
    workers: int = 1
    out: str | None = None
    report: str | None = None
    redraw_deterministic_signal: bool = False

    def __post_init__(self):
        self.doas_deg = [float(t) for t in self.doas_deg]
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.snr_step > 0:
            raise ConfigError("snr step must be positive")
        if self.snr_start > self.snr_stop:
            raise ConfigError("snr start must not exceed stop")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        try:
            self.scenario(self.snr_start)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def d(self) -> int:
        return len(self.doas_deg)

    def snr_grid(self) -> np.ndarray:
        count = int(np.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        return np.round(self.snr_start + self.snr_step * np.arange(count), 10)

    def scenario(self, snr_db: float) -> Scenario:
        return make_scenario(self.L, self.n, self.doas_deg, snr_db, self.noise_var, self.model)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        snr = raw.pop("snr_db", None)
        if isinstance(snr, dict):
            for key in ("start", "stop", "step"):
                if key in snr:
                    raw[f"snr_{key}"] = snr[key]
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Read a JSON config (if given) and apply non-None overrides on top."""
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(raw)
