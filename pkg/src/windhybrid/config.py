"""Flat ``section.key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Every key has a default, so an
empty file runs the bundled synthetic dataset.
"""
import os
from dataclasses import dataclass, replace

from .data import DEFAULT_SCHEMA, SplitSpec
from .nn.network import NetworkSpec
from .nn.train import TrainConfig

DEFAULT_STEPS = (1, 3, 6, 12, 24, 48, 96, 192, 384)


class ConfigError(ValueError):
    pass


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _steps(text):
    if isinstance(text, (tuple, list)):
        vals = tuple(int(v) for v in text)
    else:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    if not vals or any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("steps must be strictly increasing positive integers")
    return vals


def _approach(text):
    t = str(text).strip().lower()
    if t not in ("1", "2", "both"):
        raise ValueError("approach must be 1, 2 or both")
    return t


def _mode(text):
    t = text.strip().lower()
    if t not in ("replace", "residual"):
        raise ValueError("stage2_mode must be replace or residual")
    return t


# dotted key -> (attribute, parser)
KEYS = {
    "data.path": ("data_path", str),
    "data.timestamp_col": ("timestamp_col", str),
    "data.speed_col": ("speed_col", str),
    "data.power_col": ("power_col", str),
    "data.direction_col": ("direction_col", str),
    "data.include_direction": ("include_direction", _bool),
    "synth.length": ("synth_length", int),
    "synth.seed": ("synth_seed", int),
    "split.train": ("train_fraction", float),
    "split.val": ("val_fraction", float),
    "split.test": ("test_fraction", float),
    "model.lookback": ("lookback", int),
    "model.conv_filters": ("conv_filters", int),
    "model.conv_kernel": ("conv_kernel", int),
    "model.lstm_units": ("lstm_units", int),
    "model.dense_hidden": ("dense_hidden", int),
    "train.max_epochs": ("max_epochs", int),
    "train.batch_size": ("batch_size", int),
    "train.learning_rate": ("learning_rate", float),
    "train.optimizer": ("optimizer", str),
    "train.patience": ("patience", int),
    "experiment.approach": ("approach", _approach),
    "experiment.steps": ("steps", _steps),
    "experiment.stage2_mode": ("stage2_mode", _mode),
    "experiment.seed": ("seed", int),
    "output.dir": ("output_dir", str),
}


@dataclass(frozen=True)
class RunConfig:
    data_path: str = ""  # empty -> synthetic series
    timestamp_col: str = DEFAULT_SCHEMA["timestamp"]
    speed_col: str = DEFAULT_SCHEMA["speed"]
    power_col: str = DEFAULT_SCHEMA["power"]
    direction_col: str = DEFAULT_SCHEMA["direction"]
    include_direction: bool = False
    synth_length: int = 1600
    synth_seed: int = 7
    train_fraction: float = 0.70
    val_fraction: float = 0.15
    test_fraction: float = 0.15
    lookback: int = 4
    conv_filters: int = 350
    conv_kernel: int = 2
    lstm_units: int = 350
    dense_hidden: int = 300
    max_epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    patience: int = 10
    approach: str = "both"
    steps: tuple = DEFAULT_STEPS
    stage2_mode: str = "replace"
    seed: int = 42
    output_dir: str = "out"

    def __post_init__(self):
        # surface invalid combinations at load time, naming the offending key
        checks = [
            ("split.train", lambda: self.split_spec),
            ("model.lookback", lambda: self.network_spec),
            ("train.max_epochs", lambda: self.train_config),
            ("experiment.steps", lambda: _steps(self.steps)),
            ("experiment.approach", lambda: _approach(self.approach)),
            ("experiment.stage2_mode", lambda: _mode(self.stage2_mode)),
        ]
        for key, fn in checks:
            try:
                fn()
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        if self.synth_length < 10:
            raise ConfigError("synth.length: must be >= 10")

    @property
    def schema(self):
        return {"timestamp": self.timestamp_col, "speed": self.speed_col,
                "power": self.power_col, "direction": self.direction_col}

    @property
    def split_spec(self):
        return SplitSpec(self.train_fraction, self.val_fraction, self.test_fraction)

    @property
    def n_features(self):
        return 3 if self.include_direction else 2

    @property
    def network_spec(self):
        return NetworkSpec(input_steps=self.lookback, input_features=self.n_features,
                           conv_filters=self.conv_filters, conv_kernel=self.conv_kernel,
                           lstm_units=self.lstm_units, dense_hidden=self.dense_hidden,
                           output_features=2)

    @property
    def train_config(self):
        return TrainConfig(self.max_epochs, self.batch_size, self.learning_rate,
                           self.optimizer, self.patience, self.seed)

    @property
    def approaches(self):
        return (1, 2) if self.approach == "both" else (int(self.approach),)

    def snapshot(self):
        """Resolved configuration keyed by dotted names (JSON-serialisable)."""
        out = {}
        for key, (attr, _) in KEYS.items():
            v = getattr(self, attr)
            out[key] = list(v) if isinstance(v, tuple) else v
        return out

    def with_overrides(self, **kw):
        try:
            return replace(self, **kw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def parse_config(text, base_dir=None):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown config key: {key}")
        attr, parser = KEYS[key]
        try:
            values[attr] = parser(val)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    if values.get("data_path") and base_dir and not os.path.isabs(values["data_path"]):
        values["data_path"] = os.path.normpath(os.path.join(base_dir, values["data_path"]))
    return RunConfig(**values)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))


def from_snapshot(snap):
    values = {}
    for key, v in snap.items():
        if key not in KEYS:
            raise ConfigError(f"unknown config key: {key}")
        attr, _ = KEYS[key]
        values[attr] = tuple(v) if isinstance(v, list) else v
    return RunConfig(**values)

