import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from munch import Munch, munchify

from .dataset.manifest import LabelVocabulary
from .enum.featuresetenum import FeatureSet
from .enum.modeenum import Mode
from .exception.exceptions import ConfigMismatchError, InvalidConfigError
from .model.config import PRESETS, ModelConfig, OptimizerConfig, preset_evaluation
from .utils import merge

logger = logging.getLogger(__name__)

SETTINGS_FILE = "bsk.yml"


def _get_config(path: Union[Path, str], filename: str) -> Dict[Any, Any]:
    """read the contents of a YAML (or JSON) file and return it as a
    dictionary.

    Args:
        path (Union[Path, str]): path to the file, or a directory holding
        ``filename``
        filename (str): the settings file name

    Raises:
        InvalidConfigError: raised if the file is missing, unparsable or
        not a mapping

    Returns:
        Dict[Any, Any]: contents of the file
    """
    path = Path(path)
    if path.is_dir():
        path = path / filename
    if not path.is_file():
        raise InvalidConfigError(f"settings file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            content = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise InvalidConfigError(f"cannot parse {path}: {e}")
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise InvalidConfigError(f"{path} must hold a mapping of settings")
    return content


def get_config(
    path: Optional[Union[Path, str]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Dict[Any, Any]:
    """reads the bundled defaults and deep-merges the user file and then
    the command-line overrides over them.

    Args:
        path (Optional[Union[Path, str]], optional): user settings file.
        Defaults to None.
        overrides (Optional[Dict[str, Any]], optional): values that win
        over both files. Defaults to None.

    Returns:
        Dict[Any, Any]: merged settings
    """
    config = _get_config(Path(__file__).parent / "data", SETTINGS_FILE)
    if path:
        config = merge(config, _get_config(path, SETTINGS_FILE))
    if overrides:
        config = merge(config, overrides)
    return config


def get_settings(
    path: Optional[Union[Path, str]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Munch:
    """merged settings as a Munch for attribute access"""
    return munchify(get_config(path, overrides))


@dataclass(frozen=True)
class RunPaths:
    out: Path
    manifest: Path
    feature_dir: Path
    checkpoint: Path
    training_log: Path
    report: Path

    @classmethod
    def from_settings(cls, paths: Munch) -> "RunPaths":
        out = Path(paths.get("out") or ".")

        def resolve(key: str) -> Path:
            value = paths.get(key)
            if not value:
                raise InvalidConfigError(f"paths.{key} must be set")
            value = Path(value)
            return value if value.is_absolute() else out / value

        return cls(
            out,
            *(
                resolve(key)
                for key in ("manifest", "feature_dir", "checkpoint", "training_log", "report")
            ),
        )

    @property
    def index(self) -> Path:
        return self.feature_dir / "index.json"


@dataclass(frozen=True)
class SynthSettings:
    seed: int = 0
    sample_rate: int = 16000
    duration: float = 4.0


@dataclass(frozen=True)
class RunConfig:
    """typed view of the merged settings of one command-line run"""

    feature_set: FeatureSet
    mode: Mode
    seed: int
    sed_threshold: float
    granularity: float
    asc_average: str
    asc_level: str
    preset: str
    model_overrides: Dict[str, Any]
    window_seconds: float
    f_min: float
    f_max: Optional[float]
    epochs: int
    optimizer: OptimizerConfig
    paths: RunPaths
    synth: SynthSettings = field(default_factory=SynthSettings)
    workers: int = 1

    @classmethod
    def from_settings(cls, settings: Munch) -> "RunConfig":
        """validates the munchified settings.

        Raises:
            InvalidConfigError: raised naming the first invalid key

        Returns:
            RunConfig: the run configuration
        """

        def fail(key: str, reason: str):
            raise InvalidConfigError(f"settings.{key}: {reason}")

        try:
            feature_set = FeatureSet.from_name(settings.feature_set)
        except ValueError as e:
            fail("feature_set", str(e))
        mode = str(settings.mode).upper()
        if mode not in Mode:
            fail("mode", f"expected one of {[m.value for m in Mode]}")

        preset = settings.preset
        if preset not in PRESETS:
            fail("preset", f"unknown preset, choose from {sorted(PRESETS)}")
        evaluation = preset_evaluation(preset)

        threshold = float(settings.sed_threshold)
        if not 0.0 <= threshold <= 1.0:
            fail("sed_threshold", "must lie in [0, 1]")
        granularity = settings.granularity
        granularity = float(
            evaluation["granularity"] if granularity is None else granularity
        )
        if granularity <= 0:
            fail("granularity", "must be positive")
        asc_average = str(settings.asc_average)
        if asc_average not in ("micro", "macro"):
            fail("asc_average", "must be micro or macro")
        asc_level = settings.asc_level or evaluation["asc_level"]
        if asc_level not in ("clip", "file"):
            fail("asc_level", "must be clip or file")

        model_overrides = dict(settings.get("model") or {})
        unknown = set(model_overrides) - set(ModelConfig.__dataclass_fields__)
        if unknown:
            fail("model", f"unknown fields {sorted(unknown)}")

        features = settings.features
        training = settings.training
        epochs = int(training.epochs)
        if epochs < 0:
            fail("training.epochs", "must be >= 0")
        try:
            optimizer = OptimizerConfig(
                learning_rate=float(training.learning_rate),
                beta1=float(training.beta1),
                beta2=float(training.beta2),
                epsilon=float(training.epsilon),
                batch_size=int(training.batch_size),
            )
        except InvalidConfigError as e:
            fail("training", str(e))

        workers = int(settings.get("workers") or 1)
        if workers < 1:
            fail("workers", "must be >= 1")
        synth = settings.get("synth") or {}

        return cls(
            feature_set=feature_set,
            mode=Mode(mode),
            seed=int(settings.seed),
            sed_threshold=threshold,
            granularity=granularity,
            asc_average=asc_average,
            asc_level=asc_level,
            preset=preset,
            model_overrides=model_overrides,
            window_seconds=float(features.window_seconds),
            f_min=float(features.f_min),
            f_max=None if features.f_max is None else float(features.f_max),
            epochs=epochs,
            optimizer=optimizer,
            paths=RunPaths.from_settings(settings.paths),
            synth=SynthSettings(
                int(synth.get("seed", 0)),
                int(synth.get("sample_rate", 16000)),
                float(synth.get("duration", 4.0)),
            ),
            workers=workers,
        )

    def _preset_value(self, key: str):
        value = self.model_overrides.get(key)
        return PRESETS[self.preset][key] if value is None else value

    @property
    def mels(self) -> int:
        return int(self._preset_value("M"))

    @property
    def frames(self) -> int:
        return int(self._preset_value("T"))

    def model_config(self, vocab: LabelVocabulary, in_channels: int) -> ModelConfig:
        """the network configuration for features with ``in_channels``
        channels and the class counts of ``vocab``. Class counts the preset
        leaves open come from the vocabulary.

        Raises:
            ConfigMismatchError: raised if fixed class counts disagree with
            the vocabulary
        """
        sizes = {}
        for key, actual in (("C_SED", vocab.n_events), ("C_ASC", vocab.n_scenes)):
            configured = self._preset_value(key)
            if configured is not None and int(configured) != actual:
                raise ConfigMismatchError(
                    f"{key}={configured} in preset '{self.preset}' but the "
                    f"extracted vocabulary has {actual} classes"
                )
            sizes[key] = actual
        overrides = {**self.model_overrides, **sizes, "in_channels": in_channels}
        return ModelConfig.from_preset(self.preset, overrides)
