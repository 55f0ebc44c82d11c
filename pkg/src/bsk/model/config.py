from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Optional, Tuple

from ..exception.exceptions import InvalidConfigError

# The two full-size corpus settings plus two desk-scale sizes. C_SED/C_ASC
# of None are taken from the extracted vocabulary.
PRESETS: Dict[str, Dict[str, Any]] = {
    "tut2016_2017": {
        "M": 64,
        "T": 500,
        "kernel": [3, 3],
        "P1": 128,
        "P2": 256,
        "MP": [8, 2, 2, 25, 20],
        "Q": 64,
        "G": [128, 512, 256],
        "C_SED": 25,
        "C_ASC": 4,
        "granularity": 0.04,
        "asc_level": "clip",
    },
    "tut_sed_2009": {
        "M": 40,
        "T": 1000,
        "kernel": [5, 5],
        "P1": 192,
        "P2": 96,
        "MP": [5, 4, 2, 25, 20],
        "Q": 128,
        "G": [128, 512, 256],
        "C_SED": 63,
        "C_ASC": 10,
        "granularity": 1.0,
        "asc_level": "file",
    },
    "micro": {
        "M": 16,
        "T": 200,
        "kernel": [3, 3],
        "P1": 16,
        "P2": 16,
        "MP": [4, 2, 2, 10, 20],
        "Q": 16,
        "G": [32, 32, 16],
        "C_SED": None,
        "C_ASC": None,
        "granularity": 0.04,
        "asc_level": "clip",
    },
    "tiny": {
        "M": 8,
        "T": 8,
        "kernel": [3, 3],
        "P1": 2,
        "P2": 2,
        "MP": [2, 2, 2, 2, 2],
        "Q": 4,
        "G": [4, 4, 4],
        "C_SED": 3,
        "C_ASC": 2,
        "granularity": 0.04,
        "asc_level": "clip",
    },
}

# keys of a preset that describe evaluation rather than the network
_EVAL_KEYS = ("granularity", "asc_level")


@dataclass(frozen=True)
class ModelConfig:
    M: int
    T: int
    kernel: Tuple[int, int]
    P1: int
    P2: int
    MP: Tuple[int, int, int, int, int]
    Q: int
    G: Tuple[int, int, int]
    C_SED: int
    C_ASC: int
    in_channels: int = 1
    asc_loss_weight: float = 0.0001

    def __post_init__(self):
        object.__setattr__(self, "kernel", tuple(int(k) for k in self.kernel))
        object.__setattr__(self, "MP", tuple(int(p) for p in self.MP))
        object.__setattr__(self, "G", tuple(int(g) for g in self.G))
        self.validate()

    def validate(self):
        if len(self.kernel) != 2 or min(self.kernel) < 1:
            raise InvalidConfigError(f"kernel must be (h, w), got {self.kernel}")
        if len(self.MP) != 5 or min(self.MP) < 1:
            raise InvalidConfigError(f"MP needs five factors, got {self.MP}")
        if len(self.G) != 3 or min(self.G) < 1:
            raise InvalidConfigError(f"G needs three widths, got {self.G}")
        for name in ("M", "T", "P1", "P2", "Q", "C_SED", "C_ASC", "in_channels"):
            value = getattr(self, name)
            if value is None or int(value) < 1:
                raise InvalidConfigError(f"{name} must be a positive integer")
        mel_pool = self.MP[0] * self.MP[1] * self.MP[2]
        if self.M % mel_pool:
            raise InvalidConfigError(
                f"M={self.M} is not divisible by mp1*mp2*mp3={mel_pool}"
            )
        time_pool = self.MP[3] * self.MP[4]
        if time_pool > self.T or self.T % time_pool:
            raise InvalidConfigError(
                f"T={self.T} must be a multiple of mp4*mp5={time_pool}"
            )
        if self.Q % 2:
            raise InvalidConfigError(
                f"Q={self.Q} must be even, each GRU direction gets Q/2 units"
            )
        if not self.asc_loss_weight > 0:
            raise InvalidConfigError(
                f"asc_loss_weight must be positive, got {self.asc_loss_weight}"
            )

    @property
    def pooled_mels(self) -> int:
        return self.M // (self.MP[0] * self.MP[1] * self.MP[2])

    @property
    def pooled_frames(self) -> int:
        return self.T // (self.MP[3] * self.MP[4])

    @classmethod
    def from_preset(
        cls, name: str, overrides: Optional[Dict[str, Any]] = None
    ) -> "ModelConfig":
        """builds a configuration from a named preset with optional field
        overrides (e.g. the vocabulary sizes or the input channel count).

        Args:
            name (str): preset name, see PRESETS
            overrides (Optional[Dict[str, Any]], optional): replacement
            values. Defaults to None.

        Raises:
            InvalidConfigError: raised for an unknown preset or field

        Returns:
            ModelConfig: the validated configuration
        """
        if name not in PRESETS:
            raise InvalidConfigError(
                f"unknown model preset '{name}', choose from {sorted(PRESETS)}"
            )
        values = {
            k: v for k, v in PRESETS[name].items() if k not in _EVAL_KEYS
        }
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        unknown = set(overrides) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidConfigError(f"unknown model fields: {sorted(unknown)}")
        return cls(**{**values, **overrides})

    def with_values(self, **changes) -> "ModelConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            k: list(v) if isinstance(v, tuple) else v
            for k, v in asdict(self).items()
        }


def preset_evaluation(name: str) -> Dict[str, Any]:
    """granularity and ASC decision level that go with a preset"""
    preset = PRESETS.get(name, {})
    return {k: preset[k] for k in _EVAL_KEYS if k in preset}


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 4
    frozen: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.learning_rate < 0:
            raise InvalidConfigError("learning_rate must be >= 0")
        if self.batch_size < 1:
            raise InvalidConfigError("batch_size must be >= 1")
        object.__setattr__(self, "frozen", tuple(self.frozen))
