from enum import Enum

from .metaEnum import MetaEnum


class FeatureSet(Enum, metaclass=MetaEnum):
    """The FeatureSet class enumerates the feature-set layouts a clip can be
    turned into. The value is the layout tag written into feature files, so
    the order must never change.
    """

    MEL_1CH = 0
    MEL_2CH = 1
    MEL_PHASE = 2
    MEL_IPD = 3
    MEL_SINCOS = 4
    MEL_GCC = 5
    MEL_ILD = 6

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def channel_count(self) -> int:
        """number of stacked channels in the produced tensor"""
        return _CHANNELS[self]

    @property
    def binaural(self) -> bool:
        return self is not FeatureSet.MEL_1CH

    @classmethod
    def from_name(cls, name: str) -> "FeatureSet":
        """looks a feature set up by its label (``MelSinCos``) or member name
        (``MEL_SINCOS``), case-insensitively.

        Args:
            name (str): label or member name

        Raises:
            ValueError: raised if the name does not denote a feature set

        Returns:
            FeatureSet: the matching member
        """
        key = str(name).strip().lower()
        for member in cls:
            if key in (member.label.lower(), member.name.lower()):
                return member
        raise ValueError(f"Unknown feature set: {name}")


_LABELS = {
    FeatureSet.MEL_1CH: "Mel1ch",
    FeatureSet.MEL_2CH: "Mel2ch",
    FeatureSet.MEL_PHASE: "MelPhase",
    FeatureSet.MEL_IPD: "MelIPD",
    FeatureSet.MEL_SINCOS: "MelSinCos",
    FeatureSet.MEL_GCC: "MelGCC",
    FeatureSet.MEL_ILD: "MelILD",
}

_CHANNELS = {
    FeatureSet.MEL_1CH: 1,
    FeatureSet.MEL_2CH: 2,
    FeatureSet.MEL_PHASE: 4,
    FeatureSet.MEL_IPD: 3,
    FeatureSet.MEL_SINCOS: 4,
    FeatureSet.MEL_GCC: 3,
    FeatureSet.MEL_ILD: 3,
}
