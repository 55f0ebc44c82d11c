from enum import Enum

from .metaEnum import MetaEnum


class Mode(Enum, metaclass=MetaEnum):
    """The Mode class is an enumeration of the task branches a network
    carries: both (MTL) or one of them with the other branch removed.
    """

    MTL = "MTL"
    SED = "SED"
    ASC = "ASC"

    @property
    def has_sed(self) -> bool:
        return self is not Mode.ASC

    @property
    def has_asc(self) -> bool:
        return self is not Mode.SED

    @property
    def code(self) -> int:
        """integer code stored in checkpoints"""
        return list(Mode).index(self)

    @classmethod
    def from_code(cls, code: int) -> "Mode":
        return list(Mode)[code]
