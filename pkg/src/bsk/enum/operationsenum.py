from enum import Enum

from .metaEnum import MetaEnum


class OperationsEnum(Enum, metaclass=MetaEnum):
    """The OperationsEnum class is an enumeration class that defines the
    command-line operations: EXTRACT, TRAIN, EVALUATE and SYNTH. It uses the
    MetaEnum metaclass so that membership tests accept the raw command name.
    """

    EXTRACT = "extract"
    TRAIN = "train"
    EVALUATE = "evaluate"
    SYNTH = "synth"
