class BskError(Exception):
    """The BskError class is the base of every error raised by the toolkit.
    It provides a descriptive message of the error to help identify the
    issue. The error code is also provided so that command-line callers can
    report failures in a machine-readable way."""

    # error code to the exception to help identify the issue.
    error_code = "BSK_ERROR"
    default_message = "An unspecified toolkit error occurred."

    def __init__(self, message: str = None) -> None:
        """initializes the error with a descriptive message. It calls the
        constructor of the base class with the error message.

        Args:
            message (str, optional): descriptive message of the error.
            Defaults to the class-level default message.
        """
        super().__init__(message or self.default_message)

    def __str__(self):
        """returns a string representation of the exception.

        Returns:
            str: string representation of the exception
        """
        return str(self.args[0]) if self.args else ""

    def __repr__(self):
        """returns a string representation of the exception that can be used
        to recreate the object.

        Returns:
            str: string representation of the exception
        """
        return f'{self.__class__.__name__}("{self.args}")'

    def to_dict(self) -> dict:
        """machine-readable form used by the command-line error list"""
        return {"error_code": self.error_code, "message": str(self)}


class InvalidOperationKeyError(BskError, KeyError):
    """raised when a command name does not map to an operation"""

    error_code = "INVALID_KEY"
    default_message = "Invalid operations key"


class InvalidConfigError(BskError, ValueError):
    """raised when a configuration value violates its invariants, e.g. a
    window shorter than two samples or a mel bank with empty filters."""

    error_code = "INVALID_CONFIG"
    default_message = "Invalid configuration."


class ShapeError(BskError, ValueError):
    """raised when array dimensions do not line up"""

    error_code = "SHAPE_MISMATCH"
    default_message = "Array shapes do not match."


class TooShortError(BskError, ValueError):
    """raised when a clip holds fewer samples than one analysis window"""

    error_code = "TOO_SHORT"
    default_message = "Clip is shorter than one analysis window."


class InvalidInputError(BskError, ValueError):
    error_code = "INVALID_INPUT"
    default_message = "Invalid input."


class UnknownClassError(BskError, KeyError):
    """raised when an annotation label is missing from the vocabulary"""

    error_code = "UNKNOWN_CLASS"
    default_message = "Unknown class label."

    def __init__(self, label: str, known: list[str] = None) -> None:
        self.label = label
        message = f"Unknown class label '{label}'"
        if known is not None:
            message += f"; known classes: {list(known)}"
        super().__init__(message)


class WavParseError(BskError, ValueError):
    """The WavParseError class groups the failures of the RIFF/WAVE reader.
    Each subclass names one failure mode so callers can tell a damaged header
    from a codec the reader does not support."""

    error_code = "WAV_PARSE"
    default_message = "Could not parse WAV file."

    def __init__(self, message: str = None, path=None) -> None:
        self.path = path
        if path is not None and message:
            message = f"{path}: {message}"
        super().__init__(message)


class MalformedHeaderError(WavParseError):
    error_code = "WAV_MALFORMED_HEADER"
    default_message = "Malformed RIFF/WAVE header."


class UnsupportedCodecError(WavParseError):
    error_code = "WAV_UNSUPPORTED_CODEC"
    default_message = "Unsupported WAV codec."


class TruncatedDataError(WavParseError):
    error_code = "WAV_TRUNCATED"
    default_message = "WAV data chunk is truncated."


class AnnotationParseError(BskError, ValueError):
    """raised for an annotation line that does not hold a valid
    onset/offset/label triple. The line number is 1-based."""

    error_code = "ANNOTATION_PARSE"
    default_message = "Could not parse annotation line."

    def __init__(self, line_number: int, message: str, path=None) -> None:
        self.line_number = line_number
        self.path = path
        location = f"{path}:{line_number}" if path else f"line {line_number}"
        super().__init__(f"{location}: {message}")


class FeatureFormatError(BskError, ValueError):
    error_code = "FEATURE_FORMAT"
    default_message = "Invalid BFT1 feature file."


class CheckpointFormatError(BskError, ValueError):
    error_code = "CHECKPOINT_FORMAT"
    default_message = "Invalid BMK1 checkpoint file."


class ConfigMismatchError(BskError, ValueError):
    """raised before training or evaluation when the stored features do not
    fit the configured network (channel count, frame count or mel count)."""

    error_code = "CONFIG_MISMATCH"
    default_message = "Configuration does not match the extracted features."


class MissingArtifactError(BskError, FileNotFoundError):
    error_code = "MISSING_ARTIFACT"
    default_message = "A required artifact was not found."


class ArtifactIOError(BskError, OSError):
    """raised when an existing file or directory cannot be read or written"""

    error_code = "IO_ERROR"
    default_message = "Could not read or write an artifact."


class SynthSpecError(BskError, ValueError):
    """raised for an invalid synthesis spec; the message carries the field
    path (e.g. ``clips[2].events[0].itd``) of the offending value."""

    error_code = "SYNTH_SPEC"
    default_message = "Invalid synthesis spec."

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericalError(BskError, ArithmeticError):
    """raised when a training step produces a non-finite loss"""

    error_code = "NUMERICAL"
    default_message = "Training produced a non-finite loss."


def from_os_error(error: OSError, path=None) -> BskError:
    """wraps an OSError so it is reported with an error code like any other
    item failure. A missing file becomes a MissingArtifactError."""
    location = path or error.filename
    reason = error.strerror or str(error)
    message = f"{location}: {reason}" if location else reason
    if isinstance(error, FileNotFoundError):
        return MissingArtifactError(message)
    return ArtifactIOError(message)
