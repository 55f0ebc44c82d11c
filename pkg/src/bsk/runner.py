from .enum.operationsenum import OperationsEnum
from .exception.exceptions import InvalidOperationKeyError
from .operator import Operation


def run(arg: str, **kwargs) -> dict:
    """The objective of the run function is to take a command name and the
    run configuration, and return the summary of the matching worker.

    Args:
        arg (str): command name, one of the OperationsEnum values
        kwargs: ``config`` (RunConfig) and command options such as ``spec``

    Raises:
        InvalidOperationKeyError: raised for an unknown command

    Returns:
        dict: summary with ``command``, ``ok``, ``outputs`` and ``errors``
    """
    if arg not in OperationsEnum:
        raise InvalidOperationKeyError(f"Invalid operation: {arg}")
    return Operation().perform_operation(OperationsEnum(arg), kwargs)
