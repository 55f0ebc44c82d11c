from .enum.operationsenum import OperationsEnum
from .exception.exceptions import InvalidOperationKeyError
from .processor import (
    process_evaluate,
    process_extract,
    process_synth,
    process_train,
)


class Operation:
    """Class that maps the command-line commands to their processors."""

    def __init__(self):
        """Initializes an instance of the Operation class.

        The 'operations' attribute is a dictionary containing the available
        operations.
        """
        self.operations = {
            OperationsEnum.EXTRACT: process_extract,
            OperationsEnum.TRAIN: process_train,
            OperationsEnum.EVALUATE: process_evaluate,
            OperationsEnum.SYNTH: process_synth,
        }

    def perform_operation(self, operation_key, kwargs) -> dict:
        """Performs the specified operation.

        Args:
            operation_key (OperationsEnum): the enum relevant to the operation
            kwargs (dict): the run configuration and command options

        Raises:
            InvalidOperationKeyError: raised if key does not exist

        Returns:
            dict: the worker summary
        """
        if operation_key not in OperationsEnum:
            raise InvalidOperationKeyError(f"Invalid operations key: {operation_key}")
        return self.operations[OperationsEnum(operation_key)](kwargs)
