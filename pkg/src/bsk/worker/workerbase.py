import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List

from ..config import RunConfig
from ..exception.exceptions import BskError, from_os_error

logger = logging.getLogger(__name__)


class WorkerBase(ABC):
    """The WorkerBase class is an abstract base class for the command
    workers. A worker gathers the items its command works on, processes
    them and reports a summary. Failures of single items are recorded with
    their path and error code instead of stopping the run, so one damaged
    recording does not hide the results of the others.

    Args:
        ABC (ABC): Base class that provides a standard way to create an ABC
        using inheritance
    """

    # name of the command, used in the summary
    command: str = None

    def __init__(self, config: RunConfig):
        """Initialize a new worker

        Args:
            config (RunConfig): validated run configuration
        """
        self.config = config
        self.errors: List[Dict[str, str]] = []

    def record_error(self, path: Any, error: BskError):
        """stores a per-item failure for the summary"""
        logger.error("%s: %s", path, error)
        self.errors.append({"path": str(path), **error.to_dict()})

    @abstractmethod
    def _gather(self) -> List[Any]:
        """Abstract method designed to collect the items to be processed."""
        pass

    @abstractmethod
    def _process(self, items: List[Any]) -> Dict[str, Any]:
        """Abstract method that does the command's work on the gathered
        items and returns the outputs for the summary."""
        pass

    def ingest(self) -> Dict[str, Any]:
        """gathers and processes the items of the command. Errors that stop
        the whole command are recorded like item errors.

        Returns:
            Dict[str, Any]: summary with ``command``, ``ok``, ``outputs``
            and ``errors``
        """
        outputs: Dict[str, Any] = {}
        try:
            outputs = self._process(self._gather())
        except BskError as e:
            self.record_error(self.command, e)
        except OSError as e:
            self.record_error(self.command, from_os_error(e))
        return {
            "command": self.command,
            "ok": not self.errors,
            "outputs": outputs,
            "errors": self.errors,
        }
