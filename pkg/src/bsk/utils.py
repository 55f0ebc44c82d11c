import json
import logging
import os
import sys
from contextlib import suppress
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, Union

from deepmerge import always_merger

LOG_ENV = "BSK_LOG"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def merge(a: Dict[Any, Any], b: Dict[Any, Any]) -> Dict[Any, Any]:
    """The objective of the 'merge' function is to merge two dictionaries
    'a' and 'b' into a new dictionary 'c', using the 'always_merger' function
    from the 'deepmerge' library. Values of 'b' win over those of 'a';
    nested mappings are merged key by key. Neither input is modified.

    Args:
        a (Dict[Any, Any]): base dictionary
        b (Dict[Any, Any]): dictionary merged over 'a'

    Returns:
        Dict[Any, Any]: a new dictionary holding the merged content
    """
    c = {}
    always_merger.merge(c, a)
    always_merger.merge(c, b or {})
    return c


def configure_logging(level: str = None) -> int:
    """attaches a stderr handler to the package logger. The level comes from
    ``level`` or the BSK_LOG environment variable and defaults to WARNING.

    Returns:
        int: the numeric level in effect
    """
    name = (level or os.environ.get(LOG_ENV) or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logger = logging.getLogger(__name__.split(".", maxsplit=1)[0])
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.setLevel(numeric)
    return numeric


def write_json(path: Union[Path, str], content: Any) -> Path:
    """writes ``content`` as indented JSON with sorted keys, so identical
    content gives identical bytes"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(content, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def read_json(path: Union[Path, str]) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def extract_version() -> str:
    """The objective of the "extract_version" function is to return the
    version of an installed package or the version found in a nearby
    pyproject.toml file.

    Returns:
        str: A string containing the version of the installed package or the
        version found in the pyproject.toml file.
    """
    with suppress(FileNotFoundError, StopIteration):
        with open(
            (root_dir := Path(__file__).parent.parent.parent)
            / "pyproject.toml",
            encoding="utf-8",
        ) as pyproject_toml:
            found = (
                next(
                    line
                    for line in pyproject_toml
                    if line.startswith("version")
                )
                .split(" = ")[1]
                .strip("'\"\n ")
            )
            return f"{found}-dev (at {root_dir})"
    try:
        return version(__name__.split(".", maxsplit=1)[0])
    except PackageNotFoundError:
        return "unknown"
