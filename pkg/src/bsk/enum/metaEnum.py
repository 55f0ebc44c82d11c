from enum import EnumMeta
from typing import Any


class MetaEnum(EnumMeta):
    """metaclass that lets ``value in SomeEnum`` test raw values, so command
    names, mode strings and layout tags read from files can be validated
    before conversion.
    """

    def __contains__(cls, item: Any):
        """Check if the given item is a member or a valid member value.

        Args:
            item (Any): a member or a raw value

        Returns:
            bool: whether or not item converts to a member
        """
        if isinstance(item, cls):
            return True
        try:
            cls(item)
        except (ValueError, TypeError):
            return False
        return True
