"""Exception types shared across the toolkit."""

from __future__ import annotations


class SimreadyError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(SimreadyError):
    """An operation received an input violating its preconditions."""


class MalformedCodeError(SimreadyError):
    """A part code is structurally invalid (bad run sums, dangling refs)."""

    def __init__(self, message: str, layer: int | None = None):
        self.layer = layer
        if layer is not None:
            message = f"layer {layer}: {message}"
        super().__init__(message)


class CodeParseError(SimreadyError):
    """Part-code text failed to parse; carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


class AssetError(SimreadyError):
    """Asset text failed to parse or validate.

    ``line``/``column`` locate the fault in the source text when it came
    from a parse; ``part_id``/``field`` name the offending element when the
    fault is semantic.
    """

    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        part_id: int | None = None,
        field: str | None = None,
    ):
        self.line = line
        self.column = column
        self.part_id = part_id
        self.field = field
        prefix = []
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f":{column}"
            prefix.append(loc)
        if part_id is not None:
            prefix.append(f"part {part_id}")
        if field is not None:
            prefix.append(field)
        if prefix:
            message = ": ".join(prefix) + ": " + message
        super().__init__(message)


class ExportError(SimreadyError):
    """URDF export could not proceed; names the offending part."""

    def __init__(self, message: str, part_id: int | None = None):
        self.part_id = part_id
        if part_id is not None:
            message = f"part {part_id}: {message}"
        super().__init__(message)
