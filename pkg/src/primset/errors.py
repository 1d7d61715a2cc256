"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class PrimsetError(Exception):
    exit_code = 2


class ParseError(PrimsetError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(PrimsetError, ValueError):
    exit_code = 2


class ShapeError(PrimsetError, ValueError):
    exit_code = 2


class RankError(PrimsetError, ValueError):
    exit_code = 3

    def __init__(self, rank, rows, line=None):
        message = (
            f"matrix is rank deficient: rank {rank} < {rows} rows "
            f"({rows - rank} deficient)"
        )
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.rank = rank
        self.rows = rows
        self.line = line


class ContractError(PrimsetError, ValueError):
    """A documented precondition (e.g. primitivity of the input) was violated."""

    exit_code = 1


class CapacityError(PrimsetError, MemoryError):
    exit_code = 4


class SizeGuardError(PrimsetError, ValueError):
    exit_code = 4

    def __init__(self, size, limit, what="enumeration"):
        super().__init__(f"{what} of {size} cases exceeds the guard limit {limit}")
        self.size = size
        self.limit = limit
