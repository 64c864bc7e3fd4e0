"""Exception hierarchy shared by all modules."""


class GridCovError(Exception):
    """Base class for all errors raised by gridcov."""


class InputError(GridCovError):
    """Bad user input (maps to CLI exit code 2)."""


class EmptyDomain(InputError):
    pass


class Disconnected(InputError):
    def __init__(self, components):
        self.components = components
        sizes = ", ".join(str(len(c)) for c in components)
        super().__init__(f"domain has {len(components)} components (sizes {sizes})")


class MalformedInput(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)


class Infeasible(InputError):
    pass


class DomainTooSmall(InputError):
    pass


class DimensionUnsupported(GridCovError):
    pass


class NonpositiveRadius(InputError):
    pass


class SamePosition(GridCovError):
    pass


class MalformedDescriptor(GridCovError):
    pass


class BadBoundaryDimension(GridCovError):
    pass


class UnknownBoundaryId(GridCovError):
    pass


class ResourceLimit(GridCovError):
    """A configured cap was exceeded (maps to CLI exit code 3)."""


class MatchingIncomplete(GridCovError):
    def __init__(self, unmatched):
        self.unmatched = unmatched
        super().__init__(f"{len(unmatched)} 2-cells left unmatched")


class NotAcyclic(GridCovError):
    pass


class Stuck(GridCovError):
    def __init__(self, remaining_pairs, remaining_cells=0):
        self.remaining_pairs = remaining_pairs
        self.remaining_cells = remaining_cells
        super().__init__(
            f"collapse stuck with {remaining_pairs} matched pairs and "
            f"{remaining_cells} top cells remaining"
        )
