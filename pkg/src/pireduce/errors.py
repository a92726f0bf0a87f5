"""Exception types shared across the package."""


class PiReduceError(Exception):
    """Base class for all pireduce errors."""


class SchemaError(PiReduceError):
    """Invalid schema: unknown unit symbol, bad role, missing range, ..."""


class IngestError(PiReduceError):
    """CSV ingestion failure (header mismatch, unparseable cell, empty file)."""


class SingularSystemError(PiReduceError):
    """Exact linear solve attempted on a singular coefficient matrix."""


class DegenerateDimensionsError(PiReduceError):
    """No variable subset spans the base dimensions of the schema."""


class ZeroBaseValueError(PiReduceError):
    """A base-subset variable is zero where a group value must divide by it."""

    def __init__(self, row: int, variable: str):
        self.row = row
        self.variable = variable
        super().__init__(
            f"base-subset variable {variable!r} is zero at row {row}; "
            "group value is undefined"
        )


class ConstantColumnError(PiReduceError):
    """A zero-variance column was selected for standardization."""


class LogDomainError(PiReduceError):
    """Nonpositive value encountered where a logarithm is required."""


class UndefinedScoreError(PiReduceError):
    """Score undefined for this input (e.g. constant target)."""


class DivergenceError(PiReduceError):
    """Training loss became non-finite."""

    def __init__(self, epoch: int, detail: str = ""):
        self.epoch = epoch
        msg = f"training diverged at epoch {epoch}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
