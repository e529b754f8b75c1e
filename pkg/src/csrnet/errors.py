"""Exception hierarchy. The CLI maps each family to an exit code."""


class CsrnetError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(CsrnetError):
    exit_code = 2


class DataError(CsrnetError, ValueError):
    exit_code = 3


class NumericalError(CsrnetError, ArithmeticError):
    exit_code = 4


class EmptyGraph(DataError):
    pass


class InvalidInput(DataError):
    pass


class InvalidDegrees(DataError):
    pass


class InvalidPartition(DataError):
    pass


class InsufficientData(DataError):
    pass


class AbortIngest(DataError):
    pass


class StageDependencyError(DataError):
    """A pipeline stage ran before the artifact it reads was produced."""

    def __init__(self, stage: str, missing):
        self.stage = stage
        self.missing = missing
        super().__init__(f"stage {stage!r} needs {missing}, which does not exist; run the earlier stage first")


class SolverDiverged(NumericalError):
    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
