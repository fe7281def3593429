class MacModelError(RuntimeError):
    pass


class ScenarioValidationError(MacModelError):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(issue.message for issue in report.errors))


class OverloadError(MacModelError):
    def __init__(self, message: str, *, slot: int | None = None, minislot: int | None = None):
        self.slot = slot
        self.minislot = minislot
        where = []
        if slot is not None:
            where.append(f"slot={slot}")
        if minislot is not None:
            where.append(f"minislot={minislot}")
        suffix = f" ({' '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class NonConvergenceError(MacModelError):
    def __init__(self, what: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"{what} did not converge after {iterations} iterations (residual={residual:.3e})"
        )


class EngineInvariantError(MacModelError):
    pass


class InsufficientData(MacModelError):
    pass


class ScenarioMismatch(MacModelError):
    pass


class StateSpaceOverflow(MacModelError):
    pass


class ScenarioSyntaxError(MacModelError):
    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        position = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{position}{message}")


class ScenarioSemanticError(MacModelError):
    def __init__(
        self, message: str, *, field: str | None = None, line: int | None = None, report=None
    ):
        self.field = field
        self.line = line
        self.report = report
        prefix = f"{field}: " if field else ""
        suffix = f" (line {line})" if line is not None else ""
        super().__init__(f"{prefix}{message}{suffix}")


class ResultsWriteError(MacModelError):
    def __init__(self, path, exc: Exception):
        self.path = path
        super().__init__(f"cannot write {path}: {exc}")
