"""Exception hierarchy and error reporting for the toolkit."""

from functools import wraps
from typing import Any, Callable, Dict, List, Optional

import structlog

from eigenstrain.constants import (
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_USAGE,
    MAX_LOG_DISPLAY_LENGTH,
)

logger = structlog.get_logger()


class EigenstrainError(Exception):
    """Base class for every error raised by the toolkit."""

    category = "numerical"
    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details


class ConfigurationError(EigenstrainError):
    """Invalid run configuration, preset or override."""

    category = "configuration"
    exit_code = EXIT_USAGE


class DataError(EigenstrainError):
    """Input data could not be read or failed validation."""

    category = "data"
    exit_code = EXIT_IO


class ParseError(DataError):
    """A data file is malformed at a specific line."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None, **details: Any):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}", path=path, line=line, **details)
        self.path = path
        self.line = line


class NumericalError(EigenstrainError):
    """A numerical procedure failed or was given an unsolvable problem."""


class SingularModelError(NumericalError):
    """Elastic constants make Hooke's law or the axial balance singular."""


class NonPolynomialRHSError(NumericalError):
    """An axisymmetric eigenstrain would drive the radial ODE with a 1/r term."""


class SolverConvergenceError(NumericalError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, message: str, residual_history: Optional[List[float]] = None, **details: Any):
        history = list(residual_history or [])
        super().__init__(
            message,
            iterations=len(history),
            final_residual=history[-1] if history else None,
            **details,
        )
        self.residual_history = history


class DegenerateDesignError(NumericalError):
    """A least-squares design matrix carries no information."""


class MeshError(EigenstrainError):
    """Invalid mesh sizes or fields living on different meshes."""

    category = "mesh"


class ErrorReporter:
    """Turns exceptions into machine-readable payloads and exit codes."""

    def __init__(self):
        self.handlers: Dict[str, Callable[[BaseException], Dict[str, Any]]] = {
            "configuration": self._handle_configuration_error,
            "data": self._handle_data_error,
            "numerical": self._handle_numerical_error,
            "mesh": self._handle_numerical_error,
            "io": self._handle_io_error,
        }

    def categorize(self, error: BaseException) -> str:
        """Map an exception to one of the reporting categories."""
        if isinstance(error, EigenstrainError):
            return error.category
        if isinstance(error, (OSError, UnicodeDecodeError)):
            return "io"
        return "internal"

    def report(self, error: BaseException) -> Dict[str, Any]:
        """
        Build the error payload for an exception.

        Args:
            error: The exception raised by a pipeline

        Returns:
            Payload with error type, category, message, exit code and details
        """
        category = self.categorize(error)
        handler = self.handlers.get(category, self._handle_internal_error)
        payload = handler(error)
        payload.setdefault("category", category)
        payload.setdefault("error", type(error).__name__)
        payload.setdefault("message", str(error))
        payload.setdefault("details", {})
        return payload

    def exit_code(self, error: BaseException) -> int:
        """Exit code for an exception."""
        return self.report(error)["exit_code"]

    def _handle_configuration_error(self, error: BaseException) -> Dict[str, Any]:
        return {"exit_code": EXIT_USAGE, "details": _jsonable(getattr(error, "details", {}))}

    def _handle_data_error(self, error: BaseException) -> Dict[str, Any]:
        return {"exit_code": EXIT_IO, "details": _jsonable(getattr(error, "details", {}))}

    def _handle_numerical_error(self, error: BaseException) -> Dict[str, Any]:
        details = dict(getattr(error, "details", {}))
        if isinstance(error, SolverConvergenceError):
            details["residual_history"] = error.residual_history[-10:]
        return {"exit_code": EXIT_NUMERICAL, "details": _jsonable(details)}

    def _handle_io_error(self, error: BaseException) -> Dict[str, Any]:
        filename = getattr(error, "filename", None)
        return {
            "exit_code": EXIT_IO,
            "details": {"path": str(filename)} if filename else {},
        }

    def _handle_internal_error(self, error: BaseException) -> Dict[str, Any]:
        return {"exit_code": EXIT_NUMERICAL, "details": {}}


def _jsonable(details: Dict[str, Any]) -> Dict[str, Any]:
    safe = {}
    for key, value in details.items():
        if value is None or isinstance(value, (bool, int, float, str)):
            safe[key] = value
        elif isinstance(value, (list, tuple)):
            safe[key] = [v if isinstance(v, (bool, int, float, str)) else str(v) for v in value]
        else:
            safe[key] = str(value)
    return safe


def with_error_context(stage: str):
    """
    Decorator that logs a failing pipeline stage and re-raises.

    Args:
        stage: Human-readable stage name attached to the log event
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                logger.error(
                    "Pipeline stage failed",
                    stage=stage,
                    function=func.__name__,
                    error=truncate_message(str(e)),
                    error_type=type(e).__name__,
                )
                raise

        return wrapper
    return decorator


def truncate_message(text: str, limit: int = MAX_LOG_DISPLAY_LENGTH) -> str:
    """Truncate a message for log display."""
    if len(text) <= limit:
        return text
    return f"{text[:limit]}... [truncated, showing first {limit} characters]"
