"""Tests for error reporting, artifacts, logging and small helpers."""

import json
from unittest.mock import patch

import pytest
from pydantic import BaseModel

from eigenstrain.artifacts import FileArtifactStore, create_artifact_store
from eigenstrain.constants import EXIT_IO, EXIT_NUMERICAL, EXIT_USAGE
from eigenstrain.errors import (
    ConfigurationError,
    DataError,
    ErrorReporter,
    MeshError,
    ParseError,
    SolverConvergenceError,
    truncate_message,
    with_error_context,
)
from eigenstrain.logging_config import LogContext, get_logger, setup_logging
from eigenstrain.utils import Timer, dumps_deterministic, file_sha256, format_error_message, missing_fields, parse_override


class Sample(BaseModel):
    name: str
    value: float


@pytest.mark.parametrize(
    "error, category, exit_code",
    [
        (ConfigurationError("bad key"), "configuration", EXIT_USAGE),
        (DataError("missing"), "data", EXIT_IO),
        (ParseError("bad cell", path="a.csv", line=4), "data", EXIT_IO),
        (SolverConvergenceError("stalled", [1.0, 0.5]), "numerical", EXIT_NUMERICAL),
        (MeshError("different meshes"), "mesh", EXIT_NUMERICAL),
        (FileNotFoundError(2, "No such file", "x.csv"), "io", EXIT_IO),
        (RuntimeError("boom"), "internal", EXIT_NUMERICAL),
    ],
)
def test_error_categories(error, category, exit_code):
    """Every exception maps to a category and an exit code."""
    payload = ErrorReporter().report(error)
    assert payload["category"] == category
    assert payload["exit_code"] == exit_code
    assert payload["error"] == type(error).__name__
    json.dumps(payload)


def test_parse_error_location():
    """Parse errors are prefixed with path and line."""
    error = ParseError("Non-numeric value", path="data/profile.csv", line=7, column="r_mm")
    assert str(error) == "data/profile.csv:7: Non-numeric value"
    assert (error.path, error.line) == ("data/profile.csv", 7)
    assert ErrorReporter().report(error)["details"] == {"path": "data/profile.csv", "line": 7, "column": "r_mm"}


def test_solver_history_is_trimmed():
    """Only the tail of a long residual history is reported."""
    history = [1.0 / (k + 1) for k in range(50)]
    details = ErrorReporter().report(SolverConvergenceError("stalled", history))["details"]
    assert details["residual_history"] == history[-10:]
    assert details["iterations"] == 50


def test_io_error_names_file():
    details = ErrorReporter().report(FileNotFoundError(2, "No such file", "x.csv"))["details"]
    assert details == {"path": "x.csv"}


def test_truncate_message():
    assert truncate_message("short", 10) == "short"
    assert truncate_message("x" * 20, 10) == "x" * 10 + "... [truncated, showing first 10 characters]"


def test_error_context_logs_and_reraises():
    """The decorator logs the failing stage without swallowing the error."""
    @with_error_context("unit")
    def failing():
        raise DataError("nope")

    with patch("eigenstrain.errors.logger") as mock_logger:
        with pytest.raises(DataError):
            failing()
    mock_logger.error.assert_called_once()
    assert mock_logger.error.call_args.kwargs["stage"] == "unit"


def test_artifact_store_writes_and_hashes(tmp_path):
    """Artifacts land under the root and appear in the sorted manifest."""
    store = FileArtifactStore(str(tmp_path / "out"))
    store.write_text("b.csv", "x\n1\n")
    path = store.write_report("a.json", Sample(name="fit", value=0.5))
    assert path.parent == (tmp_path / "out").resolve()
    assert json.loads(path.read_text()) == {"name": "fit", "value": 0.5}
    manifest = store.manifest()
    assert list(manifest) == ["a.json", "b.csv"]
    assert manifest["b.csv"] == file_sha256(tmp_path / "out" / "b.csv")


def test_artifact_store_stays_inside_root(tmp_path):
    store = create_artifact_store("file", root=str(tmp_path))
    with pytest.raises(DataError):
        store.path_for("../escape.csv")


def test_unknown_artifact_store():
    with pytest.raises(ValueError):
        create_artifact_store("s3")


def test_dumps_deterministic():
    """Keys are sorted and the document ends with a newline."""
    text = dumps_deterministic({"b": 1, "a": [0.1, 2]})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert dumps_deterministic({"a": [0.1, 2], "b": 1}) == text


def test_parse_override():
    assert parse_override("3") == 3
    assert parse_override("[1, 2]") == [1, 2]
    assert parse_override("true") is True
    assert parse_override("stiffness") == "stiffness"


def test_missing_fields():
    assert missing_fields(["a", "c"], ["a", "b", "c", "d"]) == ["b", "d"]


def test_format_error_message():
    assert format_error_message(ValueError("bad"), "fit") == "[fit] ValueError: bad"
    assert format_error_message(ValueError("bad")) == "ValueError: bad"


def test_timer_measures_elapsed():
    with Timer("unit", stage="test") as timer:
        pass
    assert timer.elapsed >= 0.0
    assert Timer().elapsed == 0.0


def test_json_logs_and_context(capsys):
    """JSON logging goes to stderr and carries bound context."""
    setup_logging("INFO", json_logs=True)
    with LogContext(subcommand="axisym-fit"):
        get_logger("test").info("Fit finished", rank=8)
    line = capsys.readouterr().err.strip().splitlines()[-1]
    event = json.loads(line)
    assert event["event"] == "Fit finished"
    assert event["subcommand"] == "axisym-fit"
    assert event["rank"] == 8
