"""Report models written by the command-line pipelines."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from eigenstrain.constants import REPORT_SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION


class RunStatus(str, Enum):
    """Outcome of a pipeline run."""
    SUCCESS = "success"
    WARNINGS = "warnings"
    FAILED = "failed"


class Provenance(BaseModel):
    """Everything needed to reproduce an artifact."""
    tool: str = TOOL_NAME
    tool_version: str = TOOL_VERSION
    subcommand: str
    config: Dict[str, Any] = Field(default_factory=dict, description="Resolved run configuration")
    inputs: Dict[str, str] = Field(default_factory=dict, description="Input file name to SHA-256")


class Coefficient(BaseModel):
    """One fitted parameter."""
    label: str
    value: float
    standard_error: Optional[float] = None


class ResidualSummary(BaseModel):
    """Residual statistics in MPa, per component and per sample."""
    components: List[str]
    rms: Dict[str, float]
    max: Dict[str, float]
    per_point: List[List[float]] = Field(default_factory=list)


class FitReport(BaseModel):
    """Result of a least-squares eigenstrain or Maxwell fit."""
    schema_version: int = REPORT_SCHEMA_VERSION
    kind: str
    status: RunStatus = RunStatus.SUCCESS
    coefficients: List[Coefficient]
    residuals: ResidualSummary
    rank: int
    n_parameters: int
    condition_number: Optional[float] = None
    weighted: bool
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)
    provenance: Provenance


class RunReport(BaseModel):
    """Result of the decomposition, projection and link-check pipelines."""
    schema_version: int = REPORT_SCHEMA_VERSION
    kind: str
    status: RunStatus = RunStatus.SUCCESS
    results: Dict[str, Any] = Field(default_factory=dict)
    artifacts: Dict[str, str] = Field(default_factory=dict, description="Written file name to SHA-256")
    warnings: List[str] = Field(default_factory=list)
    provenance: Provenance


class ErrorPayload(BaseModel):
    """Machine-readable error written to stderr."""
    error: str
    category: str
    message: str
    exit_code: int
    details: Dict[str, Any] = Field(default_factory=dict)


def status_for(warnings: List[str]) -> RunStatus:
    return RunStatus.WARNINGS if warnings else RunStatus.SUCCESS
