"""
On-disk formats: JSON inputs and reports as pydantic models, CSV tables.

Loaders return ``Result`` values so the command runners can pattern-match on
failures instead of catching exceptions.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from secrecy_regions.channel import BceChannel, DiscreteChannel, Pmf
from secrecy_regions.degraded import AuxiliaryDecomposition
from secrecy_regions.fading import PowerProfile
from secrecy_regions.inner import InnerBoundDecomposition
from secrecy_regions.types import (
    Err,
    Error,
    Ok,
    RateUnit,
    Result,
    SecrecyError,
    UsageError,
    ValidationError,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Input Models
# =============================================================================


class ChannelFile(BaseModel):
    """A transition matrix, rows indexed by input symbol."""

    input_size: int = Field(ge=1)
    output_size: int = Field(ge=1)
    rows: list[list[float]]

    def to_channel(self) -> DiscreteChannel:
        channel = DiscreteChannel(np.array(self.rows, dtype=np.float64))
        if (channel.input_size, channel.output_size) != (self.input_size, self.output_size):
            raise SecrecyError(
                ValidationError(
                    field="rows",
                    message=f"shape {channel.kernel.shape} does not match the declared sizes",
                )
            )
        return channel

    @classmethod
    def from_channel(cls, channel: DiscreteChannel) -> ChannelFile:
        return cls(
            input_size=channel.input_size,
            output_size=channel.output_size,
            rows=channel.kernel.tolist(),
        )


class BceFile(BaseModel):
    """Marginal kernels of a BCE, plus an optional joint indexed [x][y1][y2][z]."""

    y1: ChannelFile
    y2: ChannelFile
    z: ChannelFile
    joint: list[list[list[list[float]]]] | None = None

    def to_bce(self) -> BceChannel:
        joint = None if self.joint is None else np.array(self.joint, dtype=np.float64)
        return BceChannel(self.y1.to_channel(), self.y2.to_channel(), self.z.to_channel(), joint)

    @classmethod
    def from_bce(cls, bce: BceChannel) -> BceFile:
        return cls(
            y1=ChannelFile.from_channel(bce.y1),
            y2=ChannelFile.from_channel(bce.y2),
            z=ChannelFile.from_channel(bce.z),
            joint=None if bce.joint is None else bce.joint.tolist(),
        )


class AuxiliaryFile(BaseModel):
    """P(u) and P(x|u) of a degraded-region decomposition."""

    p_u: list[float]
    p_x_given_u: list[list[float]]

    def to_decomposition(self) -> AuxiliaryDecomposition:
        return AuxiliaryDecomposition(
            Pmf(np.array(self.p_u, dtype=np.float64)),
            DiscreteChannel(np.array(self.p_x_given_u, dtype=np.float64)),
        )

    @classmethod
    def from_decomposition(cls, aux: AuxiliaryDecomposition) -> AuxiliaryFile:
        return cls(p_u=aux.p_u.probs.tolist(), p_x_given_u=aux.p_x_given_u.kernel.tolist())


class InnerDecompositionFile(BaseModel):
    """P(u), P(v1, v2 | u) and P(x | v1, v2) of a general inner-bound decomposition."""

    p_u: list[float]
    p_v1v2_given_u: list[list[list[float]]]
    p_x_given_v1v2: list[list[list[float]]]

    def to_decomposition(self) -> InnerBoundDecomposition:
        return InnerBoundDecomposition(
            Pmf(np.array(self.p_u, dtype=np.float64)),
            np.array(self.p_v1v2_given_u, dtype=np.float64),
            np.array(self.p_x_given_v1v2, dtype=np.float64),
        )

    @classmethod
    def from_decomposition(cls, dec: InnerBoundDecomposition) -> InnerDecompositionFile:
        return cls(
            p_u=dec.p_u.probs.tolist(),
            p_v1v2_given_u=dec.p_v1v2_given_u.tolist(),
            p_x_given_v1v2=dec.p_x_given_v1v2.tolist(),
        )


# =============================================================================
# Report Models
# =============================================================================


class RunMetadata(BaseModel):
    """Provenance attached to every emitted artifact."""

    model_config = ConfigDict(frozen=True)

    version: str
    subcommand: str
    config: dict[str, Any]
    seeds: list[int] = Field(default_factory=list)
    wall_clock_seconds: float = 0.0
    tolerances: dict[str, float] = Field(default_factory=dict)
    units: RateUnit = "bits"


class ProfileFile(BaseModel):
    """A sampled power profile with the fading description it belongs to."""

    metadata: RunMetadata
    fading: dict[str, Any]
    grid: list[float]
    interference: list[float]
    density: list[float]
    summary: dict[str, Any] = Field(default_factory=dict)

    def to_profile(self) -> PowerProfile:
        return PowerProfile(
            grid=np.array(self.grid),
            interference=np.array(self.interference),
            density=np.array(self.density),
            metadata={"source": "file", **self.summary},
        )


class TableReport(BaseModel):
    """A CSV table in JSON form."""

    metadata: RunMetadata
    columns: list[str]
    rows: list[list[float | str]]
    summary: dict[str, Any] = Field(default_factory=dict)


class CertificateEntry(BaseModel):
    certificate_id: str
    r1: float
    r2: float
    decomposition: AuxiliaryFile


class DegradedReport(BaseModel):
    metadata: RunMetadata
    degraded: bool
    legitimate_only: bool
    evaluated: int
    supporting: list[dict[str, Any]]
    certificates: list[CertificateEntry]


class DegradednessReport(BaseModel):
    """Verdicts of the Y1 -> Y2 and Y2 -> Z feasibility problems."""

    metadata: RunMetadata
    degraded: bool
    legitimate_only: bool
    verdicts: dict[str, dict[str, Any]]


class SimulationRun(BaseModel):
    seed: int
    re1: float
    re2: float
    re12: float
    h_w2_given_w1: float
    gap: float
    pe1: float
    pe2: float
    pe: float
    valid: bool


class SimulationReport(BaseModel):
    metadata: RunMetadata
    n: int
    plan: dict[str, Any]
    realized_rates: list[float]
    pair_selection: str
    enumeration: dict[str, float]
    runs: list[SimulationRun]
    mean_gap: float
    mean_pe: float


# =============================================================================
# Loading
# =============================================================================


def _load(path: Path, model: type[BaseModel]) -> Result[Any, Error]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        return Err(UsageError(message=f"cannot read {path}: {e.strerror}"))
    try:
        return Ok(model.model_validate_json(text))
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or path.name
        return Err(ValidationError(field=location, message=first["msg"]))


def _convert(loaded: Result[Any, Error], method: str) -> Result[Any, Error]:
    match loaded:
        case Ok(value=model):
            try:
                return Ok(getattr(model, method)())
            except SecrecyError as e:
                return Err(e.error)
        case Err() as err:
            return err
    raise AssertionError("unreachable")


def load_channel(path: Path) -> Result[DiscreteChannel, Error]:
    return _convert(_load(path, ChannelFile), "to_channel")


def load_bce(path: Path) -> Result[BceChannel, Error]:
    """Load a BCE file; a stored joint must reproduce the three marginals."""
    return _convert(_load(path, BceFile), "to_bce")


def load_decomposition(
    path: Path,
) -> Result[AuxiliaryDecomposition | InnerBoundDecomposition, Error]:
    """Either decomposition form, told apart by its keys."""
    try:
        keys = set(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, TypeError) as e:
        return Err(UsageError(message=f"cannot read {path}: {e}"))
    if "p_v1v2_given_u" in keys:
        return _convert(_load(path, InnerDecompositionFile), "to_decomposition")
    return _convert(_load(path, AuxiliaryFile), "to_decomposition")


def load_profile(path: Path) -> Result[PowerProfile, Error]:
    return _convert(_load(path, ProfileFile), "to_profile")


def load_report(path: Path, model: type[BaseModel]) -> Result[Any, Error]:
    return _load(path, model)


# =============================================================================
# Writing
# =============================================================================


def to_units(value: float, units: RateUnit) -> float:
    """Convert a rate in bits to ``units``."""
    return value * math.log(2.0) if units == "nats" else value


def format_number(value: float, digits: int) -> str:
    return f"{value:.{digits}g}"


def write_csv(
    path: Path, header: list[str], rows: list[list[Any]], digits: int
) -> None:
    """Header plus rows; floats at ``digits`` significant digits."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format_number(v, digits) if isinstance(v, float) else v for v in row]
            )
    logger.info(f"Wrote {len(rows)} rows to {path}")


def write_json(path: Path, model: BaseModel) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
