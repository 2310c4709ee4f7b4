"""Pydantic models for symnf wire formats, reports and API schemas."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

SCHEMA_VERSION = 1

# ── Scalars and terms ──


class ExactScalar(BaseModel):
    model_config = ConfigDict(extra="forbid")

    num: int
    den: int = 1
    im_num: int = 0
    im_den: int = 1

    @model_validator(mode="after")
    def _nonzero_denominators(self) -> ExactScalar:
        if self.den == 0 or self.im_den == 0:
            raise ValueError("denominator must be nonzero")
        return self


class FloatScalar(BaseModel):
    model_config = ConfigDict(extra="forbid")

    re: float
    im: float = 0.0


Scalar = ExactScalar | FloatScalar | int | float


class Term(BaseModel):
    """One monomial: exponent plus either {re, im} or {num, den[, im_num, im_den]}."""

    model_config = ConfigDict(extra="forbid")

    exp: list[int]
    re: float | None = None
    im: float | None = None
    num: int | None = None
    den: int | None = None
    im_num: int | None = None
    im_den: int | None = None

    @model_validator(mode="after")
    def _one_representation(self) -> Term:
        is_float = self.re is not None or self.im is not None
        is_exact = self.num is not None or self.im_num is not None
        if is_float == is_exact:
            raise ValueError("term needs exactly one of {re, im} or {num, den}")
        if self.den == 0 or self.im_den == 0:
            raise ValueError("denominator must be nonzero")
        if any(v < 0 for v in self.exp):
            raise ValueError("exponents must be nonnegative")
        return self

    @property
    def is_exact(self) -> bool:
        return self.num is not None or self.im_num is not None


# ── Jets ──


class JetModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    n: int = Field(ge=1)
    trunc: int = Field(ge=0)
    terms: list[Term] = Field(default_factory=list)


class HJetModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    n: int = Field(ge=1)
    trunc: int = Field(ge=0)
    h_trunc: int = Field(ge=0)
    layers: list[list[Term]] = Field(default_factory=list)


class MapJetModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    n: int = Field(ge=1)
    trunc: int = Field(ge=0)
    components: list[list[Term]]


class LatticeScalar(BaseModel):
    """a + 2πi·q, exact."""

    a: ExactScalar
    q_num: int = 0
    q_den: int = 1

    @model_validator(mode="after")
    def _nonzero_denominator(self) -> LatticeScalar:
        if self.q_den == 0:
            raise ValueError("denominator must be nonzero")
        return self


class ExactClusterModel(BaseModel):
    eigenvalue: Scalar
    mu: LatticeScalar | Scalar
    basis: list[list[Scalar]]


class MatrixModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    rows: list[list[Scalar]]
    spectrum: list[ExactClusterModel] | None = None
    windings: dict[int, int] = Field(default_factory=dict)


class FormalFIOModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    p_ref: JetModel | None = None
    kappa: MapJetModel | None = None
    amp: HJetModel
    gauge: int = 0

    @model_validator(mode="after")
    def _reference(self) -> FormalFIOModel:
        if self.p_ref is None and self.kappa is None:
            raise ValueError("a formal FIO needs p_ref or kappa")
        return self


class ResonanceInput(BaseModel):
    schema_version: int = SCHEMA_VERSION
    mus: list[LatticeScalar | ExactScalar | FloatScalar | int | float]
    m_max: int = Field(ge=1)
    conditions: list[Literal["flow-log", "birkhoff", "combined", "averaged"]] = Field(
        default_factory=lambda: ["flow-log", "birkhoff", "combined"]
    )


# ── Options ──


class RunOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trunc: int | None = Field(default=None, ge=1)
    h_trunc: int | None = Field(default=None, ge=0)
    field: Literal["exact", "float"] | None = None
    tol: float | None = Field(default=None, gt=0)
    branch: Literal["principal"] | None = None
    homotopy: Literal["exponential", "linear"] = "exponential"
    winding: int = 0


# ── Reports ──


class Violation(BaseModel):
    condition: str
    k: list[int]
    value: list[float]
    degree: int


class ResonanceReport(BaseModel):
    mus: list[list[float]]
    exact: bool = False
    degree_bound: int
    conditions: list[str]
    verdicts: dict[str, bool]
    violations: list[Violation] = Field(default_factory=list)
    min_gap: float | None = None

    @property
    def nonresonant(self) -> bool:
        return all(self.verdicts.values())


class ReportHeader(BaseModel):
    tool: str = "symnf"
    version: str
    command: str
    field: str
    trunc: int
    h_trunc: int
    tol: float
    branch: str


# ── API ──


class RunRequest(BaseModel):
    input: dict[str, Any]
    options: RunOptions = Field(default_factory=RunOptions)


class HealthResponse(BaseModel):
    status: str
    version: str


class CommandInfo(BaseModel):
    id: str
    description: str


class CommandsResponse(BaseModel):
    commands: list[CommandInfo]


WIRE_MODELS: dict[str, type[BaseModel]] = {
    "jet": JetModel,
    "hjet": HJetModel,
    "mapjet": MapJetModel,
    "matrix": MatrixModel,
    "formal_fio": FormalFIOModel,
    "resonance_input": ResonanceInput,
    "run_options": RunOptions,
    "resonance_report": ResonanceReport,
    "report_header": ReportHeader,
}
