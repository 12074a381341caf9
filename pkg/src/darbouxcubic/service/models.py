"""Request and response models for the HTTP service.

A request names its system either by the family parameter p (an exact
rational in string or integer form) or by a free-form pair of polynomial
rate expressions; exactly one of the two must be present. Responses for
analyze are the report dict itself (already JSON-shaped), so they are
typed loosely here and constrained by the published report schema.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class SystemSpec(BaseModel):
    x_rate: str
    y_rate: str
    parameters: dict[str, str] = Field(default_factory=dict)


class AnalyzeRequest(BaseModel):
    p: str | int | None = None
    system: SystemSpec | None = None
    max_degree: int = Field(default=2, ge=1, le=3)
    config: dict[str, float | int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "AnalyzeRequest":
        if (self.p is None) == (self.system is None):
            raise ValueError("provide exactly one of 'p' or 'system'")
        return self


class PortraitRequest(AnalyzeRequest):
    seed: int = Field(default=0, ge=0)
    orbit_count: int | None = Field(default=None, ge=0, le=200)


class GammaProbeRequest(BaseModel):
    count: int = Field(default=200, ge=1, le=5000)
    y_min: float = Field(default=0.2, gt=0.0)
    y_max: float = Field(default=3.0, gt=0.0)
    maxdeg: int = Field(default=8, ge=1, le=12)
    control: bool = False


class PortraitResponse(BaseModel):
    svg: str
    status: str
    problems: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
    schema_version: int
