"""
symnf configuration — pydantic-settings, overridable from env (SYMNF_*) or .env.
"""

from __future__ import annotations

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # ── Coefficient field ──
    field: Literal["float", "exact"] = "float"

    # ── Truncation ──
    # caps on the input resolution; None keeps the order the input carries
    trunc: int | None = None  # N: max total degree in ρ
    h_trunc: int | None = None  # M: max power of h

    # ── Tolerances (float field) ──
    tol: float = 1e-9
    cluster_rtol: float = 1e-8
    orthogonality_tol: float = 1e-6

    # ── Branch rule ──
    branch: Literal["principal"] = "principal"

    # ── Logging ──
    log_level: str = "INFO"
    log_json: bool = False

    # ── Server ──
    host: str = "0.0.0.0"
    port: int = 8710

    model_config = SettingsConfigDict(env_prefix="SYMNF_", env_file=".env", extra="ignore")


settings = Settings()
