"""
Application configuration module.

Centralizes tolerances, campaign budgets and output locations.
Uses pydantic-settings for validation, type coercion, and .env file support.
"""

from __future__ import annotations

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Immutable, validated settings loaded from environment / .env."""

    model_config = SettingsConfigDict(
        env_prefix="SVINEQ_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # ── Numerical tolerances ─────────────────────────────────────────────
    tol_rel: float = Field(default=1e-9, gt=0.0)
    hermitian_tol: float = Field(default=1e-12, gt=0.0)

    # ── Campaign budgets ─────────────────────────────────────────────────
    tight_threshold: float = Field(default=0.999, gt=0.0, le=1.0)
    exhaustive_max_n: int = Field(default=6, ge=1)
    sampled_inputs_per_instance: int = Field(default=8, ge=1)
    workers: int = Field(default=1, ge=1)
    max_near_tight_witnesses: int = Field(default=50, ge=0)
    default_seed: int = Field(default=0, ge=0)

    # ── Piecewise-linear approximation ───────────────────────────────────
    pwl_nodes: int = Field(default=200, ge=1)
    pwl_geometric_span: float = Field(default=1e-6, gt=0.0, lt=1.0)

    # ── Output ───────────────────────────────────────────────────────────
    witness_path: str = "witnesses.jsonl"

    # ── Application Settings ─────────────────────────────────────────────
    app_name: str = "svineq"
    app_version: str = "1.0.0"
    log_level: str = "INFO"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return a cached singleton of the validated settings."""
    return Settings()


def resolve_tol(tol_rel: float | None) -> float:
    """Explicit tolerance if given, the configured default otherwise."""
    return get_settings().tol_rel if tol_rel is None else tol_rel
