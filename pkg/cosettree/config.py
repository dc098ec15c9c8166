"""
cosettree — Settings

Design patterns:
  - Singleton: single Settings instance shared everywhere
  - Configuration Object: centralizes every brute-force cap and default
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterator, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Central configuration sourced from environment / .env (prefix COSETTREE_)."""

    model_config = SettingsConfigDict(
        env_prefix="COSETTREE_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ── Brute-force safety ────────────────────────────────
    order_cap: int = Field(default=200_000, ge=1, description="Max order of a concretized group / H^d")
    node_cap: int = Field(default=500_000, ge=1, description="Max node count of a single tree")

    # ── Ordinals ──────────────────────────────────────────
    ordinal_exponent_cap: int = Field(default=10, ge=1)

    # ── CLI defaults ──────────────────────────────────────
    default_mode: str = "closed"
    default_horizon: int = Field(default=8, ge=2)
    log_level: str = "warning"

    # ── HTTP service ──────────────────────────────────────
    app_host: str = "127.0.0.1"
    app_port: int = 8000


# Singleton – import this everywhere
settings = Settings()


def resolve_cap(explicit: Optional[int], default: int) -> int:
    """An explicit per-call cap wins over the configured one."""
    return default if explicit is None else explicit


@contextmanager
def override_caps(cap: Optional[int]) -> Iterator[None]:
    """Temporarily replace both brute-force caps (CLI ``--cap``)."""
    if cap is None:
        yield
        return
    saved = (settings.order_cap, settings.node_cap)
    settings.order_cap = settings.node_cap = cap
    try:
        yield
    finally:
        settings.order_cap, settings.node_cap = saved
