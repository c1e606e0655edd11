"""
Operational defaults for the numerical pipeline.

Values come from the environment (a .env file is loaded by the entry point)
and fall back to the defaults below. Nothing here is required.
"""

import os
from typing import Optional

from pydantic import BaseModel, Field


class NumericSettings(BaseModel):
    """Defaults shared by the library and the CLI."""

    nodes: int = Field(default=512, ge=32, description="Default quadrature / Nyström node count")
    max_nodes: int = Field(default=2048, ge=32, description="Dense linear algebra cap")
    grid_size: int = Field(default=41, ge=3, description="Lattice size for sup-Λ search")
    collar_spacings: float = Field(default=10.0, gt=0, description="Collar width in node spacings")
    power_max_iter: int = Field(default=10000, ge=1)
    power_tol: float = Field(default=1e-10, gt=0)
    condition_limit: float = Field(default=1e6, gt=1)
    on_curve_tol: float = Field(default=1e-12, gt=0)
    log_level: str = "WARNING"


def _read_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(
            f"{name}={raw!r} is not an integer. "
            "Please fix it in your .env file."
        )


def get_settings() -> NumericSettings:
    """
    Build settings from the environment.

    Recognised variables: CSZ_NODES, CSZ_MAX_NODES, CSZ_GRID_SIZE and
    CSZ_LOG_LEVEL.

    Returns:
        NumericSettings with environment overrides applied

    Raises:
        ValueError: If a variable is malformed or out of range

    Example:
        >>> from dotenv import load_dotenv
        >>> load_dotenv()
        >>> get_settings().nodes
        512
    """
    overrides = {}
    for field_name, env_name in (
        ("nodes", "CSZ_NODES"),
        ("max_nodes", "CSZ_MAX_NODES"),
        ("grid_size", "CSZ_GRID_SIZE"),
    ):
        value = _read_int(env_name)
        if value is not None:
            overrides[field_name] = value

    level = os.getenv("CSZ_LOG_LEVEL")
    if level:
        overrides["log_level"] = level.upper()

    return NumericSettings(**overrides)
