"""
Workbench configuration management.
Uses pydantic-settings for environment variable parsing with validation.

Every option can be overridden through a PADICBENCH_* environment variable
or a local .env file. See README.md for the full table.
"""

import logging

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Workbench settings loaded from environment variables.

    Precision and enumeration caps:
    - PRECISION_CAP: relative digits carried by exact inputs
    - LEVEL_CAP: largest p-power level a character value may need
    - DEPTH_CAP: the R_max marker reported as the depth of nilpotent elements

    Execution:
    - WORKERS: thread pool size for job cells
    - LOG_LEVEL, REPORT_INDENT: output metadata
    """

    precision_cap: int = Field(
        default=24,
        description="Relative precision (digits) given to exact integer and rational inputs"
    )
    level_cap: int = Field(
        default=12,
        description="Largest level m such that character values live among p^m-th roots of unity"
    )
    conductor: int = Field(
        default=1,
        description="Conductor exponent c of the additive character: trivial on p^c, nontrivial on p^(c-1)"
    )
    closure_bound: int = Field(
        default=2000,
        description="Maximum number of roots produced before reflection closure is declared infinite"
    )
    depth_cap: int = Field(
        default=12,
        description="Depth marker R_max reported for nilpotent elements"
    )
    max_cell_depth: int = Field(
        default=8,
        description="Deepest residue-class refinement the integration engine may perform"
    )
    max_cells: int = Field(
        default=2_000_000,
        description="Cell budget per integration job"
    )
    workers: int = Field(
        default=4,
        description="Worker threads used to run job cells"
    )

    log_level: str = Field(default="INFO")
    report_indent: int = Field(default=2)

    @field_validator(
        "precision_cap", "level_cap", "closure_bound", "depth_cap",
        "max_cell_depth", "max_cells", "workers",
    )
    @classmethod
    def validate_positive(cls, value: int) -> int:
        """Caps and pool sizes must be positive."""
        if value < 1:
            raise ValueError(f"Value must be positive, got {value}")
        return value

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, value: str) -> str:
        """Only standard logging level names are accepted."""
        name = value.upper()
        if not isinstance(getattr(logging, name, None), int):
            raise ValueError(f"Unknown log level: {value}")
        return name

    class Config:
        env_prefix = "PADICBENCH_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


settings = Settings()
