"""
Engine configuration settings.

This module defines all caps and budgets loaded from environment variables.
Settings are managed using Pydantic BaseSettings for validation and type safety.
"""

from pydantic import AliasChoices, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """
    Engine settings loaded from environment variables.

    All settings can be overridden via .env file or environment variables.
    The global order cap also honours the short name NONF_CAP.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
        populate_by_name=True,
    )

    # Application settings
    PROJECT_NAME: str = "non-F graph engine"
    VERSION: str = "0.1.0"

    # Group size caps
    ORDER_CAP: int = Field(
        default=120_000,
        validation_alias=AliasChoices("NONF_CAP", "ORDER_CAP"),
        description="Largest group order any constructor may produce",
    )
    DENSE_TABLE_CAP: int = Field(
        default=4096,
        description="Largest order stored as a dense Cayley table",
    )
    LATTICE_CAP: int = Field(
        default=2000,
        description="Largest order for full subgroup lattice enumeration",
    )
    EXPLICIT_GRAPH_CAP: int = Field(
        default=5000,
        description="Largest order for explicit (all pairs) graph construction",
    )

    # Invariant checks
    ASSOCIATIVITY_FULL_CHECK: int = Field(
        default=2000,
        description="Largest order for which associativity is checked on all triples",
    )
    ASSOCIATIVITY_SAMPLES: int = Field(
        default=1_000_000,
        description="Random triples checked above the full-check bound",
    )

    # Search budgets
    ISO_NODE_BUDGET: int = Field(
        default=200_000,
        description="Backtracking node budget for subgroup isomorphism search",
    )
    COMMUTANT_ENUMERATION_CAP: int = Field(
        default=10**7,
        description="Largest p^(d^2) for brute-force commutant enumeration",
    )
    FPF_EXHAUSTIVE_CAP: int = Field(
        default=5000,
        description="Largest |V^u x H| for exhaustive fixed-point-free generation search",
    )

    # Lemma harness limits
    LIFTING_MAX_ORDER: int = Field(default=200, description="Order bound for exhaustive lifting-generators checks")
    LIFTING_MAX_RANK: int = Field(default=3, description="Largest generator tuple length in lifting-generators checks")
    MAXIMAL_PAIR_MAX_ORDER: int = Field(default=500, description="Order bound for maximal-intersection checks")
    QUOTIENT_CHECK_MAX_ORDER: int = Field(default=200, description="Order bound for quotient edge checks")

    # Execution
    WORKERS: int = Field(default=1, description="Process pool size for verification suites")
    LOG_LEVEL: str = Field(default="INFO", description="loguru level for the stderr sink")

    @field_validator(
        "ORDER_CAP",
        "DENSE_TABLE_CAP",
        "LATTICE_CAP",
        "EXPLICIT_GRAPH_CAP",
        "ISO_NODE_BUDGET",
        "COMMUTANT_ENUMERATION_CAP",
        "FPF_EXHAUSTIVE_CAP",
        "WORKERS",
    )
    @classmethod
    def validate_positive(cls, v, info):
        """Validate that caps and budgets are positive."""
        if v <= 0:
            raise ValueError(f"{info.field_name} must be positive")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        """Validate log level name."""
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")
        return level


# Create a global settings instance
settings = Settings()
