"""
Application configuration.
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical and runtime settings"""

    model_config = SettingsConfigDict(
        env_prefix="DIRAC_SHELL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Bessel substrate
    T_MAX: float = 700.0
    LARGE_ORDER_THRESHOLD: int = 200

    # Circle spectrum
    GRID_SIZE: int = 512
    GAP_GUARD: float = 1e-9
    Z_STAR_GUARD: float = 1e-12
    ASYMPTOTIC_REGIME_K: int = 8
    BRENT_MAX_ITER: int = 200
    RESIDUAL_TOL: float = 1e-11
    DEFAULT_TOL: float = 1e-14

    # Eigenfunctions
    QUAD_NODES_PER_PANEL: int = 64
    GEOMETRIC_PANELS: int = 12
    DENOMINATOR_FLOOR: float = 1e-300

    # ODE oracle
    ODE_RTOL: float = 1e-12
    INTERIOR_START: float = 1e-6
    ORACLE_GRID_SIZE: int = 64
    ORACLE_PANELS: int = 8

    # Line model
    LINE_K_NODES: int = 400
    LINE_K_CUTOFF: float = 10.0

    # Runtime
    THREADS: int = 1
    LOG_LEVEL: str = "WARNING"


settings = Settings()
