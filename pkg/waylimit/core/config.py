from __future__ import annotations

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from `WAYLIMIT_*` environment variables or a local .env file.

    Services read their numerical defaults from here; explicit arguments win.
    """

    environment: str = "development"
    log_level: str = "INFO"
    seed: int = 0

    # Linear-algebra tolerances
    hermitian_tol: float = 1e-12
    unitary_tol: float = 1e-10
    state_tol: float = 1e-12
    density_tol: float = 1e-10
    spectral_gap_tol: float = 1e-10
    frame_tol: float = 1e-9
    cluster_rel_tol: float = 1e-9

    # Verification thresholds
    bound_slack: float = 1e-7
    robertson_tol: float = 1e-9
    identity_tol: float = 1e-9
    equivalence_tol: float = 1e-10

    # Worst-case fidelity search
    fidelity_grid_zeta: int = 64
    fidelity_grid_delta: int = 128
    fidelity_tol: float = 1e-9
    fidelity_max_refinements: int = 500
    fidelity_refine_starts: int = 4

    # Coordinate-descent optimizer
    optimizer_initial_step: float = 0.3
    optimizer_shrink: float = 0.5
    optimizer_min_step: float = 1e-7
    optimizer_budget: int = 20000
    optimizer_search_grid_zeta: int = 16
    optimizer_search_grid_delta: int = 32
    optimizer_workers: int = 1

    # Jaynes-Cummings truncation
    jc_tail_tol: float = 1e-12
    jc_tail_levels: int = 2

    # HTTP API
    api_host: str = "127.0.0.1"
    api_port: int = 8000

    model_config = SettingsConfigDict(
        env_prefix="WAYLIMIT_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )


settings = Settings()
