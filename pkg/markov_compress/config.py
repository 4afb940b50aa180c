"""
Configuration settings for the chain compressor.
"""

from pathlib import Path

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

from markov_compress.models.chain import DEFAULT_EPSILON, ROW_TOLERANCE


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_prefix="MARKOV_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Numeric settings
    epsilon: float = DEFAULT_EPSILON
    row_tolerance: float = ROW_TOLERANCE

    # Check settings
    verify_tau: int = 20
    oracle_max_states: int = 12
    simulation_chunk_size: int = 10000

    # Logging settings
    log_level: str = "WARNING"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    log_json: bool = False


def get_settings() -> Settings:
    """Get application settings."""
    # Try the project root first, then the current directory
    env_path = Path(__file__).parent.parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
    else:
        load_dotenv()

    return Settings()
