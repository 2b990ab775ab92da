"""
Volset Configuration

Loads configuration from environment variables with sensible defaults.
"""
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration."""

    # Base directory
    BASE_DIR = Path(__file__).parent

    # Tool identity (emitted in every report)
    TOOL_NAME = 'volset'
    VERSION = '1.0.0'

    # Parallelism (0 = one worker per CPU)
    THREADS = int(os.getenv('VOLSET_THREADS', '0'))

    # Enumeration limits
    BUDGET = int(os.getenv('VOLSET_BUDGET', '20000000'))
    SAMPLE_BUDGET = int(os.getenv('VOLSET_SAMPLE_BUDGET', '2000000'))
    CHUNK = int(os.getenv('VOLSET_CHUNK', '65536'))

    # Randomness
    SEED = int(os.getenv('VOLSET_SEED', '0'))

    # Reports
    REPORT_TIMING = os.getenv('REPORT_TIMING', 'False').lower() == 'true'

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_DIR: Optional[Path] = Path(os.environ['LOG_DIR']) if os.getenv('LOG_DIR') else None

    @classmethod
    def threads(cls) -> int:
        """Effective worker count for internal parallelism."""
        if cls.THREADS > 0:
            return cls.THREADS
        return os.cpu_count() or 1

    @classmethod
    def ensure_directories(cls):
        """Ensure required directories exist."""
        if cls.LOG_DIR:
            cls.LOG_DIR.mkdir(parents=True, exist_ok=True)
