"""
Runtime settings for the RIS-DCC toolkit

Settings here only affect speed and verbosity; experiment results are a
function of the experiment file and the seed.
"""

import os

import psutil
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Runtime configuration class"""

    # Parallel execution
    WORKERS = os.getenv('RISDCC_WORKERS', 'auto')

    # Logging
    LOG_LEVEL = os.getenv('RISDCC_LOG_LEVEL', 'INFO').upper()
    ENABLE_MEMORY_MONITORING = os.getenv('RISDCC_ENABLE_MEMORY_MONITORING', 'true').lower() == 'true'

    # Exhaustive search bounds
    CODEBOOK_BIT_LIMIT = int(os.getenv('RISDCC_CODEBOOK_BIT_LIMIT', 20))
    STATE_LIMIT = int(os.getenv('RISDCC_STATE_LIMIT', 2 ** 16))

    @classmethod
    def validate(cls):
        """Validate configuration values"""
        if cls.WORKERS.lower() != 'auto':
            try:
                workers = int(cls.WORKERS)
            except ValueError:
                raise ValueError(f"RISDCC_WORKERS must be 'auto' or an integer, got {cls.WORKERS!r}") from None
            if workers <= 0:
                raise ValueError(f"RISDCC_WORKERS must be positive, got {workers}")
        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f"RISDCC_LOG_LEVEL must be a logging level name, got {cls.LOG_LEVEL}")
        if not (1 <= cls.CODEBOOK_BIT_LIMIT <= 24):
            raise ValueError(f"RISDCC_CODEBOOK_BIT_LIMIT must be between 1 and 24, got {cls.CODEBOOK_BIT_LIMIT}")
        if cls.STATE_LIMIT <= 0:
            raise ValueError(f"RISDCC_STATE_LIMIT must be positive, got {cls.STATE_LIMIT}")


def detect_workers() -> int:
    """Detect the number of worker processes to use"""
    if Config.WORKERS.lower() != 'auto':
        return int(Config.WORKERS)

    physical = psutil.cpu_count(logical=False)
    if physical:
        return physical
    return psutil.cpu_count(logical=True) or 1
