import logging
import os
from typing import Optional

from dotenv import load_dotenv

from src.errors import ConfigurationError

load_dotenv()

# Configuration
LOG_LEVEL = os.getenv("FTSREG_LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def resolve_threads(cli_value: Optional[int] = None) -> int:
    """Urutan prioritas: --threads, FTSREG_THREADS, jumlah core"""
    if cli_value is not None:
        threads = cli_value
    else:
        raw = os.getenv("FTSREG_THREADS")
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                raise ConfigurationError(f"FTSREG_THREADS must be an integer, got {raw!r}")
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise ConfigurationError(f"thread count must be >= 1, got {threads}")
    return threads


def resolve_default_m(cli_value: Optional[int] = None) -> int:
    """Resolusi grid: --m, FTSREG_DEFAULT_M, 32"""
    if cli_value is not None:
        m = cli_value
    else:
        raw = os.getenv("FTSREG_DEFAULT_M", "32")
        try:
            m = int(raw)
        except ValueError:
            raise ConfigurationError(f"FTSREG_DEFAULT_M must be an integer, got {raw!r}")
    if m < 1:
        raise ConfigurationError(f"grid resolution must be >= 1, got {m}")
    return m


def setup_logging(level: Optional[str] = None):
    """Setup logging dengan format standar"""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format=LOG_FORMAT
    )
