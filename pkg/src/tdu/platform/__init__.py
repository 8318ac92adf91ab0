"""Platform layer: managers over a home directory, configuration and the TET benchmark."""

from .bench import BenchStats, bench_tet, summarize, write_results
from .config import PlatformConfig, load_config
from .core import Platform, PlatformError, QueryResult, default_subject, vocabulary

__all__ = ["BenchStats", "bench_tet", "summarize", "write_results", "PlatformConfig", "load_config",
           "Platform", "PlatformError", "QueryResult", "default_subject", "vocabulary"]
