"""Data manager: readings, datasets and the transforms applied on release."""

from .readings import (CSV_HEADER, METRICS, UNITS, Dataset, DuplicateReadingWarning, IngestError,
                       Reading, ReadingStore, format_readings_csv, ingest, parse_readings_csv)
from .synthetic import DEFAULT_START, RANGES, generate_synthetic
from .transform import (Group, GroupKey, TransformSpec, annotate, bucket_start, group, spatial_key,
                        transform)

__all__ = [
    "CSV_HEADER", "METRICS", "UNITS", "Dataset", "DuplicateReadingWarning", "IngestError", "Reading",
    "ReadingStore", "format_readings_csv", "ingest", "parse_readings_csv", "DEFAULT_START", "RANGES",
    "generate_synthetic", "Group", "GroupKey", "TransformSpec", "annotate", "bucket_start", "group",
    "spatial_key", "transform",
]
