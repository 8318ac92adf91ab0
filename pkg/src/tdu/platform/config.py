"""Service configuration, read from a single JSON file."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class PlatformConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    host: str = "127.0.0.1"
    port: int = Field(8080, ge=0, le=65535)
    data_dir: Path = Field(Path("tdu-home"), alias="data-dir")
    ledger_path: Optional[Path] = Field(None, alias="ledger-path")
    modal_conversion: bool = Field(True, alias="modal-conversion")


def load_config(path) -> PlatformConfig:
    """Keys may be written with dashes (``data-dir``) or underscores (``data_dir``)."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return PlatformConfig.model_validate({k.replace("_", "-"): v for k, v in raw.items()})
