"""Выходной конверт отчётов и сериализация в JSON/CSV."""

import io
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from frogrange import __version__
from frogrange.exceptions import ValidationError
from frogrange.types import RowList

logger = logging.getLogger(__name__)

SCHEMA_ID = "frogrange-report/1"
SCHEMA_PATH = Path(__file__).resolve().parent / "schemas" / "frogrange-report-1.schema.json"


class OutputEnvelope(BaseModel):
    """Отчёт подкоманды с полным набором разрешённых параметров."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: str = Field(default=SCHEMA_ID, alias="schema")
    tool_version: str = __version__
    subcommand: str
    parameters: Dict[str, Any]
    timestamp: Optional[str] = None
    payload: Dict[str, Any]


def build_envelope(subcommand: str, parameters: Dict[str, Any], payload: Dict[str, Any],
                   stamp: bool = False) -> OutputEnvelope:
    """Собирает конверт; время проставляется только по запросу."""
    timestamp = datetime.now(timezone.utc).isoformat() if stamp else None
    return OutputEnvelope(subcommand=subcommand, parameters=parameters,
                          timestamp=timestamp, payload=payload)


def _finite(value: Any) -> Any:
    """inf/nan в JSON не допускаются: заменяются на null."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def to_json(envelope: OutputEnvelope) -> str:
    data = envelope.model_dump(mode="json", by_alias=True)
    return json.dumps(_finite(data), ensure_ascii=False, indent=2, allow_nan=False) + "\n"


def to_csv(rows: RowList) -> str:
    """Таблица с заголовком, разделитель ',', точка, %.17g и '\\n' в конце строк."""
    if not rows:
        raise ValidationError("Пустая таблица не может быть выведена в CSV")
    return frame_to_csv(pd.DataFrame(rows))


def from_csv(text: str) -> pd.DataFrame:
    """Разбирает CSV без потери точности float."""
    return pd.read_csv(io.StringIO(text), float_precision="round_trip")


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")


def load_schema() -> Dict[str, Any]:
    """JSON-схема конверта, поставляемая вместе с пакетом."""
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def write_output(text: str, output: Optional[str]) -> None:
    """Пишет отчёт в файл или возвращает управление вызывающему для stdout."""
    if output is None:
        return
    with open(output, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("Отчёт сохранён в %s", output)
