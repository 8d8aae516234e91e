"""
Shared input/output helpers for the subcommands
"""

from pathlib import Path
from typing import Optional, Type, TypeVar

import pandas as pd
import pydantic
from pydantic import BaseModel

from frenet_kit.core.exceptions import InputFormatError
from frenet_kit.core.logging import get_logger

logger = get_logger(__name__)

SchemaT = TypeVar("SchemaT", bound=BaseModel)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DIVERGED = 2


def read_model(path: str, schema: Type[SchemaT]) -> SchemaT:
    """
    Read and validate a JSON file

    Args:
        path: File to read
        schema: Pydantic schema the file must satisfy

    Returns:
        Validated schema instance

    Raises:
        InputFormatError: If the file is missing or does not validate
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputFormatError(path, str(e)) from e
    try:
        return schema.model_validate_json(text)
    except pydantic.ValidationError as e:
        raise InputFormatError(path, str(e)) from e


def write_model(model: BaseModel, path: Optional[str]) -> None:
    """Write a schema as indented JSON to path, or to stdout when path is None"""
    text = model.model_dump_json(indent=2)
    if path is None:
        print(text)
        return
    Path(path).write_text(text + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)


def write_csv(frame: pd.DataFrame, path: str) -> None:
    frame.to_csv(path, index=False)
    logger.info("Wrote %s (%d rows)", path, len(frame))
