import csv
import logging
import sys
from typing import IO, List, Optional, Sequence, Type

from pydantic import BaseModel

from src.common.dto import RunManifest

logger = logging.getLogger()

MANIFEST_PREFIX = "# manifest: "


def manifest_comment(manifest: RunManifest) -> str:
    return f"{MANIFEST_PREFIX}{manifest.model_dump_json()}\n"


class TableFileAdapter:
    """CSV tables of pydantic rows, one column per model field.

    An optional manifest is written as a leading ``#`` comment line.
    ``-`` as the path means standard output.
    """

    def write(
        self,
        path: str,
        rows: Sequence[BaseModel],
        model: Type[BaseModel],
        manifest: Optional[RunManifest] = None,
    ) -> None:
        if path == "-":
            self._write(sys.stdout, rows, model, manifest)
            return
        with open(path, "w", encoding="utf-8", newline="") as stream:
            self._write(stream, rows, model, manifest)
        logger.info(f"Wrote {len(rows)} rows to {path}")

    @staticmethod
    def _write(
        stream: IO[str],
        rows: Sequence[BaseModel],
        model: Type[BaseModel],
        manifest: Optional[RunManifest],
    ) -> None:
        if manifest is not None:
            stream.write(manifest_comment(manifest))
        columns = list(model.model_fields)
        writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row.model_dump(include=set(columns)))

    def read(self, path: str, model: Type[BaseModel]) -> List[BaseModel]:
        with open(path, "r", encoding="utf-8", newline="") as stream:
            lines = [line for line in stream if not line.startswith("#")]
        return [model.model_validate(row) for row in csv.DictReader(lines)]
