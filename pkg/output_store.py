"""
File persistence for result tables, run manifests and state files.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from config import Config
from errors import DimensionMismatchError, StateParseError
from matcore import DensityMatrix
from models import OutputFormat, RunManifest

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_value(value: Any, digits: int) -> str:
    """Render one CSV cell: fixed significant digits, blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{digits}g}"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value"):
        return value.value
    return value


class OutputStore:
    """Writes a command's tables and manifest next to its primary output path."""

    def __init__(
        self,
        out_path: PathLike,
        fmt: Union[OutputFormat, str] = OutputFormat.CSV,
        digits: Optional[int] = None,
    ):
        """
        Initialize the store.

        Args:
            out_path: Primary output file
            fmt: csv or json
            digits: Significant digits of CSV numbers (default RBNLAB_CSV_DIGITS)
        """
        self.out_path = Path(out_path)
        self.fmt = OutputFormat(fmt)
        self.digits = digits or Config.CSV_DIGITS
        self.written: List[Path] = []

    def path_for(self, suffix: Optional[str] = None) -> Path:
        """`<out>` itself, or `<stem>_<suffix>.<ext>` for secondary tables."""
        if suffix is None:
            return self.out_path
        return self.out_path.with_name(f"{self.out_path.stem}_{suffix}{self.out_path.suffix}")

    @property
    def manifest_path(self) -> Path:
        return self.out_path.with_name(f"{self.out_path.stem}.manifest.json")

    def save_table(
        self,
        columns: Sequence[str],
        rows: Sequence[Dict[str, Any]],
        suffix: Optional[str] = None,
    ) -> Path:
        """
        Write rows with a fixed column order.

        Args:
            columns: Header, in output order
            rows: Row dictionaries (missing keys become blanks)
            suffix: Secondary table name, None for the primary output

        Returns:
            Path of the written file
        """
        path = self.path_for(suffix)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            if self.fmt == OutputFormat.CSV:
                with open(path, "w", newline="", encoding="utf-8") as handle:
                    writer = csv.writer(handle, lineterminator="\n")
                    writer.writerow(columns)
                    for row in rows:
                        writer.writerow([format_value(row.get(c), self.digits) for c in columns])
            else:
                records = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
                with open(path, "w", encoding="utf-8") as handle:
                    json.dump(records, handle, indent=2)
                    handle.write("\n")
            self.written.append(path)
            logger.info(f"Saved {len(rows)} rows to {path}")
            return path
        except Exception as e:
            logger.error(f"Error saving table {path}: {str(e)}")
            raise

    def save_manifest(self, manifest: RunManifest) -> Path:
        """Write the run manifest as `<stem>.manifest.json`."""
        path = self.manifest_path
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
            logger.info(f"Saved manifest {manifest.run_id} to {path}")
            return path
        except Exception as e:
            logger.error(f"Error saving manifest {path}: {str(e)}")
            raise


def load_manifest(path: PathLike) -> RunManifest:
    """
    Read a manifest written by `OutputStore.save_manifest`.

    Raises:
        ValueError: if the file is missing or not a manifest
    """
    try:
        return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        logger.error(f"Error reading manifest {path}: {str(e)}")
        raise ValueError(f"Cannot read manifest {path}: {str(e)}")


def _parse_entry(entry: Any) -> complex:
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise StateParseError(f"Complex entries must be [re, im] pairs, got {entry!r}")
        return complex(float(entry[0]), float(entry[1]))
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(float(entry), 0.0)
    raise StateParseError(f"Unsupported matrix entry {entry!r}")


def load_state(path: PathLike) -> DensityMatrix:
    """
    Read a state file {"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}.

    Raises:
        StateParseError: unreadable file, malformed JSON or layout
        StateValidationError: the matrix is not a density matrix
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise StateParseError(f"Cannot read state file {path}: {str(e)}")
    except json.JSONDecodeError as e:
        raise StateParseError(f"State file {path} is not valid JSON: {str(e)}")

    if not isinstance(payload, dict) or "matrix" not in payload:
        raise StateParseError(f"State file {path} needs a 'matrix' field")
    rows = payload["matrix"]
    dims = payload.get("dims")
    try:
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise StateParseError("'matrix' must be a non-empty list of rows")
        matrix = np.array([[_parse_entry(e) for e in row] for row in rows], dtype=complex)
        if dims is not None:
            dims = [int(d) for d in dims]
    except (TypeError, ValueError) as e:
        if isinstance(e, StateParseError):
            raise
        raise StateParseError(f"State file {path} has malformed entries: {str(e)}")

    try:
        return DensityMatrix(matrix, dims=dims)
    except DimensionMismatchError as e:
        raise StateParseError(f"State file {path}: {str(e)}")


def save_state(path: PathLike, rho: DensityMatrix) -> Path:
    """Write a state in the format read by `load_state`."""
    path = Path(path)
    payload = {
        "dims": list(rho.dims),
        "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in rho.matrix],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return path
