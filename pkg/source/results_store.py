"""
In-memory results store for a single opsis run.
Metric sections and CSV tables accumulate here while a command runs and
are flushed to the output directory once, at the end.
"""
import copy
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from source.errors import NumericalError
from source.models.experiment import Command, MetricsReport

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.json"


def _plain(value: Any, where: str) -> Any:
    """numpy scalars to Python values; non-finite floats are refused."""
    if isinstance(value, dict):
        return {str(k): _plain(v, f"{where}.{k}") for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v, where) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise NumericalError(f"non-finite value in {where}: {value}")
        return float(value)
    return value


def format_cell(value: Any) -> str:
    """CSV cell text; floats with 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise NumericalError(f"non-finite table value: {value}")
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def split_complex(prefix: str, value: complex) -> Dict[str, float]:
    """{prefix_re, prefix_im} columns of a complex value."""
    value = complex(value)
    return {f"{prefix}_re": value.real, f"{prefix}_im": value.imag}


class ResultsStore:
    """
    The run's single writer: metric sections by name and tables by name,
    kept in insertion order.
    """

    def __init__(self):
        self.sections: Dict[str, Dict[str, Any]] = {}
        self.tables: Dict[str, Tuple[List[str], List[Dict[str, Any]]]] = {}

    def put_section(self, name: str, values: Dict[str, Any]):
        """Adds (or replaces) a metric section after checking it is finite."""
        self.sections[name] = _plain(values, name)

    def get_section(self, name: str) -> Optional[Dict[str, Any]]:
        return copy.deepcopy(self.sections.get(name))

    def put_table(self, name: str, header: Sequence[str], rows: Sequence[Dict[str, Any]]):
        header = list(header)
        for row in rows:
            missing = set(row) - set(header)
            if missing:
                raise ValueError(f"table {name} has no columns {sorted(missing)}")
        self.tables[name] = (header, list(rows))

    def report(self, command: Command, exit_code: int = 0,
               timing: Optional[Dict[str, float]] = None) -> MetricsReport:
        return MetricsReport(command, copy.deepcopy(self.sections),
                             tuple(f"{name}.csv" for name in self.tables),
                             exit_code, dict(timing or {}))

    def write(self, out_dir: Path, report: MetricsReport, include_timing: bool = False) -> List[Path]:
        """Writes metrics.json and one CSV per table; returns the written paths."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for name, (header, rows) in self.tables.items():
            path = out_dir / f"{name}.csv"
            with path.open("w", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([format_cell(row.get(col)) for col in header])
            written.append(path)
        metrics_path = out_dir / METRICS_FILE
        payload = _plain(report.to_dict(include_timing), "metrics")
        metrics_path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        written.append(metrics_path)
        logger.info("wrote %d file(s) to %s", len(written), out_dir)
        return written

    def clear_all(self):
        self.sections.clear()
        self.tables.clear()
