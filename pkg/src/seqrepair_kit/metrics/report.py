"""Evaluation reports and CSV writing."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import pandas as pd

from ..core.exceptions import ContractViolation
from ..settings import CSV_FLOAT_FORMAT

logger = logging.getLogger(__name__)

TASK_METRICS: Dict[str, List[str]] = {
    "sort": ["sequence_accuracy", "order_accuracy"],
    "cfg": ["bleu4", "cfg_validity"],
}


def write_table(
    frame: pd.DataFrame,
    path: Union[str, Path],
    header: Optional[Mapping[str, object]] = None,
) -> Path:
    """
    Write ``frame`` as CSV with the shared float format.

    ``header`` entries become leading ``# key=value`` lines, which
    ``pandas.read_csv(path, comment="#")`` skips.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = "".join(f"# {key}={value}\n" for key, value in (header or {}).items())
    body = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    path.write_text(lines + body, encoding="utf-8")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


@dataclass
class EvalReport:
    """
    Metric values of one evaluation run; every value lies in ``[0, 1]``.

    Attributes:
        task: Task name
        values: Metric name -> value
        count: Number of evaluated sequences
    """

    task: str
    count: int
    values: Dict[str, float] = field(default_factory=dict)

    def add(self, metric: str, value: float) -> None:
        if not 0.0 <= value <= 1.0:
            raise ContractViolation("metric {m} is {v}, outside [0, 1]", params={"m": metric, "v": value})
        self.values[metric] = float(value)

    def missing(self) -> List[str]:
        return [m for m in TASK_METRICS.get(self.task, []) if m not in self.values]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "metric": list(self.values),
                "value": list(self.values.values()),
                "count": [self.count] * len(self.values),
            }
        )

    def write_csv(self, path: Union[str, Path]) -> Path:
        return write_table(self.to_frame(), path)

    @classmethod
    def read_csv(cls, path: Union[str, Path], task: str) -> EvalReport:
        frame = pd.read_csv(path, comment="#")
        count = int(frame["count"].iloc[0]) if len(frame) else 0
        return cls(task=task, count=count, values=dict(zip(frame["metric"], frame["value"].astype(float))))
