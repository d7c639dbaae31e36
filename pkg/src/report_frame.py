"""DataFrame specialization for sweep tables.

A `ReportFrame` holds one row per tile index n of a Brudno sweep. It keeps
its type through slicing and knows how to render the frozen CSV schema and
the JSON form with the statistic labels.
"""

import json
import math
from typing import Any, Iterable

import pandas as pd

REPORT_COLUMNS = ["n", "cells", "count", "entropy_bits", "best_k", "max_mean_complexity_bits", "gap"]
LABEL_COLUMNS = ["statistic", "entropy_kind", "seed", "samples"]


class ReportFrame(pd.DataFrame):
    """A pandas DataFrame of sweep rows.

    Columns are `REPORT_COLUMNS` followed by `LABEL_COLUMNS`; rows stay in
    the order of the n-list.
    """

    @property
    def _constructor(self):
        """Keeps slices and copies as ReportFrame instances."""

        return ReportFrame

    @classmethod
    def from_rows(cls, rows: Iterable[dict[str, Any]]) -> "ReportFrame":
        frame = cls(list(rows), columns=REPORT_COLUMNS + LABEL_COLUMNS)
        return frame.reset_index(drop=True)

    def gaps(self) -> list[float]:
        return [float(g) for g in self["gap"]]

    def is_gap_decreasing(self) -> bool:
        """Whether the gap column strictly decreases down the rows."""

        gaps = self.gaps()
        return all(b < a for a, b in zip(gaps, gaps[1:]))

    def best_row(self) -> dict[str, Any] | None:
        """The row with the smallest absolute gap, or None when empty."""

        if self.empty:
            return None
        position = min(range(len(self)), key=lambda i: abs(float(self["gap"].iloc[i])))
        return self._row(position)

    def _row(self, position: int) -> dict[str, Any]:
        row = {}
        for column in self.columns:
            value = self[column].iloc[position]
            if hasattr(value, "item"):
                value = value.item()
            if isinstance(value, float) and math.isnan(value):
                value = None
            row[column] = value
        return row

    def records(self) -> list[dict[str, Any]]:
        return [self._row(i) for i in range(len(self))]

    def to_report_csv(self) -> str:
        """The frozen CSV form: header plus one line per row, floats at 6 decimals."""

        lines = [",".join(REPORT_COLUMNS)]
        for row in self.records():
            cells = []
            for column in REPORT_COLUMNS:
                value = row[column]
                cells.append(f"{value:.6f}" if isinstance(value, float) else str(value))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_report_json(self, **extra: Any) -> str:
        """JSON with every column, the labels included, and any extra fields."""

        document = dict(extra)
        document["rows"] = [
            {key: (str(value) if key == "count" and value is not None and value > 2 ** 53 else value)
             for key, value in row.items()}
            for row in self.records()
        ]
        return json.dumps(document, indent=2, sort_keys=False)
