"""Column-oriented result table with CSV serialisation."""

from dataclasses import dataclass, field
import csv
import io

import numpy as np

__all__ = ["SweepTable"]


@dataclass
class SweepTable:
    """Ordered named columns of equal length plus free-form metadata.

    Unstable rows are marked by a ``stable`` column; unbounded quantities are
    written as ``inf`` rather than NaN.
    """

    columns: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        cols = {}
        for name, values in self.columns.items():
            arr = np.asarray(values)
            cols[name] = arr if arr.dtype.kind in "biufU" else arr.astype(str)
        lengths = {len(v) for v in cols.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
        self.columns = cols
        if "stable" in cols:
            for name, arr in cols.items():
                if arr.dtype.kind == "f" and np.any(np.isnan(arr[cols["stable"].astype(bool)])):
                    raise ValueError(f"NaN in stable rows of column {name!r}")

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def names(self):
        return list(self.columns)

    def to_csv(self, path=None):
        """Write the table (header row first); returns the CSV text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.names)
        for row in zip(*self.columns.values()):
            writer.writerow([_fmt(x) for x in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path):
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        cols = {}
        for i, name in enumerate(header):
            raw = [r[i] for r in body]
            try:
                cols[name] = np.array([float(x) for x in raw])
            except ValueError:
                cols[name] = np.array(raw)
        return cls(cols)


def _fmt(x):
    if isinstance(x, (np.integer, int, np.bool_, bool)):
        return str(int(x))
    if isinstance(x, (np.floating, float)):
        return repr(float(x))
    return str(x)
