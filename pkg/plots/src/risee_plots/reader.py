"""Reader for the aggregate sweep CSV emitted by ``risee sweep --out``.

The coupling to the solver package is this one header string; the plotting
side deliberately does not import ``risee``, so a CSV produced anywhere
(another machine, an older run) plots the same.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

AGGREGATE_HEADER = (
    "scheme,axis,axis_value,trials,mean_ee_bpj,se_ee_bpj,mean_tx_exposure,"
    "se_tx_exposure,mean_rx_exposure,se_rx_exposure"
)

_COLUMNS = AGGREGATE_HEADER.split(",")


@dataclass(frozen=True)
class AggregateRow:
    scheme: str
    axis: str
    axis_value: float
    trials: int
    mean_ee_bpj: float
    se_ee_bpj: float
    mean_tx_exposure: float
    se_tx_exposure: float
    mean_rx_exposure: float
    se_rx_exposure: float


def read_aggregate(paths: list[str] | tuple[str, ...]) -> list[AggregateRow]:
    """Read one or more aggregate CSVs and concatenate their rows.

    Raises ValueError on a missing/extra column (named in the message), on a
    file with a header but no data rows, and on unparseable cells.
    """
    if not paths:
        raise ValueError("no input CSV given")
    rows: list[AggregateRow] = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        lines = [ln for ln in text.split("\n") if ln != ""]
        if not lines:
            raise ValueError(f"{path}: empty file, expected aggregate CSV")
        header = lines[0].split(",")
        missing = [c for c in _COLUMNS if c not in header]
        extra = [c for c in header if c not in _COLUMNS]
        if missing or extra:
            parts = []
            if missing:
                parts.append("missing column(s) " + ", ".join(missing))
            if extra:
                parts.append("unexpected column(s) " + ", ".join(extra))
            raise ValueError(f"{path}: not an aggregate CSV: " + "; ".join(parts))
        if len(lines) == 1:
            raise ValueError(f"{path}: no data rows")
        # columns may appear in any order as long as all are present
        idx = {c: header.index(c) for c in _COLUMNS}
        for lineno, line in enumerate(lines[1:], start=2):
            cells = line.split(",")
            if len(cells) != len(header):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(cells)}"
                )
            try:
                rows.append(
                    AggregateRow(
                        scheme=cells[idx["scheme"]],
                        axis=cells[idx["axis"]],
                        axis_value=float(cells[idx["axis_value"]]),
                        trials=int(cells[idx["trials"]]),
                        mean_ee_bpj=float(cells[idx["mean_ee_bpj"]]),
                        se_ee_bpj=float(cells[idx["se_ee_bpj"]]),
                        mean_tx_exposure=float(cells[idx["mean_tx_exposure"]]),
                        se_tx_exposure=float(cells[idx["se_tx_exposure"]]),
                        mean_rx_exposure=float(cells[idx["mean_rx_exposure"]]),
                        se_rx_exposure=float(cells[idx["se_rx_exposure"]]),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad cell value ({exc})") from exc
    return rows
