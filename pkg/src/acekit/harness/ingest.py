"""CSV ingestion and hot-deck imputation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger
from numpy.typing import NDArray

from acekit.core.models import Dataset
from acekit.core.rng import SeededRng
from acekit.exceptions import (
    AllMissingColumnError,
    DataError,
    MissingColumnError,
    ParseError,
)

MISSING_TOKENS = frozenset({"", "NA"})


@dataclass(frozen=True)
class CsvTable:
    """Numeric columns read from a CSV file with a missingness mask (True = missing)."""

    columns: list[str]
    values: NDArray[np.float64]
    mask: NDArray[np.bool_]
    treatment: str
    response: str | None
    covariates: list[str]

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def column(self, name: str) -> NDArray[np.float64]:
        return self.values[:, self.columns.index(name)]

    @property
    def has_missing(self) -> bool:
        return bool(self.mask.any())

    def to_dataset(self) -> Dataset:
        """Dataset of the treatment, response and covariate columns; needs a complete table."""
        if self.has_missing:
            rows, cols = np.nonzero(self.mask)
            raise DataError(
                f"{rows.size} missing cells remain (first at row {int(rows[0]) + 1}, "
                f"column {self.columns[int(cols[0])]!r}); impute before estimating"
            )
        x = np.column_stack([self.column(c) for c in self.covariates]) if self.covariates else (
            np.empty((self.n, 0))
        )
        return Dataset(
            x=x,
            t=self.column(self.treatment),
            y=self.column(self.response) if self.response else np.zeros(self.n),
            names=list(self.covariates),
        )


def _check_rectangular(path: Path) -> None:
    # pandas pads short rows, so field counts are checked on the raw records
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle, skipinitialspace=True)
        header = next(reader, None)
        if header is None:
            return
        width = len(header)
        row = 0
        for fields in reader:
            if not fields:
                continue
            row += 1
            if len(fields) != width:
                column = header[len(fields)].strip() if len(fields) < width else ""
                raise ParseError(
                    f"Row {row} has {len(fields)} fields but the header has {width}",
                    row=row,
                    column=column,
                )


def ingest_csv(
    path: Path,
    treatment: str,
    response: str | None,
    covariates: list[str] | None = None,
) -> CsvTable:
    """Read the named columns of ``path``; empty cells and ``NA`` are missing.

    Without ``covariates`` every other column is a covariate; without ``response`` the
    table has no outcome column. Rows in error messages count data rows from 1.
    """
    try:
        _check_rectangular(path)
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as exc:
        raise DataError(f"CSV file not found: {path}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError, csv.Error) as exc:
        raise ParseError(f"Cannot parse {path}: {exc}", row=0, column="") from exc
    frame.columns = [str(c).strip() for c in frame.columns]

    if covariates is None:
        covariates = [c for c in frame.columns if c not in (treatment, response)]
    wanted = [treatment, *([response] if response else []), *covariates]
    missing = [c for c in wanted if c not in frame.columns]
    if missing:
        raise MissingColumnError(
            f"Columns not found in {path}: {', '.join(missing)} "
            f"(header: {', '.join(frame.columns)})"
        )

    n = len(frame)
    values = np.empty((n, len(wanted)))
    mask = np.zeros((n, len(wanted)), dtype=bool)
    for j, name in enumerate(wanted):
        raw = frame[name].str.strip()
        is_missing = (raw.isna() | raw.isin(MISSING_TOKENS)).to_numpy()
        parsed = pd.to_numeric(raw.where(~is_missing), errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~is_missing & ~np.isfinite(parsed))
        if bad.size:
            row = int(bad[0]) + 1
            raise ParseError(
                f"Cannot parse {raw.iloc[bad[0]]!r} as a number in column {name!r}, row {row}",
                row=row,
                column=name,
            )
        values[:, j] = parsed
        mask[:, j] = is_missing

    t = values[:, 0]
    bad = np.flatnonzero(~mask[:, 0] & ~np.isin(t, (0.0, 1.0)))
    if bad.size:
        row = int(bad[0]) + 1
        raise ParseError(
            f"Treatment column {treatment!r} must be 0/1; found {t[bad[0]]:g} at row {row}",
            row=row,
            column=treatment,
        )
    logger.debug(f"Read {n} rows x {len(wanted)} columns from {path}; {int(mask.sum())} missing")
    return CsvTable(
        columns=wanted,
        values=values,
        mask=mask,
        treatment=treatment,
        response=response,
        covariates=list(covariates),
    )


def hot_deck_impute(table: CsvTable, rng: SeededRng) -> CsvTable:
    """Replace each missing cell by a draw, with replacement, from its column's observed values."""
    if not table.has_missing:
        return table
    values = table.values.copy()
    for j, name in enumerate(table.columns):
        missing = table.mask[:, j]
        count = int(missing.sum())
        if not count:
            continue
        observed = values[~missing, j]
        if observed.size == 0:
            raise AllMissingColumnError(f"Column {name!r} has no observed values to draw from")
        values[missing, j] = rng.choice(observed, count)
        logger.debug(f"Imputed {count} cells of {name!r} from {observed.size} observed values")
    return replace(table, values=values, mask=np.zeros_like(table.mask))
