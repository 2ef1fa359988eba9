"""Readers for the engine's delimited outputs.

Files start with a ``# key=value ...`` metadata comment, then a header row,
then numeric rows. Schema violations raise SchemaError; the renderers never
compute new numbers from the data, they only draw the columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SchemaError(Exception):
    """Input file does not match the documented engine schema."""


@dataclass
class Table:
    meta: dict
    header: list
    columns: dict  # name -> np.ndarray

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise SchemaError(f"missing column {name!r}; have {self.header}") from None


def read_table(path) -> Table:
    lines = [ln for ln in open(path).read().splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    meta = {}
    if lines[0].startswith("#"):
        for kv in lines[0].lstrip("# ").split(" "):
            if "=" in kv:
                k, v = kv.split("=", 1)
                meta[k] = v
        lines = lines[1:]
    if not lines:
        raise SchemaError(f"{path}: no header row")
    header = [h.strip() for h in lines[0].split(",")]
    raw = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != len(header) for r in raw):
        raise SchemaError(f"{path}: ragged rows")
    columns = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in raw]
        try:
            columns[name] = np.array([float(v) for v in vals])
        except ValueError:
            columns[name] = np.array(vals)
    return Table(meta=meta, header=header, columns=columns)


def require(table: Table, names, context: str) -> None:
    missing = [n for n in names if n not in table.columns]
    if missing:
        raise SchemaError(f"{context}: missing columns {missing}; have {table.header}")
