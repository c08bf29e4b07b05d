"""Parsing of the primary tool's commented CSV format.

Files carry '#'-prefixed metadata ('# key: value' and '# param key: repr')
followed by a header row and data rows.  Values in param lines are Python
reprs and are recovered with a literal eval.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class FigureInputError(RuntimeError):
    """Missing or mismatched figure input."""


@dataclass
class CsvData:
    path: str
    meta: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    header: list = field(default_factory=list)
    rows: np.ndarray | None = None

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.header.index(name)]


def _literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def read_csv(path) -> CsvData:
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"input file not found: {path}")
    data = CsvData(path=str(path))
    body: list[list[str]] = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            text = line.lstrip("#").strip()
            if ":" not in text:
                continue
            key, value = text.split(":", 1)
            key, value = key.strip(), value.strip()
            if key.startswith("param "):
                data.params[key[len("param "):]] = _literal(value)
            else:
                data.meta[key] = _literal(value)
        else:
            body.append(line.split(","))
    if not body:
        raise FigureInputError(f"no table data in {path}")
    data.header = body[0]
    if len(body) == 1:
        raise FigureInputError(f"no data rows in {path}")

    def cell(value: str) -> float:
        if value == "true":
            return 1.0
        if value == "false":
            return 0.0
        return float(value)

    data.rows = np.array([[cell(v) for v in row] for row in body[1:]])
    return data


def require_params(data: CsvData, required: dict, figure_id: str) -> None:
    """Refuse inputs whose header disagrees with the figure's parameters.

    Scalars compare to relative 1e-9; any mismatch is reported as a diff
    of expected vs found values.
    """
    problems = []
    found_all = {"command": data.meta.get("command"), **data.params}
    for key, want in required.items():
        got = found_all.get(key)
        if got is None:
            problems.append(f"  {key}: expected {want!r}, missing")
        elif isinstance(want, float):
            if not isinstance(got, (int, float)) or not np.isclose(
                got, want, rtol=1e-9, atol=1e-12
            ):
                problems.append(f"  {key}: expected {want!r}, found {got!r}")
        elif got != want:
            problems.append(f"  {key}: expected {want!r}, found {got!r}")
    if problems:
        raise FigureInputError(
            f"{data.path} does not match figure {figure_id}:\n" + "\n".join(problems)
        )
