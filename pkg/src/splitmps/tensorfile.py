"""JSON tensor files shared by the fixtures and the command line.

A file holds one object with the keys ``kind``, ``d``, ``bond``, ``tensors``
and ``metadata`` in that order. Complex numbers are ``[re, im]`` pairs and
floats use Python's shortest round-trip repr, so ``dumps(loads(text))``
reproduces canonical text byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidInput
from .mps import Mps
from .simps import Simps

KEYS = ("kind", "d", "bond", "tensors", "metadata")


class ParseError(InvalidInput):
    """Malformed tensor file; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _decode_matrix(raw: Any, path: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise ParseError(f"{path}: expected a non-empty list of rows")
    ncols = len(raw[0])
    out = np.zeros((len(raw), ncols), dtype=np.complex128)
    for a, row in enumerate(raw):
        if len(row) != ncols:
            raise ParseError(f"{path}[{a}]: ragged row")
        for b, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            ):
                raise ParseError(f"{path}[{a}][{b}]: expected an [re, im] pair of numbers")
            out[a, b] = complex(z[0], z[1])
    return out


def to_dict(obj: Mps | Simps, metadata: dict[str, str] | None = None) -> dict[str, Any]:
    meta = {str(k): str(v) for k, v in sorted((metadata or {}).items())}
    if isinstance(obj, Mps):
        return {
            "kind": "mps",
            "d": obj.d,
            "bond": obj.bond_dim,
            "tensors": [_encode_matrix(obj[i]) for i in range(obj.d)],
            "metadata": meta,
        }
    if isinstance(obj, Simps):
        return {
            "kind": "simps",
            "d": obj.d,
            "bond": list(obj.chi),
            "tensors": [[_encode_matrix(obj[i, j]) for j in range(obj.d)] for i in range(obj.d)],
            "metadata": meta,
        }
    raise InvalidInput(f"cannot serialize {type(obj).__name__}")


def from_dict(raw: Any) -> tuple[Mps | Simps, dict[str, str]]:
    if not isinstance(raw, dict):
        raise ParseError("top level must be an object")
    missing = [k for k in KEYS if k not in raw]
    if missing:
        raise ParseError(f"missing keys: {', '.join(missing)}")
    extra = sorted(set(raw) - set(KEYS))
    if extra:
        raise ParseError(f"unknown keys: {', '.join(extra)}")
    kind, d, bond, tensors, meta = (raw[k] for k in KEYS)
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError("d must be a positive integer")
    if not isinstance(meta, dict) or not all(isinstance(v, str) for v in meta.values()):
        raise ParseError("metadata must map names to strings")
    if not isinstance(tensors, list) or len(tensors) != d:
        raise ParseError(f"tensors must be a list of length d={d}")
    try:
        if kind == "mps":
            if not isinstance(bond, int) or isinstance(bond, bool) or bond < 1:
                raise ParseError("bond must be a positive integer for kind 'mps'")
            mats = [_decode_matrix(t, f"tensors[{i}]") for i, t in enumerate(tensors)]
            for i, m in enumerate(mats):
                if m.shape != (bond, bond):
                    raise ParseError(f"tensors[{i}] has shape {m.shape}, expected {(bond, bond)}")
            return Mps(np.stack(mats)), dict(meta)
        if kind == "simps":
            if (
                not isinstance(bond, list)
                or len(bond) != d
                or not all(isinstance(c, int) and not isinstance(c, bool) and c >= 1 for c in bond)
            ):
                raise ParseError(f"bond must be a list of d={d} positive integers for kind 'simps'")
            table = []
            for i, row in enumerate(tensors):
                if not isinstance(row, list) or len(row) != d:
                    raise ParseError(f"tensors[{i}] must be a list of length d={d}")
                mats = []
                for j, t in enumerate(row):
                    m = _decode_matrix(t, f"tensors[{i}][{j}]")
                    if m.shape != (bond[i], bond[j]):
                        raise ParseError(
                            f"tensors[{i}][{j}] has shape {m.shape}, expected {(bond[i], bond[j])}"
                        )
                    mats.append(m)
                table.append(mats)
            return Simps(table), dict(meta)
    except ParseError:
        raise
    except InvalidInput as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"kind must be 'mps' or 'simps', got {kind!r}")


def dumps(obj: Mps | Simps, metadata: dict[str, str] | None = None) -> str:
    """Canonical text: one top-level key per line, values compact."""
    data = to_dict(obj, metadata)
    lines = [f"  {json.dumps(k)}: {json.dumps(data[k], separators=(',', ':'))}" for k in KEYS]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def loads(text: str) -> tuple[Mps | Simps, dict[str, str]]:
    if not text.strip():
        raise ParseError("empty input", 1, 1)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return from_dict(raw)


def read_file(path: str | Path) -> tuple[Mps | Simps, dict[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc.reason}") from exc
    return loads(text)


def write_file(path: str | Path, obj: Mps | Simps, metadata: dict[str, str] | None = None) -> None:
    Path(path).write_text(dumps(obj, metadata), encoding="utf-8")
