"""Channel instance files and random instance generation.

File format (UTF-8 JSON, one channel row per line)::

    {"schema_version": 1,
     "metadata": {"source": "gen", ...},
     "weights": [0.5, 0.5],
     "rows": [
      [1.0, 0.0],
      [0.0, 1.0]
     ]}

Sums of ``weights`` and of each row must be within ``1e-9`` of 1; accepted
vectors are then divided by their exactly-rounded sum.

Random instances use ``numpy.random.Generator(PCG64(seed))``.  One call to
``standard_exponential(size=(M, N))`` fills the row matrix in row-major
order and each row is divided by its sum, which makes every row uniform on
the simplex (Dirichlet(1, ..., 1)).  Weights are uniform.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .objective import ChannelInstance

SCHEMA_VERSION = 1
SUM_TOLERANCE = 1e-9
# below this deviation a sum counts as exactly 1, which makes
# parse -> write -> parse reproduce identical bits
_RENORM_SKIP = 1e-15


class InstanceFileError(ValueError):
    """Base class for instance-file problems; ``row``/``column`` locate the entry."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.row = row
        self.column = column


class SchemaError(InstanceFileError):
    pass


class MalformedNumberError(InstanceFileError):
    pass


class NegativeEntryError(InstanceFileError):
    pass


class SumDeviationError(InstanceFileError):
    pass


class RaggedRowsError(InstanceFileError):
    pass


@dataclass
class InstanceFile:
    instance: ChannelInstance
    metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION


class _BadConstant:
    def __init__(self, text):
        self.text = text


def _number(v, row, col) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MalformedNumberError(f"not a number: {getattr(v, 'text', v)!r}", row, col)
    return float(v)


def _vector(values, row, what) -> np.ndarray:
    """Validate one probability vector; ``row`` is None for the weights."""
    if not isinstance(values, list) or not values:
        raise SchemaError(f"{what} must be a non-empty array", row)
    out = np.empty(len(values))
    for j, v in enumerate(values):
        out[j] = _number(v, row, j)
        if out[j] < 0:
            raise NegativeEntryError(f"negative entry {out[j]!r} in {what}", row, j)
    s = math.fsum(out)
    if abs(s - 1.0) > SUM_TOLERANCE:
        raise SumDeviationError(f"{what} sums to {s!r}, not 1 within {SUM_TOLERANCE:g}", row)
    if abs(s - 1.0) > _RENORM_SKIP:
        out = out / s
    return out


def instance_from_dict(doc: dict) -> InstanceFile:
    if not isinstance(doc, dict):
        raise SchemaError("instance file must hold a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION or isinstance(version, bool):
        raise SchemaError(f"unsupported schema_version {version!r}")
    for key in ("weights", "rows"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    rows = doc["rows"]
    if not isinstance(rows, list) or not rows:
        raise SchemaError("rows must be a non-empty array of arrays")
    width = None
    for m, r in enumerate(rows):
        if not isinstance(r, list):
            raise SchemaError("each row must be an array", m)
        if width is None:
            width = len(r)
        elif len(r) != width:
            raise RaggedRowsError(f"row has {len(r)} entries, expected {width}", m)
    weights = _vector(doc["weights"], None, "weights")
    if weights.size != len(rows):
        raise SchemaError(f"{weights.size} weights for {len(rows)} rows")
    P = np.stack([_vector(r, m, f"row {m}") for m, r in enumerate(rows)])
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict) or not all(isinstance(k, str) and isinstance(v, str)
                                             for k, v in meta.items()):
        raise SchemaError("metadata must be an object of strings")
    return InstanceFile(ChannelInstance(weights, P), dict(meta), version)


def load_instance_file(path) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_constant=_BadConstant)
        except json.JSONDecodeError as exc:
            raise MalformedNumberError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc
    return instance_from_dict(doc)


def parse_instance(path) -> ChannelInstance:
    """Read and validate an instance file."""
    return load_instance_file(path).instance


def dumps_instance(inst: ChannelInstance, metadata: dict | None = None) -> str:
    meta = {str(k): str(v) for k, v in (metadata or {}).items()}
    lines = [
        '{"schema_version": %d,' % SCHEMA_VERSION,
        ' "metadata": %s,' % json.dumps(meta, sort_keys=True),
        ' "weights": %s,' % json.dumps(inst.weights.tolist()),
        ' "rows": [',
    ]
    body = [json.dumps(r) for r in inst.rows.tolist()]
    lines.append(",\n".join("  " + b for b in body))
    lines.append(" ]}")
    return "\n".join(lines) + "\n"


def write_instance(inst: ChannelInstance, path, metadata: dict | None = None) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(inst, metadata))
    os.replace(tmp, path)


def gen_instance(M: int = 2**14, N: int = 2**4, seed: int = 0) -> ChannelInstance:
    """``M`` rows drawn uniformly from the ``N``-simplex with uniform weights."""
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    E = rng.standard_exponential(size=(M, N))
    rows = E / E.sum(axis=1, keepdims=True)
    return ChannelInstance(np.full(M, 1.0 / M), rows)
