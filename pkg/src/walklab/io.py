"""Experiment configs, matrix/probability CSV dumps and JSON reports."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .exceptions import ConfigError, GroupError
from .groups import FiniteGroup, make_abelian_product, make_from_table
from .operators import AngleLike, parse_angle

CONFIG_KEYS = {
    "group", "connection", "partition", "overlap", "thetas", "T", "targets",
    "theta", "Tmax", "max_period", "tol", "name",
}


@dataclass
class ExperimentConfig:
    group: FiniteGroup
    connection: tuple
    partition: list
    overlap: bool = False
    thetas: Optional[tuple] = None
    T: Optional[int] = None
    targets: Optional[tuple] = None
    theta: Optional[AngleLike] = None
    Tmax: Optional[int] = None
    max_period: Optional[int] = None
    tol: Optional[float] = None
    name: str = ""
    raw: dict = field(default_factory=dict, repr=False)


def _int(value, where: str, *, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _group(spec, where: str) -> FiniteGroup:
    if not isinstance(spec, dict) or len(spec.keys() & {"abelian_product", "table"}) != 1:
        raise ConfigError(f"{where}: expected an object with exactly one of 'abelian_product' or 'table'")
    try:
        if "abelian_product" in spec:
            orders = spec["abelian_product"]
            if not isinstance(orders, list):
                raise ConfigError(f"{where}.abelian_product: expected a list of cycle orders")
            orders = [_int(k, f"{where}.abelian_product[{i}]") for i, k in enumerate(orders)]
            return make_abelian_product(orders)
        table = spec["table"]
        if not isinstance(table, list) or not all(isinstance(r, list) for r in table):
            raise ConfigError(f"{where}.table: expected a list of rows")
        for i, row in enumerate(table):
            for j, x in enumerate(row):
                _int(x, f"{where}.table[{i}][{j}]")
        return make_from_table(np.array(table, dtype=np.int64), name=spec.get("name"))
    except GroupError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from None


def _element(G: FiniteGroup, label, where: str) -> int:
    try:
        return G.element(label)
    except GroupError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _elements(G: FiniteGroup, labels, where: str) -> list:
    if not isinstance(labels, list):
        raise ConfigError(f"{where}: expected a list of elements")
    return [_element(G, x, f"{where}[{i}]") for i, x in enumerate(labels)]


def _angle(value, where: str) -> AngleLike:
    try:
        return parse_angle(value)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(doc: Any) -> ExperimentConfig:
    """Turn a decoded JSON document into an :class:`ExperimentConfig`."""
    if not isinstance(doc, dict):
        raise ConfigError("$: config must be a JSON object")
    unknown = sorted(set(doc) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"$: unknown keys {unknown}")
    if "group" not in doc:
        raise ConfigError("$.group: missing")
    if "partition" not in doc:
        raise ConfigError("$.partition: missing")
    G = _group(doc["group"], "$.group")

    if not isinstance(doc["partition"], list) or not doc["partition"]:
        raise ConfigError("$.partition: expected a non-empty list of pieces")
    partition = [_elements(G, p, f"$.partition[{i}]") for i, p in enumerate(doc["partition"])]
    if "connection" in doc:
        connection = tuple(_elements(G, doc["connection"], "$.connection"))
    else:
        connection = tuple(sorted({g for p in partition for g in p}))

    cfg = ExperimentConfig(G, connection, partition, raw=doc, name=str(doc.get("name", "")))
    if "overlap" in doc:
        if not isinstance(doc["overlap"], bool):
            raise ConfigError("$.overlap: expected true or false")
        cfg.overlap = doc["overlap"]
    if "thetas" in doc:
        if not isinstance(doc["thetas"], list):
            raise ConfigError("$.thetas: expected a list of angles")
        cfg.thetas = tuple(_angle(t, f"$.thetas[{i}]") for i, t in enumerate(doc["thetas"]))
    if "T" in doc:
        cfg.T = _int(doc["T"], "$.T", minimum=1)
    if "targets" in doc:
        if not isinstance(doc["targets"], list):
            raise ConfigError("$.targets: expected a list of piece indices")
        cfg.targets = tuple(_int(t, f"$.targets[{i}]", minimum=0) for i, t in enumerate(doc["targets"]))
    if "theta" in doc:
        cfg.theta = _angle(doc["theta"], "$.theta")
    if "Tmax" in doc:
        cfg.Tmax = _int(doc["Tmax"], "$.Tmax", minimum=0)
    if "max_period" in doc:
        cfg.max_period = _int(doc["max_period"], "$.max_period", minimum=1)
    if "tol" in doc:
        tol = doc["tol"]
        if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
            raise ConfigError(f"$.tol: expected a positive number, got {tol!r}")
        cfg.tol = float(tol)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    return parse_config(doc)


# file output


def atomic_write_text(path, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def dumps_matrix(M) -> str:
    """Row-major CSV with each entry written as ``re+imj`` to 17 significant digits."""
    M = np.asarray(M, dtype=complex)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in M:
        writer.writerow(format_complex(z) for z in row)
    return buf.getvalue()


def loads_matrix(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    return np.array([[complex(x) for x in r] for r in rows], dtype=complex)


def dumps_probabilities(P) -> str:
    """Plain-decimal CSV, one row per source vertex."""
    P = np.asarray(P, dtype=float)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in P:
        writer.writerow(np.format_float_positional(float(x), unique=True, trim="-") for x in row)
    return buf.getvalue()


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
