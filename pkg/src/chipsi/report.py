"""Report container and deterministic serialization.

JSON is the stable interface: keys sorted, rationals written as "p/q"
strings, complex numbers as {"re": .., "im": ..}.  CSV flattens results to
``key,value`` rows with dotted keys.  Text is for humans only.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "text")


class FormatError(ValueError):
    pass


@dataclass
class Report:
    command: str
    config: dict[str, Any]
    results: dict[str, Any]
    passed: bool
    generator: str | None = None
    duration: float | None = None
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        out = {
            "schema": self.schema,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "passed": self.passed,
            "generator": self.generator,
        }
        if self.duration is not None:
            out["duration"] = self.duration
        return jsonable(out)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Report:
        return cls(
            command=data["command"],
            config=data["config"],
            results=data["results"],
            passed=data["passed"],
            generator=data.get("generator"),
            duration=data.get("duration"),
            schema=data["schema"],
        )


def jsonable(value):
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return value
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {_key(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if dataclasses.is_dataclass(value):
        return {f.name: jsonable(getattr(value, f.name)) for f in dataclasses.fields(value) if f.repr}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _key(k) -> str:
    if isinstance(k, tuple):
        return "".join(str(v) for v in k)
    return str(k)


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


def emit(report: Report, fmt: str = "json") -> bytes:
    data = report.to_dict()
    if fmt == "json":
        return (json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, val in _flatten(data):
            writer.writerow([key, val])
        return buf.getvalue().encode()
    if fmt == "text":
        lines = [f"{report.command}: {'PASS' if report.passed else 'FAIL'}"]
        lines += [f"  {k} = {v}" for k, v in _flatten({"results": data["results"]})]
        if report.duration is not None:
            lines.append(f"  duration = {report.duration:.3f}s")
        return ("\n".join(lines) + "\n").encode()
    raise FormatError(f"unsupported format {fmt!r}; choose from {FORMATS}")


def parse(raw: bytes) -> Report:
    return Report.from_dict(json.loads(raw))


def _flatten(data, prefix=""):
    if isinstance(data, dict):
        for k in sorted(data):
            yield from _flatten(data[k], f"{prefix}{k}.")
    elif isinstance(data, list) and data and any(isinstance(v, (dict, list)) for v in data):
        for i, v in enumerate(data):
            yield from _flatten(v, f"{prefix}{i}.")
    elif isinstance(data, list):
        yield prefix[:-1], " ".join(json.dumps(v) if not isinstance(v, str) else v for v in data)
    else:
        yield prefix[:-1], data if isinstance(data, str) else json.dumps(data)
