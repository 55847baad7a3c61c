"""
RunReport: what a command ran on, what it produced and how long it took.

Two renderings: line-delimited "key<TAB>value" records for people and
shell pipelines (matrices at 6 significant digits), and a single JSON
document at full precision for machines. Matrices in the JSON document
are matrix file documents and load back unchanged.
"""

import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

import config
from matcore import SymMatrix
from matrix_io import file_digest, matrix_to_document

SIGNIFICANT_DIGITS = 6


def _round(value: float, digits: Optional[int]) -> float:
    if digits is None or value == 0.0 or not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def to_jsonable(value: Any, digits: Optional[int] = None) -> Any:
    """Plain JSON value; floats rounded to digits significant digits when given"""
    if isinstance(value, SymMatrix):
        document = matrix_to_document(value)
        document['data'] = [_round(v, digits) for v in document['data']]
        return document
    if hasattr(value, 'to_dict'):
        return to_jsonable(value.to_dict(), digits)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return _round(value, digits) if math.isfinite(value) else None
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist(), digits)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, digits) for v in value]
    return value


@dataclass
class RunReport:
    command: str
    argv: List[str] = field(default_factory=list)
    seed: Optional[int] = None
    version: str = config.__version__
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    ok: bool = True
    started: float = field(default_factory=time.perf_counter, repr=False)
    elapsed: Optional[float] = None

    def add_input(self, label: str, path: str) -> None:
        self.inputs[label] = f"sha256:{file_digest(path)}"

    def add(self, key: str, value: Any) -> None:
        self.outputs[key] = value

    def finish(self) -> "RunReport":
        self.elapsed = time.perf_counter() - self.started
        return self

    def to_dict(self, include_timing: bool = True, digits: Optional[int] = None) -> dict:
        document = {
            'command': self.command,
            'argv': list(self.argv),
            'version': self.version,
            'seed': self.seed,
            'inputs': dict(self.inputs),
            'outputs': to_jsonable(self.outputs, digits),
            'ok': self.ok,
        }
        if include_timing:
            document['elapsed_seconds'] = self.elapsed
        return document

    def render_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2)

    def render_lines(self, include_timing: bool = True) -> str:
        lines = [f"command\t{self.command}", f"version\t{self.version}"]
        if self.seed is not None:
            lines.append(f"seed\t{self.seed}")
        for label, digest in self.inputs.items():
            lines.append(f"input.{label}\t{digest}")
        for key, value in self.outputs.items():
            lines.append(f"{key}\t{_line_value(value)}")
        lines.append(f"ok\t{str(self.ok).lower()}")
        if include_timing and self.elapsed is not None:
            lines.append(f"elapsed_seconds\t{self.elapsed:.3f}")
        return '\n'.join(lines)

    def render(self, as_json: bool) -> str:
        return self.render_json() if as_json else self.render_lines()

    def write(self, path: str) -> None:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(self.render_json())
            handle.write('\n')


def _line_value(value: Any) -> str:
    plain = to_jsonable(value, SIGNIFICANT_DIGITS)
    if isinstance(plain, bool):
        return str(plain).lower()
    if isinstance(plain, float):
        return f"{plain:.{SIGNIFICANT_DIGITS}g}"
    if isinstance(plain, (int, str)):
        return str(plain)
    return json.dumps(plain)
