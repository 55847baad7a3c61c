"""
Matrix file format: a JSON document with dim and row-major data.

    # lines starting with '#' are comments
    {"dim": 2, "data": [2, 1, 1, 3], "name": "A"}

Whitespace is free and trailing '# ...' comments are stripped before parsing.
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from errors import MatrixFormatError, NonFinite
from matcore import SymMatrix

logger = logging.getLogger(__name__)

ASYMMETRY_WARN_TOL = 1e-9


@dataclass(frozen=True)
class MatrixDocument:
    dim: int
    data: List[float]
    name: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise MatrixFormatError(f"dim must be a positive integer, got {self.dim!r}")
        if len(self.data) != self.dim * self.dim:
            raise MatrixFormatError(
                f"data must hold dim^2 = {self.dim * self.dim} values, got {len(self.data)}"
            )

    def to_array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=float).reshape(self.dim, self.dim)

    def to_dict(self) -> Dict:
        document = {'dim': self.dim, 'data': list(self.data)}
        if self.name is not None:
            document['name'] = self.name
        return document


def _strip_trailing_comment(line: str) -> str:
    """Cut the line at the first '#' outside a JSON string"""
    in_string = False
    escaped = False
    for i, ch in enumerate(line):
        if in_string:
            if escaped:
                escaped = False
            elif ch == '\\':
                escaped = True
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch == '#':
            return line[:i]
    return line


def strip_comments(text: str) -> str:
    lines = []
    for line in text.splitlines():
        if line.lstrip().startswith('#'):
            continue
        lines.append(_strip_trailing_comment(line))
    return '\n'.join(lines)


def parse_matrix_text(text: str, source: str = "<text>") -> MatrixDocument:
    try:
        raw = json.loads(strip_comments(text))
    except json.JSONDecodeError as e:
        raise MatrixFormatError(f"{source}: not a valid matrix document: {str(e)}") from e
    if not isinstance(raw, dict) or 'dim' not in raw or 'data' not in raw:
        raise MatrixFormatError(f"{source}: expected an object with 'dim' and 'data'")
    data = raw['data']
    if not isinstance(data, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
        raise MatrixFormatError(f"{source}: 'data' must be a flat list of numbers")
    name = raw.get('name')
    return MatrixDocument(raw['dim'], [float(v) for v in data], None if name is None else str(name))


def read_text(path: str) -> str:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return handle.read()
    except OSError as e:
        raise MatrixFormatError(f"cannot read {path}: {e.strerror}") from e


def load_matrix_document(path: str) -> MatrixDocument:
    return parse_matrix_text(read_text(path), source=path)


def to_sym_matrix(doc: MatrixDocument) -> SymMatrix:
    """Symmetrize by averaging with the transpose, warning on visible asymmetry"""
    arr = doc.to_array()
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"matrix {doc.name or '(unnamed)'} contains NaN or Inf entries")
    matrix = SymMatrix(arr, name=doc.name)
    scale = max(1.0, float(np.max(np.abs(arr))))
    if matrix.raw_asymmetry > ASYMMETRY_WARN_TOL * scale:
        logger.warning(f"Matrix {doc.name or '(unnamed)'} is not symmetric "
                       f"(max asymmetry {matrix.raw_asymmetry:.3e}); using (M + M^T)/2")
    return matrix


def load_matrix(path: str) -> SymMatrix:
    return to_sym_matrix(load_matrix_document(path))


def matrix_to_document(m: SymMatrix, name: Optional[str] = None) -> Dict:
    """Full-precision document that loads back to the same entries"""
    return MatrixDocument(m.dim, [float(v) for v in m.entries.reshape(-1)],
                          name if name is not None else m.name).to_dict()


def dump_matrix(m: SymMatrix, path: str, name: Optional[str] = None) -> None:
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(matrix_to_document(m, name), handle, indent=2)
        handle.write('\n')


def file_digest(path: str) -> str:
    """sha256 of the raw file bytes"""
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as handle:
            for chunk in iter(lambda: handle.read(65536), b''):
                digest.update(chunk)
    except OSError as e:
        raise MatrixFormatError(f"cannot read {path}: {e.strerror}") from e
    return digest.hexdigest()
