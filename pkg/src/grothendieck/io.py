"""Matrix files and report serialization.

JSON matrix files look like ``{"rows": 2, "cols": 2, "entries": [[re, im], ...]}``
with the entries in row-major order. CSV files hold real matrices only: a
``rows,cols`` header followed by one comma-separated line per row.

Reports are written by a small deterministic serializer: keys keep their
insertion order and every float is printed with 17 significant digits, so
the same computation always produces the same bytes and reading a number
back gives the identical double.
"""

import json
import math
from pathlib import Path

import numpy as np

from .config import DomainError

__all__ = [
    "MatrixFormatError",
    "read_matrix",
    "write_matrix",
    "matrix_to_json",
    "matrix_from_json",
    "dumps",
    "write_report",
    "to_plain",
]


class MatrixFormatError(DomainError):
    code = "malformed_input"


def _fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"non-finite value {x!r} cannot be serialized")
    if x == 0.0:
        return "0.0"  # also folds -0.0
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def to_plain(obj):
    """Convert numpy scalars/arrays and dataclass-free containers to plain Python.

    Complex numbers become ``[re, im]`` pairs; arrays become nested lists.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad + json.dumps(k) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        # lists of scalars stay on one line
        if all(not isinstance(v, (dict, list)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(_scalar(obj))


def _scalar(v):
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON text for ``obj`` (see the module docstring)."""
    out = []
    _emit(to_plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def write_report(report, path=None):
    """Serialize ``report``; write it to ``path`` if given and return the text."""
    text = dumps(report)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def matrix_to_json(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    rows, cols = M.shape
    entries = [[float(z.real), float(z.imag)] for z in M.ravel()]
    return dumps({"rows": rows, "cols": cols, "entries": entries})


def _check_finite(M, where):
    bad = np.argwhere(~np.isfinite(M.view(float).reshape(M.shape[0], -1)))
    if bad.size:
        i, j = bad[0]
        raise MatrixFormatError(f"{where}: non-finite entry at row {i + 1}, column {j // 2 + 1}")


def matrix_from_json(text, where="<json>"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixFormatError(f"{where}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(data, dict) or not {"rows", "cols", "entries"} <= data.keys():
        raise MatrixFormatError(f"{where}: expected an object with rows, cols and entries")
    rows, cols, entries = data["rows"], data["cols"], data["entries"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise MatrixFormatError(f"{where}: rows and cols must be positive integers")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise MatrixFormatError(f"{where}: expected {rows * cols} entries, got {len(entries) if isinstance(entries, list) else 'none'}")
    vals = np.empty(rows * cols, dtype=complex)
    for k, e in enumerate(entries):
        ok = (
            isinstance(e, list)
            and len(e) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)
        )
        if not ok:
            raise MatrixFormatError(f"{where}: entry {k} (row {k // cols + 1}, column {k % cols + 1}) is not an [re, im] pair")
        vals[k] = complex(float(e[0]), float(e[1]))
    M = vals.reshape(rows, cols)
    _check_finite(M, where)
    return M


def matrix_to_csv(M):
    M = np.atleast_2d(np.asarray(M))
    if np.iscomplexobj(M):
        if np.any(M.imag != 0):
            raise DomainError("CSV holds real matrices only")
        M = M.real
    rows, cols = M.shape
    lines = [f"{rows},{cols}"]
    lines += [",".join(_fmt_float(x) for x in row) for row in M]
    return "\n".join(lines) + "\n"


def matrix_from_csv(text, where="<csv>"):
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or not lines[0]:
        raise MatrixFormatError(f"{where}: empty file")
    try:
        rows, cols = (int(x) for x in lines[0].split(","))
    except ValueError:
        raise MatrixFormatError(f"{where}: line 1: header must be 'rows,cols'") from None
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"{where}: line 1: rows and cols must be positive")
    if len(lines) - 1 != rows:
        raise MatrixFormatError(f"{where}: expected {rows} data lines, got {len(lines) - 1}")
    M = np.empty((rows, cols))
    for i, ln in enumerate(lines[1:]):
        cells = ln.split(",")
        if len(cells) != cols:
            raise MatrixFormatError(f"{where}: line {i + 2}: expected {cols} values, got {len(cells)}")
        for j, c in enumerate(cells):
            c = c.strip()
            if "j" in c.lower():
                raise MatrixFormatError(f"{where}: line {i + 2}, column {j + 1}: complex values are not allowed in CSV")
            try:
                M[i, j] = float(c)
            except ValueError:
                raise MatrixFormatError(f"{where}: line {i + 2}, column {j + 1}: cannot parse {c!r}") from None
    M = M.astype(complex)
    _check_finite(M, where)
    return M


def _infer_format(path, fmt):
    if fmt:
        if fmt not in ("json", "csv"):
            raise DomainError(f"unknown format {fmt!r}")
        return fmt
    return "csv" if str(path).lower().endswith(".csv") else "json"


def read_matrix(path, fmt=None):
    """Read a matrix file; ``fmt`` defaults to the file extension (JSON otherwise)."""
    fmt = _infer_format(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise MatrixFormatError(f"{path}: {e.strerror}") from None
    if fmt == "csv":
        return matrix_from_csv(text, str(path))
    return matrix_from_json(text, str(path))


def write_matrix(M, path, fmt=None):
    fmt = _infer_format(path, fmt)
    text = matrix_to_csv(M) if fmt == "csv" else matrix_to_json(M)
    Path(path).write_text(text, encoding="utf-8")
    return text
