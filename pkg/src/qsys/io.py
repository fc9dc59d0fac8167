"""File formats: system descriptions, triangles, combinations, flow specs,
bundled fixtures, and deterministic JSON/CSV output."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra.numbers import GaussianRational, as_exact
from .algebra.parse import ParseError, parse_number, parse_polynomial, parse_rational
from .analytic.paths import Triangle
from .constructions import AlgebraicSpec, from_algebraic
from .pfaffian import FuchsianSystem, MatrixOneForm
from .schlesinger import ConfigurationPath

__all__ = [
    "InputError",
    "load_json",
    "read_json_file",
    "system_from_dict",
    "system_to_dict",
    "read_system",
    "write_system",
    "triangle_from_dict",
    "parse_complex",
    "combination_from_data",
    "flow_spec_from_dict",
    "fixture_names",
    "load_fixture",
    "normalize",
    "dumps",
    "csv_text",
    "PROVENANCE_TAGS",
]

PROVENANCE_TAGS = ("published", "trivial", "derived-with-oracle")
FLOAT_DIGITS = 15


class InputError(ValueError):
    """Malformed input file, with a location when one is known."""

    def __init__(self, message: str, where: str | None = None, line: int | None = None, column: int | None = None):
        self.where, self.line, self.column = where, line, column
        loc = []
        if where:
            loc.append(where)
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        super().__init__(f"{': '.join([', '.join(loc), message]) if loc else message}")


def load_json(text: str, where: str | None = None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(exc.msg, where, exc.lineno, exc.colno) from None


def read_json_file(path) -> object:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", str(p)) from None
    return load_json(text, str(p))


def _expr(text, field, variables=None):
    if isinstance(text, (int, Fraction)):
        return text
    if not isinstance(text, str):
        raise InputError(f"expected an expression string, got {type(text).__name__}", field)
    try:
        return parse_rational(text, variables)
    except ParseError as exc:
        raise InputError(str(exc), field, column=exc.column + 1) from None


def _number(x, field):
    if isinstance(x, bool):
        raise InputError("expected a number", field)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise InputError("floating point numbers are not exact; write them as strings such as \"1/2\"", field)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, str)) for v in x):
        re, im = (_number(v, field) for v in x)
        return as_exact(GaussianRational(re, im))
    if not isinstance(x, str):
        raise InputError(f"expected a number, got {type(x).__name__}", field)
    try:
        return parse_number(x)
    except ParseError as exc:
        raise InputError(str(exc), field, column=exc.column + 1) from None


def _matrix(data, field, n=None):
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise InputError("expected a square matrix (list of rows)", field)
    size = len(data)
    if any(len(r) != size for r in data):
        raise InputError("matrix is not square", field)
    if n is not None and size != n:
        raise InputError(f"matrix is {size}x{size}, expected {n}x{n}", field)
    return tuple(tuple(_number(x, f"{field}[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(data))


def system_from_dict(data, where: str = "system"):
    """MatrixOneForm or FuchsianSystem from one of the three JSON layouts.

    * general: ``{"n", "variables", "entries"}`` where ``entries[i][j]`` is a
      list of ``{"dt": var, "coeff": expr}`` terms;
    * Fuchsian shorthand: ``{"poles", "residues"}``;
    * algebraic function: ``{"P": expr, "y": name}``.
    """
    if not isinstance(data, dict):
        raise InputError("system description must be a JSON object", where)
    if "poles" in data:
        return _fuchsian_from_dict(data, where)
    if "entries" in data:
        return _form_from_dict(data, where)
    if "P" in data:
        y = data.get("y", "y")
        try:
            P = parse_polynomial(data["P"])
        except ParseError as exc:
            raise InputError(str(exc), f"{where}.P", column=exc.column + 1) from None
        try:
            return from_algebraic(AlgebraicSpec(P, y), data.get("variables"))
        except ValueError as exc:
            raise InputError(str(exc), where) from None
    raise InputError("expected keys 'poles'/'residues', 'entries' or 'P'", where)


def _fuchsian_from_dict(data, where):
    poles, residues = data.get("poles"), data.get("residues")
    if not isinstance(poles, list) or not isinstance(residues, list):
        raise InputError("'poles' and 'residues' must be lists", where)
    if len(poles) != len(residues):
        raise InputError(f"{len(poles)} poles but {len(residues)} residues", where)
    ps = [_number(a, f"{where}.poles[{k}]") for k, a in enumerate(poles)]
    n = None
    rs = []
    for k, A in enumerate(residues):
        M = _matrix(A, f"{where}.residues[{k}]", n)
        n = len(M)
        rs.append(M)
    if "n" in data and data["n"] != n:
        raise InputError(f"declared n = {data['n']} but residues are {n}x{n}", where)
    try:
        return FuchsianSystem(tuple(ps), tuple(rs))
    except ValueError as exc:
        raise InputError(str(exc), where) from None


def _form_from_dict(data, where):
    variables = data.get("variables", ["t"])
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise InputError("'variables' must be a list of names", where)
    entries = data["entries"]
    n = data.get("n", len(entries) if isinstance(entries, list) else None)
    if not isinstance(entries, list) or len(entries) != n or any(not isinstance(r, list) or len(r) != n for r in entries):
        raise InputError(f"'entries' must be an {n}x{n} matrix", where)
    vidx = {v: k for k, v in enumerate(variables)}
    rows = []
    for i, row in enumerate(entries):
        out_row = []
        for j, cell in enumerate(row):
            field = f"{where}.entries[{i}][{j}]"
            acc = [0] * len(variables)
            terms = cell if isinstance(cell, list) else [cell]
            for t_i, term in enumerate(terms):
                if term in (0, "0"):
                    continue
                if not isinstance(term, dict) or "dt" not in term or "coeff" not in term:
                    raise InputError("each term must be {\"dt\": var, \"coeff\": expr}", f"{field}[{t_i}]")
                if term["dt"] not in vidx:
                    raise InputError(f"unknown differential d{term['dt']}", f"{field}[{t_i}]")
                k = vidx[term["dt"]]
                acc[k] = acc[k] + _expr(term["coeff"], f"{field}[{t_i}].coeff", variables)
            out_row.append(acc)
        rows.append(out_row)
    try:
        return MatrixOneForm(tuple(variables), rows)
    except ValueError as exc:
        raise InputError(str(exc), where) from None


def _num_str(x) -> str | list:
    return str(as_exact(x))


def system_to_dict(system) -> dict:
    if isinstance(system, FuchsianSystem):
        return {
            "n": system.n,
            "poles": [_num_str(a) for a in system.poles],
            "residues": [[[_num_str(x) for x in row] for row in A] for A in system.residues],
        }
    if isinstance(system, MatrixOneForm):
        return {
            "n": system.n,
            "variables": list(system.variables),
            "entries": [
                [
                    [{"dt": v, "coeff": str(c)} for v, c in zip(system.variables, cell) if not c.is_zero()]
                    for cell in row
                ]
                for row in system.entries
            ],
        }
    raise TypeError(f"cannot serialize {type(system).__name__}")


def read_system(path):
    """System from a file; fixture files (with a ``system`` key) are unwrapped."""
    data = read_json_file(path)
    if isinstance(data, dict) and "system" in data:
        data = data["system"]
    return system_from_dict(data, str(path))


def write_system(system, path=None) -> str:
    text = json.dumps(system_to_dict(system), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_complex(x, field="value") -> complex:
    """``[re, im]``, a number, or an exact string such as ``"1/2+3i"``."""
    if isinstance(x, bool):
        raise InputError("expected a complex number", field)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list):
        if len(x) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
            raise InputError("complex numbers are [re, im]", field)
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(_number(x, field))
    raise InputError("expected a complex number", field)


def triangle_from_dict(data, where="triangle") -> Triangle:
    if not isinstance(data, dict) or "vertices" not in data:
        raise InputError("triangle needs 'vertices' (and optionally 'curvatures' or 'sweeps')", where)
    verts = [parse_complex(v, f"{where}.vertices[{k}]") for k, v in enumerate(data["vertices"])]
    if len(verts) != 3:
        raise InputError("a triangle has three vertices", where)
    try:
        if "sweeps" in data:
            return Triangle(verts, [float(s) for s in data["sweeps"]])
        return Triangle.from_curvatures(verts, [float(s) for s in data.get("curvatures", (0, 0, 0))])
    except ValueError as exc:
        raise InputError(str(exc), where) from None


def combination_from_data(data, n: int, where="combination") -> np.ndarray:
    """``n x n`` coefficient matrix, or a flat list of ``n`` scalars meaning
    the first row (a combination of the first solution's components)."""
    if not isinstance(data, list) or len(data) != n:
        raise InputError(f"combination must be an {n}x{n} matrix or a list of {n} numbers", where)
    if all(isinstance(r, list) and len(r) == n for r in data):
        C = np.array([[parse_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)]
                      for i, r in enumerate(data)], dtype=complex)
    else:
        C = np.zeros((n, n), dtype=complex)
        C[0] = [parse_complex(x, f"{where}[{j}]") for j, x in enumerate(data)]
    if not np.any(C):
        raise InputError("zero combination: at least one coefficient must be nonzero", where)
    return C


def flow_spec_from_dict(data, where="flow") -> tuple[ConfigurationPath, dict]:
    """``{"system": Fuchsian shorthand, "trajectories": [[waypoints...], ...],
    "tol", "checkpoints"}`` -> (path, options). Waypoint lists start at the
    system's poles."""
    if not isinstance(data, dict) or "system" not in data or "trajectories" not in data:
        raise InputError("flow spec needs 'system' and 'trajectories'", where)
    F = system_from_dict(data["system"], f"{where}.system")
    if not isinstance(F, FuchsianSystem):
        raise InputError("flow spec system must use the Fuchsian shorthand", where)
    traj = data["trajectories"]
    if not isinstance(traj, list) or len(traj) != len(F.poles):
        raise InputError(f"one trajectory per pole ({len(F.poles)}) is required", where)
    wps = []
    for k, (a, w) in enumerate(zip(F.poles, traj)):
        pts = [parse_complex(z, f"{where}.trajectories[{k}][{i}]") for i, z in enumerate(w)]
        if not pts:
            raise InputError("empty trajectory", f"{where}.trajectories[{k}]")
        a = complex(a)
        if abs(pts[0] - a) > 1e-12 * max(1.0, abs(a)):
            pts = [a] + pts
        if len(pts) < 2:
            pts = [a, a]
        wps.append(pts)
    residues = [[[complex(x) for x in row] for row in A] for A in F.residues]
    try:
        path = ConfigurationPath(wps, residues)
    except ValueError as exc:
        raise InputError(str(exc), where) from None
    opts = {k: data[k] for k in ("tol", "checkpoints") if k in data}
    return path, opts


# ----------------------------------------------------------------------------
# fixtures
# ----------------------------------------------------------------------------

def _fixture_dir():
    return resources.files("qsys") / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-5] for p in _fixture_dir().iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> dict:
    """Fixture record with the parsed system under ``"parsed"``.

    Every expected value must carry a provenance tag.
    """
    f = _fixture_dir() / f"{name}.json"
    if not f.is_file():
        raise InputError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")
    data = load_json(f.read_text(), f"fixture {name}")
    for k, exp in enumerate(data.get("expected", [])):
        if exp.get("provenance") not in PROVENANCE_TAGS:
            raise InputError(f"expected value without a valid provenance tag: {exp!r}", f"fixture {name}.expected[{k}]")
    if "system" in data:
        data["parsed"] = system_from_dict(data["system"], f"fixture {name}.system")
    elif "flow" in data:
        data["parsed"] = flow_spec_from_dict(data["flow"], f"fixture {name}.flow")[0]
    data["path"] = str(f)
    return data


# ----------------------------------------------------------------------------
# deterministic output
# ----------------------------------------------------------------------------

def _round(x: float) -> float:
    if not math.isfinite(x) or x == 0:
        return x
    return float(f"{x:.{FLOAT_DIGITS}g}")


def normalize(obj):
    """JSON-ready copy with floats at fixed precision and complex as [re, im]."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _round(x) if math.isfinite(x) else str(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize(obj.real), normalize(obj.imag)]
    if isinstance(obj, (Fraction, GaussianRational)):
        return str(obj)
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(normalize(obj), indent=indent, sort_keys=True)


def csv_text(schema: str, header, rows) -> str:
    """CSV with the schema string as a comment in row 1."""
    buf = _io.StringIO()
    buf.write(f"# {schema}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(x) for x in r])
    return buf.getvalue()


def _csv_cell(x):
    if isinstance(x, float):
        return repr(_round(x))
    return x
