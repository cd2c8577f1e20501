"""JSON interchange formats shared by the CLI.

Readers raise :class:`InputError` with a location: ``file:line:col`` for
malformed JSON and a JSON path such as ``$.values[3]`` for schema errors.
Writers print floats with 17 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .abelian import FiniteAbelianGroup, GroupSignal
from .cnn import LatticeFunction, kernel3x3
from .errors import ConvAlgError
from .graph import Graph, GraphShiftSystem, PolynomialFilter, ShiftKind, build_shift
from .lattice import MeetSemilattice, build_lattice
from .multishift import MultiShiftSystem


class InputError(ConvAlgError):
    pass


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _fail(where: str, msg: str):
    raise InputError(f"{where}: {msg}")


def _get(obj, key: str, where: str):
    if not isinstance(obj, dict):
        _fail(where, "expected an object")
    if key not in obj:
        _fail(where, f"missing key {key!r}")
    return obj[key]


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(where, f"expected an integer, got {v!r}")
    return v


def _scalar(v, where: str):
    if isinstance(v, bool):
        _fail(where, f"expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        if not math.isfinite(v):
            _fail(where, "non-finite number")
        return v
    if isinstance(v, list) and len(v) == 2 and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v):
        if not all(math.isfinite(p) for p in v):
            _fail(where, "non-finite number")
        return complex(v[0], v[1])
    _fail(where, f"expected a number or [re, im], got {v!r}")


def parse_vector(values, where: str = "$") -> np.ndarray:
    if not isinstance(values, list):
        _fail(where, "expected an array of numbers")
    items = [_scalar(v, f"{where}[{i}]") for i, v in enumerate(values)]
    if any(isinstance(v, complex) for v in items):
        return np.array(items, dtype=complex)
    if items and all(isinstance(v, int) for v in items):
        return np.array(items, dtype=np.int64)
    return np.array(items, dtype=float)


def parse_matrix(rows, where: str = "$") -> np.ndarray:
    if not isinstance(rows, list):
        _fail(where, "expected an array of rows")
    out = [parse_vector(r, f"{where}[{i}]") for i, r in enumerate(rows)]
    widths = {r.size for r in out}
    if len(widths) > 1:
        _fail(where, f"rows have different lengths {sorted(widths)}")
    if not out:
        return np.zeros((0, 0))
    return np.array(np.vstack(out))


def _unwrap(obj, key: str):
    if isinstance(obj, dict):
        return _get(obj, key, "$"), f"$.{key}"
    return obj, "$"


def parse_group(obj, where: str = "$") -> FiniteAbelianGroup:
    orders = _get(obj, "orders", where)
    if not isinstance(orders, list) or not orders:
        _fail(f"{where}.orders", "expected a non-empty array of positive integers")
    orders = [_int(n, f"{where}.orders[{i}]") for i, n in enumerate(orders)]
    for i, n in enumerate(orders):
        if n < 1:
            _fail(f"{where}.orders[{i}]", f"order must be positive, got {n}")
    return FiniteAbelianGroup(tuple(orders))


def parse_group_signal(obj) -> GroupSignal:
    g = parse_group(_get(obj, "group", "$"), "$.group")
    values = parse_vector(_get(obj, "values", "$"), "$.values")
    if values.size != g.size:
        _fail("$.values", f"expected {g.size} values for group {list(g.orders)}, got {values.size}")
    return GroupSignal(g, values)


def parse_graph(obj) -> Graph:
    n = _int(_get(obj, "n", "$"), "$.n")
    directed = obj.get("directed", False)
    if not isinstance(directed, bool):
        _fail("$.directed", "expected true or false")
    edges = obj.get("edges", [])
    if not isinstance(edges, list):
        _fail("$.edges", "expected an array")
    parsed = []
    for i, e in enumerate(edges):
        where = f"$.edges[{i}]"
        if not isinstance(e, list) or len(e) not in (2, 3):
            _fail(where, "expected [src, dst] or [src, dst, weight]")
        src, dst = _int(e[0], f"{where}[0]"), _int(e[1], f"{where}[1]")
        w = _scalar(e[2], f"{where}[2]") if len(e) == 3 else 1.0
        if isinstance(w, complex):
            _fail(f"{where}[2]", "edge weights must be real")
        if not (0 <= src < n and 0 <= dst < n):
            _fail(where, f"node index out of range for n={n}")
        parsed.append((src, dst, w))
    try:
        return Graph(n, tuple(parsed), directed)
    except ConvAlgError as exc:
        raise InputError(f"$.edges: {exc}") from exc


def parse_shift_system(obj, shift: str | None = None, where: str = "$") -> GraphShiftSystem:
    """A graph object plus optional ``shift``, ``matrix`` and ``decomposition`` keys."""
    graph = parse_graph(obj)
    kind = shift or obj.get("shift", "adjacency")
    try:
        kind = ShiftKind(kind)
    except ValueError:
        _fail(f"{where}.shift", f"unknown shift kind {kind!r}; expected one of {[k.value for k in ShiftKind]}")
    custom = parse_matrix(obj["matrix"], f"{where}.matrix") if "matrix" in obj else None
    decomposition = None
    if "decomposition" in obj:
        d = obj["decomposition"]
        decomposition = (
            parse_matrix(_get(d, "U", f"{where}.decomposition"), f"{where}.decomposition.U"),
            parse_vector(_get(d, "eigenvalues", f"{where}.decomposition"), f"{where}.decomposition.eigenvalues"),
        )
    return build_shift(graph, kind, custom, decomposition)


def parse_signal(obj) -> np.ndarray:
    values, where = _unwrap(obj, "values")
    return parse_vector(values, where)


def parse_matrix_file(obj) -> np.ndarray:
    rows, where = _unwrap(obj, "matrix")
    return parse_matrix(rows, where)


def parse_filter(obj) -> PolynomialFilter:
    coeffs, where = _unwrap(obj, "coeffs")
    return PolynomialFilter(parse_vector(coeffs, where))


def parse_lattice(obj) -> MeetSemilattice:
    """``{"n": N, "leq": [[i, j], ...]}``; reflexive and transitive closure is taken."""
    n = _int(_get(obj, "n", "$"), "$.n")
    pairs = _get(obj, "leq", "$")
    if not isinstance(pairs, list):
        _fail("$.leq", "expected an array of [i, j] pairs")
    clean = []
    for i, p in enumerate(pairs):
        where = f"$.leq[{i}]"
        if not isinstance(p, list) or len(p) != 2:
            _fail(where, "expected [i, j]")
        a, b = _int(p[0], f"{where}[0]"), _int(p[1], f"{where}[1]")
        if not (0 <= a < n and 0 <= b < n):
            _fail(where, f"element index out of range for n={n}")
        clean.append((a, b))
    return build_lattice(n, clean, close=True, labels=obj.get("labels", ()))


def parse_lattice_function(obj) -> LatticeFunction:
    offset = _get(obj, "offset", "$")
    if not isinstance(offset, list) or len(offset) != 2:
        _fail("$.offset", "expected [x0, y0]")
    x0, y0 = _int(offset[0], "$.offset[0]"), _int(offset[1], "$.offset[1]")
    w = _int(_get(obj, "width", "$"), "$.width")
    h = _int(_get(obj, "height", "$"), "$.height")
    values = parse_vector(_get(obj, "values", "$"), "$.values")
    if np.iscomplexobj(values):
        _fail("$.values", "image values must be real")
    if values.size != w * h:
        _fail("$.values", f"expected width*height = {w * h} values, got {values.size}")
    return LatticeFunction((x0, y0), values.reshape(h, w))


def parse_kernel_or_image(obj) -> LatticeFunction:
    """A 9-value array (or ``{"values": [...9]}`` without offset) is a 3x3 kernel."""
    if isinstance(obj, list) or (isinstance(obj, dict) and "offset" not in obj):
        values, where = _unwrap(obj, "values")
        v = parse_vector(values, where)
        if v.size != 9 or np.iscomplexobj(v):
            _fail(where, f"a 3x3 kernel needs 9 real values, got {v.size}")
        return kernel3x3(v)
    return parse_lattice_function(obj)


def parse_multi_system(obj) -> MultiShiftSystem:
    n = _int(_get(obj, "n", "$"), "$.n")
    weights = parse_vector(_get(obj, "weights", "$"), "$.weights")
    systems = _get(obj, "systems", "$")
    if not isinstance(systems, list):
        _fail("$.systems", "expected an array of graph-shift objects")
    built = [parse_shift_system(s, where=f"$.systems[{i}]") for i, s in enumerate(systems)]
    return MultiShiftSystem(n, tuple(built), weights)


# -- writing ------------------------------------------------------------------


def fmt(x: float, digits: int = 17) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    if float(x).is_integer() and abs(x) < 1e17:
        return str(int(x))
    return format(x, f".{digits}g")


def dumps(obj, digits: int = 17) -> str:
    """Compact-ish JSON with a fixed number of significant digits for floats."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj), digits)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(encode_array(obj), digits)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v, digits) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v, digits)}" for k, v in obj.items()) + "}"
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag], digits)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def encode_array(a) -> list:
    """Nested lists; complex entries become ``[re, im]``, real arrays stay bare."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return np.stack([a.real, a.imag], axis=-1).tolist()
    return a.tolist()


def encode_group_signal(f: GroupSignal) -> dict:
    return {"group": {"orders": list(f.group.orders)}, "values": encode_array(f.values)}


def encode_lattice_function(f: LatticeFunction) -> dict:
    return {
        "offset": list(f.offset),
        "width": f.width,
        "height": f.height,
        "values": encode_array(f.values.reshape(-1)),
    }


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")
