"""
Reading and writing the YAML input formats: ring files, connection files,
matrix files and complex files.  Scalars are always written as strings
"a" or "a/b".

Errors name the file and, where the YAML node is known, the line.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from . import linalg as la
from .connection import ConnectionGerm, SeriesMatrix
from .cyclic import BaseComplex, EquivariantComplex
from .errors import InputError, QsplitError
from .quantum_ring import QuantumRingSlice, validate_ring
from .scalars import format_scalar, parse_scalar


class _Doc:
    """Parsed YAML plus the line of every mapping key, for error messages."""

    def __init__(self, text: str, path: str):
        self.path = path
        self.lines: Dict[Tuple, int] = {}
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
            self.data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f":{mark.line + 1}" if mark is not None else ""
            raise InputError(f"{path}{where}: invalid YAML ({getattr(exc, 'problem', exc)})") from None
        if node is not None:
            self._walk(node, ())
        if not isinstance(self.data, dict):
            raise InputError(f"{path}: expected a mapping at top level")

    def _walk(self, node, prefix):
        self.lines.setdefault(prefix, node.start_mark.line + 1)
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key = yaml.safe_load(yaml.serialize(k)) if k.tag != "tag:yaml.org,2002:str" else k.value
                self._walk(v, prefix + (key,))
        elif isinstance(node, yaml.SequenceNode):
            for n, v in enumerate(node.value):
                self._walk(v, prefix + (n,))

    def error(self, msg: str, *keypath) -> InputError:
        line = None
        for cut in range(len(keypath), -1, -1):
            line = self.lines.get(tuple(keypath[:cut]))
            if line is not None:
                break
        where = f":{line}" if line is not None else ""
        return InputError(f"{self.path}{where}: {msg}")

    def get(self, *keypath, required=True, default=None):
        cur = self.data
        for k in keypath:
            if not isinstance(cur, dict) or k not in cur:
                if required:
                    raise self.error(f"missing field {'.'.join(map(str, keypath))}", *keypath)
                return default
            cur = cur[k]
        return cur


def _read(path) -> _Doc:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    return _Doc(text, str(path))


def _int(doc: _Doc, raw, *keypath) -> int:
    if isinstance(raw, bool):
        raise doc.error(f"expected an integer, got {raw!r}", *keypath)
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise doc.error(f"expected an integer, got {raw!r}", *keypath) from None


def _matrix(doc: _Doc, raw, size: Optional[int], *keypath) -> la.Matrix:
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise doc.error("expected a list of rows", *keypath)
    try:
        m = [[parse_scalar(str(x)) for x in row] for row in raw]
    except InputError as exc:
        raise doc.error(str(exc), *keypath) from None
    n = len(m)
    if any(len(r) != n for r in m) or (size is not None and n != size):
        raise doc.error(f"expected a {size} x {size} matrix", *keypath)
    return m


def _dump_matrix(m: la.Matrix) -> List[List[str]]:
    return [[format_scalar(x) for x in row] for row in m]


def _dump(data: dict) -> str:
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None, allow_unicode=True)


# --- connections ----------------------------------------------------------------


def load_connection(path) -> ConnectionGerm:
    doc = _read(path)
    size = _int(doc, doc.get("size"), "size")
    conv = doc.get("convention")
    if conv not in ("plus", "minus"):
        raise doc.error("convention must be 'plus' or 'minus'", "convention")
    mats_raw = doc.get("matrices")
    if not isinstance(mats_raw, dict) or not mats_raw:
        raise doc.error("matrices must map coefficient index to matrix", "matrices")
    idx = {_int(doc, k, "matrices", k): k for k in mats_raw}
    if min(idx) < 0:
        raise doc.error("coefficient indices must be nonnegative", "matrices")
    mats = [la.zeros(size) if k not in idx else _matrix(doc, mats_raw[idx[k]], size, "matrices", idx[k])
            for k in range(max(idx) + 1)]
    trunc = doc.get("truncation", required=False)
    return ConnectionGerm(mats, conv, truncation=None if trunc is None else _int(doc, trunc, "truncation"),
                          name=doc.get("name", required=False))


def dump_connection(conn: ConnectionGerm) -> str:
    data: Dict[str, Any] = {}
    if conn.name:
        data["name"] = conn.name
    data["size"] = conn.size
    data["convention"] = conn.convention
    if conn.truncation is not None:
        data["truncation"] = conn.truncation
    data["matrices"] = {k: _dump_matrix(m) for k, m in enumerate(conn.display_matrices())}
    return _dump(data)


# --- matrices and series matrices ------------------------------------------------


def load_matrix(path):
    """
    A constant matrix (key ``matrix``) or a series matrix (key
    ``coefficients``: index -> matrix).  Returns a Matrix or SeriesMatrix.
    """
    doc = _read(path)
    size = doc.get("size", required=False)
    if size is not None:
        size = _int(doc, size, "size")
    if "matrix" in doc.data:
        return _matrix(doc, doc.data["matrix"], size, "matrix")
    coeffs = doc.get("coefficients")
    if not isinstance(coeffs, dict) or not coeffs:
        raise doc.error("coefficients must map index to matrix", "coefficients")
    idx = {_int(doc, k, "coefficients", k): k for k in coeffs}
    if min(idx) < 0:
        raise doc.error("coefficient indices must be nonnegative", "coefficients")
    n = size if size is not None else len(coeffs[idx[min(idx)]])
    mats = [la.zeros(n) if k not in idx else _matrix(doc, coeffs[idx[k]], n, "coefficients", idx[k])
            for k in range(max(idx) + 1)]
    order = doc.get("order", required=False)
    sm = SeriesMatrix(mats)
    return sm.truncate(_int(doc, order, "order")) if order is not None else sm


def dump_matrix(m) -> str:
    if isinstance(m, SeriesMatrix):
        return _dump({"size": m.size, "order": m.order,
                      "coefficients": {k: _dump_matrix(c) for k, c in enumerate(m.coeffs)}})
    return _dump({"size": len(m), "matrix": _dump_matrix(m)})


# --- rings -------------------------------------------------------------------------


def load_ring(path) -> QuantumRingSlice:
    doc = _read(path)
    for section in ("meta", "basis", "product", "c1"):
        doc.get(section)
    try:
        return validate_ring(doc.data)
    except QsplitError as exc:
        section = {"GradingViolation": "product", "AssociativityFailure": "product",
                   "UnitFailure": "meta"}.get(type(exc).__name__, "product")
        line = doc.lines.get((section,))
        where = f":{line}" if line else ""
        raise type(exc)(f"{doc.path}{where}: {exc}") from None
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"{doc.path}: malformed ring data ({exc})") from None


def ring_to_data(ring: QuantumRingSlice) -> dict:
    return {
        "meta": {"name": ring.name, "dim_C": ring.dim_C, "unit": ring.labels[ring.unit_index]},
        "basis": [{"label": lab, "degree": d} for lab, d in zip(ring.labels, ring.degrees)],
        "product": {
            f"{ring.labels[i]}*{ring.labels[j]}": [[format_scalar(N), e, ring.labels[k]] for N, e, k in terms]
            for (i, j), terms in sorted(ring.products.items())
        },
        "c1": {ring.labels[i]: format_scalar(c) for i, c in sorted(ring.c1.items())},
    }


def dump_ring(ring: QuantumRingSlice) -> str:
    return _dump(ring_to_data(ring))


# --- complexes ------------------------------------------------------------------------


@dataclass
class ComplexFile:
    """A complex file: the base complex, an optional group action, and cocycle data."""

    base: BaseComplex
    sigma: Dict[int, List[List[int]]]
    p: Optional[int] = None
    m: Optional[int] = None
    cocycle: Optional[Tuple[int, List[int]]] = None

    def equivariant(self, p: Optional[int] = None, m: Optional[int] = None) -> EquivariantComplex:
        p = p if p is not None else self.p
        m = m if m is not None else self.m
        if p is None or m is None:
            raise InputError("complex file has no p, m and none were given")
        return EquivariantComplex(p, m, dict(self.base.dims), dict(self.base.d), dict(self.sigma))


def _int_matrix(doc, raw, rows, cols, *keypath):
    if not isinstance(raw, list) or len(raw) != rows or any(
            not isinstance(r, list) or len(r) != cols for r in raw):
        raise doc.error(f"expected a {rows} x {cols} integer matrix", *keypath)
    try:
        return [[int(x) for x in r] for r in raw]
    except (TypeError, ValueError):
        raise doc.error("matrix entries must be integers", *keypath) from None


def load_complex(path) -> ComplexFile:
    doc = _read(path)
    dims_raw = doc.get("degrees")
    if not isinstance(dims_raw, dict):
        raise doc.error("degrees must map degree to rank", "degrees")
    dims = {_int(doc, k, "degrees", k): _int(doc, v, "degrees", k) for k, v in dims_raw.items()}
    d = {}
    for k, raw in (doc.get("differential", required=False) or {}).items():
        q = _int(doc, k, "differential", k)
        d[q] = _int_matrix(doc, raw, dims.get(q + 1, 0), dims.get(q, 0), "differential", k)
    sigma = {}
    for k, raw in (doc.get("sigma", required=False) or {}).items():
        q = _int(doc, k, "sigma", k)
        sigma[q] = _int_matrix(doc, raw, dims.get(q, 0), dims.get(q, 0), "sigma", k)
    coc = doc.get("cocycle", required=False)
    cocycle = None
    if coc is not None:
        vec = doc.get("cocycle", "vector")
        if not isinstance(vec, list):
            raise doc.error("cocycle vector must be a list", "cocycle", "vector")
        cocycle = (_int(doc, doc.get("cocycle", "degree"), "cocycle", "degree"),
                   [_int(doc, x, "cocycle", "vector") for x in vec])
    base = BaseComplex(dims, d)
    bad = base.check()
    if bad:
        raise doc.error("; ".join(bad), "differential")
    p, m = doc.get("p", required=False), doc.get("m", required=False)
    return ComplexFile(base, sigma, None if p is None else _int(doc, p, "p"),
                       None if m is None else _int(doc, m, "m"), cocycle)


def dump_complex(cf: ComplexFile) -> str:
    data: Dict[str, Any] = {}
    if cf.p is not None:
        data["p"] = cf.p
    if cf.m is not None:
        data["m"] = cf.m
    data["degrees"] = dict(sorted(cf.base.dims.items()))
    if cf.base.d:
        data["differential"] = dict(sorted(cf.base.d.items()))
    if cf.sigma:
        data["sigma"] = dict(sorted(cf.sigma.items()))
    if cf.cocycle is not None:
        data["cocycle"] = {"degree": cf.cocycle[0], "vector": list(cf.cocycle[1])}
    return _dump(data)


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8")
