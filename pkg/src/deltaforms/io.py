"""Deterministic JSON documents for currents, forms, and reports.

Conventions: rationals are "p/q" strings, generator index sets are 0-based
sorted integer lists, charts are optional on input and always canonical on
output, and serialization is byte-stable (sorted keys, fixed separators).
"""

import json
from fractions import Fraction as Q

from .currents import AffineMap, DeltaForm
from .linalg import Lattice, complement_lattice
from .polyhedra import Chart, Complex, Polyhedron, polyhedron
from .scalars import qof, qstr
from .superforms import PLFunction, Poly, SuperForm


class DocumentError(ValueError):
    """Input document malformed or inconsistent with its schema."""


# ------------------------------------------------------------------ rationals

def parse_q(value):
    if isinstance(value, bool):
        raise DocumentError("expected a rational, got a boolean")
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, str):
        try:
            return Q(value)
        except (ValueError, ZeroDivisionError):
            raise DocumentError(f"malformed rational {value!r}")
    raise DocumentError(f"expected a rational, got {type(value).__name__}")


def q_json(value):
    return qstr(qof(value))


def parse_q_vector(values, n=None):
    if not isinstance(values, list):
        raise DocumentError("expected a list of rationals")
    v = [parse_q(x) for x in values]
    if n is not None and len(v) != n:
        raise DocumentError(f"expected a vector of length {n}, got {len(v)}")
    return v


def vector_json(v):
    return [q_json(x) for x in v]


def parse_vector_text(text):
    """Displacement vector given on the command line as "a/b,c/d,..."."""
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise DocumentError(f"malformed vector {text!r}")
    return [parse_q(p) for p in parts]


def _require_keys(doc, required, optional=(), what="document"):
    if not isinstance(doc, dict):
        raise DocumentError(f"{what} must be an object")
    missing = [k for k in required if k not in doc]
    if missing:
        raise DocumentError(f"{what} is missing keys {missing}")
    unknown = sorted(set(doc) - set(required) - set(optional))
    if unknown:
        raise DocumentError(f"{what} has unknown keys {unknown}")


# ----------------------------------------------------------------- polyhedra

def polyhedron_json(cell):
    rows = []
    for a, b in cell.eqs_rational():
        rows.append((tuple(a), b))
        rows.append((tuple(-x for x in a), -b))
    ineq_rows, ineq_rhs = cell.ineqs_rational()
    for a, b in zip(ineq_rows, ineq_rhs):
        rows.append((tuple(a), b))
    rows.sort()
    return {"n": cell.n,
            "ineqs": [{"a": vector_json(a), "b": q_json(b)}
                      for a, b in rows]}


def _parse_constraint(doc, n, what):
    _require_keys(doc, ["a", "b"], what=what)
    return parse_q_vector(doc["a"], n), parse_q(doc["b"])


def parse_polyhedron(doc):
    _require_keys(doc, ["n", "ineqs"], optional=["eqs"], what="polyhedron")
    n = doc["n"]
    if not isinstance(n, int) or n < 0:
        raise DocumentError("polyhedron dimension must be a nonneg integer")
    if not isinstance(doc["ineqs"], list):
        raise DocumentError("polyhedron inequalities must be a list")
    ineqs = [_parse_constraint(c, n, "inequality") for c in doc["ineqs"]]
    eqs = [_parse_constraint(c, n, "equality") for c in doc.get("eqs", [])]
    cell = polyhedron(n, ineqs, eqs=eqs)
    if cell is None:
        raise DocumentError("polyhedron is empty")
    return cell


# --------------------------------------------------------------- polynomials

def poly_json(p):
    return [{"exps": list(e), "c": q_json(c)}
            for e, c in sorted(p.terms.items())]


def parse_poly(doc, n):
    if not isinstance(doc, list):
        raise DocumentError("polynomial must be a list of monomials")
    terms = {}
    for mono in doc:
        _require_keys(mono, ["exps", "c"], what="monomial")
        exps = mono["exps"]
        if (not isinstance(exps, list) or len(exps) != n
                or any(not isinstance(e, int) or e < 0 for e in exps)):
            raise DocumentError(f"monomial exponents must be {n} nonneg ints")
        key = tuple(exps)
        if key in terms:
            raise DocumentError("duplicate monomial in polynomial")
        terms[key] = parse_q(mono["c"])
    return Poly(n, terms)


# ---------------------------------------------------------------- superforms

def _index_set_json(idx):
    return [int(i) for i in idx]


def _parse_index_set(doc, n, what):
    if not isinstance(doc, list) or any(not isinstance(i, int) for i in doc):
        raise DocumentError(f"{what} must be a list of integers")
    if any(i < 0 or i >= n for i in doc):
        raise DocumentError(f"{what} index out of range for {n} variables")
    if list(doc) != sorted(set(doc)):
        raise DocumentError(f"{what} must be strictly increasing")
    return tuple(doc)


def superform_json(form):
    return {"terms": [{"poly": poly_json(p),
                       "dp": _index_set_json(i),
                       "ds": _index_set_json(j)}
                      for (i, j), p in sorted(form.terms.items())]}


def parse_superform(doc, n):
    _require_keys(doc, ["terms"], what="superform")
    if not isinstance(doc["terms"], list):
        raise DocumentError("superform terms must be a list")
    terms = {}
    for term in doc["terms"]:
        _require_keys(term, ["poly", "dp", "ds"], what="superform term")
        key = (_parse_index_set(term["dp"], n, "dp"),
               _parse_index_set(term["ds"], n, "ds"))
        if key in terms:
            raise DocumentError("duplicate generator index pair in superform")
        terms[key] = parse_poly(term["poly"], n)
    return SuperForm(n, terms)


# -------------------------------------------------------------------- charts

def chart_json(chart):
    return {"base": vector_json(chart.base),
            "basis": [[int(x) for x in row] for row in chart.basis]}


def parse_chart(doc, cell):
    """Validate a user-supplied chart of the cell and build it."""
    _require_keys(doc, ["base", "basis"], what="chart")
    base = parse_q_vector(doc["base"], cell.n)
    basis_doc = doc["basis"]
    if not isinstance(basis_doc, list) or len(basis_doc) != cell.dim:
        raise DocumentError(f"chart basis must list {cell.dim} vectors")
    basis = []
    for row in basis_doc:
        v = parse_q_vector(row, cell.n)
        if any(x.denominator != 1 for x in v):
            raise DocumentError("chart basis vectors must be integral")
        basis.append([int(x) for x in v])
    lat = Lattice(cell.n, basis)
    if lat != cell.span:
        raise DocumentError("chart basis does not generate the cell lattice")
    rel = [x - y for x, y in zip(base, cell.base_point)]
    if cell.span.coords(rel) is None or not cell.contains(base):
        raise DocumentError("chart base point does not lie on the cell")
    return Chart(cell.n, base, basis, complement_lattice(lat).rows)


# --------------------------------------------------------------- delta-forms

def deltaform_json(T):
    T = T.canonicalize()
    return {"n": T.n,
            "terms": [{"cell": polyhedron_json(cell),
                       "weight": q_json(w),
                       "form": superform_json(form),
                       "chart": chart_json(cell.chart)}
                      for cell, form, w in T.terms]}


def parse_deltaform(doc):
    _require_keys(doc, ["n", "terms"], what="delta-form")
    n = doc["n"]
    if not isinstance(n, int) or n < 0:
        raise DocumentError("delta-form dimension must be a nonneg integer")
    if not isinstance(doc["terms"], list):
        raise DocumentError("delta-form terms must be a list")
    terms = []
    for term in doc["terms"]:
        _require_keys(term, ["cell", "weight", "form"], optional=["chart"],
                      what="delta-form term")
        cell = parse_polyhedron(term["cell"])
        if cell.n != n:
            raise DocumentError("term cell has the wrong ambient dimension")
        weight = parse_q(term["weight"])
        form = parse_superform(term["form"], cell.dim)
        if "chart" in term:
            src = parse_chart(term["chart"], cell)
            rows, shift = cell.chart.transition_to(src)
            form = form.pullback_affine(rows, shift, k=cell.dim)
        terms.append((cell, form, weight))
    return DeltaForm(n, terms)


# ------------------------------------------------------------- PL functions

def plfunction_json(phi):
    cells = sorted(phi.maximal, key=lambda c: c.sort_key)
    pieces = []
    for i, cell in enumerate(cells):
        lin, const = phi.pieces[cell]
        pieces.append({"cell": i, "linear": vector_json(lin),
                       "const": q_json(const)})
    return {"complex": {"cells": [polyhedron_json(c) for c in cells]},
            "pieces": pieces}


def parse_plfunction(doc):
    _require_keys(doc, ["complex", "pieces"], what="PL function")
    _require_keys(doc["complex"], ["cells"], what="complex")
    cells_doc = doc["complex"]["cells"]
    if not isinstance(cells_doc, list) or not cells_doc:
        raise DocumentError("complex must list at least one cell")
    cells = [parse_polyhedron(c) for c in cells_doc]
    cx = Complex(cells)
    pieces = {}
    for piece in doc["pieces"]:
        _require_keys(piece, ["cell", "linear", "const"], what="piece")
        idx = piece["cell"]
        if not isinstance(idx, int) or not 0 <= idx < len(cells):
            raise DocumentError(f"piece refers to unknown cell {idx}")
        cell = cells[idx]
        if cell in pieces:
            raise DocumentError(f"duplicate piece for cell {idx}")
        pieces[cell] = (parse_q_vector(piece["linear"], cell.n),
                        parse_q(piece["const"]))
    try:
        return PLFunction(cx, pieces)
    except ValueError as e:
        raise DocumentError(str(e))


# -------------------------------------------------------------- affine maps

def map_json(f):
    return {"lin": [vector_json(row) for row in f.lin],
            "shift": vector_json(f.shift)}


def parse_map(doc):
    _require_keys(doc, ["lin", "shift"], what="affine map")
    lin = doc["lin"]
    if not isinstance(lin, list) or not lin:
        raise DocumentError("affine map needs at least one linear row")
    n = None
    rows = []
    for row in lin:
        v = parse_q_vector(row, n)
        n = len(v)
        rows.append(v)
    shift = parse_q_vector(doc["shift"], len(rows))
    return AffineMap(rows, shift)


# ------------------------------------------------------------------ reports

def jsonable(obj):
    """Best-effort conversion of report payloads to plain JSON values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Q):
        return qstr(obj)
    if isinstance(obj, Polyhedron):
        return polyhedron_json(obj)
    if isinstance(obj, SuperForm):
        return superform_json(obj)
    if isinstance(obj, DeltaForm):
        return deltaform_json(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return str(obj)


def dumps_canonical(doc):
    return json.dumps(jsonable(doc), sort_keys=True,
                      separators=(",", ":")) + "\n"


def load_document(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path} is not valid JSON: {e}")
