"""Rational polyhedra in canonical form, charts, face lattices, refinements.

Every polyhedron is reduced to a canonical irredundant description (implicit
equalities in integer RREF, inequalities primitive, deduplicated, irredundant
and sorted) and interned, so equal polyhedra are the same object and carry
cached charts and face lattices.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .linalg import (
    Lattice,
    clear_denominators,
    complement_lattice,
    det,
    hnf,
    integer_kernel,
    invert,
    mat_mul_vec,
    rref,
    saturate,
    solve_linear,
    vec_dot,
)
from .lp import lp_extremum, lp_feasible, strict_interior
from .scalars import Q, QONE, QZERO, qof

_CACHE: dict = {}


def _row_reduce_mod_eqs(a, b, eq_rows):
    """Eliminate equality-pivot coordinates from an inequality row."""
    a = list(a)
    b = b
    for erow in eq_rows:
        ea, eb = erow[:-1], erow[-1]
        p = next(j for j, x in enumerate(ea) if x != 0)
        if a[p] != 0:
            f = Fraction(a[p], ea[p])
            a = [x - f * y for x, y in zip(a, ea)]
            b = b - f * eb
    return a, b


def _canonicalize(n, ineqs, eqs):
    """Canonical (eq_rows, ineq_rows) as integer tuples, or None if empty.

    Row layout: each row is (a_1, ..., a_n, b) for a.x <= b resp. a.x = b.
    """
    rows = [[qof(x) for x in a] for a, _ in ineqs]
    rhs = [qof(b) for _, b in ineqs]
    eqlist = [([qof(x) for x in e], qof(f)) for e, f in eqs]
    feas = lp_feasible([r[:] for r in rows], rhs[:], eqs=[(e[:], f) for e, f in eqlist])
    if feas.status == "infeasible":
        return None

    # find the rows that hold with equality on the whole set
    m = len(rows)
    nonimplicit = set()

    def absorb(pt):
        for j in range(m):
            if j not in nonimplicit and vec_dot(rows[j], pt) < rhs[j]:
                nonimplicit.add(j)

    if feas.witness is not None:
        absorb(feas.witness)
    implicit = []
    for i in range(m):
        if i in nonimplicit:
            continue
        lo = lp_extremum(rows[i], [r[:] for r in rows], rhs[:], "min",
                         eqs=[(e[:], f) for e, f in eqlist])
        if lo.status == "optimal" and lo.value == rhs[i]:
            implicit.append(i)
        else:
            nonimplicit.add(i)
            if lo.status == "optimal":
                absorb(lo.witness)

    eq_aug = [list(e) + [f] for e, f in eqlist]
    eq_aug += [rows[i] + [rhs[i]] for i in implicit]
    eq_red, pivots = rref(eq_aug)
    if any(p == n for p in pivots):
        raise AssertionError("inconsistent equalities on a feasible set")
    eq_rows = [tuple(clear_denominators(r)) for r in eq_red]

    seen = {}
    for i in range(m):
        if i in implicit:
            continue
        a, b = _row_reduce_mod_eqs(rows[i], rhs[i], eq_rows)
        if all(x == 0 for x in a):
            continue
        prim = clear_denominators(a + [b])
        key = tuple(prim[:-1])
        if key not in seen or prim[-1] < seen[key]:
            seen[key] = prim[-1]
    cand = sorted((list(a) + [b]) for a, b in seen.items())

    # irredundancy: drop rows implied by the others, in deterministic order
    kept = [True] * len(cand)
    eqs_for_lp = [([Q(x) for x in r[:-1]], Q(r[-1])) for r in eq_rows]
    for i in range(len(cand)):
        others_rows = [[Q(x) for x in cand[j][:-1]] for j in range(len(cand))
                       if j != i and kept[j]]
        others_rhs = [Q(cand[j][-1]) for j in range(len(cand)) if j != i and kept[j]]
        hi = lp_extremum([Q(x) for x in cand[i][:-1]], others_rows, others_rhs,
                         "max", eqs=eqs_for_lp)
        if hi.status == "optimal" and hi.value <= cand[i][-1]:
            kept[i] = False
    ineq_rows = tuple(tuple(r) for r, k in zip(cand, kept) if k)
    return tuple(eq_rows), ineq_rows


class Chart:
    """Affine chart of a polyhedron: x = base + sum_k u_k basis_k.

    u_rows are the dual functionals recovering u from x (zero on the chosen
    integral complement), w_rows the complement duals.
    """

    __slots__ = ("n", "base", "basis", "comp", "u_rows", "w_rows")

    def __init__(self, n, base, basis, comp):
        self.n = n
        self.base = tuple(qof(x) for x in base)
        self.basis = tuple(tuple(int(x) for x in row) for row in basis)
        self.comp = tuple(tuple(int(x) for x in row) for row in comp)
        d = len(self.basis)
        if d + len(self.comp) != n:
            raise ValueError("basis and complement must fill the ambient space")
        if n:
            m = [[Q(self.basis[k][i]) if k < d else Q(self.comp[k - d][i])
                  for k in range(n)] for i in range(n)]
            minv = invert(m)
        else:
            minv = []
        self.u_rows = tuple(tuple(minv[k]) for k in range(d))
        self.w_rows = tuple(tuple(minv[k]) for k in range(d, n))

    @property
    def dim(self):
        return len(self.basis)

    def to_local(self, x):
        dx = [qof(v) - b for v, b in zip(x, self.base)]
        return [vec_dot(u, dx) for u in self.u_rows]

    def to_ambient(self, u):
        x = list(self.base)
        for k, c in enumerate(u):
            c = qof(c)
            for i in range(self.n):
                x[i] += c * self.basis[k][i]
        return x

    def transition_to(self, other: "Chart"):
        """Affine map u_other = M . u_self + c on the overlap of spans."""
        d = self.dim
        cols = []
        for k in range(d):
            cols.append([vec_dot(u, self.basis[k]) for u in other.u_rows])
        m_rows = [[cols[k][j] for k in range(d)] for j in range(other.dim)]
        off = other.to_local(self.base)
        return m_rows, off


class Polyhedron:
    """Canonical interned rational polyhedron {x : A x <= b, E x = f}."""

    __slots__ = ("n", "eq_rows", "ineq_rows", "_span", "_chart", "_base",
                 "_facets", "_faces", "_relint", "_bounded", "_local_hrep")

    def __init__(self, n, eq_rows, ineq_rows, _token=None):
        if _token is not _SENTINEL:
            raise TypeError("use polyhedron() to construct instances")
        self.n = n
        self.eq_rows = eq_rows
        self.ineq_rows = ineq_rows
        self._span = None
        self._chart = None
        self._base = None
        self._facets = None
        self._faces = None
        self._relint = None
        self._bounded = None
        self._local_hrep = None

    # -- identity ----------------------------------------------------------
    @property
    def key(self):
        return (self.n, self.eq_rows, self.ineq_rows)

    def __eq__(self, other):
        return self is other or (isinstance(other, Polyhedron) and self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Polyhedron(n={self.n}, dim={self.dim}, eqs={len(self.eq_rows)}, ineqs={len(self.ineq_rows)})"

    @property
    def sort_key(self):
        return (self.n, len(self.eq_rows), self.eq_rows, self.ineq_rows)

    # -- basic geometry ------------------------------------------------------
    @property
    def dim(self):
        return self.n - len(self.eq_rows)

    def eqs_rational(self):
        return [([Q(x) for x in r[:-1]], Q(r[-1])) for r in self.eq_rows]

    def ineqs_rational(self):
        return ([ [Q(x) for x in r[:-1]] for r in self.ineq_rows ],
                [Q(r[-1]) for r in self.ineq_rows])

    def contains(self, pt) -> bool:
        pt = [qof(x) for x in pt]
        for r in self.eq_rows:
            if vec_dot([Q(x) for x in r[:-1]], pt) != r[-1]:
                return False
        for r in self.ineq_rows:
            if vec_dot([Q(x) for x in r[:-1]], pt) > r[-1]:
                return False
        return True

    @property
    def span(self) -> Lattice:
        """Integral lattice of directions along the affine hull."""
        if self._span is None:
            if self.eq_rows:
                ker = integer_kernel([list(r[:-1]) for r in self.eq_rows], self.n)
            else:
                ker = [[1 if i == j else 0 for j in range(self.n)] for i in range(self.n)]
            self._span = Lattice(self.n, ker)
        return self._span

    @property
    def lineality(self) -> Lattice:
        rows = [list(r[:-1]) for r in self.eq_rows] + [list(r[:-1]) for r in self.ineq_rows]
        rows = [r for r in rows if any(r)]
        if not rows:
            return Lattice(self.n, [[1 if i == j else 0 for j in range(self.n)]
                                    for i in range(self.n)])
        return Lattice(self.n, integer_kernel(rows, self.n))

    @property
    def base_point(self):
        """Canonical point: the lexicographically smallest vertex.

        Cells without vertices are first cut down by zeroing the lineality
        coordinates of the canonical complement decomposition; the cut is
        pointed and translates bijectically to the lineality quotient.
        """
        if self._base is None:
            if self.dim == 0:
                sol = solve_linear([[Q(x) for x in r[:-1]] for r in self.eq_rows],
                                   [Q(r[-1]) for r in self.eq_rows])
                self._base = tuple(sol)
            else:
                lin = self.lineality
                if lin.rank > 0:
                    comp = complement_lattice(lin)
                    n = self.n
                    m = [[Q(comp.rows[k][i]) if k < comp.rank else Q(lin.rows[k - comp.rank][i])
                          for k in range(n)] for i in range(n)]
                    minv = invert(m)
                    ir, rhs = self.ineqs_rational()
                    cut = polyhedron(
                        n, list(zip(ir, rhs)),
                        eqs=self.eqs_rational()
                        + [(list(minv[k]), QZERO) for k in range(comp.rank, n)])
                    self._base = tuple(cut.base_point)
                else:
                    verts = self.vertices()
                    if not verts:
                        raise AssertionError("pointed polyhedron with no vertex")
                    self._base = tuple(min(tuple(v) for v in verts))
        return self._base

    @property
    def chart(self) -> Chart:
        if self._chart is None:
            comp = complement_lattice(self.span)
            self._chart = Chart(self.n, self.base_point, self.span.rows, comp.rows)
        return self._chart

    def local_hrep(self):
        """Inequalities of the polyhedron in chart coordinates (full-dim)."""
        if self._local_hrep is None:
            ch = self.chart
            rows = []
            rhs = []
            for r in self.ineq_rows:
                a = [Q(x) for x in r[:-1]]
                arow = [vec_dot(a, bs) for bs in ch.basis]
                rows.append(arow)
                rhs.append(Q(r[-1]) - vec_dot(a, ch.base))
            self._local_hrep = (rows, rhs)
        return self._local_hrep

    def relint_point(self):
        if self._relint is None:
            rows, rhs = self.ineqs_rational()
            p = strict_interior(rows, rhs, eqs=self.eqs_rational())
            if p is None:
                raise AssertionError("canonical polyhedron with empty relint")
            self._relint = tuple(p) if p else tuple(self.base_point)
        return list(self._relint)

    def is_bounded(self) -> bool:
        if self._bounded is None:
            rec = recession_cone(self)
            self._bounded = (rec.dim == 0)
        return self._bounded

    # -- faces --------------------------------------------------------------
    def facets(self):
        if self._facets is None:
            out = []
            ir, irhs = self.ineqs_rational()
            eqs = self.eqs_rational()
            for k in range(len(self.ineq_rows)):
                f = polyhedron(self.n, list(zip(ir, irhs)),
                               eqs=eqs + [(ir[k], irhs[k])])
                if f is None:
                    raise AssertionError("facet of a canonical row is empty")
                if f not in out:
                    out.append(f)
            self._facets = tuple(sorted(out, key=lambda p: p.sort_key))
        return list(self._facets)

    def faces(self):
        """All faces including the polyhedron itself, sorted by dimension."""
        if self._faces is None:
            seen = {self}
            frontier = [self]
            while frontier:
                nxt = []
                for p in frontier:
                    for f in p.facets():
                        if f not in seen:
                            seen.add(f)
                            nxt.append(f)
                frontier = nxt
            self._faces = tuple(sorted(seen, key=lambda p: (p.dim, p.sort_key)))
        return list(self._faces)

    def vertices(self):
        return [list(f.base_point) for f in self.faces() if f.dim == 0]


_SENTINEL = object()


def polyhedron(n, ineqs=(), eqs=()):
    """Canonical interned polyhedron from inequalities a.x <= b (and equalities).

    ineqs and eqs are iterables of (a, b).  Returns None when the set is empty.
    """
    canon = _canonicalize(n, list(ineqs), list(eqs))
    if canon is None:
        return None
    key = (n, canon[0], canon[1])
    inst = _CACHE.get(key)
    if inst is None:
        inst = Polyhedron(n, canon[0], canon[1], _token=_SENTINEL)
        _CACHE[key] = inst
    return inst


def intersect(p: Polyhedron, q: Polyhedron):
    if p.n != q.n:
        raise ValueError("ambient dimensions differ")
    ir_p, rhs_p = p.ineqs_rational()
    ir_q, rhs_q = q.ineqs_rational()
    return polyhedron(p.n, list(zip(ir_p, rhs_p)) + list(zip(ir_q, rhs_q)),
                      eqs=p.eqs_rational() + q.eqs_rational())


def recession_cone(p: Polyhedron):
    ir, _ = p.ineqs_rational()
    eqs = [(e, QZERO) for e, _ in p.eqs_rational()]
    return polyhedron(p.n, [(a, QZERO) for a in ir], eqs=eqs)


def translate(p: Polyhedron, v):
    v = [qof(x) for x in v]
    ir, rhs = p.ineqs_rational()
    ineqs = [(a, b + vec_dot(a, v)) for a, b in zip(ir, rhs)]
    eqs = [(e, f + vec_dot(e, v)) for e, f in p.eqs_rational()]
    return polyhedron(p.n, ineqs, eqs=eqs)


def product_polyhedron(p: Polyhedron, q: Polyhedron):
    """p x q inside R^{p.n + q.n}."""
    n1, n2 = p.n, q.n
    ineqs = []
    eqs = []
    ir, rhs = p.ineqs_rational()
    for a, b in zip(ir, rhs):
        ineqs.append((a + [QZERO] * n2, b))
    for e, f in p.eqs_rational():
        eqs.append((e + [QZERO] * n2, f))
    ir, rhs = q.ineqs_rational()
    for a, b in zip(ir, rhs):
        ineqs.append(([QZERO] * n1 + a, b))
    for e, f in q.eqs_rational():
        eqs.append(([QZERO] * n1 + e, f))
    return polyhedron(n1 + n2, ineqs, eqs=eqs)


def affine_preimage(p: Polyhedron, lin_rows, shift, domain_n):
    """{x : lin.x + shift in p} as a polyhedron in R^domain_n."""
    ineqs = []
    eqs = []
    ir, rhs = p.ineqs_rational()
    shift = [qof(s) for s in shift]
    for a, b in zip(ir, rhs):
        row = [sum(a[i] * qof(lin_rows[i][j]) for i in range(p.n)) for j in range(domain_n)]
        ineqs.append((row, b - vec_dot(a, shift)))
    for e, f in p.eqs_rational():
        row = [sum(e[i] * qof(lin_rows[i][j]) for i in range(p.n)) for j in range(domain_n)]
        eqs.append((row, f - vec_dot(e, shift)))
    return polyhedron(domain_n, ineqs, eqs=eqs)


# ------------------------------------------------------------- constructors --

def whole_space(n):
    return polyhedron(n, [])


def single_point(coords):
    coords = [qof(x) for x in coords]
    n = len(coords)
    eqs = [([QONE if j == i else QZERO for j in range(n)], coords[i]) for i in range(n)]
    return polyhedron(n, [], eqs=eqs)


def box(lo, hi):
    lo = [qof(x) for x in lo]
    hi = [qof(x) for x in hi]
    n = len(lo)
    ineqs = []
    for i in range(n):
        unit = [QONE if j == i else QZERO for j in range(n)]
        ineqs.append((unit, hi[i]))
        ineqs.append(([-x for x in unit], -lo[i]))
    return polyhedron(n, ineqs)


def ray_from(apex, direction):
    """Half-line apex + t*direction, t >= 0."""
    apex = [qof(x) for x in apex]
    dvec = [qof(x) for x in direction]
    n = len(apex)
    ineqs = []
    eqs = []
    ker = integer_kernel([clear_denominators(dvec)], n)
    for k in ker:
        kq = [Q(x) for x in k]
        eqs.append((kq, vec_dot(kq, apex)))
    # t >= 0 in terms of x: pick any functional positive on the direction
    f = [Q(x) for x in clear_denominators(dvec)]
    ineqs.append(([-x for x in f], -vec_dot(f, apex)))
    return polyhedron(n, ineqs, eqs=eqs)


def segment(a, b):
    a = [qof(x) for x in a]
    b = [qof(x) for x in b]
    n = len(a)
    dvec = [y - x for x, y in zip(a, b)]
    eqs = []
    for k in integer_kernel([clear_denominators(dvec)], n):
        kq = [Q(x) for x in k]
        eqs.append((kq, vec_dot(kq, a)))
    f = [Q(x) for x in clear_denominators(dvec)]
    lo, hi = vec_dot(f, a), vec_dot(f, b)
    if lo > hi:
        lo, hi = hi, lo
    return polyhedron(n, [(f, hi), ([-x for x in f], -lo)], eqs=eqs)


# -------------------------------------------------------------- complexes ----

class ComplexError(ValueError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class Complex:
    """A finite set of cells closed under faces, pairwise intersecting in faces."""

    def __init__(self, cells, validate=True):
        given = []
        for c in cells:
            if c is not None and c not in given:
                given.append(c)
        closed = set()
        for c in given:
            closed.update(c.faces())
        self.cells = tuple(sorted(closed, key=lambda p: (-p.dim, p.sort_key)))
        if self.cells and any(c.n != self.cells[0].n for c in self.cells):
            raise ValueError("cells live in different ambient spaces")
        self.n = self.cells[0].n if self.cells else None
        if validate:
            err = self.face_compatibility_failure()
            if err is not None:
                raise ComplexError("cells do not form a polyhedral complex", err)

    def face_compatibility_failure(self):
        """None if every pairwise intersection is a face of both, else a report."""
        for i in range(len(self.cells)):
            for j in range(i + 1, len(self.cells)):
                a, b = self.cells[i], self.cells[j]
                cap = intersect(a, b)
                if cap is None:
                    continue
                if cap not in a.faces() or cap not in b.faces():
                    return {
                        "cell_a": i,
                        "cell_b": j,
                        "intersection_dim": cap.dim,
                        "witness_point": [qstr_like(x) for x in cap.relint_point()],
                    }
        return None

    def cells_of_dim(self, d):
        return [c for c in self.cells if c.dim == d]

    def maximal_cells(self):
        out = []
        for c in self.cells:
            if not any(other is not c and intersect(c, other) == c for other in self.cells):
                out.append(c)
        return out

    def __eq__(self, other):
        return isinstance(other, Complex) and self.cells == other.cells

    def __hash__(self):
        return hash(self.cells)


def qstr_like(x):
    from .scalars import qstr

    return qstr(qof(x))


def refine_pairs(cells_a, cells_b):
    """All nonempty pairwise intersections with provenance (piece, a, b)."""
    out = []
    for a in cells_a:
        for b in cells_b:
            cap = intersect(a, b)
            if cap is not None:
                out.append((cap, a, b))
    return out


def common_refinement(c1: Complex, c2: Complex) -> Complex:
    """Complex of all nonempty intersections of a c1 cell with a c2 cell."""
    pieces = [cap for cap, _, _ in refine_pairs(c1.cells, c2.cells)]
    return Complex(pieces, validate=False)


# ---------------------------------------------------- triangulation, volume --

def triangulate(p: Polyhedron):
    """Pulling triangulation into simplices, each a tuple of ambient vertices.

    Deterministic: cones the lexicographically smallest vertex over the
    triangulations of the facets that miss it.  Bounded cells only.
    """
    if not p.is_bounded():
        raise ValueError("cannot triangulate an unbounded polyhedron")
    if p.dim == 0:
        return [(tuple(p.base_point),)]
    apex = tuple(min(tuple(v) for v in p.vertices()))
    out = []
    for f in p.facets():
        if f.contains(apex):
            continue
        for s in triangulate(f):
            out.append(s + (apex,))
    return out


def volume_in_chart(p: Polyhedron, chart: Chart):
    """Lebesgue volume of p measured in the given chart's coordinates.

    p must have the chart's dimension and lie in a translate of its span.
    """
    d = chart.dim
    if p.dim != d:
        raise ValueError("dimension mismatch")
    if d == 0:
        return QONE
    total = QZERO
    fact = 1
    for k in range(2, d + 1):
        fact *= k
    for simplex in triangulate(p):
        loc = [chart.to_local(v) for v in simplex]
        mat = [[loc[i + 1][j] - loc[0][j] for j in range(d)] for i in range(d)]
        total += abs(det(mat))
    return total / fact


def lattice_volume(p: Polyhedron):
    """Volume of a bounded cell relative to its own canonical lattice chart."""
    return volume_in_chart(p, p.chart)


# ---------------------------------------------------------- lattice normals --

def _xgcd_vector(f):
    """Integer u with f.u = gcd(f) for a nonzero integer vector f."""
    u = [0] * len(f)
    g = 0
    for i, x in enumerate(f):
        if x == 0:
            continue
        if g == 0:
            g = abs(x)
            u = [0] * len(f)
            u[i] = 1 if x > 0 else -1
            continue
        # extended gcd of g and x
        a, b = g, abs(x)
        s0, s1 = 1, 0
        t0, t1 = 0, 1
        while b:
            qq, a, b = a // b, b, a % b
            s0, s1 = s1, s0 - qq * s1
            t0, t1 = t1, t0 - qq * t1
        # s0*g + t0*|x| = gcd
        u = [s0 * c for c in u]
        u[i] += t0 * (1 if x > 0 else -1)
        g = a
    return u, g


def _reduce_mod_rows(u, h_rows):
    u = list(u)
    for row in h_rows:
        p = next(j for j, x in enumerate(row) if x != 0)
        q = u[p] // row[p]
        if q:
            u = [a - q * b for a, b in zip(u, row)]
    return u


def primitive_normal(sigma: Polyhedron, tau: Polyhedron):
    """Canonical primitive lattice normal of the facet tau inside sigma.

    Generates span(sigma) together with span(tau); points from tau into sigma.
    """
    if tau.dim != sigma.dim - 1:
        raise ValueError("tau must be a facet of sigma")
    bs = sigma.span.basis()
    d = len(bs)
    coords = []
    for t in tau.span.basis():
        c = sigma.span.coords(t)
        if c is None or any(x.denominator != 1 for x in c):
            raise ValueError("tau is not a subcell of sigma")
        coords.append([int(x) for x in c])
    if coords:
        fker = integer_kernel(coords, d)
        if len(fker) != 1:
            raise ValueError("tau is not a facet of sigma")
        f = fker[0]
    else:
        if d != 1:
            raise ValueError("tau is not a facet of sigma")
        f = [1]
    u, g = _xgcd_vector(f)
    if g != 1:
        raise AssertionError("kernel functional is not primitive")
    h = hnf(coords) if coords else []
    u = _reduce_mod_rows(u, h)

    # the facet-defining inequality of sigma that is tight on tau
    arow = None
    tau_base = tau.base_point
    tau_basis = tau.span.basis()
    for r in sigma.ineq_rows:
        a = [Q(x) for x in r[:-1]]
        if vec_dot(a, tau_base) != r[-1]:
            continue
        if all(vec_dot(a, t) == 0 for t in tau_basis):
            arow = a
            break
    if arow is None:
        raise ValueError("tau is not a facet of sigma")
    w = [sum(u[k] * bs[k][i] for k in range(d)) for i in range(sigma.n)]
    pairing = vec_dot(arow, [Q(x) for x in w])
    if pairing == 0:
        raise AssertionError("normal candidate lies in the facet span")
    if pairing > 0:
        u = _reduce_mod_rows([-x for x in u], h)
        w = [sum(u[k] * bs[k][i] for k in range(d)) for i in range(sigma.n)]
        if vec_dot(arow, [Q(x) for x in w]) >= 0:
            raise AssertionError("normal direction flip failed")
    return w


def sum_lattice_index(l1: Lattice, l2: Lattice):
    """(saturation of l1+l2, index [saturation : l1+l2])."""
    gens = [list(r) for r in l1.rows] + [list(r) for r in l2.rows]
    if not gens:
        return Lattice(l1.n, []), 1
    return saturate(gens, l1.n)


def intersection_lattice(l1: Lattice, l2: Lattice) -> Lattice:
    """Z^n intersected with span(l1) ∩ span(l2)."""
    n = l1.n
    duals = []
    for lat in (l1, l2):
        if lat.rank == n:
            continue
        if lat.rank == 0:
            return Lattice(n, [])
        for v in integer_kernel([list(r) for r in lat.rows], n):
            duals.append(v)
    if not duals:
        return Lattice(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])
    return Lattice(n, integer_kernel(duals, n))


def sublattice_complement_in(sub: Lattice, sup: Lattice) -> list:
    """Basis of a direct complement of sub inside sup (both saturated in Z^n).

    Returns vectors c with sup = sub (+) span_Z(c), found by complementing
    sub's coordinate lattice inside Z^rank(sup).
    """
    coords = []
    for v in sub.basis():
        c = sup.coords(v)
        if c is None or any(x.denominator != 1 for x in c):
            raise ValueError("sub is not a sublattice of sup")
        coords.append([int(x) for x in c])
    inner = Lattice(sup.rank, coords)
    if inner.rank != sub.rank:
        raise AssertionError("degenerate sublattice basis")
    comp = complement_lattice(inner)
    out = []
    for crow in comp.rows:
        out.append([sum(crow[k] * sup.rows[k][i] for k in range(sup.rank))
                    for i in range(sup.n)])
    return out


# --------------------------------------------------------- weighted cells ----

class WeightedCell:
    """A polyhedron with a positive rational multiplier of its lattice weight."""

    __slots__ = ("cell", "weight")

    def __init__(self, cell: Polyhedron, weight):
        w = qof(weight)
        if w <= 0:
            raise ValueError("weight must be positive")
        self.cell = cell
        self.weight = w

    def __eq__(self, other):
        return (isinstance(other, WeightedCell)
                and self.cell == other.cell and self.weight == other.weight)

    def __hash__(self):
        return hash((self.cell, self.weight))

    def __repr__(self):
        return f"WeightedCell({self.cell!r}, weight={self.weight})"


def normal_vector(tau: WeightedCell, sigma: WeightedCell):
    """Lattice normal of the facet tau in sigma scaled to the given weights.

    Satisfies mu_sigma = mu_tau ∧ n for the stored weights: the primitive
    inward lattice normal times lambda_sigma / lambda_tau.
    """
    w = primitive_normal(sigma.cell, tau.cell)
    factor = sigma.weight / tau.weight
    return [factor * x for x in w]


def _check_nested(sub: Lattice, sup: Lattice):
    for v in sub.basis():
        if sup.coords(v) is None:
            raise ValueError("spans are not nested")


def weight_wedge(sub: Lattice, sup: Lattice, lam1, lam3):
    """Multiplier on sup from multipliers on sub and on the quotient sup/sub.

    Saturated sublattices split off exactly, so the canonical lattice of the
    quotient lifts to a complement and the multipliers simply multiply.
    """
    _check_nested(sub, sup)
    if sub.rank < sup.rank:
        comp = sublattice_complement_in(sub, sup)
        joined = Lattice(sup.n, [list(r) for r in sub.rows] + comp)
        if joined.rows != sup.rows:
            raise AssertionError("complement does not rebuild the big lattice")
    return qof(lam1) * qof(lam3)


def weight_quotient(sub: Lattice, sup: Lattice, lam2, lam1):
    """Multiplier induced on the quotient sup/sub; inverse of weight_wedge."""
    _check_nested(sub, sup)
    return qof(lam2) / qof(lam1)


def stable_weight(l1: Lattice, lam1, l2: Lattice, lam2):
    """Multiplier on span(l1) ∩ span(l2) for transversal stable intersection.

    Requires span(l1) + span(l2) = R^n; the multiplier is
    lam1 * lam2 * [Z^n : l1 + l2].
    """
    summed, index = sum_lattice_index(l1, l2)
    if summed.rank != l1.n:
        raise ValueError("spans are not transversal")
    return qof(lam1) * qof(lam2) * index


def cell_product(c1: WeightedCell, c2: WeightedCell) -> WeightedCell:
    """[sigma1 x sigma2] with multiplied weights (canonical lattices multiply)."""
    return WeightedCell(product_polyhedron(c1.cell, c2.cell), c1.weight * c2.weight)
