"""Polynomial superforms: a bigraded exterior algebra over two copies of the
coordinate differentials, with differentials, contraction, affine pull-back,
restriction to charts, piecewise-linear functions, and exact integration.

A form is a sum of terms poly * d'x_I ∧ d''x_J with I, J ascending index
tuples; all generators have degree 1 and anticommute across both families.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial

from .linalg import det, vec_dot
from .polyhedra import (Chart, Complex, Polyhedron, WeightedCell, intersect,
                        primitive_normal, triangulate)
from .scalars import Q, QONE, QZERO, qof


# ---------------------------------------------------------------- polynomials

class Poly:
    """Polynomial with rational coefficients in n variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for exps, c in (terms or {}).items():
            c = qof(c)
            if c != 0:
                exps = tuple(int(e) for e in exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError("bad exponent tuple")
                clean[exps] = clean.get(exps, QZERO) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    @classmethod
    def const(cls, n, c):
        return cls(n, {tuple([0] * n): qof(c)})

    @classmethod
    def variable(cls, n, i):
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): QONE})

    @classmethod
    def affine(cls, lin, c):
        n = len(lin)
        terms = {tuple([0] * n): qof(c)}
        for i, a in enumerate(lin):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = qof(a)
        return cls(n, terms)

    def is_zero(self):
        return not self.terms

    def constant_value(self):
        if not self.terms:
            return QZERO
        if list(self.terms) == [tuple([0] * self.n)]:
            return self.terms[tuple([0] * self.n)]
        raise ValueError("not a constant polynomial")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, QZERO) + c
        return Poly(self.n, out)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, str)):
            c = qof(other)
            return Poly(self.n, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, QZERO) + c1 * c2
        return Poly(self.n, out)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.n != self.n:
                raise ValueError("variable count mismatch")
            return other
        return Poly.const(self.n, qof(other))

    def partial(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = out.get(tuple(e2), QZERO) + c * e[i]
        return Poly(self.n, out)

    def eval(self, pt):
        pt = [qof(x) for x in pt]
        total = QZERO
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                for _ in range(k):
                    v *= x
            total += v
        return total

    def compose_affine(self, lin_rows, shift, k):
        """Substitute x_i = shift_i + sum_j lin_rows[i][j] u_j; result in k vars."""
        subs = [Poly.affine([qof(lin_rows[i][j]) for j in range(k)], shift[i])
                if k else Poly.const(0, qof(shift[i]))
                for i in range(self.n)]
        out = Poly.const(k, 0)
        powers = [{} for _ in range(self.n)]
        for e, c in self.terms.items():
            term = Poly.const(k, c)
            for i, exp in enumerate(e):
                if exp == 0:
                    continue
                cache = powers[i]
                if exp not in cache:
                    p = Poly.const(k, 1)
                    for _ in range(exp):
                        p = p * subs[i]
                    cache[exp] = p
                term = term * cache[exp]
            out = out + term
        return out

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}"
                            for i, k in enumerate(e) if k)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Poly(" + " + ".join(bits) + ")"


# ----------------------------------------------------------------- superforms

def _merge_indices(a, b):
    """Merge two ascending tuples; (merged, sign) or (None, 0) on collision."""
    out = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None, 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining elements of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def _insert_index(i, idx):
    """(new tuple, sign) from prepending generator i to the sorted tuple idx."""
    if i in idx:
        return None, 0
    pos = sum(1 for x in idx if x < i)
    out = tuple(sorted(idx + (i,)))
    return out, (-1) ** pos


class SuperForm:
    """Normal-form sum of poly * d'x_I ∧ d''x_J terms in n variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        clean = {}
        for (ii, jj), p in (terms or {}).items():
            if not isinstance(p, Poly):
                p = Poly.const(n, p)
            if p.n != n:
                raise ValueError("coefficient variable count mismatch")
            ii = tuple(sorted(int(x) for x in ii))
            jj = tuple(sorted(int(x) for x in jj))
            if any(x < 0 or x >= n for x in ii + jj):
                raise ValueError("generator index out of range")
            if (ii, jj) in clean:
                p = clean[(ii, jj)] + p
            if not p.is_zero():
                clean[(ii, jj)] = p
            elif (ii, jj) in clean:
                del clean[(ii, jj)]
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n):
        return cls(n, {})

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p.n, {((), ()): p})

    @classmethod
    def scalar(cls, n, c):
        return cls.from_poly(Poly.const(n, c))

    @classmethod
    def d_prime_x(cls, n, i):
        return cls(n, {((i,), ()): Poly.const(n, 1)})

    @classmethod
    def d_second_x(cls, n, i):
        return cls(n, {((), (i,)): Poly.const(n, 1)})

    # -- structure -----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def bidegrees(self):
        return sorted({(len(i), len(j)) for i, j in self.terms})

    def bidegree(self):
        """The unique (p, q), None for the zero form; error when mixed."""
        degs = self.bidegrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("form has mixed bidegree")
        return degs[0]

    def component(self, p, q):
        return SuperForm(self.n, {(i, j): poly for (i, j), poly in self.terms.items()
                                  if (len(i), len(j)) == (p, q)})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for key, p in other.terms.items():
            out[key] = out[key] + p if key in out else p
        return SuperForm(self.n, out)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __neg__(self):
        return SuperForm(self.n, {k: -p for k, p in self.terms.items()})

    def _coerce(self, other):
        if isinstance(other, SuperForm):
            if other.n != self.n:
                raise ValueError("ambient dimension mismatch")
            return other
        if isinstance(other, Poly):
            return SuperForm.from_poly(other)
        return SuperForm.scalar(self.n, qof(other))

    def scale(self, c):
        if isinstance(c, Poly):
            return SuperForm(self.n, {k: p * c for k, p in self.terms.items()})
        c = qof(c)
        return SuperForm(self.n, {k: p * c for k, p in self.terms.items()})

    def wedge(self, other):
        other = self._coerce(other)
        out = {}
        for (i1, j1), p1 in self.terms.items():
            for (i2, j2), p2 in other.terms.items():
                ii, s1 = _merge_indices(i1, i2)
                if ii is None:
                    continue
                jj, s2 = _merge_indices(j1, j2)
                if jj is None:
                    continue
                # moving the d' block of the second factor across the d''
                # block of the first costs one sign per crossing pair
                sign = s1 * s2 * (-1) ** (len(i2) * len(j1))
                p = p1 * p2
                if sign < 0:
                    p = -p
                key = (ii, jj)
                out[key] = out[key] + p if key in out else p
        return SuperForm(self.n, out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, str)):
            return self.scale(other)
        return self.wedge(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, str)):
            return self.scale(other)
        return NotImplemented

    def dprime(self):
        out = {}
        for (ii, jj), p in self.terms.items():
            for i in range(self.n):
                dp = p.partial(i)
                if dp.is_zero():
                    continue
                ii2, sign = _insert_index(i, ii)
                if ii2 is None:
                    continue
                q = dp if sign > 0 else -dp
                key = (ii2, jj)
                out[key] = out[key] + q if key in out else q
        return SuperForm(self.n, out)

    def dsecond(self):
        out = {}
        for (ii, jj), p in self.terms.items():
            block = (-1) ** len(ii)
            for i in range(self.n):
                dp = p.partial(i)
                if dp.is_zero():
                    continue
                jj2, sign = _insert_index(i, jj)
                if jj2 is None:
                    continue
                q = dp if sign * block > 0 else -dp
                key = (ii, jj2)
                out[key] = out[key] + q if key in out else q
        return SuperForm(self.n, out)

    def contract(self, vec, slot):
        """Interior product with v' (slot='prime') or v'' (slot='second')."""
        vec = [qof(x) for x in vec]
        if len(vec) != self.n:
            raise ValueError("vector dimension mismatch")
        out = {}

        def put(key, poly):
            if not poly.is_zero():
                out[key] = out[key] + poly if key in out else poly

        for (ii, jj), p in self.terms.items():
            if slot == "prime":
                for pos, i in enumerate(ii):
                    if vec[i] == 0:
                        continue
                    c = vec[i] * (-1) ** pos
                    put((ii[:pos] + ii[pos + 1:], jj), p * c)
            elif slot == "second":
                block = (-1) ** len(ii)
                for pos, j in enumerate(jj):
                    if vec[j] == 0:
                        continue
                    c = vec[j] * (-1) ** pos * block
                    put((ii, jj[:pos] + jj[pos + 1:]), p * c)
            else:
                raise ValueError("slot must be 'prime' or 'second'")
        return SuperForm(self.n, out)

    def pullback_affine(self, lin_rows, shift, k=None):
        """Pull back along u -> shift + lin.u from R^k to this form's R^n.

        lin_rows is n x k.  Coefficients are composed with the map and each
        generator d x_i is replaced by the corresponding row combination.
        k is inferred from lin_rows except when n = 0 leaves no rows.
        """
        n = self.n
        if len(lin_rows) != n or len(shift) != n:
            raise ValueError("affine map shape mismatch")
        if k is None:
            k = len(lin_rows[0]) if n and lin_rows else 0
        lin = [[qof(x) for x in row] for row in lin_rows]
        out = {}
        for (ii, jj), p in self.terms.items():
            comp = p.compose_affine(lin, [qof(s) for s in shift], k)
            if comp.is_zero():
                continue
            for kk in combinations(range(k), len(ii)):
                di = det([[lin[r][c] for c in kk] for r in ii]) if ii else QONE
                if di == 0:
                    continue
                for mm in combinations(range(k), len(jj)):
                    dj = det([[lin[r][c] for c in mm] for r in jj]) if jj else QONE
                    if dj == 0:
                        continue
                    q = comp * (di * dj)
                    key = (kk, mm)
                    out[key] = out[key] + q if key in out else q
        return SuperForm(k, out)

    def restrict(self, chart: Chart):
        """Restriction to a cell: pull back along u -> base + B u."""
        if chart.n != self.n:
            raise ValueError("ambient dimension mismatch")
        lin = [[Q(chart.basis[kk][i]) for kk in range(chart.dim)]
               for i in range(self.n)]
        return self.pullback_affine(lin, list(chart.base))

    def eval_scalar(self, pt):
        """Value of the (0,0) component at a point."""
        p = self.terms.get(((), ()))
        return p.eval(pt) if p is not None else QZERO

    def __eq__(self, other):
        return (isinstance(other, SuperForm) and self.n == other.n
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items(),
                                          key=lambda kv: kv[0]))))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]), len(kv[0][1]), kv[0]))

    def __repr__(self):
        if not self.terms:
            return "SuperForm(0)"
        bits = []
        for (ii, jj), p in self.sorted_terms():
            gens = [f"d'x{i}" for i in ii] + [f"d''x{j}" for j in jj]
            bits.append("(" + repr(p) + ")" + ("*" + "^".join(gens) if gens else ""))
        return "SuperForm[" + " + ".join(bits) + "]"


# ---------------------------------------------------------------- integration

def _sign_reorder(d):
    """Sign from d'u_1 d''u_1 ... d'u_d d''u_d to d'u_{1..d} ∧ d''u_{1..d}."""
    return -1 if (d * (d - 1) // 2) % 2 else 1


def integrate_poly_over_simplex(p: Poly, verts):
    """Exact integral of p over the simplex with the given local vertices."""
    d = p.n
    if len(verts) != d + 1:
        raise ValueError("vertex count mismatch")
    if d == 0:
        return p.constant_value()
    v0 = verts[0]
    lin = [[verts[i + 1][j] - v0[j] for i in range(d)] for j in range(d)]
    jac = abs(det(lin))
    if jac == 0:
        return QZERO
    h = p.compose_affine(lin, v0, d)
    total = QZERO
    for e, c in h.terms.items():
        num = 1
        for k in e:
            num *= factorial(k)
        total += c * Fraction(num, factorial(sum(e) + d))
    return jac * total


def integrate_local(g: Poly, cell: Polyhedron, chart: Chart = None):
    """Integral of a chart-coordinate polynomial over the cell's chart image."""
    chart = chart or cell.chart
    if g.n != chart.dim:
        raise ValueError("polynomial lives in the wrong chart")
    if cell.dim == 0:
        return g.constant_value()
    total = QZERO
    for simplex in triangulate(cell):
        verts = [chart.to_local(v) for v in simplex]
        total += integrate_poly_over_simplex(g, verts)
    return total


def integrate_top(eta: SuperForm, wc: WeightedCell):
    """Exact integral of a (d,d)-form over a bounded weighted cell of dim d."""
    cell = wc.cell
    d = cell.dim
    if eta.n != cell.n:
        raise ValueError("ambient dimension mismatch")
    if not eta.is_zero():
        bd = eta.bidegree()
        if bd != (d, d):
            raise ValueError(f"form bidegree {bd} does not match cell dimension {d}")
    if not cell.is_bounded():
        raise ValueError("cannot integrate over an unbounded cell")
    if eta.is_zero():
        return QZERO
    loc = eta.restrict(cell.chart)
    full = tuple(range(d))
    g = loc.terms.get((full, full))
    if g is None:
        return QZERO
    return wc.weight * _sign_reorder(d) * integrate_local(g, cell)


def boundary_integral(alpha: SuperForm, wc: WeightedCell, which: str):
    """Boundary pairing of Stokes type over the facets of a bounded cell.

    which='first' pairs with the second-slot normals and carries a leading
    minus sign; which='second' pairs with first-slot normals and a plus sign.
    Facet weights are the canonical lattice weights; the result is checked to
    be invariant under rescaling one facet weight.
    """
    cell = wc.cell
    m = cell.dim
    if not cell.is_bounded():
        raise ValueError("cannot integrate over an unbounded cell")
    if not alpha.is_zero():
        bd = alpha.bidegree()
        want = (m - 1, m) if which == "first" else (m, m - 1)
        if bd != want:
            raise ValueError(f"form bidegree {bd} does not match {want}")
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    slot = "second" if which == "first" else "prime"
    total = QZERO
    checked = False
    for tau in cell.facets():
        w = primitive_normal(cell, tau)
        nvec = [wc.weight * Q(x) for x in w]
        contracted = alpha.contract(nvec, slot)
        val = integrate_top(contracted, WeightedCell(tau, 1))
        if not checked:
            # facet-weight independence: double the facet weight, halve n
            half = alpha.contract([x / 2 for x in nvec], slot)
            val2 = integrate_top(half, WeightedCell(tau, 2))
            if val2 != val:
                raise AssertionError("boundary term depends on the facet weight")
            checked = True
        total += val
    return -total if which == "first" else total


def stokes_check(alpha: SuperForm, wc: WeightedCell, which: str):
    """(integral of d-alpha, boundary integral, equal?) for Stokes' theorem."""
    d_alpha = alpha.dprime() if which == "first" else alpha.dsecond()
    lhs = integrate_top(d_alpha, wc)
    rhs = boundary_integral(alpha, wc, which)
    return lhs, rhs, lhs == rhs


# ------------------------------------------------------- piecewise structures

class ContinuityError(ValueError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class PLFunction:
    """Piecewise-linear function on the maximal cells of a complex."""

    def __init__(self, cx: Complex, pieces):
        self.complex = cx
        self.maximal = cx.maximal_cells()
        mapped = dict(pieces)
        if set(mapped) != set(self.maximal):
            raise ValueError("pieces must cover exactly the maximal cells")
        self.pieces = {cell: ([qof(a) for a in lin], qof(c))
                       for cell, (lin, c) in mapped.items()}
        for cell, (lin, _) in self.pieces.items():
            if len(lin) != cell.n:
                raise ValueError("linear part has wrong dimension")
        self._check_continuity()

    def _check_continuity(self):
        cells = self.maximal
        for a in range(len(cells)):
            for b in range(a + 1, len(cells)):
                face = intersect(cells[a], cells[b])
                if face is None:
                    continue
                ch = face.chart
                pts = [list(ch.base)]
                for bs in ch.basis:
                    pts.append([x + y for x, y in zip(ch.base, bs)])
                for pt in pts:
                    va = vec_dot(self.pieces[cells[a]][0], pt) + self.pieces[cells[a]][1]
                    vb = vec_dot(self.pieces[cells[b]][0], pt) + self.pieces[cells[b]][1]
                    if va != vb:
                        raise ContinuityError(
                            "pieces disagree on a shared face",
                            {"point": [str(x) for x in pt],
                             "values": [str(va), str(vb)]})

    def value(self, x):
        x = [qof(v) for v in x]
        for cell in self.maximal:
            if cell.contains(x):
                lin, c = self.pieces[cell]
                return vec_dot(lin, x) + c
        raise ValueError("point outside the support of the function")

    def gradient(self, cell):
        return list(self.pieces[cell][0])

    def affine_on(self, cell):
        lin, c = self.pieces[cell]
        return list(lin), c


class PiecewiseForm:
    """A superform given per maximal cell, compatible on shared faces."""

    def __init__(self, cx: Complex, pieces):
        self.complex = cx
        self.maximal = cx.maximal_cells()
        mapped = dict(pieces)
        if set(mapped) != set(self.maximal):
            raise ValueError("pieces must cover exactly the maximal cells")
        self.pieces = mapped
        degs = set()
        for cell, form in mapped.items():
            if form.n != cell.n:
                raise ValueError("form ambient dimension mismatch")
            degs.update(form.bidegrees())
        if len(degs) > 1:
            raise ValueError("pieces have mixed bidegree")
        self.bidegree = next(iter(degs)) if degs else None
        self._check_compatibility()

    def _check_compatibility(self):
        cells = self.maximal
        for a in range(len(cells)):
            for b in range(a + 1, len(cells)):
                face = intersect(cells[a], cells[b])
                if face is None:
                    continue
                ra = self.pieces[cells[a]].restrict(face.chart)
                rb = self.pieces[cells[b]].restrict(face.chart)
                if ra != rb:
                    raise ContinuityError(
                        "forms disagree on a shared face",
                        {"face_dim": face.dim,
                         "difference": repr(ra - rb)})
