"""Exact linear algebra over Q and lattice computations over Z.

Lattices are full sublattices of their rational span intersected with Z^n;
bases are kept in a canonical row echelon form (Hermite normal form) so that
equal lattices have identical bases.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .scalars import Q, QZERO, QONE, qof


# ---------------------------------------------------------------- rational --

def mat_copy(m):
    return [list(r) for r in m]


def mat_mul_vec(m, v):
    return [sum((r[j] * v[j] for j in range(len(v))), QZERO) for r in m]


def vec_dot(a, b):
    return sum((x * y for x, y in zip(a, b)), QZERO)


def vec_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def vec_add(a, b):
    return [x + y for x, y in zip(a, b)]


def vec_scale(a, s):
    return [x * s for x in a]


def rref(rows):
    """Reduced row echelon form. Returns (rref_rows, pivot_columns)."""
    m = [ [qof(x) for x in r] for r in rows ]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[0])


def solve_linear(a_rows, b):
    """One solution x of A x = b, or None if inconsistent."""
    if not a_rows:
        return [] if all(x == 0 for x in b) else None
    aug = [list(r) + [bv] for r, bv in zip(a_rows, b)]
    red, pivots = rref(aug)
    n = len(a_rows[0])
    x = [QZERO] * n
    for row, p in zip(red, pivots):
        if p == n:
            return None
        x[p] = row[n]
    return x


def kernel_rational(rows, ncols=None):
    """Basis of the rational kernel {x : A x = 0} as a list of vectors."""
    if ncols is None:
        if not rows:
            raise ValueError("need ncols for an empty matrix")
        ncols = len(rows[0])
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [QZERO] * ncols
        v[f] = QONE
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def det(rows):
    """Determinant by fraction-free-ish Gaussian elimination over Q."""
    m = mat_copy(rows)
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a nonsquare matrix")
    d = QONE
    for c in range(n):
        piv = None
        for i in range(c, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            return QZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d


class RatMatrix:
    """Thin exact rational matrix with the operations the geometry needs."""

    def __init__(self, rows):
        self.rows = [[qof(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    def rank(self):
        return rank(self.rows)

    def det(self):
        return det(self.rows)

    def solve(self, b):
        return solve_linear(self.rows, list(b))

    def kernel(self):
        """Kernel basis; integral and primitive when the matrix is integral."""
        if self.rows and all(x.denominator == 1 for r in self.rows for x in r):
            im = [[int(x) for x in r] for r in self.rows]
            return [list(map(Q, v)) for v in integer_kernel(im, self.ncols)]
        return kernel_rational(self.rows, self.ncols)

    def mul_vec(self, v):
        return mat_mul_vec(self.rows, list(v))


def invert(rows):
    """Inverse of a square rational matrix."""
    n = len(rows)
    aug = [list(map(qof, r)) + [QONE if i == j else QZERO for j in range(n)]
           for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular matrix")
    return [row[n:] for row in red]


# ----------------------------------------------------------------- integer --

def _ivec_primitive(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g in (0, 1):
        return list(v)
    return [x // g for x in v]


def clear_denominators(v):
    """Scale a rational vector to a primitive integer vector (same ray)."""
    den = 1
    for x in v:
        x = qof(x)
        den = den * x.denominator // gcd(den, x.denominator)
    iv = [int(qof(x) * den) for x in v]
    return _ivec_primitive(iv)


def hnf(rows):
    """Canonical row Hermite normal form of the lattice spanned by rows.

    Rows are integer vectors.  Output rows have strictly increasing pivot
    columns, positive pivots, and entries above each pivot reduced into
    [0, pivot).  The result is the unique canonical basis of the lattice.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    out = []
    col = 0
    while m and col < ncols:
        rows_nz = [r for r in m if r[col] != 0]
        if not rows_nz:
            col += 1
            continue
        # reduce the column to a single nonzero entry by gcd steps
        while True:
            rows_nz = sorted((r for r in m if r[col] != 0), key=lambda r: abs(r[col]))
            if len(rows_nz) <= 1:
                break
            small = rows_nz[0]
            for r in rows_nz[1:]:
                q = r[col] // small[col]
                for j in range(ncols):
                    r[j] -= q * small[j]
        m = [r for r in m if any(r)]
        rows_nz = [r for r in m if r[col] != 0]
        if rows_nz:
            piv = rows_nz[0]
            m.remove(piv)
            if piv[col] < 0:
                piv = [-x for x in piv]
            out.append(piv)
        col += 1
    # reduce entries above pivots, left to right so earlier columns stay put
    for i in range(len(out)):
        p = next(j for j in range(ncols) if out[i][j] != 0)
        for k in range(i):
            q = out[k][p] // out[i][p]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return [list(r) for r in out]


def smith_normal_form(a):
    """Smith normal form with transforms: returns (s, rowT, colTinv).

    s = rowT * a * colT for unimodular transforms; colTinv is the inverse of
    colT, tracked directly so lattice bases can be read off its rows.
    Diagonal entries are nonnegative and each divides the next.
    """
    m = [list(r) for r in a]
    k = len(m)
    n = len(m[0]) if m else 0
    rt = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    cti = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_op(i, j, q):  # row_i -= q*row_j
        m[i] = [a - q * b for a, b in zip(m[i], m[j])]
        rt[i] = [a - q * b for a, b in zip(rt[i], rt[j])]

    def col_op(i, j, q):  # col_i -= q*col_j  => inverse: row_j += q*row_i
        for r in m:
            r[i] -= q * r[j]
        cti[j] = [a + q * b for a, b in zip(cti[j], cti[i])]

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        rt[i], rt[j] = rt[j], rt[i]

    def col_swap(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        cti[i], cti[j] = cti[j], cti[i]

    t = 0
    while t < min(k, n):
        # find smallest nonzero entry in the remaining block
        best = None
        for i in range(t, k):
            for j in range(t, n):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        dirty = False
        for i in range(t + 1, k):
            if m[i][t] != 0:
                q = m[i][t] // m[t][t]
                row_op(i, t, q)
                if m[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if m[t][j] != 0:
                q = m[t][j] // m[t][t]
                col_op(j, t, q)
                if m[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # divisibility sweep
        bad = None
        for i in range(t + 1, k):
            for j in range(t + 1, n):
                if m[i][j] % m[t][t] != 0:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_op(t, bad, -1)
            continue
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            rt[t] = [-x for x in rt[t]]
        t += 1
    return m, rt, cti


class Lattice:
    """Saturated sublattice of Z^n, i.e. (rational span) intersected with Z^n."""

    __slots__ = ("n", "rows")

    def __init__(self, n, rows):
        self.n = n
        self.rows = tuple(tuple(int(x) for x in r) for r in hnf(rows))

    @property
    def rank(self):
        return len(self.rows)

    def basis(self):
        return [list(r) for r in self.rows]

    def contains(self, v) -> bool:
        """Membership of an integer vector in the lattice."""
        v = [qof(x) for x in v]
        if any(x.denominator != 1 for x in v):
            return False
        c = self.coords(v)
        return c is not None and all(x.denominator == 1 for x in c)

    def coords(self, v):
        """Rational coordinates of v in the basis, or None if off-span."""
        if not self.rows:
            return [] if all(qof(x) == 0 for x in v) else None
        # solve basis^T * c = v
        at = [[Q(self.rows[i][j]) for i in range(len(self.rows))] for j in range(self.n)]
        return solve_linear(at, [qof(x) for x in v])

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Lattice(n={self.n}, rows={self.rows})"


def saturate(vectors, n=None):
    """Saturation of the lattice generated by integer vectors.

    Returns (Lattice, index) where index = [saturation : generated lattice],
    the product of the nonunit elementary divisors.
    """
    vecs = [list(v) for v in vectors]
    if n is None:
        if not vecs:
            raise ValueError("need ambient dimension for empty generating set")
        n = len(vecs[0])
    vecs = [v for v in vecs if any(v)]
    if not vecs:
        raise ValueError("saturate needs at least one nonzero vector")
    if any(qof(x).denominator != 1 for v in vecs for x in v):
        raise ValueError("saturate expects integer vectors")
    s, _, cti = smith_normal_form([[int(x) for x in v] for v in vecs])
    r = 0
    index = 1
    for i in range(min(len(s), n)):
        d = s[i][i]
        if d != 0:
            r += 1
            index *= d
    sat_rows = cti[:r]
    return Lattice(n, sat_rows), index


def lattice_index(sub_rows, sup: Lattice):
    """Index [sup : sub] as a positive rational covolume ratio.

    sub_rows must span the same rational subspace as sup; the result is an
    integer precisely when sub is contained in sup.
    """
    sub = [r for r in ([list(map(qof, v)) for v in sub_rows]) if any(r)]
    if len(sub) != sup.rank or rank(sub) != sup.rank:
        raise ValueError("sublattice must span the same subspace")
    if sup.rank == 0:
        return Q(1)
    coords = []
    for v in sub:
        c = sup.coords(v)
        if c is None:
            raise ValueError("sublattice not contained in the span")
        coords.append(c)
    d = det(coords)
    if d == 0:
        raise ValueError("sublattice basis is degenerate")
    return abs(d)


def integer_kernel(rows, ncols=None):
    """Canonical basis of {x in Z^n : A x = 0} for an integer matrix A."""
    if ncols is None:
        if not rows:
            raise ValueError("need ncols for an empty matrix")
        ncols = len(rows[0])
    rows = [r for r in rows if any(r)]
    if not rows:
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    ker = kernel_rational([[Q(x) for x in row] for row in rows], ncols)
    if not ker:
        return []
    ints = [clear_denominators(v) for v in ker]
    lat, _ = saturate(ints, ncols)
    return lat.basis()


def span_lattice(vectors, n):
    """Z^n intersected with the rational span of the given vectors."""
    ints = [clear_denominators(v) for v in vectors if any(qof(x) != 0 for x in v)]
    if not ints:
        return Lattice(n, [])
    lat, _ = saturate(ints, n)
    return lat


def complement_lattice(lat: Lattice) -> Lattice:
    """Deterministic integral complement: Z^n = lat (+) complement."""
    n = lat.n
    if lat.rank == 0:
        return Lattice(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])
    if lat.rank == n:
        return Lattice(n, [])
    s, _, cti = smith_normal_form([list(r) for r in lat.rows])
    for i in range(lat.rank):
        if s[i][i] != 1:
            raise ValueError("complement of a nonsaturated lattice")
    # complementarity depends only on the spanned lattice, so the canonical
    # HNF basis of these rows is still a complement
    comp = Lattice(n, cti[lat.rank:])
    full = [list(r) for r in lat.rows] + [list(r) for r in comp.rows]
    if abs(det([[Q(x) for x in r] for r in full])) != 1:
        raise AssertionError("complement construction failed")
    return comp
