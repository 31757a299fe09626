import random
from fractions import Fraction

from deltaforms.linalg import (
    Lattice,
    clear_denominators,
    complement_lattice,
    det,
    hnf,
    integer_kernel,
    invert,
    kernel_rational,
    lattice_index,
    rank,
    rref,
    saturate,
    smith_normal_form,
    solve_linear,
    span_lattice,
)

Q = Fraction


def rand_int_matrix(rng, m, n, lo=-4, hi=4):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]


def mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def test_rref_and_rank_basics():
    r, pivots = rref([[Q(1), Q(2)], [Q(2), Q(4)]])
    assert pivots == [0]
    assert r[0] == [Q(1), Q(2)]
    assert rank([[Q(1), Q(0)], [Q(0), Q(1)]]) == 2
    assert rank([[Q(0), Q(0)]]) == 0


def test_solve_linear():
    x = solve_linear([[Q(2), Q(0)], [Q(0), Q(3)]], [Q(4), Q(9)])
    assert x == [Q(2), Q(3)]
    assert solve_linear([[Q(1), Q(1)], [Q(1), Q(1)]], [Q(0), Q(1)]) is None


def test_det_matches_cofactor_expansion():
    rng = random.Random(7)

    def cofactor_det(m):
        n = len(m)
        if n == 1:
            return m[0][0]
        total = Q(0)
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * cofactor_det(minor)
        return total

    for _ in range(30):
        n = rng.randint(1, 4)
        m = [[Q(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        assert det(m) == cofactor_det(m)


def test_invert_round_trip():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 4)
        m = [[Q(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if det(m) == 0:
            continue
        mi = invert(m)
        prod = mat_mul(m, mi)
        assert prod == [[Q(1) if i == j else Q(0) for j in range(n)] for i in range(n)]


def test_kernel_is_exact():
    ker = kernel_rational([[Q(1), Q(1), Q(0)]], 3)
    assert len(ker) == 2
    for v in ker:
        assert v[0] + v[1] == 0


def test_clear_denominators():
    assert clear_denominators([Q(1, 2), Q(1, 3)]) == [3, 2]
    assert clear_denominators([Q(-2), Q(4)]) == [-1, 2]


def test_hnf_canonical_shape():
    h = hnf([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    # pivots positive, entries above each pivot reduced into [0, pivot)
    pcols = []
    for row in h:
        j = next(k for k, x in enumerate(row) if x != 0)
        assert row[j] > 0
        pcols.append(j)
    assert pcols == sorted(pcols)
    for i, row in enumerate(h):
        j = pcols[i]
        for above in h[:i]:
            assert 0 <= above[j] < row[j]


def test_hnf_invariant_under_unimodular_row_ops():
    rng = random.Random(13)
    for _ in range(40):
        m, n = rng.randint(1, 3), rng.randint(1, 4)
        a = rand_int_matrix(rng, m, n)
        b = [row[:] for row in a]
        for _ in range(6):
            i, j = rng.randrange(m), rng.randrange(m)
            if i == j:
                b[i] = [-x for x in b[i]]
            else:
                q = rng.randint(-2, 2)
                b[i] = [x + q * y for x, y in zip(b[i], b[j])]
        assert hnf(a) == hnf(b)


def test_smith_normal_form_properties():
    rng = random.Random(17)
    for _ in range(40):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        a = rand_int_matrix(rng, m, n)
        s, rt, cti = smith_normal_form(a)
        # rt . a == s . cti   (avoids inverting colT)
        assert mat_mul(rt, a) == mat_mul(s, cti)
        assert abs(det([[Q(x) for x in row] for row in rt])) == 1
        assert abs(det([[Q(x) for x in row] for row in cti])) == 1
        diag = [s[i][i] for i in range(min(m, n))]
        for i in range(len(diag) - 1):
            if diag[i + 1] != 0:
                assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
        for i in range(m):
            for j in range(n):
                if i != j:
                    assert s[i][j] == 0


def coset_count_oracle(gens, n):
    """[saturation : sublattice] by counting lattice points of the saturation
    inside the half-open fundamental parallelepiped of the generators."""
    basis = [g for g in gens]
    # reduce to an independent subset
    indep = []
    for g in basis:
        if rank([[Q(x) for x in v] for v in indep + [g]]) > len(indep):
            indep.append(g)
    r = len(indep)
    if r == 0:
        return 1
    bound = sum(max(abs(x) for x in v) for v in indep) + 1
    count = 0
    from itertools import product

    for pt in product(range(-bound, bound + 1), repeat=n):
        # pt = sum t_i v_i with 0 <= t_i < 1 ?
        cols = [[Q(indep[i][k]) for i in range(r)] for k in range(n)]
        sol = solve_linear([c[:] for c in cols], [Q(x) for x in pt]) if r == n else None
        if r != n:
            # least squares not OK here; solve the overdetermined system exactly
            aug = [[Q(indep[i][k]) for i in range(r)] + [Q(pt[k])] for k in range(n)]
            rr, piv = rref(aug)
            if any(all(row[j] == 0 for j in range(r)) and row[r] != 0 for row in rr):
                continue
            sol = [Q(0)] * r
            for idx, j in enumerate(piv):
                sol[j] = rr[idx][r]
        if sol is None:
            continue
        if all(Q(0) <= t < Q(1) for t in sol):
            count += 1
    return count


def test_saturate_pinned_example():
    lat, index = saturate([(1, 0), (1, 2)], 2)
    assert index == 2
    assert lat == Lattice(2, [[1, 0], [0, 1]])


def test_saturate_against_coset_oracle():
    rng = random.Random(23)
    cases = [
        ([(1, 0), (1, 2)], 2),
        ([(2, 0), (0, 3)], 2),
        ([(1, 1)], 2),
        ([(2, 2)], 2),
        ([(1, 2, 0), (0, 0, 3)], 3),
    ]
    for _ in range(10):
        n = rng.randint(1, 3)
        k = rng.randint(1, n)
        cases.append(([tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(k)], n))
    for gens, n in cases:
        gens = [g for g in gens if any(g)]
        if not gens:
            continue
        lat, index = saturate(gens, n)
        assert index == coset_count_oracle(gens, n)
        # saturation contains every generator
        for g in gens:
            assert lat.contains(list(g))


def test_lattice_contains_and_coords():
    lat = Lattice(2, [[1, 0], [0, 2]])
    assert lat.contains([3, 4])
    assert not lat.contains([0, 1])
    assert lat.coords([3, 4]) == [Q(3), Q(2)]


def test_lattice_index():
    sub = Lattice(2, hnf([[1, 0], [1, 2]]))
    sup = Lattice(2, [[1, 0], [0, 1]])
    assert lattice_index(sub.rows, sup) == 2
    assert lattice_index(sup.rows, sup) == 1
    assert lattice_index([[3]], Lattice(1, [[1]])) == 3


def test_saturate_rejects_degenerate_input():
    import pytest

    with pytest.raises(ValueError):
        saturate([], 2)
    with pytest.raises(ValueError):
        saturate([[0, 0]], 2)


def test_saturate_idempotent():
    rng = random.Random(41)
    for _ in range(20):
        n = rng.randint(1, 3)
        gens = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(rng.randint(1, n))]
        if not any(any(g) for g in gens):
            continue
        lat, _ = saturate([g for g in gens if any(g)], n)
        again, idx = saturate(lat.basis(), n)
        assert again == lat and idx == 1


def test_integer_kernel_primitive():
    ker = integer_kernel([[1, 1, 2]], 3)
    assert len(ker) == 2
    for v in ker:
        assert v[0] + v[1] + 2 * v[2] == 0
    # saturated: (1,-1,0) and (2,0,-1) must lie inside
    lat = Lattice(3, ker)
    assert lat.contains([1, -1, 0])
    assert lat.contains([2, 0, -1])


def test_complement_lattice():
    rng = random.Random(29)
    for _ in range(30):
        n = rng.randint(1, 4)
        k = rng.randint(0, n)
        gens = [g for g in ([[rng.randint(-3, 3) for _ in range(n)] for _ in range(k)]) if any(g)]
        if gens:
            lat, _ = saturate(gens, n)
        else:
            lat = Lattice(n, [])
        comp = complement_lattice(lat)
        assert lat.rank + comp.rank == n
        full = [list(v) for v in lat.basis()] + [list(v) for v in comp.basis()]
        if full:
            assert abs(det([[Q(x) for x in row] for row in full])) == 1


def test_span_lattice_of_rational_vectors():
    lat = span_lattice([[Q(1, 2), Q(0)], [Q(0), Q(1, 3)]], 2)
    # directions (1,0) and (0,1)
    assert lat.rank == 2
    assert lat.contains([1, 0]) and lat.contains([0, 1])
