"""Exact integer and rational matrix routines.

Everything here is deterministic: pivots are chosen by (|value|, row, col)
and canonical forms are unique, so repeated runs produce identical output.
Matrices are lists of lists; vectors are lists or tuples.
"""

from __future__ import annotations

from fractions import Fraction


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, mid, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(mid):
            c = ai[k]
            if c:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += c * bk[j]
    return out


def mat_vec(a, v):
    return [sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def smith_normal_form(matrix):
    """Return (D, U, V) with U*A*V = D diagonal, d1 | d2 | ..., di >= 0.

    U and V are unimodular integer matrices.  The result is verified before
    returning.
    """
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if a else 0
    u = identity(m)
    v = identity(n)

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def row_add(dst, src, c):
        for k in range(n):
            a[dst][k] += c * a[src][k]
        for k in range(m):
            u[dst][k] += c * u[src][k]

    def col_add(dst, src, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while True:
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0:
                    cand = (abs(a[i][j]), i, j)
                    if pivot is None or cand < pivot:
                        pivot = cand
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        while True:
            # clear column t below the pivot
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_add(i, t, -q)
                    if a[i][t]:
                        row_swap(t, i)
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_add(j, t, -q)
                    if a[t][j]:
                        col_swap(t, j)
                        done = False
            if done:
                break
        if a[t][t] < 0:
            row_negate(t)
        # pivot must divide the rest of the submatrix
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t] != 0:
                    row_add(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            t += 1

    # enforce the divisibility chain
    r = min(m, n)
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di and dj and dj % di != 0:
                col_add(i, i + 1, 1)
                _resume_two_by_two(a, u, v, i)
                changed = True
            elif di == 0 and dj != 0:
                row_swap(i, i + 1)
                col_swap(i, i + 1)
                changed = True

    d = [[a[i][j] for j in range(n)] for i in range(m)]
    check = mat_mul(mat_mul(u, [list(map(int, row)) for row in matrix]), v)
    assert check == d, "Smith normal form verification failed"
    diag = [d[i][i] for i in range(min(m, n))]
    for i in range(len(diag) - 1):
        assert diag[i] >= 0 and (diag[i + 1] == 0 or diag[i] == 0 or diag[i + 1] % diag[i] == 0), \
            "Smith divisibility chain failed"
    return d, u, v


def _resume_two_by_two(a, u, v, t):
    """Re-diagonalize the 2x2 block at (t, t) after a column mix."""
    m, n = len(a), len(a[0])
    while True:
        done = True
        for i in (t + 1,):
            if i < m and a[i][t]:
                q = a[i][t] // a[t][t]
                for k in range(n):
                    a[i][k] -= q * a[t][k]
                for k in range(m):
                    u[i][k] -= q * u[t][k]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    u[t], u[i] = u[i], u[t]
                    done = False
        for j in (t + 1,):
            if j < n and a[t][j]:
                q = a[t][j] // a[t][t]
                for row in a:
                    row[j] -= q * row[t]
                for row in v:
                    row[j] -= q * row[t]
                if a[t][j]:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                    for row in v:
                        row[t], row[j] = row[j], row[t]
                    done = False
        if done:
            break
    if a[t][t] < 0:
        a[t] = [-x for x in a[t]]
        u[t] = [-x for x in u[t]]
    if t + 1 < min(m, n) and a[t + 1][t + 1] < 0:
        a[t + 1] = [-x for x in a[t + 1]]
        u[t + 1] = [-x for x in u[t + 1]]


def integer_kernel(matrix) -> list[list[int]]:
    """Z-basis of {x : A x = 0}, as a list of vectors (columns of V past rank)."""
    if not matrix or not matrix[0]:
        n = len(matrix[0]) if matrix else 0
        return [list(row) for row in identity(n)]
    d, _u, v = smith_normal_form(matrix)
    n = len(matrix[0])
    rank = sum(1 for i in range(min(len(matrix), n)) if d[i][i] != 0)
    return [[v[r][j] for r in range(n)] for j in range(rank, n)]


def hermite_row_basis(rows) -> list[list[int]]:
    """Canonical Hermite basis (row style) of the lattice spanned by rows.

    Pivots positive; entries below a pivot zero, entries above reduced into
    [0, pivot).  Zero rows dropped; result rows sorted by pivot column.
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    if not work:
        return []
    n = len(work[0])
    out: list[list[int]] = []
    for col in range(n):
        having = [r for r in work if r[col] != 0]
        if not having:
            continue
        while len(having) > 1:
            having.sort(key=lambda r: abs(r[col]))
            piv = having[0]
            for r in having[1:]:
                q = r[col] // piv[col]
                if q:
                    for k in range(col, n):
                        r[k] -= q * piv[k]
            having = [r for r in having if r[col] != 0]
        piv = having[0]
        if piv[col] < 0:
            for k in range(n):
                piv[k] = -piv[k]
        out.append(piv)
        work = [r for r in work if r is not piv and any(r)]
    # reduce entries above each pivot into [0, pivot); ascending order keeps
    # earlier columns canonical (row i only touches columns >= its pivot)
    for i in range(len(out)):
        pcol = next(k for k in range(n) if out[i][k] != 0)
        p = out[i][pcol]
        for j in range(i):
            q = out[j][pcol] // p
            if q:
                for k in range(n):
                    out[j][k] -= q * out[i][k]
    return out


def hnf_contains(basis, vector) -> bool:
    """Membership of an integer vector in the lattice given by a Hermite basis."""
    v = list(map(int, vector))
    n = len(v)
    for row in basis:
        pcol = next((k for k in range(n) if row[k] != 0), None)
        if pcol is None:
            continue
        if v[pcol] % row[pcol] == 0:
            q = v[pcol] // row[pcol]
            if q:
                for k in range(n):
                    v[k] -= q * row[k]
        elif v[pcol]:
            return False
    return not any(v)


def frac_rref(matrix):
    """Row reduce over Q; returns (rref_rows, pivot_columns)."""
    a = [[Fraction(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(n):
        sel = None
        for i in range(r, m):
            if a[i][c]:
                sel = i
                break
        if sel is None:
            continue
        a[r], a[sel] = a[sel], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def frac_nullspace(matrix) -> list[list[Fraction]]:
    """Basis of the rational kernel of A."""
    if not matrix:
        return []
    n = len(matrix[0])
    rref, pivots = frac_rref(matrix)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rref[r][fc]
        basis.append(vec)
    return basis


def frac_rank(matrix) -> int:
    if not matrix:
        return 0
    _, pivots = frac_rref(matrix)
    return len(pivots)


def frac_inverse(matrix):
    n = len(matrix)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(matrix)]
    rref, pivots = frac_rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in rref[:n]]


def frac_solve(matrix, rhs):
    """Solve A x = b over Q; raises if inconsistent; free variables set to 0."""
    if not matrix:
        if any(rhs):
            raise ValueError("inconsistent system")
        return []
    n = len(matrix[0])
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    rref, pivots = frac_rref(aug)
    if n in pivots:
        raise ValueError("inconsistent system")
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        x[pc] = rref[r][n]
    return x
