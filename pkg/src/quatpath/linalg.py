"""Small exact linear algebra over Z and Q.

Matrices are tuples of tuples (rows), entries int or Fraction.  All sizes
here are tiny (rank <= 8), so clarity wins over asymptotics: HNF by
gcd elimination, determinants by fraction-free Bareiss, inverses by
Gaussian elimination over Fraction.
"""

from __future__ import annotations

from fractions import Fraction

from .arith import xgcd

Mat = tuple  # tuple of row tuples


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Mat:
    return tuple(tuple(0 for _ in range(c)) for _ in range(r))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m))


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Mat, v) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v, a: Mat) -> tuple:
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0])))


def mat_scale(a: Mat, s) -> Mat:
    return tuple(tuple(x * s for x in row) for row in a)


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_neg(a: Mat) -> Mat:
    return tuple(tuple(-x for x in row) for row in a)


def det_bareiss(m: Mat) -> int:
    """Determinant of an integer matrix, fraction-free."""
    n = len(m)
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_fraction(m: Mat) -> Fraction:
    """Determinant over Q by elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if a[i][k] != 0:
                pivot = i
                break
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            factor = a[i][k] * inv
            if factor:
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
    return det


def inverse_fraction(m: Mat) -> Mat:
    """Inverse of a square matrix, entries Fraction.  Raises on singular."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if a[i][k] != 0:
                pivot = i
                break
        if pivot is None:
            raise ValueError("matrix is singular")
        a[k], a[pivot] = a[pivot], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                factor = a[i][k]
                a[i] = [x - factor * y for x, y in zip(a[i], a[k])]
    return tuple(tuple(row[n:]) for row in a)


def hnf_with_transform(m: Mat) -> tuple[Mat, Mat]:
    """Row Hermite normal form.

    Returns (H, U) with U unimodular, U*M = H, H in row-echelon HNF:
    pivots positive, strictly right-moving, entries above each pivot
    reduced into [0, pivot).  Zero rows sink to the bottom (so U stays
    square and unimodular).
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(row) for row in m]
    u = [list(row) for row in identity(rows)]
    pivot_row = 0
    for col in range(cols):
        if pivot_row >= rows:
            break
        # clear the column below pivot_row by gcd steps
        nz = [i for i in range(pivot_row, rows) if a[i][col] != 0]
        if not nz:
            continue
        i0 = nz[0]
        a[pivot_row], a[i0] = a[i0], a[pivot_row]
        u[pivot_row], u[i0] = u[i0], u[pivot_row]
        for i in range(pivot_row + 1, rows):
            while a[i][col] != 0:
                g, s, t = xgcd(a[pivot_row][col], a[i][col])
                p, q = a[pivot_row][col] // g, a[i][col] // g
                # rows (pivot, i) <- (s*pivot + t*i, -q*pivot + p*i); det = 1
                new_p = [s * x + t * y for x, y in zip(a[pivot_row], a[i])]
                new_i = [-q * x + p * y for x, y in zip(a[pivot_row], a[i])]
                a[pivot_row], a[i] = new_p, new_i
                new_pu = [s * x + t * y for x, y in zip(u[pivot_row], u[i])]
                new_iu = [-q * x + p * y for x, y in zip(u[pivot_row], u[i])]
                u[pivot_row], u[i] = new_pu, new_iu
        if a[pivot_row][col] < 0:
            a[pivot_row] = [-x for x in a[pivot_row]]
            u[pivot_row] = [-x for x in u[pivot_row]]
        # reduce entries above the pivot
        piv = a[pivot_row][col]
        for i in range(pivot_row):
            q = a[i][col] // piv
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[pivot_row])]
                u[i] = [x - q * y for x, y in zip(u[i], u[pivot_row])]
        pivot_row += 1
    return tuple(tuple(r) for r in a), tuple(tuple(r) for r in u)


def hnf(m: Mat) -> Mat:
    """Row HNF with zero rows dropped."""
    h, _ = hnf_with_transform(m)
    return tuple(row for row in h if any(row))


def left_kernel(m: Mat) -> Mat:
    """Basis of {x in Z^rows : x * M = 0}, as rows.  Saturated."""
    h, u = hnf_with_transform(m)
    return tuple(u[i] for i in range(len(h)) if not any(h[i]))


def solve_left_int(m: Mat, b) -> tuple | None:
    """One integer solution x of x * M = b, or None.

    Back-substitution against the HNF; tiny systems only.
    """
    h, u = hnf_with_transform(m)
    rows = [row for row in h if any(row)]
    coeff = [0] * len(h)
    target = list(b)
    for idx, row in enumerate(rows):
        col = next(j for j, x in enumerate(row) if x)
        if target[col] % row[col] != 0:
            return None
        q = target[col] // row[col]
        coeff[idx] = q
        target = [t - q * x for t, x in zip(target, row)]
    if any(target):
        return None
    x = [0] * len(u[0])
    for idx, c in enumerate(coeff):
        if c:
            x = [xi + c * ui for xi, ui in zip(x, u[idx])]
    return tuple(x)


def solve_left_mod(a: Mat, b, modulus: int) -> tuple | None:
    """One solution x of x * A = b (mod modulus), or None.

    Reduces to an integer solve by adjoining modulus * I rows.
    """
    rows = len(a)
    cols = len(a[0])
    stacked = tuple(a) + tuple(
        tuple(modulus if i == j else 0 for j in range(cols)) for i in range(cols)
    )
    sol = solve_left_int(stacked, tuple(x % modulus for x in b))
    if sol is None:
        return None
    return tuple(x % modulus for x in sol[:rows])


def lattice_intersection(b1: Mat, b2: Mat) -> Mat:
    """Intersection of two full-rank row lattices in the same Z^n.

    Rows generate; output is the HNF basis of the intersection.
    """
    neg2 = mat_neg(b2)
    stacked = tuple(b1) + tuple(neg2)
    kern = left_kernel(stacked)
    n1 = len(b1)
    vecs = [vec_mat(k[:n1], b1) for k in kern]
    if not vecs:
        return ()
    return hnf(tuple(vecs))


def content(v) -> int:
    """gcd of the entries (nonnegative)."""
    g = 0
    for x in v:
        g = abs(x) if g == 0 else _gcd(g, abs(x))
        # gcd 1 can stop early
        if g == 1:
            return 1
    return g


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
