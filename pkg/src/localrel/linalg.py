"""Shared linear algebra: finite-field row reduction and subspace calculus,
p-adic lattice canonical forms, Smith valuation vectors, and row echelon
solving over Z/p^N.

Matrices are lists of lists. Field elements go through a tiny field protocol
(GFp / GFp2 / the rational field) so the filtration calculus can run over
F_q, F_{q^2} and Q with one code path.
"""

from __future__ import annotations

import math
from fractions import Fraction


class PrecisionExhausted(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# field protocol


class GFp:
    """Prime field F_p with int representatives."""

    def __init__(self, p: int):
        self.p = p
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def elements(self):
        return range(self.p)

    def size(self):
        return self.p

    def __repr__(self):
        return f"GF({self.p})"


class GFp2:
    """F_{p^2} = F_p[w]/(w^2 - u), elements as pairs (a, b) = a + b w.

    Conjugation is the q-power map, here (a, b) -> (a, -b).
    """

    def __init__(self, p: int, u: int):
        self.p = p
        self.u = u % p
        self.zero = (0, 0)
        self.one = (1, 0)

    def add(self, x, y):
        return ((x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p)

    def sub(self, x, y):
        return ((x[0] - y[0]) % self.p, (x[1] - y[1]) % self.p)

    def mul(self, x, y):
        a = (x[0] * y[0] + self.u * x[1] * y[1]) % self.p
        b = (x[0] * y[1] + x[1] * y[0]) % self.p
        return (a, b)

    def neg(self, x):
        return ((-x[0]) % self.p, (-x[1]) % self.p)

    def inv(self, x):
        n = (x[0] * x[0] - self.u * x[1] * x[1]) % self.p
        ninv = pow(n, -1, self.p)
        return (x[0] * ninv % self.p, (-x[1]) * ninv % self.p)

    def conj(self, x):
        return (x[0], (-x[1]) % self.p)

    def is_zero(self, x):
        return x[0] % self.p == 0 and x[1] % self.p == 0

    def elements(self):
        return ((a, b) for a in range(self.p) for b in range(self.p))

    def size(self):
        return self.p * self.p

    def embed(self, a: int):
        return (a % self.p, 0)

    def __repr__(self):
        return f"GF({self.p}^2)"


class QField:
    """The rationals, for filtration calculus over the generic fiber."""

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def __repr__(self):
        return "Q"


QQ = QField()


# ---------------------------------------------------------------------------
# generic row space calculus (subspaces as row-reduced bases)


def rref(field, rows):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if not field.is_zero(rows[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def row_space(field, rows):
    """Canonical basis (tuple of tuples) of the span of the given rows."""
    red, _ = rref(field, rows)
    return tuple(tuple(r) for r in red)


def dim(space) -> int:
    return len(space)


def sum_spaces(field, a, b):
    return row_space(field, list(a) + list(b))


def intersect_spaces(field, a, b):
    """Intersection via the kernel of the stacked system (Zassenhaus-style)."""
    if not a or not b:
        return ()
    n = len(a[0])
    # Solve x*A = y*B: rows of [A | A] and [B | 0], intersect = right half of
    # reduced rows whose left half vanishes.
    big = [list(r) + list(r) for r in a] + [list(r) + [field.zero] * n for r in b]
    red, _ = rref(field, big)
    out = []
    for r in red:
        if all(field.is_zero(x) for x in r[:n]):
            out.append(r[n:])
    return row_space(field, out)


def in_span(field, space, vec) -> bool:
    aug = row_space(field, list(space) + [list(vec)])
    return len(aug) == len(space)


def space_eq(a, b) -> bool:
    return tuple(a) == tuple(b)


def kernel(field, mat):
    """Right kernel basis of the matrix (rows = equations)."""
    if not mat:
        return ()
    red, pivots = rref(field, mat)
    n = len(mat[0])
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fc in free:
        v = [field.zero] * n
        v[fc] = field.one
        for r, pc in zip(red, pivots):
            v[pc] = field.neg(r[fc])
        out.append(v)
    return row_space(field, out)


def mat_mul(field, a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = [[field.zero] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        for t in range(k):
            x = ai[t]
            if field.is_zero(x):
                continue
            bt = b[t]
            row = out[i]
            for j in range(m):
                row[j] = field.add(row[j], field.mul(x, bt[j]))
    return out


def mat_vec(field, a, v):
    return [
        _dot(field, row, v)
        for row in a
    ]


def _dot(field, r, v):
    s = field.zero
    for x, y in zip(r, v):
        s = field.add(s, field.mul(x, y))
    return s


def apply_to_space(field, g, space):
    """Image of a row-space under the linear map with matrix g (columns act on
    coordinate vectors: vector v maps to g v, rows here are vectors)."""
    rows = [mat_vec(field, g, list(v)) for v in space]
    return row_space(field, rows)


def perp_space(field, space, gram, conj=None):
    """Orthogonal complement w.r.t. a bilinear (or sesquilinear) gram matrix.

    For the sesquilinear case pass the field conjugation; vectors v with
    form(x, v) = 0 for all x in the space.
    """
    n = len(gram)
    if not space:
        return row_space(field, [[field.one if i == j else field.zero for j in range(n)] for i in range(n)])
    eqs = []
    for x in space:
        row = []
        for j in range(n):
            s = field.zero
            for i in range(n):
                s = field.add(s, field.mul(x[i], gram[i][j]))
            row.append(s)
        eqs.append(row)
    if conj is not None:
        eqs = [[conj(x) for x in row] for row in eqs]
    return kernel(field, eqs)


def rank(field, mat) -> int:
    red, _ = rref(field, mat)
    return len(red)


# ---------------------------------------------------------------------------
# exact p-adic matrices

def entry_val(x: Fraction, p: int):
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def lattice_hnf_key(mat, p: int, det_val_hint=None):
    """Canonical key of the O-lattice spanned by the columns of `mat`.

    mat: square matrix of Fractions (entries in Q with p in the denominator
    allowed; prime-to-p denominators are fine, they are units).
    Returns (diag, entries) with diag the tuple of diagonal valuations of the
    upper-triangular Hermite basis and entries the canonically reduced
    off-diagonal data, each entry stored as (val, unit-digits) scale-free.
    """
    n = len(mat)
    cols = [[Fraction(mat[i][j]) for i in range(n)] for j in range(n)]
    used = [False] * n
    order = []  # column index chosen as pivot for each row, bottom-up
    piv_for_row = [None] * n
    for r in range(n - 1, -1, -1):
        best, best_v = None, None
        for j in range(n):
            if used[j]:
                continue
            v = entry_val(cols[j][r], p)
            if v is not math.inf and (best_v is None or v < best_v):
                best, best_v = j, v
        if best is None:
            raise ValueError("singular matrix has no lattice")
        used[best] = True
        piv_for_row[r] = best
        pv = best_v
        # normalize pivot column: divide by unit part of pivot entry
        unit = cols[best][r] / Fraction(p) ** pv
        inv = 1 / unit
        cols[best] = [x * inv for x in cols[best]]
        # clear row r in all other unused columns
        for j in range(n):
            if used[j] or cols[j][r] == 0:
                continue
            q = cols[j][r] / cols[best][r]
            cols[j] = [x - q * y for x, y in zip(cols[j], cols[best])]
        order.append((r, best, pv))
    # assemble upper-triangular basis B with B[r][r] = p^{a_r}
    basis = [[Fraction(0)] * n for _ in range(n)]
    diag = [0] * n
    for r in range(n):
        j = piv_for_row[r]
        diag[r] = entry_val(cols[j][r], p)
        for i in range(n):
            basis[i][r] = cols[j][i]
    # reduce above-diagonal entries modulo p^{a_i} * O
    for c in range(n - 1, -1, -1):
        for i in range(c - 1, -1, -1):
            x = basis[i][c]
            if x == 0:
                continue
            ai = diag[i]
            v = entry_val(x, p)
            if v >= ai:
                q = x / Fraction(p) ** ai
                # subtract floor: q has p-valuation >= 0; its class mod 1 in
                # O is itself, so the whole entry can be cleared by an
                # O-multiple of column i only if q in O: субtract q * col_i.
                basis_col_i = [basis[t][i] for t in range(n)]
                for t in range(n):
                    basis[t][c] -= q * basis_col_i[t]
            else:
                digits, newx = _reduce_entry(x, ai, p)
                q = (x - newx) / Fraction(p) ** ai
                basis_col_i = [basis[t][i] for t in range(n)]
                for t in range(n):
                    basis[t][c] -= q * basis_col_i[t]
                del digits
    entries = []
    for i in range(n):
        for c in range(i + 1, n):
            entries.append(_entry_key(basis[i][c], diag[i], p))
    return tuple(diag), tuple(entries)


def _reduce_entry(x: Fraction, a: int, p: int):
    """Canonical representative of x + p^a O: p^v * (unit mod p^(a-v))."""
    v = entry_val(x, p)
    if v >= a:
        return (0, 0), Fraction(0)
    u = x / Fraction(p) ** v
    m = p ** (a - v)
    digits = u.numerator * pow(u.denominator, -1, m) % m
    return (v, digits), Fraction(digits) * Fraction(p) ** v


def _entry_key(x: Fraction, a: int, p: int):
    key, _ = _reduce_entry(x, a, p)
    return key


def scale_to_int(mat, p: int):
    """(integer rows, p-shift e): the lattice of `mat` equals p^-e times the
    lattice of the integer matrix, up to a harmless unit scaling."""
    n = len(mat)
    den = 1
    for row in mat:
        for x in row:
            d = x.denominator if isinstance(x, Fraction) else 1
            den = den * d // math.gcd(den, d)
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    scale = den * p**e
    m = [[0] * len(mat[0]) for _ in range(n)]
    for i in range(n):
        for j in range(len(mat[0])):
            x = mat[i][j]
            if isinstance(x, Fraction):
                y = x * scale
                assert y.denominator == 1
                m[i][j] = y.numerator
            else:
                m[i][j] = int(x) * scale
    return m, e


def int_mat_mul(a, b):
    n, k, mm = len(a), len(b), len(b[0])
    out = [[0] * mm for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(mm):
                    oi[j] += x * bt[j]
    return out


def lattice_hnf_key_int(mat, p: int):
    """Fast-path canonical lattice key: scale to integers and run the Hermite
    reduction with modular integer arithmetic. Agrees with lattice_hnf_key."""
    m, e = scale_to_int(mat, p)
    return lattice_hnf_key_scaled(m, e, p)


def lattice_hnf_key_scaled(m, e: int, p: int):
    """Canonical key of the lattice p^-e * (column span of the integer matrix m),
    up to unit scaling (which does not change the lattice)."""
    n = len(m)
    d = _int_det(m)
    if d == 0:
        raise ValueError("singular matrix has no lattice")
    vdet = 0
    while d % p == 0:
        d //= p
        vdet += 1
    B = vdet + 4
    mod = p**B
    cols = [[m[i][j] % mod for i in range(n)] for j in range(n)]

    def val(x):
        if x == 0:
            return B
        v = 0
        while x % p == 0 and v < B:
            x //= p
            v += 1
        return v

    piv_for_row = [None] * n
    used = [False] * n
    for r in range(n - 1, -1, -1):
        best, bv = None, None
        for j in range(n):
            if used[j]:
                continue
            v = val(cols[j][r])
            if bv is None or v < bv:
                best, bv = j, v
        if bv >= B:
            raise PrecisionExhausted("pivot below working precision")
        used[best] = True
        piv_for_row[r] = best
        pv = bv
        unit = cols[best][r] // p**pv
        uinv = pow(unit % mod, -1, mod)
        cols[best] = [x * uinv % mod for x in cols[best]]
        for j in range(n):
            if used[j]:
                continue
            x = cols[j][r]
            if x == 0:
                continue
            q = (x // p**pv) % mod
            cols[j] = [(y - q * z) % mod for y, z in zip(cols[j], cols[best])]
    diag = [0] * n
    basis = [[0] * n for _ in range(n)]
    for r in range(n):
        j = piv_for_row[r]
        diag[r] = val(cols[j][r])
        for i in range(n):
            basis[i][r] = cols[j][i]
    if sum(diag) != vdet:
        raise PrecisionExhausted("diagonal valuations disagree with det")
    # reduce above-diagonal entries modulo p^{a_i}
    for c in range(n - 1, -1, -1):
        for i in range(c - 1, -1, -1):
            x = basis[i][c]
            if x == 0:
                continue
            ai = diag[i]
            v = val(x)
            if v >= ai:
                q = x // p**ai
            else:
                rem = x % p**ai
                q = (x - rem) // p**ai
            if q:
                for t in range(i + 1):
                    basis[t][c] = (basis[t][c] - q * basis[t][i]) % mod
    entries = []
    for i in range(n):
        ai = diag[i]
        pai = p**ai
        for c in range(i + 1, n):
            x = basis[i][c] % pai
            if x == 0:
                entries.append((0, 0))
            else:
                v = val(x)
                entries.append((v - e, x // p**v % p ** (ai - v)))
    return tuple(a - e for a in diag), tuple(entries)


def _int_det(m):
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    work = [list(row) for row in m]
    sign = 1
    prev = 1
    for c in range(n - 1):
        piv = next((i for i in range(c, n) if work[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            sign = -sign
        pc = work[c][c]
        for i in range(c + 1, n):
            wi = work[i]
            wc = work[c]
            fic = wi[c]
            for j in range(c + 1, n):
                wi[j] = (pc * wi[j] - fic * wc[j]) // prev
            wi[c] = 0
        prev = pc
    return sign * work[n - 1][n - 1]


def smith_valuations(mat, p: int, quad_u: int | None = None):
    """Valuations (d_1 <= ... <= d_n) of the elementary divisors of `mat`.

    Entries are Fractions, or pairs (a, b) = a + b*omega when quad_u is given
    (unramified quadratic extension; v(a+bw) = min(v(a), v(b))).
    Fraction-free: p-adic Gaussian elimination tracking pivot valuations.
    """
    if quad_u is None:
        work = [[Fraction(x) for x in row] for row in mat]

        def val(x):
            return entry_val(x, p)

        def div(x, y):
            return x / y

        def submul(x, q, y):
            return x - q * y

        def iszero(x):
            return x == 0

    else:
        work = [
            [
                (Fraction(x[0]), Fraction(x[1])) if isinstance(x, tuple) else (Fraction(x), Fraction(0))
                for x in row
            ]
            for row in mat
        ]

        def val(x):
            return min(entry_val(x[0], p), entry_val(x[1], p))

        def div(x, y):
            n_ = y[0] * y[0] - quad_u * y[1] * y[1]
            a = (x[0] * y[0] - quad_u * x[1] * y[1]) / n_
            b = (x[1] * y[0] - x[0] * y[1]) / n_
            return (a, b)

        def submul(x, q, y):
            return (x[0] - (q[0] * y[0] + quad_u * q[1] * y[1]), x[1] - (q[0] * y[1] + q[1] * y[0]))

        def iszero(x):
            return x[0] == 0 and x[1] == 0

    n = len(work)
    m = len(work[0])
    vals = []
    rows = list(range(n))
    cols = list(range(m))
    while rows and cols:
        best = None
        bv = None
        for i in rows:
            for j in cols:
                x = work[i][j]
                if iszero(x):
                    continue
                v = val(x)
                if bv is None or v < bv:
                    best, bv = (i, j), v
        if best is None:
            break
        bi, bj = best
        vals.append(bv)
        pivot = work[bi][bj]
        for i in rows:
            if i == bi or iszero(work[i][bj]):
                continue
            q = div(work[i][bj], pivot)
            for j in cols:
                work[i][j] = submul(work[i][j], q, work[bi][j])
        rows.remove(bi)
        cols.remove(bj)
    if len(vals) < min(n, m):
        raise ValueError("matrix not invertible")
    return sorted(vals)


# ---------------------------------------------------------------------------
# row echelon over Z/p^N (for Newton/Hensel solves)


def solve_mod_pn(rows, rhs, p: int, N: int):
    """Solve rows * x = rhs mod p^N; rows may be redundant.

    Pivots are chosen with minimal p-valuation. Returns a particular solution
    (list of ints) or raises ValueError when inconsistent at this precision.
    """
    m = p**N
    a = [list(r) + [b % m] for r, b in zip(rows, rhs)]
    nrows = len(a)
    ncols = len(rows[0]) if rows else 0
    piv_cols = []
    r = 0
    for _ in range(ncols):
        best = None
        bv = None
        for i in range(r, nrows):
            for j in range(ncols):
                if j in piv_cols:
                    continue
                x = a[i][j] % m
                if x == 0:
                    continue
                v = _int_val(x, p, N)
                if bv is None or v < bv:
                    best, bv = (i, j), v
        if best is None:
            break
        bi, bj = best
        a[r], a[bi] = a[bi], a[r]
        pv = bv
        unit = a[r][bj] // p**pv
        uinv = pow(unit % m, -1, m)
        a[r] = [x * uinv % m for x in a[r]]  # pivot entry now p^pv
        for i in range(nrows):
            if i == r:
                continue
            x = a[i][bj] % m
            if x == 0:
                continue
            if _int_val(x, p, N) < pv:
                # cannot eliminate with an integral multiple; column order
                # with min-val pivoting prevents this
                raise PrecisionExhausted("pivot ordering failure")
            q = x // p**pv
            a[i] = [(y - q * z) % m for y, z in zip(a[i], a[r])]
        piv_cols.append(bj)
        r += 1
        if r == nrows:
            break
    x = [0] * ncols
    for i in range(r):
        j = piv_cols[i]
        pv = _int_val(a[i][j], p, N)
        b = a[i][ncols] % m
        if b % p**pv:
            raise ValueError("inconsistent system")
        x[j] = (b // p**pv) * pow((a[i][j] // p**pv) % m, -1, m) % (m // p**pv)
    for i in range(r, nrows):
        if a[i][ncols] % m:
            raise ValueError("inconsistent system")
    return x


def _int_val(x: int, p: int, cap: int) -> int:
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v
