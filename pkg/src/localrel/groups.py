"""Split reductive matrix groups over p-adic fields: descriptors with root
data, root-group templates, cocharacters, Cartan invariants and the special
self-dual bases used by the unitary-in-orthogonal embeddings.

Conventions: ordered bases are fixed so that the standard Borel is upper
triangular; cocharacters are full diagonal exponent vectors; a root is a
linear functional on that exponent vector together with an elementary-matrix
template for its one-parameter subgroup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import ExactScalar, QuadExt, QuadExtScalar
from .linalg import smith_valuations


class SizeMismatch(ValueError):
    pass


class UnknownRoot(KeyError):
    pass


class UnsupportedDescriptor(TypeError):
    pass


class BadFormData(ValueError):
    pass


FR0 = Fraction(0)
FR1 = Fraction(1)


def identity_matrix(n, one=FR1, zero=FR0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n = len(a)
    k = len(b)
    m = len(b[0])
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(m):
            s = ai[0] * b[0][j]
            for t in range(1, k):
                if ai[t] != 0:
                    s = s + ai[t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_inverse(a):
    """Exact inverse by Gauss-Jordan over Fractions."""
    n = len(a)
    work = [[Fraction(x) for x in row] + [FR1 if i == j else FR0 for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((i for i in range(c, n) if work[i][c] != 0), None)
        if piv is None:
            raise ValueError("singular")
        work[c], work[piv] = work[piv], work[c]
        inv = 1 / work[c][c]
        work[c] = [x * inv for x in work[c]]
        for i in range(n):
            if i != c and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return [row[n:] for row in work]


def mat_det(a):
    n = len(a)
    work = [[Fraction(x) for x in row] for row in a]
    det = FR1
    for c in range(n):
        piv = next((i for i in range(c, n) if work[i][c] != 0), None)
        if piv is None:
            return FR0
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            det = -det
        det *= work[c][c]
        inv = 1 / work[c][c]
        for i in range(c + 1, n):
            if work[i][c] != 0:
                f = work[i][c] * inv
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return det


def mat_eq(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


@dataclass(frozen=True)
class Root:
    """Positive or negative root: a functional on diagonal exponent vectors
    plus the index data needed to build its one-parameter subgroup."""

    name: str
    vec: tuple  # pairing with a cocharacter = dot(vec, exponents)
    kind: str  # 'gl', 'diff', 'sum', 'short', or mirrored variants
    idx: tuple

    def pairing(self, mu) -> int:
        return sum(v * m for v, m in zip(self.vec, mu))


class GroupDescriptor:
    """One of GL(n) / SL(n) / Sp(2n) / GSp(4) / SO(2n+1) / SO(2n) / U(n).

    `form` is the Gram (or symplectic) matrix in the fixed ordered basis;
    `ext` the quadratic extension for U(n). Products of groups are modelled
    block-diagonally by ProductDescriptor.
    """

    def __init__(self, family: str, n: int, p: int, form=None, ext: QuadExt | None = None, c0=None, label=None):
        self.family = family
        self.n = n
        self.p = p
        self.ext = ext
        self.label = label or f"{family}({n})"
        if family in ("GL", "SL"):
            self.size = n
            self.form = None
        elif family == "Sp":
            self.size = 2 * n
            self.form = form if form is not None else self._sp_form(2 * n)
        elif family == "GSp4":
            if n != 2:
                raise UnsupportedDescriptor("GSp4 has rank parameter 2")
            self.size = 4
            self.form = form if form is not None else self._sp_form(4)
        elif family == "SO-odd":
            self.size = 2 * n + 1
            self.c0 = Fraction(c0 if c0 is not None else 1)
            if self.c0 == 0 or (ExactScalar(p, self.c0).valuation() != 0):
                raise BadFormData("middle Gram entry must be a unit")
            self.form = form if form is not None else self._so_odd_form(n, self.c0)
        elif family == "SO-even":
            self.size = 2 * n
            self.form = form if form is not None else self._so_even_form(n)
        elif family == "U":
            self.size = n
            if ext is None:
                raise BadFormData("U(n) needs a quadratic extension")
            self.form = form if form is not None else identity_matrix(n)
        else:
            raise UnsupportedDescriptor(family)
        self.positive_roots = self._build_roots(positive=True)
        self.negative_roots = self._build_roots(positive=False)
        self.all_roots = self.positive_roots + self.negative_roots
        self.two_rho = tuple(
            sum(r.vec[i] for r in self.positive_roots) for i in range(self.size)
        )

    # -- forms ------------------------------------------------------------

    @staticmethod
    def _sp_form(N):
        J = [[FR0] * N for _ in range(N)]
        for i in range(N // 2):
            J[i][N - 1 - i] = FR1
            J[N - 1 - i][i] = -FR1
        return J

    @staticmethod
    def _so_odd_form(n, c0):
        N = 2 * n + 1
        J = [[FR0] * N for _ in range(N)]
        for i in range(N):
            J[i][N - 1 - i] = FR1
        J[n][n] = Fraction(c0)
        return J

    @staticmethod
    def _so_even_form(n):
        N = 2 * n
        J = [[FR0] * N for _ in range(N)]
        for i in range(N):
            J[i][N - 1 - i] = FR1
        return J

    # -- root data ---------------------------------------------------------

    def _build_roots(self, positive: bool):
        fam, N = self.family, self.size
        roots = []
        sign = 1 if positive else -1

        def vec(pairs):
            v = [0] * N
            for pos, val in pairs:
                v[pos] += val
            return tuple(v)

        if fam in ("GL", "SL"):
            for i in range(N):
                for j in range(N):
                    if i == j:
                        continue
                    if (i < j) == positive:
                        roots.append(Root(f"e{i}-e{j}", vec([(i, 1), (j, -1)]), "gl", (i, j)))
        elif fam in ("Sp", "GSp4"):
            # root functionals are written as (row exponent) - (column exponent)
            # of the defining matrix entry, so they are also correct on the
            # GSp4 similitude torus where x_{N-1-i} = c - x_i.
            half = N // 2
            for i in range(half):
                for j in range(i + 1, half):
                    if positive:
                        roots.append(Root(f"a{i}-a{j}", vec([(i, 1), (j, -1)]), "sp-diff", (i, j)))
                        roots.append(Root(f"a{i}+a{j}", vec([(i, 1), (N - 1 - j, -1)]), "sp-sum", (i, j)))
                    else:
                        roots.append(Root(f"-(a{i}-a{j})", vec([(i, -1), (j, 1)]), "sp-diff-neg", (i, j)))
                        roots.append(Root(f"-(a{i}+a{j})", vec([(N - 1 - j, 1), (i, -1)]), "sp-sum-neg", (i, j)))
                if positive:
                    roots.append(Root(f"2a{i}", vec([(i, 1), (N - 1 - i, -1)]), "sp-long", (i,)))
                else:
                    roots.append(Root(f"-2a{i}", vec([(N - 1 - i, 1), (i, -1)]), "sp-long-neg", (i,)))
            del sign
        elif fam == "SO-odd":
            mid = self.n
            for r1 in range(mid):
                for r2 in range(r1 + 1, mid):
                    if positive:
                        roots.append(Root(f"d{r1}{r2}", vec([(r1, 1), (r2, -1)]), "so-diff", (r1, r2)))
                        roots.append(Root(f"s{r1}{r2}", vec([(r1, 1), (r2, 1)]), "so-sum", (r1, r2)))
                    else:
                        roots.append(Root(f"-d{r1}{r2}", vec([(r1, -1), (r2, 1)]), "so-diff-neg", (r1, r2)))
                        roots.append(Root(f"-s{r1}{r2}", vec([(r1, -1), (r2, -1)]), "so-sum-neg", (r1, r2)))
            for r in range(mid):
                if positive:
                    roots.append(Root(f"sh{r}", vec([(r, 1)]), "so-short", (r,)))
                else:
                    roots.append(Root(f"-sh{r}", vec([(r, -1)]), "so-short-neg", (r,)))
        elif fam == "SO-even":
            half = N // 2
            for r1 in range(half):
                for r2 in range(r1 + 1, half):
                    if positive:
                        roots.append(Root(f"d{r1}{r2}", vec([(r1, 1), (r2, -1)]), "so-diff", (r1, r2)))
                        roots.append(Root(f"s{r1}{r2}", vec([(r1, 1), (r2, 1)]), "so-sum", (r1, r2)))
                    else:
                        roots.append(Root(f"-d{r1}{r2}", vec([(r1, -1), (r2, 1)]), "so-diff-neg", (r1, r2)))
                        roots.append(Root(f"-s{r1}{r2}", vec([(r1, -1), (r2, -1)]), "so-sum-neg", (r1, r2)))
        elif fam == "U":
            return []  # no split root data is needed for U(n)
        return roots

    def root_by_name(self, name: str) -> Root:
        for r in self.all_roots:
            if r.name == name:
                return r
        raise UnknownRoot(name)

    def root_matrix(self, root: Root, u):
        """The elementary matrix R_alpha(u); R_alpha(0) = identity."""
        u = Fraction(u) if not isinstance(u, Fraction) else u
        N = self.size
        m = identity_matrix(N)
        k, idx = root.kind, root.idx
        if k == "gl":
            i, j = idx
            m[i][j] = u
        elif k == "sp-diff":
            i, j = idx
            m[i][j] = u
            m[N - 1 - j][N - 1 - i] = -u
        elif k == "sp-diff-neg":
            i, j = idx
            m[j][i] = u
            m[N - 1 - i][N - 1 - j] = -u
        elif k == "sp-sum":
            i, j = idx
            m[i][N - 1 - j] = u
            m[j][N - 1 - i] = u
        elif k == "sp-sum-neg":
            i, j = idx
            m[N - 1 - j][i] = u
            m[N - 1 - i][j] = u
        elif k == "sp-long":
            (i,) = idx
            m[i][N - 1 - i] = u
        elif k == "sp-long-neg":
            (i,) = idx
            m[N - 1 - i][i] = u
        elif k == "so-diff":
            i, j = idx
            m[i][j] = u
            m[N - 1 - j][N - 1 - i] = -u
        elif k == "so-diff-neg":
            i, j = idx
            m[j][i] = u
            m[N - 1 - i][N - 1 - j] = -u
        elif k == "so-sum":
            i, j = idx
            m[i][N - 1 - j] = u
            m[j][N - 1 - i] = -u
        elif k == "so-sum-neg":
            i, j = idx
            m[N - 1 - j][i] = u
            m[N - 1 - i][j] = -u
        elif k == "so-short":
            (r,) = idx
            mid = self.n
            c0 = self.c0
            m[r][mid] = u
            m[mid][N - 1 - r] = -u / c0
            m[r][N - 1 - r] = -u * u / (2 * c0)
        elif k == "so-short-neg":
            (r,) = idx
            mid = self.n
            c0 = self.c0
            m[N - 1 - r][mid] = u
            m[mid][r] = -u / c0
            m[N - 1 - r][r] = -u * u / (2 * c0)
        else:
            raise UnknownRoot(root.name)
        return m

    # -- torus -------------------------------------------------------------

    def cocharacter_valid(self, mu) -> bool:
        mu = tuple(mu)
        if len(mu) != self.size:
            return False
        fam, N = self.family, self.size
        if fam == "GL":
            return True
        if fam == "SL":
            return sum(mu) == 0
        if fam == "Sp":
            return all(mu[i] == -mu[N - 1 - i] for i in range(N))
        if fam == "GSp4":
            return mu[0] + mu[3] == mu[1] + mu[2]
        if fam == "SO-odd":
            return mu[self.n] == 0 and all(mu[i] == -mu[N - 1 - i] for i in range(N))
        if fam == "SO-even":
            return all(mu[i] == -mu[N - 1 - i] for i in range(N))
        raise UnsupportedDescriptor(fam)

    def cocharacter_matrix(self, mu, s):
        if not self.cocharacter_valid(mu):
            raise ValueError(f"invalid cocharacter {mu} for {self.label}")
        s = Fraction(s)
        m = identity_matrix(self.size)
        for i, e in enumerate(mu):
            m[i][i] = s**e
        return m

    def uniformizer_cochar(self, mu):
        return self.cocharacter_matrix(mu, Fraction(self.p))

    def pairing_2rho(self, mu) -> int:
        return sum(a * b for a, b in zip(self.two_rho, mu))

    def is_dominant(self, mu) -> bool:
        return self.cocharacter_valid(mu) and all(r.pairing(mu) >= 0 for r in self.positive_roots)

    def is_strict_dominant(self, mu) -> bool:
        return self.cocharacter_valid(mu) and all(r.pairing(mu) > 0 for r in self.positive_roots)

    def is_minuscule(self, mu) -> bool:
        return self.cocharacter_valid(mu) and all(abs(r.pairing(mu)) <= 1 for r in self.all_roots)

    # -- membership ---------------------------------------------------------

    def is_member(self, mat) -> bool:
        N = self.size
        if len(mat) != N or any(len(r) != N for r in mat):
            raise SizeMismatch(f"expected {N}x{N}")
        fam = self.family
        if fam == "U":
            return self._is_member_u(mat)
        if fam == "GL":
            return mat_det(mat) != 0
        if fam == "SL":
            return mat_det(mat) == 1
        gt_j_g = mat_mul(mat_mul(mat_transpose(mat), self.form), mat)
        if fam == "Sp":
            return mat_eq(gt_j_g, self.form)
        if fam == "GSp4":
            nu = self.similitude(mat, _pre=gt_j_g)
            if nu is None or nu == 0:
                return False
            scaled = [[x * nu for x in row] for row in self.form]
            return mat_eq(gt_j_g, scaled)
        if fam in ("SO-odd", "SO-even"):
            return mat_eq(gt_j_g, self.form) and mat_det(mat) == 1
        raise UnsupportedDescriptor(fam)

    def similitude(self, mat, _pre=None):
        """Similitude factor of a GSp4 element (None if shapes don't match)."""
        if self.family != "GSp4":
            return Fraction(1)
        g = _pre if _pre is not None else mat_mul(mat_mul(mat_transpose(mat), self.form), mat)
        ref = self.form[0][3]
        return g[0][3] / ref if ref != 0 else None

    def _is_member_u(self, mat):
        ext = self.ext
        n = self.size
        for row in mat:
            for x in row:
                if not isinstance(x, QuadExtScalar):
                    raise SizeMismatch("U(n) wants quadratic-extension entries")
        # conj(g)^T * psi * g == psi
        psi = self.form
        out = [[ext.scalar(0) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                s = ext.scalar(0)
                for a in range(n):
                    for b in range(n):
                        pab = psi[a][b]
                        if pab == 0:
                            continue
                        s = s + mat[a][i].conj() * pab * mat[b][j]
                out[i][j] = s
        for i in range(n):
            for j in range(n):
                want = psi[i][j] if isinstance(psi[i][j], QuadExtScalar) else ext.scalar(psi[i][j])
                if out[i][j] != want:
                    return False
        return True

    def in_hyperspecial(self, mat) -> bool:
        """Membership in K = G(O): integral entries with unit determinant,
        on top of the defining equations."""
        if not self.is_member(mat):
            return False
        for row in mat:
            for x in row:
                v = _val(x, self.p)
                if v < 0:
                    return False
        d = mat_det(mat) if self.family != "U" else None
        if d is not None:
            return _val(d, self.p) == 0
        return True

    # -- Cartan ------------------------------------------------------------

    def cartan_invariant(self, mat):
        """Dominant cocharacter lambda with g in K lambda(pi) K, from the
        valuations of the elementary divisors in the standard representation."""
        fam = self.family
        if fam == "SO-even":
            raise UnsupportedDescriptor("SO(2n) is excluded from the coset model")
        if fam == "U":
            vals = smith_valuations(
                [[(x.a.rational, x.b.rational) for x in row] for row in mat],
                self.p,
                quad_u=self.ext.u,
            )
        else:
            vals = smith_valuations(mat, self.p)
        dom = tuple(sorted(vals, reverse=True))
        if fam in ("Sp", "SO-odd", "SO-even"):
            N = self.size
            if any(dom[i] != -dom[N - 1 - i] for i in range(N)):
                raise ValueError(f"divisor profile {dom} breaks form duality")
        if fam == "GSp4" and dom[0] + dom[3] != dom[1] + dom[2]:
            raise ValueError(f"divisor profile {dom} breaks the similitude relation")
        return dom

    # -- generators ----------------------------------------------------------

    def k_generators(self, depth: int):
        """Generators of the K-action on depth-bounded data: root elements
        R_alpha(p^j) and torus units."""
        gens = []
        p = self.p
        for r in self.all_roots:
            for j in range(depth):
                gens.append(self.root_matrix(r, Fraction(p) ** j))
        # torus units: a primitive root lift and 1+p^j along each basis cochar
        units = [_primitive_root(p)] + [1 + p**j for j in range(1, depth)]
        for mu in self.basis_cocharacters():
            for t in units:
                gens.append(self.cocharacter_matrix(mu, Fraction(t)))
        return gens

    def basis_cocharacters(self):
        fam, N = self.family, self.size
        out = []
        if fam == "GL":
            for i in range(N):
                v = [0] * N
                v[i] = 1
                out.append(tuple(v))
        elif fam == "SL":
            for i in range(N - 1):
                v = [0] * N
                v[i], v[i + 1] = 1, -1
                out.append(tuple(v))
        elif fam in ("Sp", "SO-odd", "SO-even"):
            half = N // 2
            for i in range(half):
                v = [0] * N
                v[i], v[N - 1 - i] = 1, -1
                out.append(tuple(v))
        elif fam == "GSp4":
            out = [(1, 1, 0, 0), (1, 0, 1, 0), (1, 1, 1, 1)]
        else:
            raise UnsupportedDescriptor(fam)
        return out

    def cache_signature(self):
        form = None
        if self.form is not None:
            form = tuple(tuple(str(x) for x in row) for row in self.form)
        ext = (self.ext.p, self.ext.u) if self.ext is not None else None
        return (self.family, self.n, self.p, form, ext)

    def __repr__(self):
        return f"<{self.label} over Q_{self.p}>"


class ProductDescriptor(GroupDescriptor):
    """Block-diagonal product of descriptors over the same prime."""

    def __init__(self, factors, label=None):
        ps = {d.p for d in factors}
        if len(ps) != 1:
            raise ValueError("factors must share the prime")
        self.factors = list(factors)
        self.family = "product"
        self.p = factors[0].p
        self.size = sum(d.size for d in factors)
        self.label = label or " x ".join(d.label for d in factors)
        self.form = None
        self.ext = None
        self.offsets = []
        off = 0
        for d in factors:
            self.offsets.append(off)
            off += d.size
        self.positive_roots = self._shift_roots(True)
        self.negative_roots = self._shift_roots(False)
        self.all_roots = self.positive_roots + self.negative_roots
        self.two_rho = tuple(
            sum(r.vec[i] for r in self.positive_roots) for i in range(self.size)
        )

    def _shift_roots(self, positive):
        out = []
        for d, off in zip(self.factors, self.offsets):
            src = d.positive_roots if positive else d.negative_roots
            for r in src:
                vec = [0] * self.size
                for i, v in enumerate(r.vec):
                    vec[off + i] = v
                out.append(Root(f"f{off}:{r.name}", tuple(vec), r.kind, (off, r)))
        return out

    def root_matrix(self, root: Root, u):
        off, inner = root.idx
        m = identity_matrix(self.size)
        k = self.offsets.index(off)
        sub = self.factors[k].root_matrix(inner, u)
        for i in range(self.factors[k].size):
            for j in range(self.factors[k].size):
                m[off + i][off + j] = sub[i][j]
        return m

    def blocks(self, mat):
        out = []
        for d, off in zip(self.factors, self.offsets):
            out.append([[mat[off + i][off + j] for j in range(d.size)] for i in range(d.size)])
        return out

    def from_blocks(self, blocks):
        m = identity_matrix(self.size)
        for d, off, b in zip(self.factors, self.offsets, blocks):
            for i in range(d.size):
                for j in range(d.size):
                    m[off + i][off + j] = b[i][j]
        return m

    def cocharacter_valid(self, mu):
        mu = tuple(mu)
        if len(mu) != self.size:
            return False
        return all(
            d.cocharacter_valid(mu[off : off + d.size])
            for d, off in zip(self.factors, self.offsets)
        )

    def cocharacter_matrix(self, mu, s):
        if not self.cocharacter_valid(mu):
            raise ValueError(f"invalid cocharacter {mu} for {self.label}")
        s = Fraction(s)
        m = identity_matrix(self.size)
        for i, e in enumerate(mu):
            m[i][i] = s**e
        return m

    def is_member(self, mat):
        N = self.size
        if len(mat) != N or any(len(r) != N for r in mat):
            raise SizeMismatch(f"expected {N}x{N}")
        for d, off in zip(self.factors, self.offsets):
            for i in range(N):
                for j in range(N):
                    in_block = off <= i < off + d.size and off <= j < off + d.size
                    if not in_block and (off <= i < off + d.size) != (off <= j < off + d.size):
                        pass
            # off-block entries must vanish
        for i in range(N):
            for j in range(N):
                bi = self._block_of(i)
                if bi != self._block_of(j) and mat[i][j] != 0:
                    return False
        return all(d.is_member(b) for d, b in zip(self.factors, self.blocks(mat)))

    def _block_of(self, i):
        for k in range(len(self.offsets) - 1, -1, -1):
            if i >= self.offsets[k]:
                return k
        return 0

    def in_hyperspecial(self, mat):
        return all(d.in_hyperspecial(b) for d, b in zip(self.factors, self.blocks(mat)))

    def cartan_invariant(self, mat):
        out = []
        for d, b in zip(self.factors, self.blocks(mat)):
            out.extend(d.cartan_invariant(b))
        return tuple(out)

    def k_generators(self, depth):
        gens = []
        for k, (d, off) in enumerate(zip(self.factors, self.offsets)):
            for sub in d.k_generators(depth):
                m = identity_matrix(self.size)
                for i in range(d.size):
                    for j in range(d.size):
                        m[off + i][off + j] = sub[i][j]
                gens.append(m)
        return gens

    def basis_cocharacters(self):
        out = []
        for d, off in zip(self.factors, self.offsets):
            for mu in d.basis_cocharacters():
                v = [0] * self.size
                for i, e in enumerate(mu):
                    v[off + i] = e
                out.append(tuple(v))
        return out

    def cache_signature(self):
        return ("product",) + tuple(d.cache_signature() for d in self.factors)


def _val(x, p):
    if isinstance(x, QuadExtScalar):
        return x.valuation()
    return ExactScalar.of(x, p).valuation()


def _primitive_root(p):
    if p == 2:
        return 1
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise ValueError


@dataclass(frozen=True)
class GroupElement:
    """A matrix tagged with its descriptor. Members are validated on request
    (construction is kept cheap for hot loops)."""

    descriptor: GroupDescriptor
    matrix: tuple

    @staticmethod
    def of(descriptor, mat, check=False) -> "GroupElement":
        tup = tuple(tuple(Fraction(x) if not isinstance(x, (Fraction, QuadExtScalar)) else x for x in row) for row in mat)
        g = GroupElement(descriptor, tup)
        if check and not descriptor.is_member([list(r) for r in tup]):
            raise ValueError("matrix fails the defining equations")
        return g

    def rows(self):
        return [list(r) for r in self.matrix]

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.descriptor, tuple(tuple(r) for r in mat_mul(self.rows(), other.rows())))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.descriptor, tuple(tuple(r) for r in mat_inverse(self.rows())))

    def is_integral(self) -> bool:
        return all(_val(x, self.descriptor.p) >= 0 for row in self.matrix for x in row)

    def in_k(self) -> bool:
        return self.descriptor.in_hyperspecial(self.rows())


# ---------------------------------------------------------------------------
# operations in the spec surface


def is_member(mat, descriptor) -> bool:
    return descriptor.is_member(mat)


def root_group_element(descriptor, alpha, u) -> GroupElement:
    root = descriptor.root_by_name(alpha) if isinstance(alpha, str) else alpha
    return GroupElement.of(descriptor, descriptor.root_matrix(root, u))


def cocharacter_element(descriptor, mu, s) -> GroupElement:
    return GroupElement.of(descriptor, descriptor.cocharacter_matrix(mu, s))


def pairing_2rho(descriptor, mu) -> int:
    return descriptor.pairing_2rho(mu)


def cartan_invariant(g: GroupElement):
    return g.descriptor.cartan_invariant(g.rows())


# ---------------------------------------------------------------------------
# special self-dual basis for the unitary-in-odd-orthogonal embedding


@dataclass
class SpecialBasis:
    """Self-dual basis data for (SO(V), U(W)) at an inert place.

    The hermitian space W = E^n has Gram diag(c_1..c_n) with c_i = u^(n-i);
    V = W + F v_n. The e-basis (e_n,..,e_1, v_0, e_-1',..,e_-n') is isotropic
    with Gram antidiag(1..1, -u^n, 1..1); eta = omega multiplies W and is
    extended by zero on v_n.
    """

    n: int
    p: int
    ext: QuadExt
    so: GroupDescriptor = field(repr=False)
    u_desc: GroupDescriptor = field(repr=False)
    eta_matrix: list = field(repr=False)  # e-basis, extended by 0 on v_n
    change: list = field(repr=False)  # columns: e-basis vectors in wv-coords
    hermitian_c: list = field(repr=False)

    def embed_unitary(self, umat) -> GroupElement:
        """Image in SO(V) of a U(W)-matrix over E (fixing v_n)."""
        n = self.n
        N = 2 * n + 1
        u = self.ext.u
        wv = [[FR0] * N for _ in range(N)]

        def widx(i):  # w_i, 1-based
            return 2 * i - 1

        def vidx(i):  # v_i, 0-based
            return 0 if i == 0 else 2 * i

        for j in range(1, n + 1):
            for i in range(1, n + 1):
                a = umat[i - 1][j - 1].a.rational
                b = umat[i - 1][j - 1].b.rational
                # h(w_j) = sum a_ij w_i + b_ij v_{i-1}
                wv[widx(i)][widx(j)] += a
                wv[vidx(i - 1)][widx(j)] += b
                # h(v_{j-1}) = sum a_ij v_{i-1} + b_ij u w_i
                wv[vidx(i - 1)][vidx(j - 1)] += a
                wv[widx(i)][vidx(j - 1)] += b * u
        wv[vidx(n)][vidx(n)] = FR1
        C = self.change
        m = mat_mul(mat_mul(mat_inverse(C), wv), C)
        return GroupElement.of(self.so, m)

    def is_in_unitary(self, mat) -> bool:
        """x in SO(V) lies in U(W) iff it commutes with the eta action."""
        a = mat_mul(mat, self.eta_matrix)
        b = mat_mul(self.eta_matrix, mat)
        return mat_eq(a, b)

    def unitary_block(self, mat):
        """E-matrix of x on W in the w-basis (x must centralize eta)."""
        n = self.n
        C = self.change
        wv = mat_mul(mat_mul(C, mat), mat_inverse(C))

        def widx(i):
            return 2 * i - 1

        def vidx(i):
            return 0 if i == 0 else 2 * i

        out = []
        for i in range(1, n + 1):
            row = []
            for j in range(1, n + 1):
                a = wv[widx(i)][widx(j)]
                b = wv[vidx(i - 1)][widx(j)]
                row.append(self.ext.scalar(a, b))
            out.append(row)
        return out

    def det_unitary(self, mat) -> QuadExtScalar:
        blk = self.unitary_block(mat)
        return _qdet(blk, self.ext)


def _qdet(mat, ext):
    n = len(mat)
    work = [row[:] for row in mat]
    det = ext.scalar(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if not work[i][c].is_zero()), None)
        if piv is None:
            return ext.scalar(0)
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            det = det * ext.scalar(-1)
        det = det * work[c][c]
        inv = ext.scalar(1) / work[c][c]
        for i in range(c + 1, n):
            if not work[i][c].is_zero():
                f = work[i][c] * inv
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return det


def special_basis(n: int, p: int, u: int | None = None) -> SpecialBasis:
    """Build the self-dual special basis and the (SO(V), U(W)) descriptors.

    p odd; the hermitian Gram entries are the units u^(n-i), rescaled so that
    phi(w_i, w_i) + phi(v_i, v_i) = 0 holds on the nose.
    """
    if p == 2:
        raise BadFormData("p must be odd")
    ext = QuadExt(p, u) if u is not None else QuadExt.default(p)
    u = ext.u
    N = 2 * n + 1
    c = [Fraction(u) ** (n - i) for i in range(1, n + 1)]  # c_1..c_n
    # wv ordering: v_0, w_1, v_1, w_2, v_2, ..., w_n, v_n
    phi_wv = [[FR0] * N for _ in range(N)]
    phi_wv[0][0] = -Fraction(u) * c[0]
    for i in range(1, n + 1):
        phi_wv[2 * i - 1][2 * i - 1] = c[i - 1]
    for i in range(1, n + 1):
        phi_wv[2 * i][2 * i] = -c[i - 1]
    # e-basis columns in wv-coords: e_i = (v_i + w_i)/2, e_-i' = (w_i - v_i)/c_i
    C = [[FR0] * N for _ in range(N)]

    def put(col, widx_coeffs):
        for pos, val in widx_coeffs:
            C[pos][col] = val

    for k in range(n):  # e_n .. e_1 at columns 0..n-1
        i = n - k
        put(k, [(2 * i, Fraction(1, 2)), (2 * i - 1, Fraction(1, 2))])
    put(n, [(0, FR1)])  # v_0
    for k in range(n):  # e_-1' .. e_-n' at columns n+1..2n
        i = k + 1
        put(n + 1 + k, [(2 * i - 1, 1 / c[i - 1]), (2 * i, -1 / c[i - 1])])
    gram_e = mat_mul(mat_mul(mat_transpose(C), phi_wv), C)
    c0 = gram_e[n][n]
    expected = GroupDescriptor._so_odd_form(n, c0)
    if not mat_eq(gram_e, expected):
        raise BadFormData("special basis failed to produce the split Gram form")
    so = GroupDescriptor("SO-odd", n, p, c0=c0, label=f"SO({N})")
    psi = [[ext.scalar(0) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        psi[i][i] = ext.scalar(c[i])
    u_desc = GroupDescriptor("U", n, p, form=psi, ext=ext, label=f"U({n})")
    # eta on the wv-basis, extended by zero on v_n:
    # eta(w_i) = v_{i-1}, eta(v_{i-1}) = u * w_i  (v_{i-1} sits at 2(i-1), w_i at 2i-1)
    eta_wv = [[FR0] * N for _ in range(N)]
    for i in range(1, n + 1):
        vpos = 0 if i == 1 else 2 * (i - 1)
        eta_wv[vpos][2 * i - 1] = FR1
        eta_wv[2 * i - 1][vpos] = Fraction(u)
    eta_e = mat_mul(mat_mul(mat_inverse(C), eta_wv), C)
    return SpecialBasis(n=n, p=p, ext=ext, so=so, u_desc=u_desc, eta_matrix=eta_e, change=C, hermitian_c=c)
