"""Scenario catalog: the concrete (H, G) pairs with their cocharacters,
abelianization characters, affine H-parametrizations (for Hensel lifting and
shell enumeration), involutions, and the closed-form constants they are
checked against.

Bases are ordered so that the ambient Borel used by the coset model is upper
triangular; scenarios whose natural theta-split Borel mixes orientations
(diagonal pairs) carry a per-factor orientation flag instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import QuadExt
from .groups import (
    GroupDescriptor,
    ProductDescriptor,
    SpecialBasis,
    identity_matrix,
    mat_inverse,
    mat_mul,
    mat_transpose,
    special_basis,
)


class UnknownScenario(KeyError):
    pass


FR0 = Fraction(0)
FR1 = Fraction(1)


@dataclass
class AffineParam:
    """Affine-linear parametrization u -> matrix of an algebraic family:
    entries = const + sum_k u_k * basis_k, plus the residual (quadratic)
    equations cutting out H inside the family."""

    dim: int
    const: list  # matrix
    basis: list  # list of matrices
    param0: list  # parameters of the identity
    equations: object  # callable(matrix) -> list of exact values

    def matrix(self, params):
        n = len(self.const)
        out = [[Fraction(self.const[i][j]) for j in range(n)] for i in range(n)]
        for u, b in zip(params, self.basis):
            if u:
                u = Fraction(u)
                for i in range(n):
                    row = b[i]
                    for j in range(n):
                        if row[j]:
                            out[i][j] += u * row[j]
        return out


@dataclass
class Scenario:
    name: str
    kind: str
    p: int
    desc: object
    mu: tuple
    tame: bool = False
    strict: bool = False
    h_param: AffineParam | None = None
    h_is_member: object = None
    v_of: object = None  # matrix -> abelianization value
    v_target: str | None = None  # "F" or "E1"
    ext: QuadExt | None = None
    special: SpecialBasis | None = None
    theta: object = None  # matrix involution for symmetric pairs
    bruhat_orientation: tuple | None = None  # per-factor 'upper'/'lower'
    trivial_intersection: bool = False
    cmi_closed_form: object = None
    conductor_closed_form: object = None
    params: dict = field(default_factory=dict)
    anchor: str = ""

    def q(self) -> int:
        return self.p

    def tau(self, power=1):
        return self.desc.cocharacter_matrix(self.mu, Fraction(self.p) ** power)


def _gl_self_pair(n, p, name):
    desc = GroupDescriptor("GL", n, p)
    mu = tuple([1] + [0] * (n - 1))
    basis = []
    for i in range(n):
        for j in range(n):
            b = [[0] * n for _ in range(n)]
            b[i][j] = 1
            basis.append(b)
    param0 = [1 if i == j else 0 for i in range(n) for j in range(n)]
    par = AffineParam(
        dim=n * n,
        const=[[0] * n for _ in range(n)],
        basis=basis,
        param0=param0,
        equations=lambda mat: [],
    )
    return Scenario(
        name=name,
        kind="gl-self",
        p=p,
        desc=desc,
        mu=mu,
        tame=True,
        strict=(n <= 2),
        h_param=par,
        h_is_member=lambda mat, d=desc: d.is_member(mat),
        v_of=lambda mat: _det(mat),
        v_target="F",
        trivial_intersection=False,
        anchor="split general linear self-pair",
    )


def _det(mat):
    from .groups import mat_det

    return mat_det(mat)


def _so_unitary(n, p, name, s=None):
    sb = special_basis(n, p)
    desc = sb.so
    s = list(s) if s is not None else list(range(1, n + 1))
    assert len(s) == n and all(s[i] < s[i + 1] for i in range(n - 1)) and s[0] > 0
    mu = tuple(list(reversed(s)) + [0] + [-x for x in s])
    N = 2 * n + 1
    ext = sb.ext
    # parameters: real and omega parts of the E-matrix on W
    basis = []
    zero_u = [[ext.scalar(0) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for part in (0, 1):
                um = [row[:] for row in zero_u]
                um[i][j] = ext.scalar(1, 0) if part == 0 else ext.scalar(0, 1)
                # embed_unitary is linear in the E-matrix except the fixed v_n line
                m = sb.embed_unitary(um).rows()
                mfix = sb.embed_unitary(zero_u).rows()
                basis.append([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(m, mfix)])
    const = sb.embed_unitary(zero_u).rows()
    param0 = []
    for i in range(n):
        for j in range(n):
            param0 += [1 if i == j else 0, 0]

    gram = desc.form

    def equations(mat):
        # orthogonal-form preservation; the eta-commutation is built into the
        # affine family, so these quadratics cut out exactly the unitary group
        gt = mat_mul(mat_mul(mat_transpose(mat), gram), mat)
        out = []
        for i in range(N):
            for j in range(i, N):
                out.append(gt[i][j] - gram[i][j])
        return out

    par = AffineParam(dim=2 * n * n, const=const, basis=basis, param0=param0, equations=equations)

    def h_member(mat):
        return desc.is_member(mat) and sb.is_in_unitary(mat)

    def v_of(mat):
        return sb.det_unitary(mat)

    def cmi(m, i):
        # q^{i (sum_j (2n-2j+1) s_{n+1-j} - s_1)}
        expo = sum((2 * n - 2 * j + 1) * s[n - j] for j in range(1, n + 1)) - s[0]
        return p ** (i * expo)

    return Scenario(
        name=name,
        kind="so-odd-unitary-inert",
        p=p,
        desc=desc,
        mu=mu,
        strict=True,
        h_param=par,
        h_is_member=h_member,
        v_of=v_of,
        v_target="E1",
        ext=ext,
        special=sb,
        trivial_intersection=True,
        cmi_closed_form=cmi,
        conductor_closed_form=lambda m: m * s[0],
        params={"s": s},
        anchor="unitary subgroup of odd orthogonal group, inert quadratic extension",
    )


def _so_gl_levi(n, p, name):
    """Split place: H = GL(n) Levi inside SO(2n+1) (tame scenarios)."""
    sb = special_basis(n, p)
    desc = sb.so
    N = 2 * n + 1
    mu = tuple([1] + [0] * (N - 2) + [-1])

    def embed(amat):
        out = identity_matrix(N)
        # x_i = e_{n+1-i}: block acting on positions 0..n-1 reversed
        for i in range(n):
            for j in range(n):
                out[n - 1 - i][n - 1 - j] = Fraction(amat[i][j])
        ainv = mat_inverse(amat)
        for i in range(n):
            for j in range(n):
                # dual action on e_{-i}: e_-j -> sum_i (A^{-1})_{ji} e_-i
                out[N - n + i][N - n + j] = Fraction(ainv[j][i])
        return out

    def h_member(mat):
        if not desc.is_member(mat):
            return False
        for i in range(N):
            for j in range(N):
                block = (i < n and j < n) or (i >= n + 1 and j >= n + 1) or (i == j == n)
                if not block and mat[i][j] != 0:
                    return False
        return True

    def v_of(mat):
        sub = [[mat[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]
        return _det(sub)

    return Scenario(
        name=name,
        kind="so-odd-gl-split",
        p=p,
        desc=desc,
        mu=mu,
        tame=True,
        h_is_member=h_member,
        v_of=v_of,
        v_target="F",
        special=sb,
        params={"embed": embed},
        anchor="general linear Levi inside odd orthogonal group, split place",
    )


GSP4_GAMMA_OF_E = None


def _gsp4(p, a=(2, 1, 0, -1), name="gsp4"):
    if p % 4 != 3:
        raise UnknownScenario("the Gaussian extension needs p = 3 mod 4")
    desc = GroupDescriptor("GSp4", 2, p)
    ext = QuadExt(p, -1)
    a = tuple(a)
    assert a[0] > a[1] > a[2] > a[3] and a[0] + a[3] == a[1] + a[2]
    # basis change: gamma_1..gamma_4 in e-coordinates
    T = [
        [0, 1, 0, 1],
        [0, -1, 0, 1],
        [1, 0, 1, 0],
        [1, 0, -1, 0],
    ]
    T = [[Fraction(x) for x in row] for row in T]
    Tinv = mat_inverse(T)

    def e_to_gamma(mat):
        return mat_mul(mat_mul(Tinv, mat), T)

    def h_e_matrix(av, bv, xv, yv, zv, wv):
        return [
            [av, 0, 0, bv],
            [0, xv, yv, 0],
            [0, zv, wv, 0],
            [-bv, 0, 0, av],
        ]

    basis = []
    for k in range(6):
        vals = [0] * 6
        vals[k] = 1
        m = h_e_matrix(*[Fraction(v) for v in vals])
        basis.append(e_to_gamma(m))
    const = [[FR0] * 4 for _ in range(4)]
    param0 = [1, 0, 1, 0, 0, 1]  # (a,b,x,y,z,w) = identity

    def equations(mat):
        g = e_to_gamma_inv_cache(mat)
        av, bv, xv, yv, zv, wv = g
        return [av * av + bv * bv - (xv * wv - zv * yv)]

    def e_to_gamma_inv_cache(mat):
        em = mat_mul(mat_mul(T, mat), Tinv)
        return (
            em[0][0],
            em[0][3],
            em[1][1],
            em[1][2],
            em[2][1],
            em[2][2],
        )

    def h_member(mat):
        em = mat_mul(mat_mul(T, mat), Tinv)
        shape = (
            em[0][1] == 0 and em[0][2] == 0 and em[1][0] == 0 and em[1][3] == 0
            and em[2][0] == 0 and em[2][3] == 0 and em[3][1] == 0 and em[3][2] == 0
            and em[0][0] == em[3][3] and em[0][3] == -em[3][0]
            and em[1][1] * em[2][2] - em[1][2] * em[2][1]
            == em[0][0] * em[0][0] + em[0][3] * em[0][3]
        )
        return shape and desc.is_member(mat)

    def v_of(mat):
        av, bv, *_ = e_to_gamma_inv_cache(mat)
        z = ext.scalar(av, bv)
        return z / z.conj()

    def cmi(m, i):
        return p ** (i * (2 * a[0] + a[1] - 2 * a[2] - a[3]))

    par = AffineParam(6, const, basis, param0, equations)
    return Scenario(
        name=name,
        kind="gsp4",
        p=p,
        desc=desc,
        mu=a,
        strict=True,
        h_param=par,
        h_is_member=h_member,
        v_of=v_of,
        v_target="E1",
        ext=ext,
        trivial_intersection=True,
        cmi_closed_form=cmi,
        conductor_closed_form=lambda m: m * (a[0] - a[1]),
        params={"a": a, "x_ab": lambda av, bv: e_to_gamma(h_e_matrix(av, bv, av, -bv, bv, av))},
        anchor="theta-lift pair inside the rank-two similitude symplectic group",
    )


def _ggp(n, p, b_exps, a_exps, name):
    """H = GL(n) inside GL(n+1) x GL(n) (split GGP pair)."""
    d1 = GroupDescriptor("GL", n + 1, p, label=f"GL({n + 1})")
    d2 = GroupDescriptor("GL", n, p, label=f"GL({n})")
    desc = ProductDescriptor([d1, d2])
    b_exps = tuple(b_exps)
    a_exps = tuple(a_exps)  # in basis order (e_n, ..., e_1): descending
    assert all(b_exps[i] > b_exps[i + 1] for i in range(n))
    assert all(a_exps[i] > a_exps[i + 1] for i in range(n - 1))
    mu = b_exps + a_exps
    N = 2 * n + 1

    def embed(amat):
        # first factor in basis (v_1..v_n, v_1+...+v_{n+1}); second reversed
        out = identity_matrix(N)
        col = [sum(Fraction(amat[i][j]) for j in range(n)) - 1 for i in range(n)]
        for i in range(n):
            for j in range(n):
                out[i][j] = Fraction(amat[i][j])
            out[i][n] = col[i]
        for i in range(n):
            for j in range(n):
                out[n + 1 + i][n + 1 + j] = Fraction(amat[n - 1 - i][n - 1 - j])
        return out

    basis = []
    for i in range(n):
        for j in range(n):
            a0 = [[0] * n for _ in range(n)]
            a0[i][j] = 1
            m = embed(a0)
            mfix = embed([[0] * n for _ in range(n)])
            basis.append([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(m, mfix)])
    const = embed([[0] * n for _ in range(n)])
    param0 = [1 if i == j else 0 for i in range(n) for j in range(n)]
    par = AffineParam(n * n, const, basis, param0, lambda mat: [])

    def h_member(mat):
        a_blk = [[mat[i][j] for j in range(n)] for i in range(n)]
        return all(
            mat_eq_entry(mat, embed(a_blk), i, j) for i in range(N) for j in range(N)
        ) and _det(a_blk) != 0

    def mat_eq_entry(m1, m2, i, j):
        return m1[i][j] == m2[i][j]

    w = min(
        min(b_exps[i] - b_exps[i + 1] for i in range(n)),
        min(a_exps[i] - a_exps[i + 1] for i in range(n - 1)) if n > 1 else 10**9,
    )

    def v_of(mat):
        a_blk = [[mat[i][j] for j in range(n)] for i in range(n)]
        return _det(a_blk)

    def cmi(m, i):
        a_std = tuple(reversed(a_exps))  # a_1 < ... < a_n
        expo = sum((n + 2 - 2 * k) * b_exps[k - 1] for k in range(1, n + 2))
        expo += sum((n + 1 - 2 * k) * a_std[n - k] for k in range(1, n + 1))
        expo -= w
        return p ** (i * expo)

    return Scenario(
        name=name,
        kind="ggp-gl",
        p=p,
        desc=desc,
        mu=mu,
        strict=True,
        h_param=par,
        h_is_member=h_member,
        v_of=v_of,
        v_target="F",
        trivial_intersection=True,
        cmi_closed_form=cmi,
        conductor_closed_form=lambda m: m * w,
        params={"w": w, "b": b_exps, "a": a_exps, "embed": embed},
        anchor="general linear group diagonally inside the split GGP product",
    )


def _diag_pair(p, name="diag-gl2"):
    d1 = GroupDescriptor("GL", 2, p, label="GL(2)")
    d2 = GroupDescriptor("GL", 2, p, label="GL(2)")
    desc = ProductDescriptor([d1, d2])
    mu = (1, 0, 0, 1)  # strict for B = upper x lower

    def embed(amat):
        out = identity_matrix(4)
        for i in range(2):
            for j in range(2):
                out[i][j] = Fraction(amat[i][j])
                out[2 + i][2 + j] = Fraction(amat[i][j])
        return out

    basis = []
    for i in range(2):
        for j in range(2):
            a0 = [[0] * 2 for _ in range(2)]
            a0[i][j] = 1
            basis.append(embed(a0))
    zero4 = [[FR0] * 4 for _ in range(4)]
    basis = [
        [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(b, embed([[0, 0], [0, 0]]))]
        for b in basis
    ]
    const = embed([[0, 0], [0, 0]])
    par = AffineParam(4, const, basis, [1, 0, 0, 1], lambda mat: [])

    def theta(mat):
        out = [[FR0] * 4 for _ in range(4)]
        for i in range(2):
            for j in range(2):
                out[i][j] = mat[2 + i][2 + j]
                out[2 + i][2 + j] = mat[i][j]
                out[i][2 + j] = mat[2 + i][j]
                out[2 + i][j] = mat[i][2 + j]
        return out

    def h_member(mat):
        return all(mat[i][j] == mat[2 + i][2 + j] for i in range(2) for j in range(2)) and all(
            mat[i][2 + j] == 0 and mat[2 + i][j] == 0 for i in range(2) for j in range(2)
        ) and _det([[mat[0][0], mat[0][1]], [mat[1][0], mat[1][1]]]) != 0

    return Scenario(
        name=name,
        kind="diag-pair",
        p=p,
        desc=desc,
        mu=mu,
        strict=True,
        h_param=par,
        h_is_member=h_member,
        v_of=lambda mat: _det([[mat[0][0], mat[0][1]], [mat[1][0], mat[1][1]]]),
        v_target="F",
        theta=theta,
        bruhat_orientation=("upper", "lower"),
        anchor="diagonal subgroup of a product, swap involution",
    )


def _gl_so_symmetric(n, p, name):
    desc = GroupDescriptor("GL", n, p)
    mu = tuple(range(n - 1, -n, -2)) if n % 2 == 1 else None
    if n == 3:
        mu = (1, 0, -1)
    basis = []
    for i in range(n):
        for j in range(n):
            b = [[0] * n for _ in range(n)]
            b[i][j] = 1
            basis.append(b)
    param0 = [1 if i == j else 0 for i in range(n) for j in range(n)]

    def equations(mat):
        gt = mat_mul(mat_transpose(mat), mat)
        out = []
        for i in range(n):
            for j in range(i, n):
                out.append(gt[i][j] - (FR1 if i == j else FR0))
        return out

    par = AffineParam(n * n, [[0] * n for _ in range(n)], basis, param0, equations)

    def theta(mat):
        return mat_transpose(mat_inverse(mat))

    def h_member(mat):
        return all(v == 0 for v in equations(mat)) and _det(mat) == 1

    return Scenario(
        name=name,
        kind="gl-so-symmetric",
        p=p,
        desc=desc,
        mu=mu,
        strict=True,
        h_param=par,
        h_is_member=h_member,
        v_of=lambda mat: _det(mat),
        v_target="F",
        theta=theta,
        bruhat_orientation=("upper",),
        anchor="special orthogonal subgroup of the general linear group, inverse-transpose involution",
    )


_FAMILIES = {
    "gl-self": _gl_self_pair,
    "so-odd-unitary-inert": _so_unitary,
    "so-odd-gl-split": _so_gl_levi,
    "gsp4": _gsp4,
    "ggp-gl": _ggp,
    "diag-pair": _diag_pair,
    "gl-so-symmetric": _gl_so_symmetric,
}


def scenario_embedding(name: str, p: int | None = None, **kw) -> Scenario:
    """Catalog lookup; presets fix the parameters used by the verification
    suites, and a family name with explicit parameters builds a custom one."""
    presets = {
        "gl1": lambda q: _gl_self_pair(1, q or 3, "gl1"),
        "gl2": lambda q: _gl_self_pair(2, q or 3, "gl2"),
        "gl3": lambda q: _gl_self_pair(3, q or 3, "gl3"),
        "so3-u1": lambda q: _so_unitary(1, q or 3, "so3-u1"),
        "so5-u2": lambda q: _so_unitary(2, q or 3, "so5-u2"),
        "so3-gl1-split": lambda q: _so_gl_levi(1, q or 3, "so3-gl1-split"),
        "so5-gl2-split": lambda q: _so_gl_levi(2, q or 3, "so5-gl2-split"),
        "gsp4": lambda q: _gsp4(q or 3),
        "ggp-gl-n2": lambda q: _ggp(2, q or 3, (2, 1, 0), (1, 0), "ggp-gl-n2"),
        "diag-gl2": lambda q: _diag_pair(q or 3),
        "gl3-so3-theta": lambda q: _gl_so_symmetric(3, q or 3, "gl3-so3-theta"),
    }
    if name in presets:
        sc = presets[name](p)
        return sc
    if name in _FAMILIES:
        return _FAMILIES[name](p=p, **kw)
    raise UnknownScenario(f"unknown scenario {name!r}; known: {sorted(presets)}")


def list_scenarios():
    out = []
    for name in (
        "gl1",
        "gl2",
        "gl3",
        "so3-u1",
        "so5-u2",
        "so3-gl1-split",
        "so5-gl2-split",
        "gsp4",
        "ggp-gl-n2",
        "diag-gl2",
        "gl3-so3-theta",
    ):
        sc = scenario_embedding(name, 3)
        out.append(
            {
                "name": name,
                "kind": sc.kind,
                "group": sc.desc.label,
                "mu": list(sc.mu) if sc.mu else None,
                "tame": sc.tame,
                "strict": sc.strict,
                "anchor": sc.anchor,
                "parameters": {
                    k: (list(v) if isinstance(v, tuple) else v)
                    for k, v in sc.params.items()
                    if not callable(v)
                },
            }
        )
    return out
