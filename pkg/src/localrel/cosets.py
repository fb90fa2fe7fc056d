"""Finite-window model of G/K: canonical lattice representatives, left
translation, the U-operator of the displayed coset formula, right Hecke
action through closure-search double-coset decompositions, and the seed
identity checker.

Cosets gK are identified with O-lattices g L_0; the canonical representative
is the upper-triangular Hermite basis (diagonal pi-powers, super-diagonal
entries reduced modulo the diagonal). This is a bijection because the
stabilizer of L_0 in G(F) is exactly K for every supported descriptor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groups import GroupElement, UnsupportedDescriptor, mat_mul
from .linalg import (
    int_mat_mul,
    lattice_hnf_key,
    lattice_hnf_key_int,
    lattice_hnf_key_scaled,
    scale_to_int,
)


class OperationBudgetExceeded(RuntimeError):
    pass


class DecompositionUnverified(RuntimeError):
    pass


class MissingWitness(RuntimeError):
    """The operation needs a triangular (Borel) representative and none is attached."""


FR0 = Fraction(0)


def _as_rows(g):
    if isinstance(g, GroupElement):
        return g.rows()
    return [list(r) for r in g]


def canonical_key(desc, mat):
    return lattice_hnf_key_int(_as_rows(mat), desc.p)


def key_matrix(desc, key):
    """Reconstruct the canonical upper-triangular lattice basis from its key."""
    diag, entries = key
    n = len(diag)
    p = desc.p
    m = [[FR0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = Fraction(p) ** diag[i]
    it = iter(entries)
    for i in range(n):
        for j in range(i + 1, n):
            v, digits = next(it)
            if digits:
                m[i][j] = Fraction(digits) * Fraction(p) ** v
    return m


def canonicalize(g) -> tuple:
    """Canonical representative of gK; constant on right K-cosets."""
    return canonical_key(g.descriptor, g.rows())


def is_triangular(mat) -> bool:
    n = len(mat)
    return all(mat[i][j] == 0 for i in range(n) for j in range(i))


@dataclass
class CosetVector:
    """Finite rational combination of coset representatives.

    `witnesses` optionally stores a triangular group representative per
    support key; it is required by the U-operator and maintained by the
    operations that can do so exactly.
    """

    desc: object
    coeffs: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @staticmethod
    def unit(desc, g=None) -> "CosetVector":
        """1_{gK} (defaults to the base point [1])."""
        if g is None:
            n = desc.size
            mat = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        else:
            mat = _as_rows(g)
        key = canonical_key(desc, mat)
        wit = mat if is_triangular(mat) else None
        v = CosetVector(desc, {key: Fraction(1)})
        if wit is not None:
            v.witnesses[key] = wit
        return v

    def add_term(self, key, coeff, witness=None):
        c = self.coeffs.get(key, FR0) + coeff
        if c == 0:
            self.coeffs.pop(key, None)
        else:
            self.coeffs[key] = c
        if witness is not None and key not in self.witnesses:
            self.witnesses[key] = witness

    def is_zero(self) -> bool:
        return not self.coeffs

    def support_size(self) -> int:
        return len(self.coeffs)

    def scaled(self, c) -> "CosetVector":
        c = Fraction(c)
        if c == 0:
            return CosetVector(self.desc)
        return CosetVector(
            self.desc,
            {k: v * c for k, v in self.coeffs.items()},
            dict(self.witnesses),
        )

    def plus(self, other: "CosetVector") -> "CosetVector":
        out = CosetVector(self.desc, dict(self.coeffs), dict(self.witnesses))
        for k, v in other.coeffs.items():
            out.add_term(k, v, other.witnesses.get(k))
        return out

    def minus(self, other: "CosetVector") -> "CosetVector":
        return self.plus(other.scaled(-1))

    def __eq__(self, other):
        return isinstance(other, CosetVector) and self.coeffs == other.coeffs


def translate(g, v: CosetVector) -> CosetVector:
    """Left action: linear extension of hK -> (g h)K."""
    rows = _as_rows(g)
    tri = is_triangular(rows)
    out = CosetVector(v.desc)
    for key, c in v.coeffs.items():
        w = v.witnesses.get(key)
        if tri and w is not None:
            mat = mat_mul(rows, w)
            out.add_term(canonical_key(v.desc, mat), c, mat)
        else:
            mat = mat_mul(rows, key_matrix(v.desc, key))
            out.add_term(canonical_key(v.desc, mat), c)
    return out


def unipotent_transversal(desc, exponents):
    """Yield matrices Pi_alpha R_alpha(y_alpha) with y_alpha running over the
    digit lifts 0..q^{d_alpha}-1 (alpha over positive roots with d_alpha > 0).

    For d_alpha = <alpha, tau-exponents> this is an exact transversal of
    N(O) / tau N(O) tau^{-1}.
    """
    p = desc.p
    roots = [(r, exponents(r)) for r in desc.positive_roots]
    roots = [(r, d) for r, d in roots if d > 0]
    n = desc.size
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if not roots:
        yield ident
        return

    def rec(i, acc):
        if i == len(roots):
            yield acc
            return
        r, d = roots[i]
        count = p**d
        for y in range(count):
            m = acc if y == 0 else mat_mul(acc, desc.root_matrix(r, Fraction(y)))
            yield from rec(i + 1, m)

    yield from rec(0, ident)


def unipotent_transversal_scaled(desc, exponents):
    """Like unipotent_transversal but yields (integer matrix, p-shift) pairs
    with integer partial products (hot-path variant)."""
    p = desc.p
    roots = [(r, exponents(r)) for r in desc.positive_roots]
    roots = [(r, d) for r, d in roots if d > 0]
    n = desc.size
    ident = ([[int(i == j) for j in range(n)] for i in range(n)], 0)
    if not roots:
        yield ident
        return
    tables = []
    for r, d in roots:
        tables.append([scale_to_int(desc.root_matrix(r, Fraction(y)), p) for y in range(p**d)])

    def rec(i, acc, e):
        if i == len(tables):
            yield acc, e
            return
        for m, de in tables[i]:
            yield from rec(i + 1, int_mat_mul(acc, m) if i else m, e + de)

    yield from rec(0, ident[0], 0)


def u_transversal_size(desc, mu, power=1) -> int:
    total = 0
    for r in desc.positive_roots:
        d = power * r.pairing(mu)
        if d > 0:
            total += d
    return desc.p**total


def u_operator(mu, v: CosetVector, power: int = 1, budget: int | None = None) -> CosetVector:
    """U_{mu^power} acting on v by the coset formula
    U(1_{bK}) = sum_z 1_{b z mu(pi)^power K} with z over N(O)/tau N(O) tau^{-1}."""
    desc = v.desc
    if power == 0:
        return v
    if not desc.is_dominant(mu):
        raise ValueError("U-operator needs a dominant cocharacter")
    size = u_transversal_size(desc, mu, power) * max(1, v.support_size())
    if budget is not None and size > budget:
        raise OperationBudgetExceeded(
            f"U_mu^{power} expansion needs {size} cosets (budget {budget})"
        )
    tau = desc.cocharacter_matrix(mu, Fraction(desc.p) ** power)
    out = CosetVector(desc)
    for key, c in v.coeffs.items():
        b = v.witnesses.get(key)
        if b is None:
            raise MissingWitness("u_operator needs triangular representatives")
        for z in unipotent_transversal(desc, lambda r: power * r.pairing(mu)):
            mat = mat_mul(mat_mul(b, z), tau)
            out.add_term(canonical_key(desc, mat), c, mat)
    return out


def finite_group_trace(elements, v: CosetVector) -> CosetVector:
    """Sum of translates of v over a finite set of group elements."""
    out = CosetVector(v.desc)
    for s in elements:
        out = out.plus(translate(s, v))
    return out


# ---------------------------------------------------------------------------
# double-coset decomposition by closure search

_DECOMP_CACHE: dict = {}


def decomposition(desc, lam, budget: int = 500_000):
    """Left-coset representatives of K lam(pi) K / K as lattice basis matrices.

    Closure search: start at the lattice lam(pi) L_0, repeatedly apply a
    K-generator set (root elements to depth 1+max<alpha,lam>, torus units),
    canonicalize, until closed. Certificate: the final set is stable under
    one more full generator sweep, and every member has Cartan invariant lam.
    """
    lam = tuple(lam)
    key = (desc.cache_signature(), lam)
    if key in _DECOMP_CACHE:
        return _DECOMP_CACHE[key]
    if not desc.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    depth = 1 + max((abs(r.pairing(lam)) for r in desc.all_roots), default=0)
    gens = desc.k_generators(depth)
    start = desc.cocharacter_matrix(lam, Fraction(desc.p))
    start_key = canonical_key(desc, start)
    seen = {start_key: key_matrix(desc, start_key)}
    frontier = [start_key]
    while frontier:
        new = []
        for key in frontier:
            base = seen[key]
            for g in gens:
                mat = mat_mul(g, base)
                k2 = canonical_key(desc, mat)
                if k2 not in seen:
                    if len(seen) >= budget:
                        raise OperationBudgetExceeded(
                            f"decomposition of {lam} exceeded {budget} cosets"
                        )
                    seen[k2] = key_matrix(desc, k2)
                    new.append(k2)
        frontier = new
    # certificate sweep + Cartan check
    for key, base in seen.items():
        got = desc.cartan_invariant(base)
        if tuple(got) != lam:
            raise DecompositionUnverified(f"member has Cartan {got}, wanted {lam}")
    for key in list(seen):
        base = seen[key]
        for g in gens:
            if canonical_key(desc, mat_mul(g, base)) not in seen:
                raise DecompositionUnverified("closure certificate failed")
    reps = [seen[k] for k in sorted(seen)]
    _DECOMP_CACHE[key] = reps
    return reps


def hecke_act(element, v: CosetVector, budget: int | None = None) -> CosetVector:
    """Right action of a Hecke element: [bK] * [K lam K] = sum_i [b g_i K],
    extended linearly with the element's Laurent coefficients evaluated at q."""
    desc = v.desc
    out = CosetVector(desc)
    for lam, coeff in element.terms():
        c = coeff.evaluate(desc.p) if hasattr(coeff, "evaluate") else Fraction(coeff)
        if c == 0:
            continue
        reps = decomposition(desc, lam)
        if budget is not None and len(reps) * v.support_size() > budget:
            raise OperationBudgetExceeded("hecke_act expansion over budget")
        for key, cv in v.coeffs.items():
            base = v.witnesses.get(key) or key_matrix(desc, key)
            for rep in reps:
                mat = mat_mul(base, rep)
                out.add_term(canonical_key(desc, mat), c * cv)
    return out


# ---------------------------------------------------------------------------
# seed identity


def seed_check(desc, mu, probes=None, budget: int = 2_000_000, hecke_poly=None):
    """Verify Hep_mu(U_mu)(1_{bK}) = 0 exactly for each probe b in B(F).

    Evaluates sum_i hecke_act(A_i, U_mu^i(1_bK)) term by term into one
    accumulator and asserts the zero vector. Raises OperationBudgetExceeded
    up front when the exact expansion cannot fit the budget.
    """
    from . import hecke as hecke_mod

    mu = tuple(mu)
    p = desc.p
    if probes is None:
        probes = [None]
    deg = hecke_mod.hecke_degree(desc, mu)
    pairing = desc.pairing_2rho(mu)
    est = sum(p ** (i * pairing) for i in range(deg + 1))
    if est > budget:
        raise OperationBudgetExceeded(
            f"seed expansion needs >= {est} cosets for deg {deg}, "
            f"q^<mu,2rho> = {p}^{pairing} (budget {budget})"
        )
    pol = hecke_poly if hecke_poly is not None else hecke_mod.hecke_polynomial(desc, mu)
    report = {"degree": deg, "probes": []}
    ok = True
    for probe in probes:
        base = CosetVector.unit(desc, probe)
        (bkey,) = base.coeffs
        b = base.witnesses.get(bkey)
        if b is None:
            raise MissingWitness("seed probes must be triangular")
        b_int, b_e = scale_to_int(b, p)
        acc = {}
        term_counts = []
        # streamed evaluation of sum_i (U_mu^i 1_bK) * A_i, largest power first
        for i in range(deg, -1, -1):
            elt = pol.coefficients[i]
            lam_coeffs = [
                (lam, c.evaluate(p) if hasattr(c, "evaluate") else Fraction(c))
                for lam, c in elt.terms()
            ]
            lam_coeffs = [(lam, c) for lam, c in lam_coeffs if c != 0]
            if not lam_coeffs:
                term_counts.append(0)
                continue
            reps_scaled = []
            for lam, c in lam_coeffs:
                for rep in decomposition(desc, lam):
                    ri, re = scale_to_int(rep, p)
                    reps_scaled.append((ri, re, c))
            tau_i, tau_e = scale_to_int(desc.cocharacter_matrix(mu, Fraction(p) ** i), p)
            count = 0
            for z, z_e in unipotent_transversal_scaled(desc, lambda r: i * r.pairing(mu)):
                mat = int_mat_mul(int_mat_mul(b_int, z), tau_i)
                e = b_e + z_e + tau_e
                for ri, re, c in reps_scaled:
                    key = lattice_hnf_key_scaled(int_mat_mul(mat, ri), e + re, p)
                    s = acc.get(key, FR0) + c
                    if s == 0:
                        acc.pop(key, None)
                    else:
                        acc[key] = s
                    count += 1
                if len(acc) > budget:
                    raise OperationBudgetExceeded("seed accumulator over budget")
            term_counts.append(count)
        zero = not acc
        ok = ok and zero
        report["probes"].append(
            {
                "term_supports": list(reversed(term_counts)),
                "residual_support": len(acc),
                "zero": zero,
            }
        )
    report["verified"] = ok
    return report
