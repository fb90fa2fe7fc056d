"""Spherical Hecke algebra machinery: double-coset basis elements, the
numerical Satake transform, its triangular inversion, weight multiplicities
of dual-group representations, and Hecke polynomial synthesis.

The Satake transform of 1_{K lam(pi) K} is computed coset-theoretically:
the coefficient of e^nu is q^{-<rho,nu>} times the number of left cosets
n nu(pi) K inside K lam(pi) K, counted over an exact transversal of a
bounded-denominator window of N(F)/nu(pi) N(O) nu(pi)^{-1}. The window is
widened root by root until the counts are stable (the spec's depth+1
instability detector); too small an explicit depth raises DepthTooSmall.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .arith import LaurentHalfQ
from .cosets import OperationBudgetExceeded, unipotent_transversal
from .groups import UnsupportedDescriptor, mat_mul


class NotDominant(ValueError):
    pass


class DepthTooSmall(RuntimeError):
    pass


class SingularSystem(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# dual root data


@dataclass(frozen=True)
class DualRootData:
    """Root system of the dual group in coordinates matching the cocharacter
    lattice of the original group (rank-length integer vectors)."""

    rank: int
    positive: tuple
    simple: tuple
    rho: tuple  # Fractions

    def dot(self, a, b) -> Fraction:
        return sum(Fraction(x) * Fraction(y) for x, y in zip(a, b))

    def is_dominant(self, w) -> bool:
        return all(self.dot(w, a) >= 0 for a in self.simple)

    def coroot(self, a):
        n = self.dot(a, a)
        return tuple(2 * Fraction(x) / n for x in a)

    def weyl_dim(self, lam) -> int:
        num = den = Fraction(1)
        lr = [x + y for x, y in zip(lam, self.rho)]
        for a in self.positive:
            av = self.coroot(a)
            num *= self.dot(lr, av)
            den *= self.dot(self.rho, av)
        d = num / den
        assert d.denominator == 1
        return int(d)

    def dominant_orbit_rep(self, w):
        w = list(w)
        changed = True
        while changed:
            changed = False
            for a in self.simple:
                if self.dot(w, a) < 0:
                    w = self._reflect(w, a)
                    changed = True
        return tuple(w)

    def _reflect(self, w, a):
        av = self.coroot(a)
        c = self.dot(w, av)
        return [Fraction(x) - c * Fraction(y) for x, y in zip(w, a)]

    def weyl_orbit(self, w):
        seen = {tuple(Fraction(x) for x in w)}
        frontier = list(seen)
        while frontier:
            new = []
            for v in frontier:
                for a in self.simple:
                    r = tuple(self._reflect(list(v), a))
                    if r not in seen:
                        seen.add(r)
                        new.append(r)
            frontier = new
        out = set()
        for v in seen:
            assert all(x.denominator == 1 for x in v)
            out.add(tuple(int(x) for x in v))
        return out

    def dominant_leq(self, lam):
        """Dominant weights nu <= lam (lam - nu a non-negative integer
        combination of the simple roots)."""
        lam = tuple(lam)
        if not self.is_dominant(lam):
            raise NotDominant(str(lam))
        bound = 2 + 2 * sum(abs(x) for x in lam) * max(1, self.rank)
        out = []
        for cs in itertools.product(range(bound), repeat=len(self.simple)):
            nu = list(Fraction(x) for x in lam)
            for c, a in zip(cs, self.simple):
                if c:
                    nu = [x - c * Fraction(y) for x, y in zip(nu, a)]
            if any(x.denominator != 1 for x in nu):
                continue
            nu = tuple(int(x) for x in nu)
            if self.is_dominant(nu):
                out.append(nu)
        return sorted(set(out), key=lambda v: (-self._height(v), v))

    def _height(self, v) -> Fraction:
        delta = tuple(range(self.rank, 0, -1))
        return self.dot(v, delta)


def _type_a_data(n) -> DualRootData:
    pos = []
    simple = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [0] * n
            v[i], v[j] = 1, -1
            pos.append(tuple(v))
            if j == i + 1:
                simple.append(tuple(v))
    rho = tuple(Fraction(n - 1 - 2 * i, 2) for i in range(n))
    return DualRootData(n, tuple(pos), tuple(simple), rho)


def _type_c_data(n) -> DualRootData:
    # Sp(2n): e_i +- e_j (i<j) and 2 e_i
    pos = []
    simple = []
    for i in range(n):
        for j in range(i + 1, n):
            d = [0] * n
            d[i], d[j] = 1, -1
            pos.append(tuple(d))
            if j == i + 1:
                simple.append(tuple(d))
            s = [0] * n
            s[i], s[j] = 1, 1
            pos.append(tuple(s))
    for i in range(n):
        v = [0] * n
        v[i] = 2
        pos.append(tuple(v))
    long = [0] * n
    long[n - 1] = 2
    simple.append(tuple(long))
    rho = tuple(Fraction(n - i) for i in range(n))
    return DualRootData(n, tuple(pos), tuple(simple), rho)


def dual_data(desc) -> DualRootData:
    if desc.family in ("GL", "SL"):
        return _type_a_data(desc.size)
    if desc.family == "SO-odd":
        return _type_c_data(desc.n)
    raise UnsupportedDescriptor(
        f"Hecke polynomial synthesis supports GL(n) and SO(2n+1), not {desc.family}"
    )


def to_dual(desc, mu):
    """G-cocharacter (full diagonal exponents) -> dual weight vector."""
    mu = tuple(mu)
    if desc.family in ("GL", "SL"):
        return mu
    if desc.family == "SO-odd":
        return mu[: desc.n]
    raise UnsupportedDescriptor(desc.family)


def from_dual(desc, w):
    w = tuple(w)
    if desc.family in ("GL", "SL"):
        return w
    if desc.family == "SO-odd":
        return w + (0,) + tuple(-x for x in reversed(w))
    raise UnsupportedDescriptor(desc.family)


# ---------------------------------------------------------------------------
# weight multiplicities (Freudenthal recursion)


def weight_multiplicities(data: DualRootData, lam) -> dict:
    """Full weight multiset of the irreducible V_lam, as {weight: mult}."""
    lam = tuple(lam)
    if not data.is_dominant(lam):
        raise NotDominant(str(lam))
    doms = data.dominant_leq(lam)
    lam_rho = [x + y for x, y in zip(lam, data.rho)]
    n2_lam = data.dot(lam_rho, lam_rho)
    mult = {lam: 1}
    h_lam = data._height(lam)
    for nu in doms:
        if nu == lam:
            continue
        nu_rho = [x + y for x, y in zip(nu, data.rho)]
        denom = n2_lam - data.dot(nu_rho, nu_rho)
        if denom == 0:
            mult[nu] = 0
            continue
        s = Fraction(0)
        for a in data.positive:
            k = 1
            while True:
                x = tuple(v + k * w for v, w in zip(nu, a))
                if data._height(x) > h_lam:
                    break
                rep = tuple(int(t) for t in data.dominant_orbit_rep(x))
                # weights above nu were processed first (strictly larger height)
                s += 2 * mult.get(rep, 0) * data.dot(x, a)
                k += 1
        val = s / denom
        assert val.denominator == 1
        mult[nu] = int(val)
    out = {}
    for nu, m in mult.items():
        if m <= 0:
            continue
        for w in data.weyl_orbit(nu):
            out[w] = m
    return out


def exterior_power_weights(weights: dict, i: int) -> dict:
    """Weight multiset of Lambda^i of the given multiset."""
    total = sum(weights.values())
    if not 0 <= i <= total:
        return {}
    if not weights:
        return {(): 1} if i == 0 else {}
    levels = [dict() for _ in range(i + 1)]
    zero = tuple([0] * len(next(iter(weights))))
    levels[0] = {zero: 1}
    for w, m in sorted(weights.items()):
        for _ in range(m):
            for lev in range(min(i, total) - 1, -1, -1):
                src = levels[lev]
                dst = levels[lev + 1]
                for key, c in src.items():
                    nk = tuple(a + b for a, b in zip(key, w))
                    dst[nk] = dst.get(nk, 0) + c
    return {k: v for k, v in levels[i].items() if v}


# ---------------------------------------------------------------------------
# Hecke / Weyl-invariant elements


class HeckeElement:
    """Finite combination of double-coset basis elements T_lam, coefficients
    in Z[q^(+-1/2)]. Keys are full diagonal cocharacter tuples."""

    def __init__(self, desc, coeffs=None):
        self.desc = desc
        self.coeffs = {}
        if coeffs:
            for lam, c in coeffs.items():
                c = c if isinstance(c, LaurentHalfQ) else LaurentHalfQ.const(int(c))
                if not c.is_zero():
                    self.coeffs[tuple(lam)] = c

    @staticmethod
    def basis(desc, lam, coeff=1) -> "HeckeElement":
        c = coeff if isinstance(coeff, LaurentHalfQ) else LaurentHalfQ.const(int(coeff))
        return HeckeElement(desc, {tuple(lam): c})

    @staticmethod
    def one(desc) -> "HeckeElement":
        return HeckeElement.basis(desc, (0,) * desc.size)

    def terms(self):
        return sorted(self.coeffs.items())

    def scale(self, c) -> "HeckeElement":
        c = c if isinstance(c, LaurentHalfQ) else LaurentHalfQ.const(int(c))
        return HeckeElement(self.desc, {k: v * c for k, v in self.coeffs.items()})

    def plus(self, other: "HeckeElement") -> "HeckeElement":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return HeckeElement(self.desc, out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, HeckeElement) and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*T{list(k)}" for k, c in self.terms())


class WeylInvariantPoly:
    """Weyl-invariant element of the group algebra of the cocharacter
    lattice, in the orbit-sum basis m_lam (keys: dominant dual weights)."""

    def __init__(self, data: DualRootData, coeffs=None):
        self.data = data
        self.coeffs = {}
        if coeffs:
            for w, c in coeffs.items():
                w = tuple(w)
                if not data.is_dominant(w):
                    raise NotDominant(str(w))
                c = c if isinstance(c, LaurentHalfQ) else LaurentHalfQ.const(int(c))
                if not c.is_zero():
                    self.coeffs[w] = c

    def terms(self):
        return sorted(self.coeffs.items())

    def is_zero(self):
        return not self.coeffs

    def minus(self, other):
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            cur = out.get(w)
            s = (-c) if cur is None else cur - c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return WeylInvariantPoly(self.data, out)

    def __eq__(self, other):
        return isinstance(other, WeylInvariantPoly) and self.coeffs == other.coeffs

    def __repr__(self):
        return " + ".join(f"({c})*m{list(w)}" for w, c in self.terms()) or "0"


# ---------------------------------------------------------------------------
# Satake transform by window point counts

_SATAKE_CACHE: dict = {}


def _shift_vector(desc, bounds):
    """Smallest (by <2rho, .>) dominant sigma with <alpha, sigma> >= B_alpha."""
    if all(b == 0 for b in bounds.values()):
        return tuple([0] * desc.size)
    data = dual_data(desc)
    rank = data.rank
    maxb = max(bounds.values())
    best = None
    best_h = None
    for cand in itertools.product(range(0, 2 * maxb + 1), repeat=rank):
        full = from_dual(desc, cand)
        if not desc.cocharacter_valid(full):
            continue
        ok = all(r.pairing(full) >= bounds[r.name] for r in desc.positive_roots)
        if not ok:
            continue
        h = desc.pairing_2rho(full)
        if best is None or h < best_h:
            best, best_h = full, h
    if best is None:
        raise DepthTooSmall("no shift vector found")
    return best


def _window_count(desc, lam, nu_full, bounds, budget):
    """#{n in window/N_nu : n nu(pi) in K lam(pi) K}."""
    p = desc.p
    sigma = _shift_vector(desc, bounds)
    taup = desc.cocharacter_matrix(nu_full, Fraction(p))
    sig = desc.cocharacter_matrix(sigma, Fraction(p))
    sig_inv = desc.cocharacter_matrix(sigma, Fraction(1, p))
    size = 1
    for r in desc.positive_roots:
        d = r.pairing(nu_full) + r.pairing(sigma)
        if d > 0:
            size *= p**d
    if size > budget:
        raise OperationBudgetExceeded(
            f"satake window for nu={nu_full} needs {size} points"
        )
    lam = tuple(lam)
    count = 0
    exps = lambda r: r.pairing(nu_full) + r.pairing(sigma)
    for m in unipotent_transversal(desc, exps):
        n = mat_mul(mat_mul(sig_inv, m), sig)
        cand = mat_mul(n, taup)
        try:
            got = desc.cartan_invariant(cand)
        except ValueError:
            continue
        if tuple(got) == lam:
            count += 1
    return count


def satake_transform(desc, lam, depth=None, budget: int = 20_000_000) -> WeylInvariantPoly:
    """Sat(1_{K lam(pi) K}) in the orbit-sum basis.

    depth=None widens windows until stable; an explicit depth runs at that
    uniform window and raises DepthTooSmall if depth+1 disagrees.
    """
    lam = tuple(lam)
    ck = (desc.cache_signature(), lam, depth)
    if ck in _SATAKE_CACHE:
        return _SATAKE_CACHE[ck]
    data = dual_data(desc)
    lam_w = to_dual(desc, lam)
    if not data.is_dominant(lam_w):
        raise NotDominant(str(lam))
    out = {}
    for nu in data.dominant_leq(lam_w):
        nu_full = from_dual(desc, nu)
        if depth is not None:
            b0 = {r.name: depth for r in desc.positive_roots}
            b1 = {r.name: depth + 1 for r in desc.positive_roots}
            c0 = _window_count(desc, lam, nu_full, b0, budget)
            c1 = _window_count(desc, lam, nu_full, b1, budget)
            if c0 != c1:
                raise DepthTooSmall(f"counts {c0} != {c1} at depth {depth}")
            count = c0
        else:
            bounds = {r.name: 0 for r in desc.positive_roots}
            count = _window_count(desc, lam, nu_full, bounds, budget)
            stable = False
            while not stable:
                stable = True
                for r in desc.positive_roots:
                    trial = dict(bounds)
                    trial[r.name] += 1
                    c2 = _window_count(desc, lam, nu_full, trial, budget)
                    if c2 != count:
                        bounds = trial
                        count = c2
                        stable = False
        if count:
            # absorb p-powers of the count into symbolic q-powers so that
            # leading coefficients are exact monomials q^{<rho,nu>}
            v = 0
            while count % desc.p == 0:
                count //= desc.p
                v += 1
            # the normalization uses rho of the group itself (not the dual)
            rho_pair = Fraction(desc.pairing_2rho(nu_full), 2)
            out[nu] = LaurentHalfQ.q_pow(v - rho_pair, desc.p, count)
    res = WeylInvariantPoly(data, out)
    _SATAKE_CACHE[ck] = res
    return res


def satake_invert(desc, f: WeylInvariantPoly) -> HeckeElement:
    """Hecke element with the given Satake image (descending dominance solve)."""
    data = f.data
    work = dict(f.coeffs)
    out = {}
    guard = 0
    while work:
        guard += 1
        if guard > 10_000:
            raise SingularSystem("inversion did not terminate")
        nu = max(work, key=lambda w: (data._height(w), w))
        c = work.pop(nu)
        sat = satake_transform(desc, from_dual(desc, nu))
        lead = sat.coeffs[nu]
        t = c.divide_exact(lead) if _monomial(lead) else _laurent_div(c, lead)
        out[from_dual(desc, nu)] = t
        for w, cc in sat.coeffs.items():
            if w == nu:
                continue
            cur = work.get(w, LaurentHalfQ())
            s = cur - cc * t
            if s.is_zero():
                work.pop(w, None)
            else:
                work[w] = s
    return HeckeElement(desc, out)


def _monomial(x: LaurentHalfQ) -> bool:
    return len(x.coeffs) == 1


def _laurent_div(a: LaurentHalfQ, b: LaurentHalfQ) -> LaurentHalfQ:
    return a.divide_exact(b)


def satake_of_element(desc, h: HeckeElement) -> WeylInvariantPoly:
    """Linear extension of the transform to a Hecke element."""
    data = dual_data(desc)
    acc = WeylInvariantPoly(data, {})
    for lam, c in h.terms():
        sat = satake_transform(desc, lam)
        scaled = WeylInvariantPoly(data, {w: cc * c for w, cc in sat.coeffs.items()})
        acc = _wip_add(acc, scaled)
    return acc


def _wip_add(a: WeylInvariantPoly, b: WeylInvariantPoly) -> WeylInvariantPoly:
    out = dict(a.coeffs)
    for w, c in b.coeffs.items():
        cur = out.get(w)
        s = c if cur is None else cur + c
        if s.is_zero():
            out.pop(w, None)
        else:
            out[w] = s
    return WeylInvariantPoly(a.data, out)


# ---------------------------------------------------------------------------
# Hecke polynomial

_HECKEPOLY_CACHE: dict = {}


@dataclass
class HeckePolynomial:
    """Coefficients A_0..A_k (ascending powers; A_k the identity element)."""

    desc: object
    mu: tuple
    coefficients: list

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


def hecke_degree(desc, mu) -> int:
    data = dual_data(desc)
    return data.weyl_dim(to_dual(desc, mu))


def hecke_polynomial(desc, mu) -> HeckePolynomial:
    """det(X - q^{d(mu)} r_mu(g)) pulled back through the Satake transform:
    A_{k-i} = (-1)^i q^{i d(mu)} SatInv(char Lambda^i V_mu), d(mu) = <rho,mu>."""
    mu = tuple(mu)
    ck = (desc.cache_signature(), mu)
    if ck in _HECKEPOLY_CACHE:
        return _HECKEPOLY_CACHE[ck]
    data = dual_data(desc)
    mu_w = to_dual(desc, mu)
    if not data.is_dominant(mu_w):
        raise NotDominant(str(mu))
    weights = weight_multiplicities(data, mu_w)
    k = sum(weights.values())
    d_mu = Fraction(desc.pairing_2rho(mu), 2)  # d(mu) = <rho, mu> for the group's rho
    coeffs = [None] * (k + 1)
    for i in range(k + 1):
        char_i = exterior_power_weights(weights, i)
        dom = {w: m for w, m in char_i.items() if data.is_dominant(w)}
        f = WeylInvariantPoly(data, {w: LaurentHalfQ.const(m, desc.p) for w, m in dom.items()})
        inv = satake_invert(desc, f)
        sign = -1 if i % 2 else 1
        factor = LaurentHalfQ.q_pow(i * d_mu, desc.p, sign)
        coeffs[k - i] = inv.scale(factor)
    pol = HeckePolynomial(desc, mu, coeffs)
    _HECKEPOLY_CACHE[ck] = pol
    return pol
