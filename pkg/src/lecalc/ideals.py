"""Groebner bases and the ideal operations built on them.

Everything here is exact.  Buchberger's algorithm uses the normal selection
strategy with the coprime (product) criterion and the chain criterion.
Elimination runs through block orders; quotients and saturations reduce to
elimination of one auxiliary variable.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import NotIsolatedError, ResourceCapExceeded
from .polyring import (
    DEGREVLEX,
    Exp,
    MonomialOrder,
    Poly,
    Ring,
    block_order,
    poly_divide_exact,
)


@dataclass(frozen=True)
class Caps:
    """Resource limits. Exceeding one raises :class:`ResourceCapExceeded`."""

    max_pairs: int = 100_000
    max_saturation_steps: int = 64
    max_power: int = 64
    attempts: int = 12


DEFAULT_CAPS = Caps()


class _Infinite:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFINITE"

    __str__ = __repr__


INFINITE = _Infinite()


# --------------------------------------------------------------------------
# raw Buchberger on dict polynomials


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


class _Keyed:
    """Memoized order key, local to one computation."""

    __slots__ = ("key", "cache")

    def __init__(self, order: MonomialOrder):
        self.key = order.key
        self.cache: dict[Exp, tuple] = {}

    def __call__(self, e: Exp) -> tuple:
        k = self.cache.get(e)
        if k is None:
            k = self.cache[e] = self.key(e)
        return k


def _lead(p: dict, key: _Keyed) -> Exp:
    return max(p, key=key)


def _reduce(p: dict, basis: Sequence[tuple[Exp, dict]], key: _Keyed, full: bool = True) -> dict:
    """Normal form of ``p`` with respect to monic ``basis`` entries ``(lm, terms)``."""
    p = dict(p)
    rem: dict[Exp, Fraction] = {}
    while p:
        m = max(p, key=key)
        c = p.pop(m)
        for lm, g in basis:
            if _divides(lm, m):
                q = _sub(m, lm)
                for te, tc in g.items():
                    if te == lm:
                        continue
                    ne = tuple(a + b for a, b in zip(te, q))
                    v = p.get(ne, 0) - c * tc
                    if v:
                        p[ne] = v
                    else:
                        p.pop(ne, None)
                break
        else:
            rem[m] = c
            if not full:
                rem.update(p)
                return rem
    return rem


def _monic(p: dict, key: _Keyed) -> tuple[Exp, dict]:
    lm = _lead(p, key)
    c = p[lm]
    if c != 1:
        p = {e: v / c for e, v in p.items()}
    return lm, p


def _buchberger(polys: Iterable[dict], key: _Keyed, max_pairs: int) -> list[tuple[Exp, dict]]:
    basis: list[tuple[Exp, dict]] = []
    is_monomial: list[bool] = []
    pending: set[tuple[int, int]] = set()
    heap: list = []
    counter = itertools.count()

    def add(p: dict) -> None:
        lm, g = _monic(p, key)
        j = len(basis)
        basis.append((lm, g))
        is_monomial.append(len(g) == 1)
        for i in range(j):
            pending.add((i, j))
            heapq.heappush(heap, (key(_lcm(basis[i][0], lm)), next(counter), i, j))

    for p in polys:
        p = _reduce(p, basis, key) if basis else p
        if p:
            add(p)
            if all(not any(e) for e in p):
                return [(basis[-1][0], basis[-1][1])]

    processed = 0
    while heap:
        _, _, i, j = heapq.heappop(heap)
        if (i, j) not in pending:
            continue
        pending.discard((i, j))
        lmi, gi = basis[i]
        lmj, gj = basis[j]
        if is_monomial[i] and is_monomial[j]:
            continue
        if all(not (a and b) for a, b in zip(lmi, lmj)):
            continue
        lcm = _lcm(lmi, lmj)
        chain = False
        for k, (lmk, _) in enumerate(basis):
            if k in (i, j) or not _divides(lmk, lcm):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                chain = True
                break
        if chain:
            continue
        processed += 1
        if processed > max_pairs:
            raise ResourceCapExceeded(f"Groebner basis pair limit {max_pairs} exceeded")
        qi, qj = _sub(lcm, lmi), _sub(lcm, lmj)
        s: dict[Exp, Fraction] = {}
        for e, c in gi.items():
            if e != lmi:
                s[tuple(a + b for a, b in zip(e, qi))] = c
        for e, c in gj.items():
            if e != lmj:
                ne = tuple(a + b for a, b in zip(e, qj))
                v = s.get(ne, 0) - c
                if v:
                    s[ne] = v
                else:
                    s.pop(ne, None)
        if not s:
            continue
        r = _reduce(s, basis, key)
        if r:
            add(r)
            if all(not any(e) for e in r):
                return [basis[-1]]
    return _interreduce(basis, key)


def _interreduce(basis: list[tuple[Exp, dict]], key: _Keyed) -> list[tuple[Exp, dict]]:
    minimal: list[tuple[Exp, dict]] = []
    for lm, g in sorted(basis, key=lambda t: key(t[0])):
        if not any(_divides(m, lm) for m, _ in minimal):
            minimal.append((lm, g))
    out = []
    for idx, (lm, g) in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        tail = {e: c for e, c in g.items() if e != lm}
        tail = _reduce(tail, others, key) if tail else {}
        tail[lm] = Fraction(1)
        out.append((lm, tail))
    return out


# --------------------------------------------------------------------------
# public types


class GroebnerBasis:
    """Reduced, monic Groebner basis of an ideal for a fixed monomial order."""

    def __init__(self, ring: Ring, order: MonomialOrder, elements: Sequence[Poly]):
        self.ring = ring
        self.order = order
        self.elements = tuple(elements)
        self._key = _Keyed(order)
        self._raw = [(g.leading_monomial(order), g.terms) for g in self.elements]

    @property
    def leading_monomials(self) -> list[Exp]:
        return [lm for lm, _ in self._raw]

    def is_unit(self) -> bool:
        return len(self.elements) == 1 and self.elements[0].is_constant()

    def normal_form(self, f: Poly) -> Poly:
        return normal_form(f, self)

    def contains(self, f: Poly) -> bool:
        return normal_form(f, self).is_zero()

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"GroebnerBasis({self.order}, [{', '.join(map(str, self.elements))}])"


def normal_form(f: Poly, G: GroebnerBasis) -> Poly:
    if f.ring.names != G.ring.names:
        raise ValueError("polynomial and basis live in different rings")
    if not G._raw:
        return f
    return Poly(f.ring, _reduce(f.terms, G._raw, G._key), _trusted=True)


class Ideal:
    """Ideal given by generators, with a write-once Groebner basis cache per order."""

    def __init__(self, ring: Ring, generators: Iterable[Poly] = ()):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring.names != ring.names:
                raise ValueError("generator from a different ring")
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self._gb: dict[str, GroebnerBasis] = {}

    @classmethod
    def of(cls, ring: Ring, *items: Union[Poly, str]) -> "Ideal":
        from .polyring import as_polys

        return cls(ring, as_polys(ring, items))

    def groebner(self, order: MonomialOrder | None = None, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
        order = order or self.ring.order
        gb = self._gb.get(order.name)
        if gb is None:
            gb = groebner(self, order, caps)
            self._gb.setdefault(order.name, gb)
        return gb

    def __add__(self, other: Union["Ideal", Iterable[Poly]]) -> "Ideal":
        extra = other.generators if isinstance(other, Ideal) else tuple(other)
        return Ideal(self.ring, self.generators + tuple(extra))

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [f * g for f in self.generators for g in other.generators])

    def contains(self, f: Poly, caps: Caps = DEFAULT_CAPS) -> bool:
        return self.groebner(caps=caps).contains(f)

    def contains_ideal(self, other: "Ideal", caps: Caps = DEFAULT_CAPS) -> bool:
        gb = self.groebner(caps=caps)
        return all(gb.contains(g) for g in other.generators)

    def equals(self, other: "Ideal", caps: Caps = DEFAULT_CAPS) -> bool:
        return self.contains_ideal(other, caps) and other.contains_ideal(self, caps)

    __eq__ = equals
    __hash__ = None

    def is_unit(self, caps: Caps = DEFAULT_CAPS) -> bool:
        return self.groebner(caps=caps).is_unit()

    def is_zero(self) -> bool:
        return not self.generators

    def __repr__(self) -> str:
        return f"Ideal({', '.join(map(str, self.generators)) or '0'})"


def groebner(I: Ideal, order: MonomialOrder | None = None, caps: Caps = DEFAULT_CAPS) -> GroebnerBasis:
    order = order or I.ring.order
    key = _Keyed(order)
    raw = _buchberger((g.terms for g in I.generators), key, caps.max_pairs)
    ring = I.ring.with_order(order)
    elements = [Poly(ring, g, _trusted=True) for _, g in raw]
    return GroebnerBasis(ring, order, elements)


def unit_ideal(ring: Ring) -> Ideal:
    return Ideal(ring, [ring.one()])


def maximal_ideal_at_origin(ring: Ring) -> Ideal:
    return Ideal(ring, ring.gens())


# --------------------------------------------------------------------------
# auxiliary-variable machinery


def _fresh_name(ring: Ring, base: str = "t_") -> str:
    name = base
    while name in ring.names:
        name += "_"
    return name


def _lift(f: Poly, big: Ring, front: int) -> Poly:
    pad = (0,) * front
    return Poly(big, {pad + e: c for e, c in f.terms.items()}, _trusted=True)


def _drop(f: Poly, small: Ring, front: int) -> Poly:
    return Poly(small, {e[front:]: c for e, c in f.terms.items()}, _trusted=True)


def _eliminate_front(big_gens: list[Poly], big: Ring, small: Ring, k: int, caps: Caps) -> Ideal:
    gb = groebner(Ideal(big, big_gens), block_order(k), caps)
    kept = [_drop(g, small, k) for g in gb.elements if all(not any(e[:k]) for e in g.terms)]
    return Ideal(small, kept)


def intersect(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """I ∩ J via elimination of t from t·I + (1 - t)·J."""
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal(ring, [])
    t = _fresh_name(ring)
    big = Ring((t,) + ring.names, DEGREVLEX)
    tv = big.var(0)
    gens = [tv * _lift(g, big, 1) for g in I.generators]
    gens += [(1 - tv) * _lift(g, big, 1) for g in J.generators]
    return _eliminate_front(gens, big, ring, 1, caps)


def _quotient_by_poly(I: Ideal, f: Poly, caps: Caps) -> Ideal:
    if f.is_zero():
        raise ValueError("quotient by the zero polynomial")
    if f.is_constant() or I.is_zero():
        return I
    inter = intersect(I, Ideal(I.ring, [f]), caps)
    return Ideal(I.ring, [poly_divide_exact(g, f) for g in inter.generators])


def ideal_quotient(I: Ideal, f: Union[Poly, Ideal], caps: Caps = DEFAULT_CAPS) -> Ideal:
    """I : f for a polynomial, or I : J = ∩_g (I : g) for an ideal."""
    if isinstance(f, Poly):
        return _quotient_by_poly(I, f, caps)
    if f.is_zero():
        raise ValueError("quotient by the zero ideal")
    result = None
    for g in f.generators:
        q = _quotient_by_poly(I, g, caps)
        result = q if result is None else intersect(result, q, caps)
    return result


def saturate(I: Ideal, J: Union[Ideal, Poly], caps: Caps = DEFAULT_CAPS) -> Ideal:
    """I : J^∞ as the stable value of the iterated quotient chain."""
    if isinstance(J, Poly):
        J = Ideal(I.ring, [J])
    if J.is_zero():
        raise ValueError("saturation by the zero ideal")
    if J.is_unit(caps):
        return I
    cur = I
    for _ in range(caps.max_saturation_steps):
        nxt = ideal_quotient(cur, J, caps)
        if cur.contains_ideal(nxt, caps):
            return cur
        cur = nxt
    raise ResourceCapExceeded(f"saturation did not stabilize within {caps.max_saturation_steps} steps")


def saturate_rabinowitsch(I: Ideal, J: Union[Ideal, Poly], caps: Caps = DEFAULT_CAPS) -> Ideal:
    """I : J^∞ through I + (1 - t·g), eliminating t, intersected over generators g of J.

    Independent of :func:`saturate`; used to cross-check it.
    """
    if isinstance(J, Poly):
        J = Ideal(I.ring, [J])
    ring = I.ring
    t = _fresh_name(ring)
    big = Ring((t,) + ring.names, DEGREVLEX)
    tv = big.var(0)
    result = None
    for g in J.generators:
        gens = [_lift(h, big, 1) for h in I.generators] + [1 - tv * _lift(g, big, 1)]
        sat = _eliminate_front(gens, big, ring, 1, caps)
        result = sat if result is None else intersect(result, sat, caps)
    return result


def eliminate(I: Ideal, vars: Iterable[Union[int, str]], caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Generators of I ∩ k[remaining variables], returned in the original ring."""
    ring = I.ring
    idx = sorted({ring.index(v) if isinstance(v, str) else v for v in vars})
    if not idx:
        return I
    rest = [i for i in range(ring.nvars) if i not in idx]
    perm = idx + rest
    big = Ring(tuple(ring.names[i] for i in perm), DEGREVLEX)

    def fwd(f: Poly) -> Poly:
        return Poly(big, {tuple(e[i] for i in perm): c for e, c in f.terms.items()}, _trusted=True)

    inv = [0] * len(perm)
    for pos, i in enumerate(perm):
        inv[i] = pos
    gb = groebner(Ideal(big, [fwd(g) for g in I.generators]), block_order(len(idx)), caps)
    k = len(idx)
    kept = []
    for g in gb.elements:
        if all(not any(e[:k]) for e in g.terms):
            kept.append(Poly(ring, {tuple(e[inv[i]] for i in range(len(perm))): c for e, c in g.terms.items()}, _trusted=True))
    return Ideal(ring, kept)


def poly_gcd(f: Poly, g: Poly, caps: Caps = DEFAULT_CAPS) -> Poly:
    """Monic-ish gcd through lcm = generator of (f) ∩ (g)."""
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    if f.is_constant() or g.is_constant():
        return f.ring.one()
    inter = intersect(Ideal(f.ring, [f]), Ideal(f.ring, [g]), caps)
    lcm = inter.groebner(caps=caps).elements[0]
    return poly_divide_exact(f * g, lcm).monic()


# --------------------------------------------------------------------------
# Hilbert data


@dataclass(frozen=True)
class HilbertData:
    krull_dimension: int
    degree: int

    @property
    def projective_dimension(self) -> int:
        """Dimension of the projective scheme of a homogeneous ideal (-1 if empty)."""
        return max(self.krull_dimension - 1, -1)


def _minimalize(monos: Iterable[Exp]) -> list[Exp]:
    out: list[Exp] = []
    for m in sorted(set(monos), key=sum):
        if not any(_divides(g, m) for g in out):
            out.append(m)
    return out


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def hilbert_numerator(monos: Sequence[Exp]) -> list[int]:
    """Numerator N(t) of the Hilbert series N(t)/(1-t)^n of k[x]/(monos)."""
    gens = _minimalize(monos)
    if not gens:
        return [1]
    if any(not any(m) for m in gens):
        return [0]
    # pairwise coprime generators: product of (1 - t^deg)
    support_disjoint = True
    seen = set()
    for m in gens:
        s = {i for i, x in enumerate(m) if x}
        if s & seen:
            support_disjoint = False
            break
        seen |= s
    if support_disjoint:
        out = [1]
        for m in gens:
            d = sum(m)
            out = _poly_mul(out, [1] + [0] * (d - 1) + [-1])
        return out
    *rest, last = gens
    base = hilbert_numerator(rest)
    colon = [tuple(max(a - b, 0) for a, b in zip(m, last)) for m in rest]
    shifted = [0] * sum(last) + hilbert_numerator(colon)
    return _poly_sub(base, shifted)


def _krull_dimension_of_monomial_ideal(nvars: int, monos: Sequence[Exp]) -> int:
    """Size of a maximal independent set of variables modulo the monomial ideal."""
    gens = _minimalize(monos)
    if any(not any(m) for m in gens):
        return -1
    supports = [frozenset(i for i, x in enumerate(m) if x) for m in gens]
    for size in range(nvars, -1, -1):
        for subset in itertools.combinations(range(nvars), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def hilbert_data(I: Ideal, caps: Caps = DEFAULT_CAPS) -> HilbertData:
    """Krull dimension and degree.

    For affine input the degree is that of the projective closure: the
    homogenization of a degrevlex basis has the same leading monomials, so the
    leading-term ideal computes it directly.
    """
    gb = I.groebner(DEGREVLEX, caps)
    if gb.is_unit():
        return HilbertData(-1, 0)
    lms = gb.leading_monomials
    n = I.ring.nvars
    dim = _krull_dimension_of_monomial_ideal(n, lms)
    num = hilbert_numerator(lms)
    # divide by (1 - t)^(n - dim)
    for _ in range(n - dim):
        q = []
        acc = 0
        for c in num[:-1]:
            acc += c
            q.append(acc)
        if acc + num[-1] != 0:
            raise ArithmeticError("Hilbert numerator not divisible by (1 - t)")
        num = q or [0]
    return HilbertData(dim, sum(num))


def standard_monomials(I: Ideal, caps: Caps = DEFAULT_CAPS) -> list[Exp]:
    """Monomials outside the leading ideal (degrevlex); only for zero-dimensional I."""
    gb = I.groebner(DEGREVLEX, caps)
    if gb.is_unit():
        return []
    lms = gb.leading_monomials
    n = I.ring.nvars
    if _krull_dimension_of_monomial_ideal(n, lms) > 0:
        raise ValueError("ideal is not zero-dimensional")
    out = []
    frontier = [(0,) * n]
    seen = {frontier[0]}
    while frontier:
        m = frontier.pop()
        if any(_divides(g, m) for g in lms):
            continue
        out.append(m)
        for i in range(n):
            nm = m[:i] + (m[i] + 1,) + m[i + 1 :]
            if nm not in seen:
                seen.add(nm)
                frontier.append(nm)
    return sorted(out, key=DEGREVLEX.key)


def quotient_dimension(I: Ideal, caps: Caps = DEFAULT_CAPS):
    """dim_Q of k[x]/I, or ``INFINITE`` when I has positive Krull dimension."""
    hd = hilbert_data(I, caps)
    if hd.krull_dimension > 0:
        return INFINITE
    if hd.krull_dimension < 0:
        return 0
    return len(standard_monomials(I, caps))


def _power_of_maximal(ring: Ring, N: int) -> list[Poly]:
    out = []
    n = ring.nvars
    for combo in itertools.combinations_with_replacement(range(n), N):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(ring.monomial(e))
    return out


def origin_is_isolated(I: Ideal, caps: Caps = DEFAULT_CAPS) -> bool:
    """True when 0 is not in V(I) or is an isolated point of it."""
    if any(g.constant_term() for g in I.generators):
        return True
    if hilbert_data(I, caps).krull_dimension <= 0:
        return True
    m = maximal_ideal_at_origin(I.ring)
    return (saturate(I, m, caps) + m).is_unit(caps)


def local_multiplicity_at_origin(I: Ideal, caps: Caps = DEFAULT_CAPS, check_isolated: bool = True) -> int:
    """Length of the local ring of k[x]/I at the origin.

    Computed as dim k[x]/(I + m^N) for N = 1, 2, 4, ... until two consecutive
    values agree; equality at N and 2N forces m^N ⊆ I locally.
    """
    if any(g.constant_term() for g in I.generators):
        return 0
    if check_isolated and not origin_is_isolated(I, caps):
        raise NotIsolatedError("origin is not an isolated point; choose more generic coordinates")
    base = list(I.groebner(DEGREVLEX, caps).elements) if I.generators else []
    prev = None
    N = 1
    while N <= caps.max_power:
        val = quotient_dimension(Ideal(I.ring, base + _power_of_maximal(I.ring, N)), caps)
        if val == prev:
            return val
        prev = val
        N *= 2
    raise ResourceCapExceeded(f"local multiplicity did not stabilize up to m^{caps.max_power}")
