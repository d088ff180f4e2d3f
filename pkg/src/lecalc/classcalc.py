"""Exact calculus of classes in projective space.

A class is stored by its degrees: coefficient ``a_k`` is the degree of the
k-dimensional part, i.e. its intersection number with a generic linear space
of complementary dimension.  Capping with c_1(O(d)) multiplies the degree by
d and lowers the dimension by one, which turns every transform between Lê,
Milnor, Fulton-Johnson, Schwartz-MacPherson, Mather and Aluffi classes into
rational linear algebra on these vectors.

Sign conventions: M(Z) = (-1)^dim Z (c^FJ - c^SM).  In binomials with a
negative upper entry only C(-1, 0) = 1 is non-zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter
from math import comb
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import InputError

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class ClassVector:
    ambient_dim: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if self.ambient_dim < 0:
            raise InputError("ambient dimension must be non-negative")
        if len(coeffs) != self.ambient_dim + 1:
            raise InputError(f"class vector in P^{self.ambient_dim} needs {self.ambient_dim + 1} coefficients")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, N: int) -> "ClassVector":
        return cls(N, (Fraction(0),) * (N + 1))

    @classmethod
    def of(cls, N: int, coeffs: Iterable[Rational]) -> "ClassVector":
        """Pad ``coeffs`` (a_0, a_1, ...) with zeros up to length N + 1."""
        c = [Fraction(x) for x in coeffs]
        if len(c) > N + 1:
            if any(c[N + 1 :]):
                raise InputError(f"class has components above dimension {N}")
            c = c[: N + 1]
        return cls(N, tuple(c + [Fraction(0)] * (N + 1 - len(c))))

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k <= self.ambient_dim else Fraction(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: "ClassVector") -> None:
        if other.ambient_dim != self.ambient_dim:
            raise InputError("class vectors live in different ambient spaces")

    def __add__(self, other: "ClassVector") -> "ClassVector":
        self._check(other)
        return ClassVector(self.ambient_dim, tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "ClassVector") -> "ClassVector":
        self._check(other)
        return ClassVector(self.ambient_dim, tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "ClassVector":
        return ClassVector(self.ambient_dim, tuple(-a for a in self))

    def scale(self, c: Rational) -> "ClassVector":
        return ClassVector(self.ambient_dim, tuple(a * c for a in self))

    @property
    def support_dim(self) -> int:
        """Largest k with a_k != 0, or -1 for the zero class."""
        return max((k for k, a in enumerate(self.coeffs) if a), default=-1)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def trimmed(self) -> tuple[Fraction, ...]:
        return self.coeffs[: self.support_dim + 1]

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def _require_support(v: ClassVector, r: int, what: str = "class") -> None:
    if v.support_dim > r:
        raise InputError(f"{what} has a component in dimension {v.support_dim} > {r}")


def binom(n: int, k: int) -> int:
    """Binomial coefficient, combinatorial extension: zero outside 0 <= k <= n except C(-1, 0) = 1."""
    if k < 0:
        return 0
    if n < 0:
        return 1 if k == 0 else 0
    return comb(n, k) if k <= n else 0


def cap_c1(v: ClassVector, d: int, s: int) -> ClassVector:
    """c_1(O(d))^s ∩ v: (·)_k = d^s v_{k+s}."""
    if s < 0 or s > v.ambient_dim:
        raise InputError("power of c_1 out of range")
    f = Fraction(d) ** s
    return ClassVector(v.ambient_dim, tuple(f * v[k + s] for k in range(v.ambient_dim + 1)))


def _check_degree(d: int) -> None:
    if int(d) != d or d < 1:
        raise InputError("bundle degree d must be a positive integer")


@lru_cache(maxsize=None)
def coeff_C(k: int, s: int, d: int) -> Fraction:
    if k < 0 or s < 0:
        raise InputError("coefficient indices must be non-negative")
    _check_degree(d)
    dd = Fraction(d)
    total = Fraction(0)
    for l in range(s + 1):
        total += (-1) ** l * binom(l + k - 1, l) * ((dd - 1) ** (s + 1 - l) + (-1) ** (s - l)) / dd ** (s + 1)
    return total


@lru_cache(maxsize=None)
def coeff_B(k: int, s: int, d: int) -> Fraction:
    if k < 0 or s < 0:
        raise InputError("coefficient indices must be non-negative")
    _check_degree(d)
    ratio = Fraction(d - 1, d)
    total = Fraction(0)
    for l in range(s + 1):
        total += (-1) ** (s - l) * binom(k + s, k + l) * binom(k + 1 + l, k + 1) * ratio**l
    return total


def milnor_from_le(le: ClassVector, d: int, r: int) -> ClassVector:
    """M_k = (-1)^k Σ_{s=0}^{r-k} C_{k,s}(d) d^s Λ_{k+s}."""
    _check_degree(d)
    _require_support(le, r, "Lê class")
    N = le.ambient_dim
    out = []
    for k in range(N + 1):
        if k > r:
            out.append(Fraction(0))
            continue
        out.append((-1) ** k * sum((coeff_C(k, s, d) * d**s * le[k + s] for s in range(r - k + 1)), Fraction(0)))
    return ClassVector(N, tuple(out))


def le_from_milnor(milnor: ClassVector, d: int, r: int) -> ClassVector:
    """Λ_k = (-1)^k Σ_{s=0}^{r-k} B_{k,s}(d) d^s M_{k+s}."""
    _check_degree(d)
    _require_support(milnor, r, "Milnor class")
    N = milnor.ambient_dim
    out = []
    for k in range(N + 1):
        if k > r:
            out.append(Fraction(0))
            continue
        out.append((-1) ** k * sum((coeff_B(k, s, d) * d**s * milnor[k + s] for s in range(r - k + 1)), Fraction(0)))
    return ClassVector(N, tuple(out))


def milnor_from_le_projective(le: ClassVector, d: int, dim_z: Optional[int] = None) -> ClassVector:
    """Projective route: M_k = Σ_j Σ_{i>=k+j} (-1)^(i+j) C(i+1, k+j+1) d^j Λ_i."""
    _check_degree(d)
    N = le.ambient_dim
    if dim_z is None:
        dim_z = N - 1
    _require_support(le, dim_z - 1, "Lê class")
    out = []
    for k in range(N + 1):
        total = Fraction(0)
        for j in range(N + 1):
            for i in range(k + j, N + 1):
                if le[i]:
                    total += (-1) ** (i + j) * binom(i + 1, k + j + 1) * Fraction(d) ** j * le[i]
        out.append(total)
    return ClassVector(N, tuple(out))


def milnor_from_le_legacy(le: ClassVector, d: int, r: int) -> ClassVector:
    """The uncorrected formula M_k = Σ_l (-1)^(l+k) C(l+k, k) d^l Λ_{l+k}.

    Kept to document the correction: it disagrees with :func:`milnor_from_le`
    as soon as the Lê class has positive-dimensional components.
    """
    _check_degree(d)
    _require_support(le, r, "Lê class")
    N = le.ambient_dim
    out = []
    for k in range(N + 1):
        total = Fraction(0)
        for l in range(0, r - k + 1):
            total += (-1) ** (l + k) * binom(l + k, k) * Fraction(d) ** l * le[l + k]
        out.append(total)
    return ClassVector(N, tuple(out))


def mather_from_polar(polar_degrees: Sequence[Rational], dim: int, N: int) -> ClassVector:
    """Mather class degrees from polar degrees: c_k = Σ_i (-1)^(dim-i) C(i+1, k+1) deg P_i."""
    if len(polar_degrees) != dim + 1:
        raise InputError(f"need {dim + 1} polar degrees for a {dim}-dimensional variety")
    if dim > N:
        raise InputError("variety dimension exceeds ambient dimension")
    p = [Fraction(x) for x in polar_degrees]
    out = [Fraction(0)] * (N + 1)
    for k in range(dim + 1):
        out[k] = sum(((-1) ** (dim - i) * binom(i + 1, k + 1) * p[i] for i in range(k, dim + 1)), Fraction(0))
    return ClassVector(N, tuple(out))


def fj_degrees(N: int, d: int) -> ClassVector:
    """Fulton-Johnson class of a degree-d hypersurface: (1+H)^{N+1} (1+dH)^{-1} ∩ d[P^{N-1}]."""
    if N < 1:
        raise InputError("ambient dimension must be at least 1")
    _check_degree(d)
    out = [Fraction(0)] * (N + 1)
    for k in range(N):
        out[k] = Fraction(d * sum(comb(N + 1, j) * (-d) ** (N - 1 - k - j) for j in range(N - k)))
    return ClassVector(N, tuple(out))


def csm_from_fj_milnor(fj: ClassVector, milnor: ClassVector, dim_z: int) -> ClassVector:
    """c^SM = c^FJ - (-1)^dim Z M."""
    return fj - milnor.scale((-1) ** dim_z)


def aluffi_from_milnor(milnor: ClassVector, d: int) -> ClassVector:
    """α = c(L) ∩ M with c(L) = 1 + c_1(L): α_k = M_k + d M_{k+1}."""
    _check_degree(d)
    return milnor + cap_c1(milnor, d, 1)


def c_inverse_cap(v: ClassVector, d: int) -> ClassVector:
    """c(O(d))^{-1} ∩ v = Σ_j (-d H)^j ∩ v."""
    N = v.ambient_dim
    out = []
    for k in range(N + 1):
        out.append(sum((Fraction(-d) ** j * v[k + j] for j in range(N - k + 1)), Fraction(0)))
    return ClassVector(N, tuple(out))


# --------------------------------------------------------------------------
# stratified data


@dataclass(frozen=True)
class Stratum:
    id: str
    dim: int
    parents: tuple[str, ...] = ()
    mu: Optional[Fraction] = None
    chiF: Optional[int] = None
    eta: Optional[Fraction] = None
    csm_closure: Optional[tuple[Fraction, ...]] = None
    polar_degrees: Optional[tuple[Fraction, ...]] = None
    mu_perp: Optional[Fraction] = None
    degree: Optional[Fraction] = None  # deg of the closure
    chi_stalk: Optional[Fraction] = None  # χ(F_S) on the stratum
    chi_stratum: Optional[Fraction] = None  # χ(S)


@dataclass(frozen=True)
class StratumTable:
    strata: tuple[Stratum, ...]
    ambient_dim: Optional[int] = None
    dim_z: Optional[int] = None

    def __post_init__(self):
        ids = [s.id for s in self.strata]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate stratum ids")
        by_id = {s.id: s for s in self.strata}
        for s in self.strata:
            for p in s.parents:
                if p not in by_id:
                    raise InputError(f"stratum {s.id!r}: unknown parent {p!r}")
        try:
            order = list(TopologicalSorter({s.id: set(s.parents) for s in self.strata}).static_order())
        except CycleError as exc:
            raise InputError(f"cyclic closure relation: {exc.args[1]}") from None
        for s in self.strata:
            for p in s.parents:
                if by_id[p].dim <= s.dim:
                    raise InputError(f"stratum {s.id!r}: parent {p!r} must have larger dimension")
        object.__setattr__(self, "_order", tuple(order))

    def by_id(self) -> dict[str, Stratum]:
        return {s.id: s for s in self.strata}

    def topological_order(self) -> tuple[str, ...]:
        """Ids ordered so that every stratum follows all strata whose closure contains it."""
        return self._order

    def ancestors(self, sid: str) -> set[str]:
        table = self.by_id()
        seen: set[str] = set()
        stack = list(table[sid].parents)
        while stack:
            p = stack.pop()
            if p not in seen:
                seen.add(p)
                stack.extend(table[p].parents)
        return seen

    def require(self, fields: Sequence[str], where: Optional[Iterable[Stratum]] = None) -> None:
        for s in where if where is not None else self.strata:
            for f in fields:
                if getattr(s, f) is None:
                    raise InputError(f"stratum {s.id!r}: missing field {f!r}")


def local_milnor_number(stratum: Stratum, dim_z: Optional[int]) -> Fraction:
    """μ_S as given, or (-1)^dim Z (χ(F) - 1) from the Milnor fibre Euler characteristic."""
    if stratum.mu is not None:
        return Fraction(stratum.mu)
    if stratum.chiF is not None:
        if dim_z is None:
            raise InputError(f"stratum {stratum.id!r}: dim Z needed to turn chiF into mu")
        return Fraction((-1) ** dim_z * (stratum.chiF - 1))
    raise InputError(f"stratum {stratum.id!r}: missing field 'mu' (or 'chiF')")


def gamma_from_mu(table: StratumTable, dim_z: Optional[int] = None) -> dict[str, Fraction]:
    """γ_S = μ_S - Σ_{S' ≠ S, closure(S') ⊃ S} γ_{S'}, from the top strata down."""
    dim_z = dim_z if dim_z is not None else table.dim_z
    strata = table.by_id()
    gamma: dict[str, Fraction] = {}
    for sid in table.topological_order():
        mu = local_milnor_number(strata[sid], dim_z)
        gamma[sid] = mu - sum((gamma[a] for a in table.ancestors(sid)), Fraction(0))
    return {s.id: gamma[s.id] for s in table.strata}


def pp_milnor(table: StratumTable, d: int, N: int, dim_z: Optional[int] = None) -> ClassVector:
    """Stratified Milnor class M = Σ_S γ_S c(L)^{-1} ∩ c^SM(closure S)."""
    _check_degree(d)
    dim_z = dim_z if dim_z is not None else (table.dim_z if table.dim_z is not None else N - 1)
    gamma = gamma_from_mu(table, dim_z)
    total = ClassVector.zero(N)
    for s in table.strata:
        g = gamma[s.id]
        if not g:
            continue
        if s.csm_closure is None:
            raise InputError(f"stratum {s.id!r}: missing field 'csm' (needed since gamma != 0)")
        total = total + c_inverse_cap(ClassVector.of(N, s.csm_closure), d).scale(g)
    return total


def csm_from_polar(table: StratumTable, N: int) -> ClassVector:
    """c_k^SM(β) = Σ_α η_α Σ_{i=k}^{d_α} (-1)^(d_α - i) C(i+1, k+1) deg P_i(closure S_α)."""
    table.require(["eta", "polar_degrees"])
    total = ClassVector.zero(N)
    for s in table.strata:
        if not s.eta:
            continue
        total = total + mather_from_polar(s.polar_degrees, s.dim, N).scale(s.eta)
    return total


def closure_degree(s: Stratum) -> Fraction:
    if s.degree is not None:
        return Fraction(s.degree)
    if s.polar_degrees is not None:
        return Fraction(s.polar_degrees[s.dim])
    raise InputError(f"stratum {s.id!r}: missing field 'degree' (or 'polar')")


def top_milnor_class(table: StratumTable, r: int, N: int) -> ClassVector:
    """M_r = Σ_{dim S = r} (-1)^r μ^⊥(S) deg(closure S), placed in dimension r."""
    top = [s for s in table.strata if s.dim == r]
    table.require(["mu_perp"], top)
    value = sum(((-1) ** r * Fraction(s.mu_perp) * closure_degree(s) for s in top), Fraction(0))
    out = [Fraction(0)] * (N + 1)
    out[r] = value
    return ClassVector(N, tuple(out))


def chi_from_strata(table: StratumTable) -> Fraction:
    """χ(X, F) = Σ_S χ(F_S) χ(S)."""
    table.require(["chi_stalk", "chi_stratum"])
    return sum((Fraction(s.chi_stalk) * Fraction(s.chi_stratum) for s in table.strata), Fraction(0))


# --------------------------------------------------------------------------
# combinatorial identities


@dataclass
class IdentityReport:
    name: str
    checked: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def identity_checks(kmax: int, lmax: int) -> list[IdentityReport]:
    """Check the alternating-sum identity and the Kronecker identity on all indices in range.

    1. Σ_{j=0}^{l} (-1)^j C(l+k+1, j+k+1) = C(l+k, k)          for 0 <= k <= kmax, 0 <= l <= lmax
    2. Σ_{v=m}^{s} (-1)^v C(s, v) C(v, m) = (-1)^m δ_{s,m}       for 0 <= m <= kmax, 0 <= s <= lmax
    """
    if not (0 <= kmax <= 64 and 0 <= lmax <= 64):
        raise InputError("identity bounds must lie in 0..64")
    alt = IdentityReport("alternating_binomial_sum")
    for k in range(kmax + 1):
        for l in range(lmax + 1):
            lhs = sum((-1) ** j * comb(l + k + 1, j + k + 1) for j in range(l + 1))
            rhs = comb(l + k, k)
            alt.checked += 1
            if lhs != rhs and len(alt.failures) < 1:
                alt.failures.append({"k": k, "l": l, "lhs": lhs, "rhs": rhs})
    kron = IdentityReport("kronecker_delta")
    for m in range(kmax + 1):
        for s in range(lmax + 1):
            lhs = sum((-1) ** v * comb(s, v) * comb(v, m) for v in range(m, s + 1))
            rhs = (-1) ** m * (1 if s == m else 0)
            kron.checked += 1
            if lhs != rhs and len(kron.failures) < 1:
                kron.failures.append({"m": m, "s": s, "lhs": lhs, "rhs": rhs})
    return [alt, kron]
