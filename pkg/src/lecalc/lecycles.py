"""Relative polar varieties, Lê cycles and Lê numbers of a polynomial germ.

For coordinates z_0..z_n the polar variety Γ^k is V(∂_k h, ..., ∂_n h) with
every component inside the critical locus removed (a saturation by the
Jacobian ideal).  The Lê cycle Λ^k is [Γ^{k+1} ∩ V(∂_k h)] - [Γ^k], and the
Lê number λ^k is its intersection number at the origin with
V(z_0, ..., z_{k-1}).

Genericity of the coordinates is certified rather than assumed: a frame is
accepted only if every polar variety and every intersection has its expected
dimension and every slice meets the origin in an isolated point.  Otherwise a
fresh unimodular integer frame is drawn from a seeded generator.
"""

from __future__ import annotations

import logging
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .classcalc import ClassVector
from .errors import ConsistencyError, GenericityError, InputError, NotIsolatedError
from .ideals import (
    DEFAULT_CAPS,
    Caps,
    Ideal,
    hilbert_data,
    local_multiplicity_at_origin,
    origin_is_isolated,
    poly_gcd,
    quotient_dimension,
    saturate,
    unit_ideal,
)
from .polyring import Matrix, Poly, dehomogenize, jacobian, linear_change

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class GermInput:
    h: Poly
    coordinates: Optional[Matrix] = None
    seed: int = 0
    caps: Caps = DEFAULT_CAPS
    randomize: bool = False  # skip the given (or identity) frame and start with random ones


@dataclass(frozen=True)
class PolarEntry:
    k: int
    ideal: Ideal
    dimension: int
    degree: int


@dataclass(frozen=True)
class PolarData:
    gamma: tuple[PolarEntry, ...]  # k = 1..n


@dataclass(frozen=True)
class LeData:
    lambda_degrees: tuple[int, ...]  # degrees of the affine cycles Λ^0..Λ^n
    le_numbers: tuple[int, ...]  # λ^0..λ^d at the origin
    sigma_dimension: int  # dim_0 Σ(h), -1 when the origin is a smooth point

    @property
    def nvars(self) -> int:
        return len(self.lambda_degrees)


@dataclass(frozen=True)
class Check:
    name: str
    k: int
    expected: str
    observed: str
    ok: bool


@dataclass
class GenericityCertificate:
    matrix: tuple[tuple[int, ...], ...]
    checks: list[Check] = field(default_factory=list)
    attempts: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    def first_failure(self) -> Optional[Check]:
        return next((c for c in self.checks if not c.ok), None)


class _FrameRejected(Exception):
    def __init__(self, check: Check):
        self.check = check
        super().__init__(f"{check.name}[k={check.k}]: expected {check.expected}, got {check.observed}")


# --------------------------------------------------------------------------
# coordinate frames


def identity_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def random_unimodular(n: int, rng: random.Random, bound: int) -> tuple[tuple[int, ...], ...]:
    """L·U·P with unit-triangular integer factors (entries in [-bound, bound]) and a permutation."""
    lower = [[int(i == j) if j >= i else rng.randint(-bound, bound) for j in range(n)] for i in range(n)]
    upper = [[int(i == j) if j <= i else rng.randint(-bound, bound) for j in range(n)] for i in range(n)]
    prod = [[sum(lower[i][k] * upper[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    perm = list(range(n))
    rng.shuffle(perm)
    return tuple(tuple(prod[i][perm[j]] for j in range(n)) for i in range(n))


def random_dense_unimodular(n: int, rng: random.Random, bound: int) -> tuple[tuple[int, ...], ...]:
    """Like :func:`random_unimodular` but resampled until no entry is zero."""
    while True:
        m = random_unimodular(n, rng, bound)
        if all(all(row) for row in m):
            return m


def _frames(n: int, g: GermInput):
    rng = random.Random(g.seed)
    if not g.randomize:
        if g.coordinates is not None:
            yield tuple(tuple(row) for row in g.coordinates)
        else:
            yield identity_matrix(n)
    bound = 1
    while True:
        yield random_unimodular(n, rng, bound)
        bound += 1


# --------------------------------------------------------------------------
# basic constructions


def critical_ideal(h: Poly) -> Ideal:
    return Ideal(h.ring, jacobian(h))


def polar_ideal(h: Poly, k: int, caps: Caps = DEFAULT_CAPS, jac: Optional[Ideal] = None) -> Ideal:
    """Ideal of Γ^k: saturate((∂_k h, ..., ∂_n h), Jacobian(h)).

    ``h`` must already be written in the coordinates of interest.
    """
    n1 = h.ring.nvars
    if not 0 < k <= n1 - 1:
        raise InputError(f"polar index must satisfy 0 < k <= {n1 - 1}")
    partials = jacobian(h)
    jac = jac if jac is not None else Ideal(h.ring, partials)
    return saturate(Ideal(h.ring, partials[k:]), jac, caps)


def has_repeated_factor(h: Poly, caps: Caps = DEFAULT_CAPS) -> bool:
    """gcd(h, ∂_0 h, ..., ∂_n h) is non-constant iff h has a repeated factor (char 0)."""
    g = h
    for p in jacobian(h):
        if p.is_zero():
            continue
        g = poly_gcd(g, p, caps)
        if g.is_constant():
            return False
    return not g.is_constant()


def _coord_ideal(h: Poly, k: int) -> list[Poly]:
    return h.ring.gens()[:k]


# --------------------------------------------------------------------------
# one frame


def _dim_ok(dim: int, k: int) -> bool:
    return dim in (k, -1)


def _degree_in_dim(ideal: Ideal, k: int, caps: Caps, level: Optional[Poly] = None) -> int:
    """Degree of the k-dimensional part of V(ideal); with ``level``, only components inside V(level)."""
    hd = hilbert_data(ideal, caps)
    if hd.krull_dimension != k:
        return 0
    if level is None:
        return hd.degree
    # top-dimensional degree is additive over primary components, and saturating
    # by the level function removes exactly those inside its zero set
    off = hilbert_data(saturate(ideal, level, caps), caps)
    return hd.degree - (off.degree if off.krull_dimension == k else 0)


def _analyze_frame(hf: Poly, caps: Caps, local: bool, cert: GenericityCertificate):
    """Polar and Lê data of ``hf`` in the given coordinates.

    In local mode the Lê numbers at the origin are computed as well. Otherwise the
    cycle degrees are restricted to components inside V(hf), which discards the
    critical loci of other level sets of an affine chart.
    """
    ring = hf.ring
    n1 = ring.nvars
    n = n1 - 1
    partials = jacobian(hf)
    jac = Ideal(ring, partials)

    def check(name, k, expected, observed, ok):
        c = Check(name, k, expected, str(observed), ok)
        cert.checks.append(c)
        if not ok:
            raise _FrameRejected(c)

    gamma: dict[int, Ideal] = {0: unit_ideal(ring), n1: Ideal(ring, [])}
    entries = []
    for k in range(n, 0, -1):
        ideal = saturate(Ideal(ring, partials[k:]), jac, caps)
        hd = hilbert_data(ideal, caps)
        check("polar_dimension", k, f"{k} or empty", hd.krull_dimension, _dim_ok(hd.krull_dimension, k))
        gamma[k] = ideal
        entries.append(PolarEntry(k, ideal, hd.krull_dimension, hd.degree))
    entries.reverse()

    lam_deg = []
    inter: dict[int, Ideal] = {}
    for k in range(0, n1):
        a = gamma[k + 1] + [partials[k]]
        inter[k] = a
        hd_a = hilbert_data(a, caps)
        check("intersection_dimension", k, f"{k} or empty", hd_a.krull_dimension, _dim_ok(hd_a.krull_dimension, k))
        level = None if local else hf
        deg_a = _degree_in_dim(a, k, caps, level)
        deg_g = _degree_in_dim(gamma[k], k, caps, level)
        if deg_a < deg_g:
            raise ConsistencyError(f"negative Lê cycle degree at k={k}: {deg_a} - {deg_g}")
        lam_deg.append(deg_a - deg_g)

    le_numbers: tuple[int, ...] = ()
    d = -1
    if local:
        if any(p.constant_term() for p in partials):
            d = -1
        else:
            for k in range(0, n1 + 1):
                if origin_is_isolated(jac + _coord_ideal(hf, k), caps):
                    d = k
                    break
        nums = []
        for k in range(0, d + 1):
            lin = _coord_ideal(hf, k)
            s1 = inter[k] + lin
            s2 = gamma[k] + lin
            iso1 = origin_is_isolated(s1, caps)
            check("slice_isolated", k, "origin isolated", "yes" if iso1 else "no", iso1)
            iso2 = origin_is_isolated(s2, caps)
            check("polar_slice_isolated", k, "origin isolated", "yes" if iso2 else "no", iso2)
            m1 = local_multiplicity_at_origin(s1, caps, check_isolated=False)
            m2 = local_multiplicity_at_origin(s2, caps, check_isolated=False)
            if m1 < m2:
                raise ConsistencyError(f"negative Lê number at k={k}: {m1} - {m2}")
            nums.append(m1 - m2)
        le_numbers = tuple(nums)
    return PolarData(tuple(entries)), LeData(tuple(lam_deg), le_numbers, d)


def _search(h: Poly, g: GermInput, local: bool):
    n1 = h.ring.nvars
    last: Optional[GenericityCertificate] = None
    for attempt, matrix in enumerate(_frames(n1, g), start=1):
        if attempt > g.caps.attempts:
            break
        cert = GenericityCertificate(matrix=matrix, attempts=attempt)
        hf = linear_change(h, matrix)
        try:
            polar, le = _analyze_frame(hf, g.caps, local, cert)
        except (_FrameRejected, NotIsolatedError) as exc:
            log.debug("frame %d rejected: %s", attempt, exc)
            last = cert
            continue
        return polar, le, cert, hf
    failure = last.first_failure() if last else None
    detail = f"; last failing check: {failure.name}[k={failure.k}] expected {failure.expected}, got {failure.observed}" if failure else ""
    raise GenericityError(f"genericity not achieved after {g.caps.attempts} attempts{detail}")


def le_analysis(g: GermInput) -> tuple[PolarData, LeData, GenericityCertificate]:
    """Polar data, Lê cycle degrees and Lê numbers of ``g.h`` at the origin in a certified frame."""
    h = g.h
    if h.is_zero() or h.is_constant():
        raise InputError("germ must be a non-constant polynomial")
    if h.constant_term() != 0:
        raise InputError("germ condition h(0) = 0 violated")
    notes = []
    if has_repeated_factor(h, g.caps):
        msg = "h has a repeated factor (non-reduced); Lê data refer to the non-reduced germ"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    polar, le, cert, _ = _search(h, g, local=True)
    cert.notes.extend(notes)
    return polar, le, cert


def euler_char_milnor_fiber(le: LeData, n: Optional[int] = None) -> int:
    """χ(F_{h,0}) = 1 + Σ_k (-1)^(n-k) λ^k with n = (number of variables) - 1."""
    if n is None:
        n = le.nvars - 1
    return 1 + sum((-1) ** (n - k) * lam for k, lam in enumerate(le.le_numbers))


# --------------------------------------------------------------------------
# projective hypersurfaces


@dataclass
class ProjectiveLeResult:
    classes: ClassVector  # Λ_k(Z) degrees, k = 0..N
    degree: int
    sing_dimension: int  # dim Z_sing, -1 when smooth
    chart: Optional[Poly] = None
    certificate: Optional[GenericityCertificate] = None
    polar: Optional[PolarData] = None
    le: Optional[LeData] = None
    chart_milnor_total: Optional[int] = None


def _no_singular_component_at_infinity(jac: Ideal, caps: Caps) -> bool:
    """Every point of V(J) on {x_N = 0} lies in the closure of the affine part."""
    ring = jac.ring
    xN = ring.var(ring.nvars - 1)
    at_infinity = jac + [xN]
    affine_closure = saturate(jac, xN, caps)
    for b in affine_closure.generators:
        if at_infinity.contains(b, caps):
            continue
        # b must vanish on V(J, x_N) as a projective set
        if hilbert_data(saturate(at_infinity, b, caps), caps).krull_dimension > 0:
            return False
    return True


def projective_le_classes(
    H: Poly,
    N: Optional[int] = None,
    seed: int = 0,
    caps: Caps = DEFAULT_CAPS,
) -> ProjectiveLeResult:
    """Global Lê class degrees of Z = V(H) ⊂ P^N from one certified affine chart."""
    if N is None:
        N = H.ring.nvars - 1
    if H.ring.nvars != N + 1:
        raise InputError(f"P^{N} needs {N + 1} homogeneous coordinates, ring has {H.ring.nvars}")
    if H.is_zero() or H.is_constant() or not H.is_homogeneous():
        raise InputError("H must be a non-constant homogeneous polynomial")
    if has_repeated_factor(H, caps):
        raise InputError("H is not reduced (has a repeated factor)")
    d = H.total_degree()
    jac = critical_ideal(H)
    r = hilbert_data(jac, caps).projective_dimension
    zero = ClassVector.zero(N)
    if r < 0:
        return ProjectiveLeResult(zero, d, -1)

    # Dimension checks alone cannot see every special position of the chart
    # coordinates, so a frame is only trusted once a second, independently
    # drawn frame reproduces its classes.
    rng = random.Random(seed)
    last: Optional[GenericityCertificate] = None
    previous: Optional[ProjectiveLeResult] = None
    for attempt in range(1, caps.attempts + 1):
        matrix = random_dense_unimodular(N + 1, rng, attempt + 1)
        Hc = linear_change(H, matrix)
        cert = GenericityCertificate(matrix=matrix, attempts=attempt)
        ok = _no_singular_component_at_infinity(critical_ideal(Hc), caps)
        cert.checks.append(Check("chart_at_infinity", N, "no Z_sing component at infinity", "ok" if ok else "fail", ok))
        if not ok:
            last = cert
            continue
        h = dehomogenize(Hc, N)
        try:
            polar, le = _analyze_frame(h, caps, local=False, cert=cert)
        except _FrameRejected:
            last = cert
            continue
        coeffs = list(le.lambda_degrees) + [0]
        if any(c for c in coeffs[r + 1 :]):
            # a class above dim Z_sing can only come from a special chart
            cert.checks.append(Check("support", r, f"classes vanish above {r}", "fail", False))
            last = cert
            continue
        total = None
        if r == 0:
            cj = critical_ideal(h)
            total = quotient_dimension(cj, caps) - quotient_dimension(saturate(cj, h, caps), caps)
        current = ProjectiveLeResult(
            ClassVector(N, tuple(Fraction(c) for c in coeffs)), d, r, h, cert, polar, le, total
        )
        if previous is not None and previous.classes == current.classes:
            previous.certificate.checks.append(
                Check("frame_agreement", N, "classes reproduced by a second frame", f"attempt {attempt}", True)
            )
            previous.certificate.attempts = attempt
            return previous
        if previous is not None:
            log.debug("frames disagree: %s vs %s", previous.classes, current.classes)
            last = previous.certificate
            last.checks.append(Check("frame_agreement", N, "classes reproduced by a second frame", "disagree", False))
        previous = current
    failure = last.first_failure() if last else None
    detail = f"; last failing check: {failure.name}[k={failure.k}]" if failure else ""
    raise GenericityError(f"chart genericity not achieved after {caps.attempts} attempts{detail}")
