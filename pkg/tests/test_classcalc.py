from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lecalc.classcalc import (
    ClassVector,
    Stratum,
    StratumTable,
    aluffi_from_milnor,
    binom,
    c_inverse_cap,
    cap_c1,
    chi_from_strata,
    coeff_B,
    coeff_C,
    csm_from_fj_milnor,
    csm_from_polar,
    fj_degrees,
    gamma_from_mu,
    identity_checks,
    le_from_milnor,
    mather_from_polar,
    milnor_from_le,
    milnor_from_le_legacy,
    milnor_from_le_projective,
    pp_milnor,
    top_milnor_class,
)
from lecalc.errors import InputError

F = Fraction


def V(N: int, *coeffs) -> ClassVector:
    return ClassVector.of(N, coeffs)


PLANE_PAIR_LE = V(4, 0, 0, 1)
PLANE_PAIR_M = V(4, 1, 1, 1)


# -- vectors and caps ------------------------------------------------------


def test_class_vector_padding_and_support():
    v = V(4, 0, 2)
    assert v.coeffs == (0, 2, 0, 0, 0)
    assert v.support_dim == 1
    assert V(3).support_dim == -1
    assert v[7] == 0


def test_class_vector_rejects_wrong_length():
    with pytest.raises(InputError):
        ClassVector.of(1, (1, 2, 3))


def test_cap_c1_examples():
    assert cap_c1(V(4, 0, 0, 1), 2, 2) == V(4, 4)
    v = V(3, 1, F(1, 2), 3)
    assert cap_c1(v, 5, 0) == v
    assert cap_c1(V(3), 3, 2).is_zero()


def test_binomial_convention():
    assert binom(-1, 0) == 1
    assert [binom(-1, l) for l in range(1, 5)] == [0, 0, 0, 0]
    assert binom(4, 2) == 6
    assert binom(3, 5) == 0
    assert binom(3, -1) == 0


# -- coefficients ----------------------------------------------------------


def test_coeff_C_examples():
    assert coeff_C(2, 0, 2) == 1
    assert coeff_C(1, 1, 2) == F(-1, 2)
    assert coeff_C(0, 2, 2) == F(1, 4)


@pytest.mark.parametrize("k", range(5))
@pytest.mark.parametrize("d", range(1, 7))
def test_coeff_B_zero_shift_is_one(k, d):
    assert coeff_B(k, 0, d) == 1


def test_coeff_B_examples():
    assert coeff_B(1, 1, 2) == F(-1, 2)
    assert coeff_B(0, 2, 2) == F(-1, 4)


@pytest.mark.parametrize("d", range(1, 9))
def test_coeff_C_isolated_term(d):
    assert coeff_C(0, 0, d) == 1


def test_coefficients_are_inverse_matrices():
    # as triangular operators on vectors of length r+1 the two transforms invert
    for d in range(1, 7):
        for r in range(5):
            for i in range(r + 1):
                basis = V(r, *[int(j == i) for j in range(r + 1)])
                assert le_from_milnor(milnor_from_le(basis, d, r), d, r) == basis


# -- Le <-> Milnor ---------------------------------------------------------


def test_milnor_from_le_examples():
    assert milnor_from_le(PLANE_PAIR_LE, 2, 2) == PLANE_PAIR_M
    assert milnor_from_le(V(4), 2, 2).is_zero()
    for d in range(1, 6):
        assert milnor_from_le(V(3, 7), d, 0) == V(3, 7)


def test_le_from_milnor_examples():
    assert le_from_milnor(PLANE_PAIR_M, 2, 2) == PLANE_PAIR_LE
    assert le_from_milnor(V(4), 3, 2).is_zero()


def test_support_violation_rejected():
    with pytest.raises(InputError):
        milnor_from_le(V(4, 0, 0, 1), 2, 1)
    with pytest.raises(InputError):
        le_from_milnor(V(4, 0, 0, 0, 1), 2, 2)


def test_projective_route_examples():
    assert milnor_from_le_projective(PLANE_PAIR_LE, 2) == PLANE_PAIR_M
    assert milnor_from_le_projective(V(4), 2).is_zero()


@settings(max_examples=150, deadline=None)
@given(
    st.integers(0, 5),
    st.integers(1, 8),
    st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=6, max_size=6),
)
def test_round_trip_both_directions(r, d, raw):
    N = r + 1
    v = V(N, *raw[: r + 1])
    assert le_from_milnor(milnor_from_le(v, d, r), d, r) == v
    assert milnor_from_le(le_from_milnor(v, d, r), d, r) == v


@settings(max_examples=100, deadline=None)
@given(
    st.integers(2, 6),
    st.integers(1, 8),
    st.lists(st.integers(-9, 9), min_size=6, max_size=6),
)
def test_route_agreement(N, d, raw):
    dim_z = N - 1
    r = dim_z - 1
    le = V(N, *raw[: r + 1])
    assert milnor_from_le(le, d, r) == milnor_from_le_projective(le, d, dim_z)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 8), st.lists(st.integers(-9, 9), min_size=6, max_size=6))
def test_milnor_support_bound(r, d, raw):
    le = V(6, *raw[: r + 1])
    assert milnor_from_le(le, d, r).support_dim <= r


# -- legacy ----------------------------------------------------------------


def test_legacy_discrepancy_on_plane_pair():
    legacy = milnor_from_le_legacy(PLANE_PAIR_LE, 2, 2)
    assert legacy[0] == 4
    assert legacy != milnor_from_le(PLANE_PAIR_LE, 2, 2)


@pytest.mark.parametrize("mu", [0, 1, 5, F(7, 3)])
@pytest.mark.parametrize("d", range(1, 7))
def test_legacy_agrees_on_points(mu, d):
    v = V(4, mu)
    assert milnor_from_le_legacy(v, d, 0) == milnor_from_le(v, d, 0) == v


def test_legacy_zero():
    assert milnor_from_le_legacy(V(3), 2, 1).is_zero()


# -- polar / Mather / CSM --------------------------------------------------


@pytest.mark.parametrize("m", range(0, 7))
def test_mather_of_projective_space(m):
    polar = [0] * m + [1]
    assert mather_from_polar(polar, m, m) == V(m, *[comb(m + 1, k + 1) for k in range(m + 1)])


def test_mather_small_cases():
    assert mather_from_polar([1], 0, 3) == V(3, 1)
    assert mather_from_polar([0, 1], 1, 3) == V(3, 2, 1)
    # smooth conic: polar degrees (2, 2); c(T) = (1 + 2H)[C] -> chi = 2
    assert mather_from_polar([2, 2], 1, 2) == V(2, 2, 2)


def _smooth_table(m: int, eta=1) -> StratumTable:
    return StratumTable((Stratum("X", m, eta=F(eta), polar_degrees=tuple(F(0) for _ in range(m)) + (F(1),)),), m)


def test_csm_from_polar_examples():
    assert csm_from_polar(_smooth_table(2), 4) == V(4, 3, 3, 1)
    assert csm_from_polar(_smooth_table(0), 4) == V(4, 1)
    assert csm_from_polar(_smooth_table(2, eta=0), 4).is_zero()


def test_csm_from_polar_requires_fields():
    with pytest.raises(InputError, match="polar_degrees"):
        csm_from_polar(StratumTable((Stratum("X", 1, eta=F(1)),)), 2)


# -- FJ, CSM, Aluffi -------------------------------------------------------


@pytest.mark.parametrize("d, chi", [(1, 3), (2, 4), (3, 9), (4, 24)])
def test_fj_surfaces_in_p3(d, chi):
    assert fj_degrees(3, d)[0] == chi == d**3 - 4 * d**2 + 6 * d


def test_fj_matches_series_expansion():
    # (1+H)^(N+1) (1+dH)^-1 d[H^... ] computed term by term
    for N in range(1, 6):
        for d in range(1, 6):
            series = [sum(comb(N + 1, j) * (-d) ** (i - j) for j in range(i + 1)) for i in range(N)]
            expected = [d * series[N - 1 - k] for k in range(N)] + [0]
            assert list(fj_degrees(N, d).coeffs) == expected


def test_csm_from_fj_examples():
    assert csm_from_fj_milnor(fj_degrees(3, 2), V(3, 1), 2)[0] == 3
    fj = fj_degrees(3, 3)
    assert csm_from_fj_milnor(fj, V(3), 2) == fj
    assert csm_from_fj_milnor(fj_degrees(4, 2), PLANE_PAIR_M, 3)[0] == 5


def test_aluffi_examples():
    assert aluffi_from_milnor(PLANE_PAIR_M, 2) == V(4, 3, 3, 1)
    assert aluffi_from_milnor(V(4), 2).is_zero()
    assert aluffi_from_milnor(V(4, 6), 3) == V(4, 6)


def test_c_inverse_cap_is_inverse_of_c():
    v = V(4, 3, 3, 1)
    w = c_inverse_cap(v, 2)
    # multiply back by (1 + dH)
    assert aluffi_from_milnor(w, 2) == v


# -- strata ----------------------------------------------------------------


def plane_pair_table() -> StratumTable:
    return StratumTable((Stratum("S", 2, chiF=0, csm_closure=(F(3), F(3), F(1)), mu_perp=F(1), degree=F(1)),), 4, 3)


def cone_table() -> StratumTable:
    return StratumTable((Stratum("v", 0, mu=F(1), csm_closure=(F(1),)),), 3, 2)


def test_gamma_examples():
    t = StratumTable((Stratum("reg", 2, mu=F(0)), Stratum("pt", 0, parents=("reg",), mu=F(1))))
    assert gamma_from_mu(t) == {"reg": 0, "pt": 1}
    t = StratumTable((Stratum("S1", 1, mu=F(1)), Stratum("S", 0, parents=("S1",), mu=F(3))))
    assert gamma_from_mu(t) == {"S1": 1, "S": 2}
    t = StratumTable((Stratum("a", 1, mu=F(0)), Stratum("b", 0, parents=("a",), mu=F(0))))
    assert set(gamma_from_mu(t).values()) == {0}


def test_gamma_uses_all_ancestors():
    t = StratumTable(
        (
            Stratum("A", 2, mu=F(1)),
            Stratum("B", 1, parents=("A",), mu=F(1)),
            Stratum("C", 0, parents=("B",), mu=F(5)),
        )
    )
    assert gamma_from_mu(t) == {"A": 1, "B": 0, "C": 4}


def test_pp_milnor_examples():
    point = StratumTable((Stratum("p", 0, mu=F(1), csm_closure=(F(1),)),))
    assert pp_milnor(point, 3, 3) == V(3, 1)
    assert pp_milnor(plane_pair_table(), 2, 4) == PLANE_PAIR_M
    assert pp_milnor(StratumTable(()), 2, 4).is_zero()


def test_pp_milnor_matches_le_route():
    assert pp_milnor(plane_pair_table(), 2, 4) == milnor_from_le(PLANE_PAIR_LE, 2, 2)
    assert pp_milnor(cone_table(), 2, 3) == milnor_from_le(V(3, 1), 2, 0)


def test_pp_milnor_missing_csm():
    t = StratumTable((Stratum("p", 0, mu=F(1)),))
    with pytest.raises(InputError, match="csm"):
        pp_milnor(t, 2, 3)


def test_table_validation():
    with pytest.raises(InputError, match="cyclic"):
        StratumTable((Stratum("a", 1, parents=("b",)), Stratum("b", 1, parents=("a",))))
    with pytest.raises(InputError, match="unknown parent"):
        StratumTable((Stratum("a", 0, parents=("z",)),))
    with pytest.raises(InputError, match="duplicate"):
        StratumTable((Stratum("a", 0), Stratum("a", 1)))
    with pytest.raises(InputError, match="larger dimension"):
        StratumTable((Stratum("a", 1), Stratum("b", 1, parents=("a",))))


def test_top_milnor_class_examples():
    assert top_milnor_class(plane_pair_table(), 2, 4) == V(4, 0, 0, 1)
    pt = StratumTable((Stratum("p", 0, mu_perp=F(3), degree=F(1)),))
    assert top_milnor_class(pt, 0, 3) == V(3, 3)
    two = StratumTable((Stratum("a", 1, mu_perp=F(2), degree=F(1)), Stratum("b", 1, mu_perp=F(5), degree=F(1))))
    assert top_milnor_class(two, 1, 3) == V(3, 0, -7)


def test_top_milnor_class_matches_le_route():
    # M_r = (-1)^r Lambda_r in degree
    assert top_milnor_class(plane_pair_table(), 2, 4)[2] == milnor_from_le(PLANE_PAIR_LE, 2, 2)[2]


def test_chi_from_strata_examples():
    one = StratumTable((Stratum("s", 2, chi_stalk=F(1), chi_stratum=F(5)),))
    assert chi_from_strata(one) == 5
    two = StratumTable((Stratum("a", 1, chi_stalk=F(1), chi_stratum=F(2)), Stratum("b", 0, chi_stalk=F(3), chi_stratum=F(1))))
    assert chi_from_strata(two) == 5
    assert chi_from_strata(StratumTable(())) == 0


# -- identities ------------------------------------------------------------


def test_identities_pass():
    reports = identity_checks(12, 12)
    assert [r.name for r in reports] == ["alternating_binomial_sum", "kronecker_delta"]
    assert all(r.passed and r.checked > 0 for r in reports)


def test_identity_bounds():
    with pytest.raises(InputError):
        identity_checks(65, 3)


def test_kronecker_identity_spot_values():
    def lhs(s, m):
        return sum((-1) ** v * comb(s, v) * comb(v, m) for v in range(s + 1))

    assert lhs(3, 3) == -1
    assert lhs(4, 2) == 0
    assert lhs(2, 2) == 1


def test_seeded_round_trip_sample():
    rng = random.Random(2024)
    for _ in range(50):
        r = rng.randint(0, 5)
        d = rng.randint(1, 8)
        v = V(r, *[F(rng.randint(-50, 50), rng.randint(1, 12)) for _ in range(r + 1)])
        assert le_from_milnor(milnor_from_le(v, d, r), d, r) == v
