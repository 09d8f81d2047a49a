import pytest

from keyvariety.catalog import build_case
from keyvariety.invariants import (BudgetExceeded, bracket_dimension,
                                   ci_degree, count_points, estimate_dimension,
                                   grassmann_degree, hilbert_ci_degree,
                                   singular_scan, two_path_count_check)
from keyvariety.projspace import proj_point_count

# frozen by exhaustive scans; regression-guarded here
FROZEN_COUNTS = {
    ("g4_sigma_bar", 2): 6527, ("g4_sigma_bar", 3): 401_314,
    ("g5_sigma_bar", 2): 11_775,
    ("g6q_sigma_bar", 2): 1471, ("g6q_sigma_bar", 3): 39_001,
    ("g6c_sigma_bar", 2): 703, ("g6c_sigma_bar", 3): 12_757,
    ("g8_sigma_bar", 2): 91, ("g8_sigma_bar", 3): 481,
}


def test_ci_degree_examples():
    assert ci_degree((2, 3)) == 6 == 2 * 4 - 2
    assert ci_degree((2, 2, 2)) == 8 == 2 * 5 - 2
    assert ci_degree((2,)) == 2
    with pytest.raises(ValueError):
        ci_degree(())
    with pytest.raises(ValueError):
        ci_degree((2, 0))


@pytest.mark.parametrize("degrees,ambient", [
    ((2, 3), 5), ((2, 3), 13), ((2, 2, 2), 6), ((2, 2, 2), 15),
    ((2,), 4), ((3, 3), 7), ((2, 2, 3), 9),
])
def test_hilbert_oracle_agrees(degrees, ambient):
    assert hilbert_ci_degree(degrees, ambient) == ci_degree(degrees)


def test_grassmann_degree_values():
    assert grassmann_degree(4) == 2
    assert grassmann_degree(5) == 5
    assert grassmann_degree(6) == 14
    assert 2 * grassmann_degree(5) == 10 == 2 * 6 - 2
    assert grassmann_degree(6) == 2 * 8 - 2


def test_grassmann_degree_range():
    # the enumeration itself asserts agreement with the hook-length form
    for n in range(4, 9):
        assert grassmann_degree(n) >= 1
    with pytest.raises(ValueError):
        grassmann_degree(3)


def test_bracket_dimension():
    assert bracket_dimension(7, 2, 10) == 2
    assert bracket_dimension(6, 2, 10) == 1   # below #P^2(F_2)
    assert bracket_dimension(0, 2, 10) == -1
    for d in range(6):
        assert bracket_dimension(proj_point_count(d, 3), 3, 10) == d


def test_estimate_dimension_projective_space():
    spec = build_case("Q3_g6q")
    est = estimate_dimension(spec, (2, 3))
    assert est.estimated_dim == 3 and est.consistent
    assert est.counts == {2: 15, 3: 40}  # odd quadrics count like P^3


def test_estimate_dimension_g8():
    est = estimate_dimension(build_case("g8_sigma_bar"), (2, 3))
    assert est.estimated_dim == 5 and est.consistent
    assert est.counts[2] == 91 and est.counts[3] == 481


def test_estimate_dimension_budget():
    with pytest.raises(BudgetExceeded):
        estimate_dimension(build_case("g5_sigma_bar"), (13,), budget=10**6)


@pytest.mark.parametrize("case,p", list(FROZEN_COUNTS))
def test_frozen_counts(case, p):
    if (case, p) == ("g5_sigma_bar", 3):
        pytest.skip("covered by the acceptance suite")
    assert count_points(build_case(case), p, threads=4) == FROZEN_COUNTS[(case, p)]


def test_two_path_agreement_g6c():
    direct, transformed = two_path_count_check(build_case("g6c_sigma_bar"), 3)
    assert direct == transformed == 12_757


@pytest.mark.parametrize("case,expected_sing", [
    ("g4_sigma_bar", 1151), ("g5_sigma_bar", 1575), ("g6q_sigma_bar", 151)])
def test_singular_scan_equality_p2(case, expected_sing):
    spec = build_case(case)
    rep = singular_scan(spec, spec.rank_locus, 2, threads=4)
    assert rep.sets_equal is True
    assert rep.symmetric_difference_sample == ()
    assert rep.jacobian_singular.count == rep.rank_locus.count == expected_sing


def test_g8_singular_set_is_projected_veronese():
    from keyvariety.incidence import projected_veronese_points
    spec = build_case("g8_sigma_bar")
    for p in (2, 3):
        rep = singular_scan(spec, None, p, threads=4, sample_cap=4 * p * p)
        veronese, _ = projected_veronese_points(p)
        embedded = {tuple(v) + (0,) * 7 for v in veronese}
        assert set(rep.jacobian_singular.sample) == embedded
        assert rep.jacobian_singular.count == p * p + p + 1


def test_singular_scan_g6c_containment_p2():
    spec = build_case("g6c_sigma_bar")
    rep = singular_scan(spec, None, 2, threads=4)
    assert rep.sets_equal is None and rep.rank_locus is None
    assert rep.containment_plane == "Pibar"
    assert rep.containment_holds is True
    assert rep.jacobian_singular.count == 87


def test_g6q_dual_vertex_plane_is_singular():
    # every point with z = x = 0 is Jacobian-singular and in the rank locus
    from keyvariety.algebra import PointAffineRep, jacobian_rank
    from keyvariety.catalog import rank_locus_member
    from keyvariety.projspace import ScanPlan, enumerate_points

    spec = build_case("g6q_sigma_bar")
    codim = spec.ambient_dim - spec.expected_dim
    for y in enumerate_points(ScanPlan(4, 2)):
        pt = PointAffineRep((0,) * 9 + y.coords)
        assert jacobian_rank(list(spec.generators), pt, 2) < codim
        assert rank_locus_member(spec.rank_locus, pt, 2)
