import numpy as np
import pytest

from curvlab.errors import NullspaceError
from curvlab.metrics import CaseKind, CaseSpec, case_sample_points, default_case, default_cases
from curvlab.solver import (
    UNIVERSAL_COEFFICIENTS,
    ConstraintSystem,
    assemble_constraints,
    case_reduction,
    fuzz_verify,
    nullspace,
    recover_coefficients,
    reduce_relation,
)


def five_cases(points_v=5):
    cases = default_cases()
    spec_v = cases[4]
    return cases[:4] + [CaseSpec(spec_v.kind, spec_v.params, spec_v.points[:points_v])]


def test_row_count_with_three_v_points():
    system = assemble_constraints(five_cases(points_v=3))
    # 10 rows per constant-curvature case and per algebraic case, 10 per
    # conformal-product point
    assert len(system.rows) == 70


def test_case_i_row_values():
    system = assemble_constraints([default_case(CaseKind.I)])
    a, b = 1.0, 2.0
    row_11 = next(r for r in system.rows if r.provenance[3:] == (0, 0))
    expected = [
        4 * (a * a + b * b),
        2 * (a * a + b * b),
        4 * (a + b) ** 2,
        2 * a * a,
        a * a,
        2 * a * a,
        2 * a * (a + b),
        0.0,
        0.0,
        0.0,
    ]
    assert np.allclose(row_11.values, expected, atol=1e-9)


def test_case_iii_rows_proportional():
    system = assemble_constraints([default_case(CaseKind.III)])
    direction = np.array([24, 36, 144, 6, 9, 18, 36, 0, 0, 0], dtype=float)
    for row in system.rows:
        v = row.values
        if np.max(np.abs(v)) < 1e-9:
            continue  # off-diagonal components vanish
        coeff = v[0] / direction[0]
        assert np.allclose(v, coeff * direction, atol=1e-9)


def test_duplicate_provenance_rejected():
    system = ConstraintSystem()
    system.add_row(("x",), np.zeros(10))
    with pytest.raises(ValueError):
        system.add_row(("x",), np.ones(10))


def test_full_system_nullspace_dimension_one():
    system = assemble_constraints(five_cases())
    dim, basis, s = nullspace(system, tol=1e-8)
    assert dim == 1
    assert s[-2] / s[0] > 1e-6  # clear spectral gap above the nullspace
    assert s[-1] / s[0] < 1e-12


def test_nullspace_robust_to_doubling_points():
    system = assemble_constraints(five_cases(points_v=5) + [
        CaseSpec(CaseKind.V, {}, case_sample_points(CaseKind.V, 5, seed_base=99))
    ])
    dim, _, _ = nullspace(system, tol=1e-8)
    assert dim == 1


def test_cases_i_to_iii_nullspace():
    # the solution set {c3 = lam/4, 4c1 + 2c2 = -lam, c4 = -lam,
    # c5 + 2c6 = 4 lam} with c7 = -lam leaves five free directions: the
    # overall scale, the c5/c6 split, and c8, c9, c10.
    system = assemble_constraints(default_cases()[:3])
    dim, _, _ = nullspace(system)
    assert dim == 5


def test_cases_i_to_iv_nullspace():
    # Case IV separates c5 from c6 and pins c10, leaving {scale, c8, c9}
    system = assemble_constraints(default_cases()[:4])
    dim, _, _ = nullspace(system)
    assert dim == 3


def test_duplicated_rows_leave_nullspace_unchanged():
    cases = five_cases()
    once = assemble_constraints(cases)
    twice = assemble_constraints(cases + cases)
    d1, b1, _ = nullspace(once)
    d2, b2, _ = nullspace(twice)
    assert d1 == d2 == 1
    align = np.sign(b1[0] @ b2[0])
    assert np.max(np.abs(b1[0] - align * b2[0])) < 1e-10


def test_nullspace_rejects_degenerate_input():
    zero = ConstraintSystem()
    for k in range(12):
        zero.add_row((k,), np.zeros(10))
    with pytest.raises(ValueError):
        nullspace(zero)
    short = ConstraintSystem()
    for k in range(4):
        short.add_row((k,), np.ones(10))
    with pytest.raises(ValueError):
        nullspace(short)


def test_recover_universal_coefficients():
    report = recover_coefficients(assemble_constraints(five_cases()))
    assert report.nullspace_dimension == 1
    expected = np.array([0.25, -1.0, 0.25, -1.0, 2.0, 1.0, -1.0, 0.0, 0.0, 0.0])
    assert np.max(np.abs(report.coefficients - expected)) < 1e-6
    assert report.matches_universal
    assert report.coefficients[6] == -1.0
    assert report.max_relative_residual < 1e-10
    # every exact per-case relation is satisfied by the recovered vector
    assert max(abs(r[3]) for r in report.relation_residuals) < 1e-9


def test_recover_scale_invariance():
    system = assemble_constraints(five_cases())
    scaled = ConstraintSystem(cases=system.cases)
    for r in system.rows:
        scaled.add_row(r.provenance, 1000.0 * r.values, r.scale)
    a = recover_coefficients(system)
    b = recover_coefficients(scaled)
    assert np.max(np.abs(a.coefficients - b.coefficients)) < 1e-10


def test_recover_without_case_v_fails():
    with pytest.raises(NullspaceError) as err:
        recover_coefficients(assemble_constraints(default_cases()[:4]))
    assert err.value.dimension == 3
    assert len(err.value.singular_values) == 10


# -- case reductions -----------------------------------------------------------


def relation_set(kind):
    rels = case_reduction(default_case(kind))
    return {rel.coeffs for rel in rels}


def test_case_i_reduction():
    assert relation_set(CaseKind.I) == {
        (4, 2, 4, 2, 1, 2, 2, 0, 0, 0),
        (0, 0, 8, 0, 0, 0, 2, 0, 0, 0),
        (4, 2, 4, 0, 0, 0, 0, 0, 0, 0),
    }


def test_case_ii_reduction():
    # raw monomial coefficients; dividing by the content gives the
    # normalized forms (3,3,9,1,1,2,3) and (1,1,3)
    raw = relation_set(CaseKind.II)
    assert raw == {
        (12, 12, 36, 4, 4, 8, 12, 0, 0, 0),
        (12, 12, 36, 0, 0, 0, 0, 0, 0, 0),
    }
    assert {reduce_relation(r) for r in raw} == {
        (3, 3, 9, 1, 1, 2, 3, 0, 0, 0),
        (1, 1, 3, 0, 0, 0, 0, 0, 0, 0),
    }


def test_case_iii_reduction():
    raw = relation_set(CaseKind.III)
    assert raw == {(24, 36, 144, 6, 9, 18, 36, 0, 0, 0)}
    assert reduce_relation(next(iter(raw))) == (8, 12, 48, 2, 3, 6, 12, 0, 0, 0)


def test_case_iv_reduction():
    # the c10 column comes from the rough Laplacian of rho; its diagonal is
    # a^4 (16, -8, -4, -4) (the trace must vanish since tau is constant)
    assert relation_set(CaseKind.IV) == {
        (24, 12, 16, 6, 9, 2, 12, 0, 0, 16),
        (24, 12, 16, 6, 1, 2, -4, 0, 0, -8),
        (24, 12, 16, 6, 1, 10, 4, 0, 0, -4),
    }


def test_case_v_reduction_empty():
    assert case_reduction(default_case(CaseKind.V)) == []


def test_universal_vector_satisfies_all_relations():
    c = UNIVERSAL_COEFFICIENTS.c
    for kind in (CaseKind.I, CaseKind.II, CaseKind.III, CaseKind.IV):
        for rel in case_reduction(default_case(kind)):
            assert abs(np.dot(np.asarray(rel.coeffs, float), c)) < 1e-9


def test_relation_pretty_format():
    rels = case_reduction(default_case(CaseKind.III))
    assert rels[0].pretty() == (
        "+24*c1 +36*c2 +144*c3 +6*c4 +9*c5 +18*c6 +36*c7 = 0"
    )


# -- fuzzing ---------------------------------------------------------------------


def test_fuzz_deterministic():
    a = fuzz_verify(seed=11, trials=3, dim=4)
    b = fuzz_verify(seed=11, trials=3, dim=4)
    assert a == b


def test_fuzz_dim4_passes():
    report = fuzz_verify(seed=7, trials=5, dim=4)
    assert report.all_passed
    assert report.max_relative_residual <= 1e-7


def test_fuzz_dim5_violations():
    report = fuzz_verify(seed=7, trials=5, dim=5)
    assert all(t.passed is None for t in report.results)
    assert report.fraction_violating >= 0.8


def test_fuzz_dim2_report_only():
    report = fuzz_verify(seed=7, trials=2, dim=2)
    assert all(t.passed is None for t in report.results)
    assert report.max_relative_residual >= 0.0


def test_fuzz_validates_arguments():
    with pytest.raises(ValueError):
        fuzz_verify(seed=1, trials=0, dim=4)
    with pytest.raises(ValueError):
        fuzz_verify(seed=1, trials=1, dim=7)
