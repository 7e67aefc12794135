import math

import numpy as np
import pytest

from curvlab.errors import GeometryError
from curvlab.geometry import (
    StructureConstants,
    christoffel,
    curvature_package,
    finite_difference_package,
    lie_group_package,
    ricci_tau,
    riemann,
    rough_laplacian_ricci,
    scalar_derivatives,
)
from curvlab.metrics import (
    CaseKind,
    case_sample_points,
    conformal_product,
    constant_curvature_surface,
    flat,
    parse_metric_file,
    product_surfaces,
    random_polynomial_metric,
    solvable_lie_algebra,
    space_form4,
    space_form_cross_line,
)
from curvlab.tensors import orthonormal_frame, to_orthonormal_frame, value_tensor

from conftest import central_derivative, max_rel


def frame_components_4(g, riem):
    """All-lower curvature against the Cholesky orthonormal frame."""
    e = orthonormal_frame(g)
    return np.einsum("ia,jb,kc,ld,ijkl->abcd", e, e, e, e, riem)


# -- Christoffel symbols --------------------------------------------------------


def test_flat_christoffels_vanish():
    gj = flat(4).jets_at([0.1, 0.2, 0.3, 0.4], order=3)
    gamma = christoffel(gj)
    vals = value_tensor(gamma).entries
    assert np.max(np.abs(vals)) == 0.0


def test_conformal_2d_christoffel():
    # for g = e^{2s} I in 2 coordinates, Gamma^1_11 = d1 s; here the chart
    # has s = x1^2 + x2^2 restricted to the first block
    patch = conformal_product()
    pt = np.array([0.3, -0.2, 0.1, 0.4])
    gamma = value_tensor(christoffel(patch.jets_at(pt, order=3))).entries
    d1s = 2 * pt[0]
    d2s = 2 * pt[1]
    assert abs(gamma[0, 0, 0] - d1s) < 1e-12
    assert abs(gamma[0, 0, 1] - d2s) < 1e-12
    assert abs(gamma[1, 0, 0] + d2s) < 1e-12
    # oracle: the Levi-Civita formula evaluated by finite differences
    def g11(p):
        return math.exp(2 * (p[0] ** 2 + p[1] ** 2))

    oracle = 0.5 / g11(pt) * central_derivative(g11, pt, (0,))
    assert abs(gamma[0, 0, 0] - oracle) < 1e-7


def test_christoffel_symmetric_in_lower_slots(rng):
    patch = random_polynomial_metric(5, 4, 3, 0.05)
    gamma = value_tensor(christoffel(patch.jets_at(rng.uniform(-0.3, 0.3, 4)))).entries
    assert np.max(np.abs(gamma - np.swapaxes(gamma, 1, 2))) == 0.0


def test_christoffel_rejects_non_spd():
    text = "dim = 2\ng[1][1] = -1\ng[2][2] = 1\n"
    bad = parse_metric_file(text)
    with pytest.raises(GeometryError):
        christoffel(bad.jets_at([0.0, 0.0], order=2))


def test_christoffel_rejects_order_zero():
    gj = flat(2).jets_at([0.0, 0.0], order=1)
    from curvlab.jets import jet_truncate

    trunc = np.empty((2, 2), dtype=object)
    for i in range(2):
        for j in range(2):
            trunc[i, j] = jet_truncate(gj[i, j], 0)
    with pytest.raises(ValueError):
        christoffel(trunc)


# -- Riemann tensor -------------------------------------------------------------


def test_flat_riemann_vanishes():
    r = value_tensor(riemann(flat(4).jets_at([0.5, -0.5, 0.25, 0.1], order=4)))
    assert np.max(np.abs(r.entries)) == 0.0


def test_sphere_chart_constant_curvature(rng):
    # stereographic-conformal 2-sphere of curvature a: orthonormal
    # R_1221 = a at 10 random chart points
    a = 1.7
    patch = constant_curvature_surface(a)
    for _ in range(10):
        pt = rng.uniform(-0.4, 0.4, 2)
        pkg = curvature_package(patch, pt)
        rn = frame_components_4(pkg.g, pkg.riemann.entries)
        assert abs(rn[0, 1, 1, 0] - a) < 1e-10


def test_space_form_sectional_curvatures():
    a = -1.25
    pkg = curvature_package(space_form4(a), [0.2, -0.1, 0.3, 0.25])
    rn = frame_components_4(pkg.g, pkg.riemann.entries)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert abs(rn[i, j, j, i] - a) < 1e-9


def test_riemann_symmetries_and_first_bianchi(rng):
    specs = [
        (product_surfaces(1.0, 2.0), 4),
        (space_form_cross_line(1.0), 4),
        (space_form4(1.0), 4),
        (conformal_product(), 4),
    ]
    for seed in range(8):
        specs.append((random_polynomial_metric(100 + seed, 4, 3, 0.05), 4))
    for patch, dim in specs:
        pt = rng.uniform(-0.3, 0.3, dim)
        r = curvature_package(patch, pt).riemann.entries
        scale = max(np.max(np.abs(r)), 1e-12)
        assert np.max(np.abs(r + np.swapaxes(r, 0, 1))) / scale < 1e-9
        assert np.max(np.abs(r + np.swapaxes(r, 2, 3))) / scale < 1e-9
        assert np.max(np.abs(r - np.transpose(r, (2, 3, 0, 1)))) / scale < 1e-9
        bianchi = r + np.transpose(r, (1, 2, 0, 3)) + np.transpose(r, (2, 0, 1, 3))
        assert np.max(np.abs(bianchi)) / scale < 1e-9


# -- Ricci and scalar curvature ---------------------------------------------------


def test_ricci_tau_flat():
    r = value_tensor(riemann(flat(4).jets_at(np.zeros(4), order=4)))
    rho, tau = ricci_tau(r, np.eye(4))
    assert np.max(np.abs(rho.entries)) == 0.0
    assert tau == 0.0


def test_ricci_sign_convention_sphere():
    # the contraction is pinned so the sphere gives rho = +a g (2 coords)
    a = 2.0
    pkg = curvature_package(constant_curvature_surface(a), [0.1, 0.3])
    assert np.max(np.abs(pkg.ricci.entries - a * pkg.g)) < 1e-10


def test_space_form_einstein():
    a = 0.8
    pkg = curvature_package(space_form4(a), [0.15, -0.2, 0.05, 0.1])
    assert np.max(np.abs(pkg.ricci.entries - 3 * a * pkg.g)) < 1e-9
    assert abs(pkg.tau - 12 * a) < 1e-9


def test_product_surfaces_ricci():
    a, b = 1.0, 2.0
    pkg = curvature_package(product_surfaces(a, b), [0.2, 0.1, -0.15, 0.3])
    rho_n = to_orthonormal_frame(pkg.g, pkg.ricci).entries
    assert np.allclose(rho_n, np.diag([a, a, b, b]), atol=1e-10)
    assert abs(pkg.tau - 2 * (a + b)) < 1e-10


def test_space_form_cross_line_ricci():
    a = 1.0
    pkg = curvature_package(space_form_cross_line(a), [0.2, 0.1, -0.15, 0.3])
    rho_n = to_orthonormal_frame(pkg.g, pkg.ricci).entries
    assert np.allclose(rho_n, np.diag([2 * a, 2 * a, 2 * a, 0.0]), atol=1e-10)


def test_tau_trace_consistency(rng):
    patch = random_polynomial_metric(42, 4, 3, 0.05)
    pkg = curvature_package(patch, rng.uniform(-0.3, 0.3, 4))
    assert abs(np.einsum("ij,ij->", pkg.g_inv, pkg.ricci.entries) - pkg.tau) < 1e-12


# -- scalar-curvature derivatives -------------------------------------------------


def test_constant_curvature_scalar_derivatives_vanish():
    for patch in (product_surfaces(1.0, 2.0), space_form_cross_line(1.0), space_form4(1.0)):
        grad, hess, lap = scalar_derivatives(patch.jets_at([0.1, 0.2, -0.1, 0.3], order=4))
        assert np.max(np.abs(grad)) < 1e-11
        assert np.max(np.abs(hess.entries)) < 1e-10
        assert abs(lap) < 1e-10


def test_conformal_product_laplacian_closed_form(rng):
    patch = conformal_product()
    for _ in range(5):
        pt = rng.uniform(-0.4, 0.4, 4)
        s1 = pt[0] ** 2 + pt[1] ** 2
        s2 = pt[2] ** 2 + pt[3] ** 2
        expected = -64 * (
            math.exp(-4 * s1) * (2 * s1 - 1) + math.exp(-4 * s2) * (2 * s2 - 1)
        )
        _, _, lap = scalar_derivatives(patch.jets_at(pt, order=4))
        assert abs(lap - expected) < 1e-8 * max(1.0, abs(expected))


def test_conformal_product_hessian_blocks(rng):
    # orthonormal Hess(tau) is block diagonal; the first block is
    # -32 e^{-4 s1} [[6 x1^2 - 2 x2^2 - 1, 8 x1 x2], [8 x1 x2, -2 x1^2 + 6 x2^2 - 1]]
    # and the second block is the same expression in (x3, x4, s2)
    patch = conformal_product()
    for _ in range(5):
        pt = rng.uniform(-0.4, 0.4, 4)
        pkg = curvature_package(patch, pt)
        h = to_orthonormal_frame(pkg.g, pkg.hess_tau).entries
        x1, x2, x3, x4 = pt
        s1 = x1 * x1 + x2 * x2
        s2 = x3 * x3 + x4 * x4
        block_a = -32 * math.exp(-4 * s1) * np.array(
            [[6 * x1 * x1 - 2 * x2 * x2 - 1, 8 * x1 * x2],
             [8 * x1 * x2, -2 * x1 * x1 + 6 * x2 * x2 - 1]]
        )
        block_b = -32 * math.exp(-4 * s2) * np.array(
            [[6 * x3 * x3 - 2 * x4 * x4 - 1, 8 * x3 * x4],
             [8 * x3 * x4, -2 * x3 * x3 + 6 * x4 * x4 - 1]]
        )
        assert max_rel(h[:2, :2], block_a) < 1e-10
        assert max_rel(h[2:, 2:], block_b) < 1e-10
        assert np.max(np.abs(h[:2, 2:])) < 1e-10


def test_hessian_trace_equals_laplacian(rng):
    for seed in (7, 8):
        patch = random_polynomial_metric(seed, 4, 3, 0.05)
        pkg = curvature_package(patch, rng.uniform(-0.3, 0.3, 4))
        trace = float(np.einsum("ij,ij->", pkg.g_inv, pkg.hess_tau.entries))
        assert abs(trace - pkg.lap_tau) <= 1e-10 * max(1.0, abs(pkg.lap_tau))


def test_contracted_second_bianchi(rng):
    # div rho = d tau / 2, checked through the jet path on random metrics
    for seed in (21, 22, 23):
        patch = random_polynomial_metric(seed, 4, 3, 0.05)
        pt = rng.uniform(-0.3, 0.3, 4)
        pkg = curvature_package(patch, pt)
        # finite differences of the Ricci field give nabla rho directly
        def rho_field(q):
            return curvature_package(patch, q).ricci.entries

        gamma = value_tensor(christoffel(patch.jets_at(pt, order=4))).entries
        rho = pkg.ricci.entries
        drho = np.stack([central_derivative(rho_field, pt, (a,), h=1e-2) for a in range(4)])
        nabla = (
            drho
            - np.einsum("mai,mj->aij", gamma, rho)
            - np.einsum("maj,im->aij", gamma, rho)
        )
        div = np.einsum("ab,abi->i", pkg.g_inv, nabla)
        target = 0.5 * pkg.grad_tau
        scale = max(np.max(np.abs(target)), np.max(np.abs(div)), 1e-10)
        assert np.max(np.abs(div - target)) / scale < 1e-6


def test_scalar_derivatives_requires_order_4():
    gj = space_form4(1.0).jets_at(np.zeros(4), order=3)
    with pytest.raises(ValueError):
        scalar_derivatives(gj)
    with pytest.raises(ValueError):
        rough_laplacian_ricci(gj)


# -- rough Laplacian of the Ricci tensor ------------------------------------------


def test_space_form_rough_laplacian_vanishes():
    for patch in (space_form4(1.0), product_surfaces(1.0, 2.0)):
        out = rough_laplacian_ricci(patch.jets_at([0.1, -0.2, 0.15, 0.05], order=4))
        assert np.max(np.abs(out.entries)) < 1e-9


def test_rough_laplacian_matches_finite_differences(rng):
    patch = random_polynomial_metric(77, 4, 3, 0.05)
    pt = rng.uniform(-0.25, 0.25, 4)
    jet_out = rough_laplacian_ricci(patch.jets_at(pt, order=4)).entries
    fd_out = finite_difference_package(patch, pt, h=1e-2).rough_lap_ricci.entries
    assert max_rel(jet_out, fd_out) < 1e-6


def test_rough_laplacian_trace_is_laplacian_of_tau(rng):
    # metric contraction commutes with covariant derivatives, so
    # g^ij (rough lap rho)_ij = lap tau; a sharp internal consistency check
    for seed in (31, 32):
        patch = random_polynomial_metric(seed, 4, 3, 0.05)
        pkg = curvature_package(patch, rng.uniform(-0.3, 0.3, 4))
        trace = float(np.einsum("ij,ij->", pkg.g_inv, pkg.rough_lap_ricci.entries))
        scale = max(abs(pkg.lap_tau), np.max(np.abs(pkg.rough_lap_ricci.entries)), 1e-10)
        assert abs(trace - pkg.lap_tau) / scale < 1e-9


# -- Lie-group path ---------------------------------------------------------------


def test_solvable_group_curvature_table():
    a = 1.0
    pkg = lie_group_package(solvable_lie_algebra(a, 1.0))
    r = pkg.riemann.entries
    a2 = a * a
    expected = {
        (0, 1, 0, 1): a2,
        (0, 2, 0, 2): a2,
        (0, 3, 0, 3): a2,
        (1, 2, 1, 2): -a2,
        (1, 3, 1, 3): -a2,
        (2, 3, 2, 3): a2,
    }
    for (i, j, k, l), v in expected.items():
        assert abs(r[i, j, k, l] - v) < 1e-12
    # everything else vanishes up to the dihedral symmetries of those entries
    seen = np.zeros_like(r, dtype=bool)
    for (i, j, k, l), v in expected.items():
        for (p, q, s, t), sign in {
            (i, j, k, l): 1, (j, i, k, l): -1, (i, j, l, k): -1, (j, i, l, k): 1,
            (k, l, i, j): 1, (l, k, i, j): -1, (k, l, j, i): -1, (l, k, j, i): 1,
        }.items():
            assert abs(r[p, q, s, t] - sign * v) < 1e-12
            seen[p, q, s, t] = True
    assert np.max(np.abs(r[~seen])) < 1e-12


def test_solvable_group_ricci_and_tau():
    a = 2.0
    pkg = lie_group_package(solvable_lie_algebra(a, 0.5))
    a2 = a * a
    assert np.allclose(pkg.ricci.entries, np.diag([-3 * a2, a2, -a2, -a2]), atol=1e-12)
    assert abs(pkg.tau + 4 * a2) < 1e-12
    assert pkg.lap_tau == 0.0
    assert np.max(np.abs(pkg.grad_tau)) == 0.0
    assert np.max(np.abs(pkg.hess_tau.entries)) == 0.0


def test_solvable_group_rough_laplacian():
    # the trace of the rough Laplacian of rho must equal lap tau = 0, which
    # forces the (1,1) entry to be 16 a^4: the diagonal is
    # a^4 (16, -8, -4, -4).  Direct frame computation: with p_k the nonzero
    # covariant-derivative components of rho, the (1,1) entry is
    # 2 sum_k lambda_k p_k = 2 (4 + 2 + 2) a^4.
    for a in (1.0, 1.5):
        pkg = lie_group_package(solvable_lie_algebra(a, 1.0))
        a4 = a**4
        expected = a4 * np.diag([16.0, -8.0, -4.0, -4.0])
        assert np.allclose(pkg.rough_lap_ricci.entries, expected, atol=1e-10 * a4)
        assert abs(np.trace(pkg.rough_lap_ricci.entries)) < 1e-10 * a4


def test_solvable_group_independent_of_b():
    base = lie_group_package(solvable_lie_algebra(1.0, 1.0))
    for b in (0.0, 3.0, -2.0):
        other = lie_group_package(solvable_lie_algebra(1.0, b))
        assert np.max(np.abs(other.riemann.entries - base.riemann.entries)) < 1e-12
        assert (
            np.max(np.abs(other.rough_lap_ricci.entries - base.rough_lap_ricci.entries))
            < 1e-12
        )


def test_abelian_algebra_is_flat():
    sc = StructureConstants(4, np.zeros((4, 4, 4)), np.eye(4))
    pkg = lie_group_package(sc)
    assert np.max(np.abs(pkg.riemann.entries)) == 0.0
    assert pkg.tau == 0.0
    assert np.max(np.abs(pkg.rough_lap_ricci.entries)) == 0.0


def test_jacobi_violation_rejected():
    c = np.zeros((3, 3, 3))
    # [e1,e2] = e3 and [e2,e3] = e2 leave [[e2,e3],e1] = [e2,e1] = -e3
    # uncancelled in the cyclic sum
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
    c[1, 1, 2], c[1, 2, 1] = 1.0, -1.0
    with pytest.raises(ValueError, match="Jacobi"):
        StructureConstants(3, c, np.eye(3))


def test_so3_left_invariant_round_metric():
    # genuine Jacobi-satisfying brackets: [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2;
    # the bi-invariant metric has constant sectional curvature 1/4
    c = np.zeros((3, 3, 3))
    c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0
    c[1, 2, 0], c[1, 0, 2] = 1.0, -1.0
    pkg = lie_group_package(StructureConstants(3, c, np.eye(3)))
    r = pkg.riemann.entries
    for i in range(3):
        for j in range(3):
            if i != j:
                assert abs(r[i, j, j, i] - 0.25) < 1e-12
    assert np.allclose(pkg.ricci.entries, 0.5 * np.eye(3), atol=1e-12)


# -- finite-difference oracle -----------------------------------------------------


def test_fd_flat_is_exact():
    pkg = finite_difference_package(flat(4), [0.3, 0.1, -0.2, 0.4], h=0.05)
    assert np.max(np.abs(pkg.riemann.entries)) == 0.0
    assert pkg.tau == 0.0
    assert np.max(np.abs(pkg.rough_lap_ricci.entries)) == 0.0


def test_fd_step_size_sweep(rng):
    # self-consistency: every step size in the sweep reproduces the jet
    # package (for a degree-3 metric the truncation error vanishes, so the
    # estimates agree across h and only rounding noise remains)
    patch = random_polynomial_metric(55, 4, 3, 0.05)
    pt = rng.uniform(-0.2, 0.2, 4)
    jet_pkg = curvature_package(patch, pt)
    devs = []
    for h in (1e-1, 3e-2, 1e-2):
        fd = finite_difference_package(patch, pt, h=h)
        devs.append(max_rel(jet_pkg.rough_lap_ricci.entries, fd.rough_lap_ricci.entries))
    assert max(devs) < 1e-6


def test_fd_case_v_matches_closed_form():
    # h balances truncation (the metric is analytic, not polynomial) against
    # rounding; 5e-3 puts the combined error under 1e-6 relative
    pt = np.array([0.3, 0.1, 0.2, 0.4])
    fd = finite_difference_package(conformal_product(), pt, h=5e-3)
    s1 = pt[0] ** 2 + pt[1] ** 2
    s2 = pt[2] ** 2 + pt[3] ** 2
    expected = -64 * (math.exp(-4 * s1) * (2 * s1 - 1) + math.exp(-4 * s2) * (2 * s2 - 1))
    assert abs(fd.lap_tau - expected) < 1e-6 * abs(expected)


def test_fd_agrees_with_jets_on_random_metrics(rng):
    fields = ("g", "g_inv", "riemann", "ricci", "tau", "grad_tau", "hess_tau",
              "lap_tau", "rough_lap_ricci")
    for seed in (61, 62, 63):
        patch = random_polynomial_metric(seed, 4, 3, 0.05)
        pt = rng.uniform(-0.25, 0.25, 4)
        a = curvature_package(patch, pt)
        b = finite_difference_package(patch, pt, h=1e-2)
        for name in fields:
            va = getattr(a, name)
            vb = getattr(b, name)
            va = va.entries if hasattr(va, "entries") else np.atleast_1d(va)
            vb = vb.entries if hasattr(vb, "entries") else np.atleast_1d(vb)
            assert max_rel(va, vb, floor=1.0) < 1e-5, name


def test_fd_rejects_bad_step():
    with pytest.raises(ValueError):
        finite_difference_package(flat(4), np.zeros(4), h=0.0)


# -- package-level checks ----------------------------------------------------------


def test_flat_package_is_zero():
    pkg = curvature_package(flat(4), [0.7, -0.3, 0.2, 0.9])
    assert np.max(np.abs(pkg.riemann.entries)) == 0.0
    assert np.max(np.abs(pkg.ricci.entries)) == 0.0
    assert pkg.tau == 0.0
    assert pkg.lap_tau == 0.0
    assert np.max(np.abs(pkg.rough_lap_ricci.entries)) == 0.0


def test_conformal_product_tau_at_unit_point():
    # sigma1 = 1, sigma2 = 0 there, so tau = -8 e^{-2} - 8
    pkg = curvature_package(conformal_product(), [1.0, 0.0, 0.0, 0.0])
    assert abs(pkg.tau - (-8 * math.exp(-2.0) - 8.0)) < 1e-10


def test_package_rejects_non_spd_point():
    text = "dim = 2\ng[1][1] = 1 - 4*x1^2\ng[2][2] = 1\n"
    patch = parse_metric_file(text)
    with pytest.raises(GeometryError):
        curvature_package(patch, [0.6, 0.0])


def test_gamma_frame_scalars_match_closed_forms():
    # scalars are frame-independent: engine values at catalog points equal
    # the per-case closed forms
    pkg = curvature_package(space_form_cross_line(2.0), [0.1, 0.05, -0.2, 0.3])
    assert abs(pkg.tau - 12.0) < 1e-9  # 6a with a = 2
    pt = np.array([0.25, -0.15, 0.05, 0.2])
    pkg_v = curvature_package(conformal_product(), pt)
    s1 = pt[0] ** 2 + pt[1] ** 2
    s2 = pt[2] ** 2 + pt[3] ** 2
    assert abs(pkg_v.tau - (-8 * math.exp(-2 * s1) - 8 * math.exp(-2 * s2))) < 1e-9
