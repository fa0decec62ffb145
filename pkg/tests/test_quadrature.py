import itertools
import math

import numpy as np
import pytest

from holcliff.algebra import AlgebraConfig, Multivector
from holcliff.basisfun import NotHolomorphicError, p_alpha
from holcliff.kernels import KernelConstants
from holcliff.polynomial import MvPolynomial
from holcliff.quadrature import (
    DomainError,
    ResourceLimitError,
    all_alphas,
    boundary_integral,
    cauchy_reconstruct,
    reconstruction_rows,
    sphere_monomial_moment,
    sphere_rule,
    taylor_coefficients,
    taylor_resum,
)

CFG = AlgebraConfig(1)
X = MvPolynomial.paravector_var(CFG)
POINTS = [
    [0.2, 0.1, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.1, -0.3, 0.2, 0.1],
    [0.0, 0.0, 0.0, -0.5],
    [-0.2, 0.2, -0.2, 0.2],
]


@pytest.fixture(scope="module")
def rule24():
    return sphere_rule(1, 24)


def exact(f, x):
    return f.evaluate(np.array([x], dtype=float))[0]


# -- the rule ------------------------------------------------------------------------------

@pytest.mark.parametrize("m", [0, 1, 2])
def test_weights_sum_to_area(m):
    rule = sphere_rule(m, 8)
    area = float(KernelConstants(m).omega)
    assert math.isclose(rule.weights.sum(), area, rel_tol=1e-10)
    assert np.all(rule.weights > 0)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0)


def test_area_of_s3(rule24):
    assert math.isclose(rule24.weights.sum(), 2 * math.pi ** 2, rel_tol=1e-12)


def test_second_moment_by_symmetry(rule24):
    got = rule24.integrate(rule24.nodes[:, 0] ** 2)
    assert abs(got - 2 * math.pi ** 2 / 4) <= 1e-10


def test_odd_moment_vanishes(rule24):
    assert abs(rule24.integrate(rule24.nodes[:, 0] * rule24.nodes[:, 1])) <= 1e-12


@pytest.mark.parametrize("m,order", [(1, 6), (1, 9), (2, 4)])
def test_exact_on_all_monomials_up_to_order(m, order):
    rule = sphere_rule(m, order)
    dim = 2 * m + 2
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(dim), deg):
            exps = [combo.count(i) for i in range(dim)]
            vals = np.prod(rule.nodes ** np.array(exps), axis=1)
            want = sphere_monomial_moment(exps)
            got = rule.integrate(vals)
            assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_moment_oracle_against_area():
    assert math.isclose(sphere_monomial_moment([0, 0, 0, 0]), 2 * math.pi ** 2)
    assert sphere_monomial_moment([1, 0, 2, 0]) == 0.0


def test_node_cap():
    with pytest.raises(ResourceLimitError):
        sphere_rule(3, 40)


def test_order_must_be_positive():
    with pytest.raises(ValueError):
        sphere_rule(1, 0)


def test_integration_is_order_independent(rule24):
    rng = np.random.default_rng(0)
    vals = rng.normal(size=(rule24.node_count, 3))
    perm = rng.permutation(rule24.node_count)
    a = rule24.integrate(vals)
    b = type(rule24)(1, rule24.nodes[perm], rule24.weights[perm], 24).integrate(vals[perm])
    assert np.array_equal(a, b)


# -- reconstruction ---------------------------------------------------------------------------

def test_constant_at_origin(rule24):
    one = MvPolynomial.constant(CFG, 1)
    got = cauchy_reconstruct(one, np.zeros(4), rule24)
    want = np.zeros(8)
    want[0] = 1.0
    assert np.max(np.abs(got - want)) <= 1e-6


def test_cube_at_point(rule24):
    x = [0.2, 0.1, 0.0, 0.0]
    got = cauchy_reconstruct(X ** 3, x, rule24)
    assert np.max(np.abs(got - exact(X ** 3, x))) <= 1e-3


def test_convergence_for_square():
    f = X * X
    errs = [max(r.abs_error for r in reconstruction_rows("x2", f, POINTS, sphere_rule(1, q))) for q in (4, 8, 16)]
    assert errs[1] < errs[0] and errs[2] < errs[1]


def test_order_invariance_after_convergence():
    f = X ** 3
    a = cauchy_reconstruct(f, POINTS[2], sphere_rule(1, 32))
    b = cauchy_reconstruct(f, POINTS[2], sphere_rule(1, 48))
    assert np.max(np.abs(a - b)) <= 1e-9


def test_exterior_points_vanish(rule24):
    for x in ([1.5, 0, 0, 0], [1, 1, 1, 1], [0, 0, 0, 3.0]):
        assert np.max(np.abs(boundary_integral(X ** 3, x, rule24))) <= 1e-3


def test_linearity(rule24):
    f, g = X ** 2, p_alpha(CFG, (0, 1, 1, 0))
    b = Multivector.basis(CFG, 2) + Multivector.basis(CFG, 1) * Multivector.basis(CFG, 3)
    x = POINTS[2]
    lhs = cauchy_reconstruct(f * 3 + g * b, x, rule24)
    from holcliff.algebra import mv_product_array

    rhs = 3 * cauchy_reconstruct(f, x, rule24) + mv_product_array(CFG, cauchy_reconstruct(g, x, rule24), b.to_array())
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_domain_errors(rule24):
    with pytest.raises(DomainError):
        cauchy_reconstruct(X, [1.0, 0, 0, 0], rule24)
    with pytest.raises(DomainError):
        cauchy_reconstruct(X, [0.9, 0.9, 0, 0], rule24)
    with pytest.raises(DomainError):
        boundary_integral(X, [0, 1.0, 0, 0], rule24)


def test_rejects_non_holomorphic(rule24):
    x0 = MvPolynomial.coordinate(CFG, 0)
    with pytest.raises(NotHolomorphicError):
        cauchy_reconstruct(x0 ** 3, [0.1, 0, 0, 0], rule24)


def test_rule_must_match_algebra():
    with pytest.raises(ValueError):
        boundary_integral(X, [0.1, 0, 0, 0], sphere_rule(2, 4))


def test_m2_reconstruction():
    cfg = AlgebraConfig(2)
    f = MvPolynomial.paravector_var(cfg) ** 3
    rule = sphere_rule(2, 10)
    x = [0.1, -0.2, 0.1, 0.0, 0.05, 0.1]
    assert np.max(np.abs(cauchy_reconstruct(f, x, rule) - exact(f, x))) <= 1e-3


# -- Taylor coefficients ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def cube_coeffs(rule24):
    return taylor_coefficients(X ** 3, all_alphas(CFG, 5), rule24)


def test_coefficient_of_x(rule24):
    c = taylor_coefficients(X, [(2, 0, 0, 0)], rule24)[(2, 0, 0, 0)]
    # x = P_(2,0,0,0) but the dependent family shares the coefficient with P_(0,2,0,0) etc.
    assert c.shape == (8,)
    got = taylor_resum(CFG, taylor_coefficients(X, all_alphas(CFG, 2), rule24), POINTS[2])
    assert np.max(np.abs(got - exact(X, POINTS[2]))) <= 1e-10


def test_cube_resummation(cube_coeffs):
    top4 = {a: c for a, c in cube_coeffs.items() if sum(a) <= 4}
    for x in POINTS:
        assert np.max(np.abs(taylor_resum(CFG, top4, x) - exact(X ** 3, x))) <= 1e-3


def test_cube_higher_coefficients_vanish(cube_coeffs):
    assert max(np.max(np.abs(c)) for a, c in cube_coeffs.items() if sum(a) == 5) <= 1e-6


def test_low_degree_homogeneous_sums_vanish(rule24):
    # individual C_alpha need not vanish (the P_alpha are dependent) but each degree's sum does
    f = X * X + Multivector.basis(CFG, 3)
    coeffs = taylor_coefficients(f, all_alphas(CFG, 5), rule24)
    assert max(np.max(np.abs(c)) for a, c in coeffs.items() if sum(a) > 3) > 0.1
    for t in (4, 5):
        part = {a: c for a, c in coeffs.items() if sum(a) == t}
        for x in POINTS:
            assert np.max(np.abs(taylor_resum(CFG, part, x))) <= 1e-6


def test_taylor_needs_positive_index(rule24):
    with pytest.raises(ValueError):
        taylor_coefficients(X, [(0, 0, 0, 0)], rule24)
