import math
from fractions import Fraction

import numpy as np
import pytest

from holcliff.algebra import AlgebraConfig, Paravector
from holcliff.kernels import (
    KernelConstants,
    PiRational,
    SingularityError,
    cauchy_kernel_E,
    exp_identity_pointcheck,
    inverse_laplacians,
    kernel_E_exact,
    kernel_N,
    laplacian_power_of_inverse,
    laurent_kernel_truncation,
    laurent_remainders,
    laurent_second_order_conventions,
    radial_ln_coefficient,
    radial_ln_laplacian,
    radial_route_inverse_laplacian,
    taylor_kernel_truncation,
    taylor_remainders,
)
from holcliff.polycalc import dirac
from holcliff.polynomial import MvPolynomial, RadialRational

CFG = AlgebraConfig(1)


# -- constants ----------------------------------------------------------------------------

def test_omega_is_sphere_area():
    for m in range(5):
        want = 2 * math.pi ** (m + 1) / math.gamma(m + 1)
        assert math.isclose(float(KernelConstants(m).omega), want, rel_tol=1e-14)


def test_c_values():
    assert KernelConstants(1).c == -4
    assert KernelConstants(2).c == 64


@pytest.mark.parametrize("m", range(5))
def test_constant_chain_exact(m):
    prod = KernelConstants(m).chain_product()
    assert prod.is_rational() and prod.coeff == 1
    assert math.isclose(float(prod), 1.0, rel_tol=1e-12)


@pytest.mark.parametrize("m", range(5))
def test_closed_form_epsilon_is_off_by_m_plus_one(m):
    k = KernelConstants(m)
    assert k.epsilon_closed_form.coeff == k.epsilon.coeff * (m + 1)
    assert k.chain_product(closed_form=True).coeff == m + 1


def test_pi_rational_arithmetic():
    a = PiRational(Fraction(3, 2), 2)
    assert (a * a.inverse()).is_rational()
    assert math.isclose(float(a / PiRational(Fraction(1), 1)), 1.5 * math.pi)


# -- float kernels --------------------------------------------------------------------------

def test_E_at_unit():
    for m in (0, 1, 2):
        cfg = AlgebraConfig(m)
        v = cauchy_kernel_E(cfg, Paravector(cfg, [1.0] + [0.0] * (cfg.dim - 1)))
        want = np.zeros(cfg.blade_count)
        want[0] = 1 / float(KernelConstants(m).omega)
        assert np.allclose(v, want)


def test_E_norm_scaling():
    rng = np.random.default_rng(1)
    omega = float(KernelConstants(1).omega)
    for _ in range(10):
        x = rng.normal(size=4)
        v = cauchy_kernel_E(CFG, x)
        assert math.isclose(np.linalg.norm(v) * np.linalg.norm(x) ** 3, 1 / omega, rel_tol=1e-12)


def test_E_complex_case():
    cfg = AlgebraConfig(0)
    z = np.array([0.3, -1.2])
    v = cauchy_kernel_E(cfg, z)
    want = np.conj(complex(*z)) / abs(complex(*z)) ** 2 / (2 * math.pi)
    assert np.allclose(v, [want.real, want.imag])


def test_N_complex_case():
    cfg = AlgebraConfig(0)
    z = np.array([0.3, -1.2])
    w = 1 / complex(*z) / (2 * math.pi)
    assert np.allclose(kernel_N(cfg, z), [w.real, w.imag])


def test_kernels_singular_at_zero():
    with pytest.raises(SingularityError):
        cauchy_kernel_E(CFG, np.zeros(4))
    with pytest.raises(SingularityError):
        kernel_N(CFG, np.zeros(4))


# -- exact chain ----------------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2])
def test_inverse_laplacian_power(m):
    cfg = AlgebraConfig(m)
    got = laplacian_power_of_inverse(cfg)
    assert got.k == m + 1
    xs = MvPolynomial.paravector_var(cfg, conjugate=True)
    assert got == RadialRational(xs * KernelConstants(m).c, m + 1)


def test_first_laplacian_of_inverse_m1():
    xs = MvPolynomial.paravector_var(CFG, conjugate=True)
    assert inverse_laplacians(CFG)[1] == RadialRational(xs * -4, 2)


@pytest.mark.parametrize("m", [1, 2])
def test_kernel_holomorphic(m):
    cfg = AlgebraConfig(m)
    assert dirac(inverse_laplacians(cfg)[-1]).is_zero()
    assert kernel_N(cfg).laplacian(m).dirac().is_zero()


@pytest.mark.parametrize("m", [1, 2])
def test_N_goes_to_E(m):
    cfg = AlgebraConfig(m)
    assert kernel_N(cfg).laplacian(m).equals(kernel_E_exact(cfg))
    pt = np.array([[0.3, -0.2, 0.5] + [0.1] * (cfg.dim - 3)])
    assert np.allclose(kernel_E_exact(cfg).evaluate(pt)[0], cauchy_kernel_E(cfg, pt[0]))


@pytest.mark.parametrize("m", [1, 2])
def test_radial_route(m):
    cfg = AlgebraConfig(m)
    assert radial_route_inverse_laplacian(cfg) == inverse_laplacians(cfg)[-1]


def test_radial_ln_examples():
    assert radial_ln_laplacian(1, 1) == 2
    assert radial_ln_laplacian(2, 2) == -16
    for m in range(1, 4):
        assert radial_ln_laplacian(m + 1, m) == 0
        for k in range(1, m + 2):
            assert radial_ln_laplacian(k, m) == radial_ln_coefficient(k, m)


# -- series ----------------------------------------------------------------------------------

def test_taylor_truncation():
    check = taylor_kernel_truncation(CFG, 3)
    assert check.all_match and sorted(check.matches) == [1, 2, 3]


def test_taylor_first_term():
    check = taylor_kernel_truncation(CFG, 1)
    ys = MvPolynomial.paravector_var(CFG, 8, 4, conjugate=True)
    assert check.terms[1] == RadialRational(ys, 1, 4)


def test_laurent_truncation():
    check = laurent_kernel_truncation(CFG, 3)
    assert check.all_match


def test_laurent_diagonal_convention():
    got = laurent_second_order_conventions(CFG)
    assert got == {
        "ordered_pairs": False,
        "unordered_pairs_with_diagonal": False,
        "unordered_pairs_diagonal_halved": True,
    }


def test_taylor_remainder_decay_example():
    x = np.array([0.0, 0.3, 0.0, 0.0])
    y = np.array([1.0, 0.0, 0.0, 0.0])
    rem = taylor_remainders(CFG, x, y, 8)
    ratios = [rem[i] / rem[i - 1] for i in range(1, len(rem))]
    assert all(0.15 <= r <= 0.6 for r in ratios)


def test_remainder_decay_random_pairs():
    rng = np.random.default_rng(11)
    for _ in range(10):
        x = rng.normal(size=4)
        y = rng.normal(size=4)
        x *= rng.uniform(0.1, 0.4) / np.linalg.norm(x)
        y /= np.linalg.norm(y)
        q = np.linalg.norm(x)
        t = taylor_remainders(CFG, x, y, 8)
        lr = laurent_remainders(CFG, y, x, 8)
        for n in range(2, 9):
            assert q / 2 <= t[n - 1] / t[n - 2] <= 2 * q
            assert q / 2 <= lr[n] / lr[n - 1] <= 2 * q


# -- exponential ------------------------------------------------------------------------------

def test_exp_identity_zero_lambda():
    assert exp_identity_pointcheck(CFG, 0.0, [0.2, 0.3, 0.0, 0.1]) <= 1e-15


def test_exp_identity_along_e1():
    assert exp_identity_pointcheck(CFG, 1.0, [0.3, 0.7, 0.0, 0.0]) <= 1e-12


def test_exp_identity_batch():
    rng = np.random.default_rng(4)
    worst = max(
        exp_identity_pointcheck(CFG, rng.uniform(-2, 2), rng.uniform(-1, 1, size=4)) for _ in range(1000)
    )
    assert worst <= 1e-10


def test_exp_identity_needs_vector_part():
    with pytest.raises(SingularityError):
        exp_identity_pointcheck(CFG, 1.0, [0.5, 0.0, 0.0, 0.0])
