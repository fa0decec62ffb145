import random

import pytest

from holcliff.algebra import AlgebraConfig
from holcliff.polycalc import is_holomorphic_cliffordian
from holcliff.polynomial import MvPolynomial
from holcliff.verify import (
    GROUPS,
    VerifyConfig,
    random_holomorphic,
    random_polynomial,
    run_suite,
    shrink,
    suite_passed,
)

FINDINGS = {"p_alpha_derivative_formula_repeated", "constant_chain_closed_form"}


@pytest.fixture(scope="module")
def default_results():
    return run_suite(VerifyConfig(m=1, samples=20))


def test_default_suite_passes(default_results):
    bad = [(r.name, r.detail) for r in default_results if r.failed]
    assert suite_passed(default_results), bad


def test_every_group_reports(default_results):
    assert {r.group for r in default_results} == set(GROUPS)
    assert all(r.cases >= 1 for r in default_results)


def test_known_findings_are_flagged_not_failed(default_results):
    by_name = {r.name: r for r in default_results}
    for name in FINDINGS:
        assert by_name[name].status == "finding"
        assert by_name[name].counterexample is not None
    assert {r.name for r in default_results if r.status == "finding"} == FINDINGS


def test_m2_suite_passes():
    results = run_suite(VerifyConfig(m=2, max_degree=4, samples=5))
    assert suite_passed(results), [(r.name, r.detail) for r in results if r.failed]


def test_fault_is_detected():
    results = run_suite(VerifyConfig(m=1, samples=10, fault=(1, 2)), groups=("polycalc",))
    failed = [r for r in results if r.failed]
    assert failed
    assert all(r.counterexample for r in failed)


def test_same_seed_same_report():
    a = [r.to_dict() for r in run_suite(VerifyConfig(samples=8, seed=3), groups=("polycalc",))]
    b = [r.to_dict() for r in run_suite(VerifyConfig(samples=8, seed=3), groups=("polycalc",))]
    assert a == b


def test_group_selection_does_not_shift_cases():
    full = {r.name: r.to_dict() for r in run_suite(VerifyConfig(samples=5, seed=1))}
    only = {r.name: r.to_dict() for r in run_suite(VerifyConfig(samples=5, seed=1), groups=("kernels",))}
    assert all(full[k] == v for k, v in only.items())


def test_shrinker_reaches_single_term():
    cfg = AlgebraConfig(1)
    p = random_polynomial(cfg, random.Random(0), 4, 6) + MvPolynomial.coordinate(cfg, 2) * 5

    def fails(q):
        return any(exps[2] >= 1 for exps, _ in q.terms)

    small = shrink(p, fails)
    assert len(small.terms) == 1
    assert fails(small)
    assert all(abs(c) == 1 for c in small.terms.values())


def test_shrinker_keeps_minimal_input():
    cfg = AlgebraConfig(1)
    p = MvPolynomial.coordinate(cfg, 0)
    assert shrink(p, lambda q: not q.is_zero()) == p


def test_random_polynomial_respects_degree():
    cfg = AlgebraConfig(2)
    rng = random.Random(5)
    for _ in range(30):
        p = random_polynomial(cfg, rng, 3)
        assert p.is_zero() or p.degree() <= 3


def test_random_holomorphic_is_holomorphic():
    cfg = AlgebraConfig(1)
    rng = random.Random(7)
    for _ in range(10):
        assert is_holomorphic_cliffordian(random_holomorphic(cfg, rng, 3))
