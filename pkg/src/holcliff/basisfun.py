"""Permutational-product solution families and expansion in the P_alpha basis.

``P_alpha`` is the sum, over distinct arrangements of the multiset holding
e_i with multiplicity alpha_i, of ``(e_s1 x)(e_s2 x)...(e_s{k-1} x) e_sk``.
``S_beta`` is the singular analogue built from ``x^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import comb, factorial, prod
from typing import Iterator, Sequence

import numpy as np
from more_itertools import distinct_permutations

from .algebra import AlgebraConfig, Multivector, mv_product_array, paravector_array, right_mul_matrix
from .linalg import ExactSolver, InconsistentSystemError
from .polycalc import holomorphy_residual, is_holomorphic_cliffordian
from .polynomial import MvPolynomial, RadialRational, exponent_vectors

MultiIndex = tuple[int, ...]


class NotHolomorphicError(ValueError):
    """Input polynomial is not holomorphic Cliffordian."""

    def __init__(self, message: str, residual: MvPolynomial):
        super().__init__(message)
        self.residual = residual


def multi_indices(cfg: AlgebraConfig, total: int) -> list[MultiIndex]:
    """All alpha in N^{2m+2} with |alpha| = total, lexicographically descending."""
    return list(exponent_vectors(cfg.dim, total))


def _check_index(cfg: AlgebraConfig, alpha: Sequence[int]) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != cfg.dim or any(a < 0 for a in alpha):
        raise ValueError(f"multi-index must have {cfg.dim} non-negative entries, got {alpha}")
    return alpha


def arrangements(alpha: MultiIndex) -> Iterator[tuple[int, ...]]:
    """Distinct orderings of the multiset {i repeated alpha_i times}."""
    items = [i for i, a in enumerate(alpha) for _ in range(a)]
    return distinct_permutations(items)


def arrangement_count(alpha: MultiIndex) -> int:
    return factorial(sum(alpha)) // prod(factorial(a) for a in alpha)


def p_alpha(cfg: AlgebraConfig, alpha: Sequence[int], nvars: int | None = None, offset: int = 0) -> MvPolynomial:
    alpha = _check_index(cfg, alpha)
    if sum(alpha) == 0:
        raise ValueError("P_alpha needs |alpha| >= 1")
    x = MvPolynomial.paravector_var(cfg, nvars, offset)
    nv = x.nvars
    factors = {i: Multivector.basis(cfg, i) * x for i in range(cfg.dim)}
    acc = MvPolynomial.zero(cfg, nv)
    for seq in arrangements(alpha):
        term = MvPolynomial.constant(cfg, 1, nv)
        for i in seq[:-1]:
            term = term * factors[i]
        acc = acc + term * Multivector.basis(cfg, seq[-1])
    return acc


def derivative_constant(alpha: MultiIndex) -> int:
    """The constant claimed between D^alpha x^{2|alpha|-1} and P_alpha."""
    a0, n = alpha[0], sum(alpha)
    return 1 if a0 == 0 else factorial(a0) * comb(2 * n - 1, a0)


def derivative_of_power(cfg: AlgebraConfig, alpha: Sequence[int]) -> MvPolynomial:
    """D^alpha (x^{2|alpha|-1}) by repeated partial differentiation."""
    alpha = _check_index(cfg, alpha)
    p = MvPolynomial.paravector_var(cfg) ** (2 * sum(alpha) - 1)
    for i, a in enumerate(alpha):
        for _ in range(a):
            p = p.partial(i)
    return p


def p_alpha_via_derivative(cfg: AlgebraConfig, alpha: Sequence[int]) -> MvPolynomial:
    alpha = _check_index(cfg, alpha)
    if sum(alpha) == 0:
        raise ValueError("P_alpha needs |alpha| >= 1")
    return derivative_of_power(cfg, alpha) / derivative_constant(alpha)


def p_vec(cfg: AlgebraConfig, n: int, valpha: Sequence[int]) -> MvPolynomial:
    """(1/|valpha|!) D^valpha x^{n+|valpha|}, valpha indexing x_1..x_{2m+1}."""
    valpha = tuple(int(a) for a in valpha)
    if len(valpha) != cfg.dim - 1 or any(a < 0 for a in valpha) or n < 0:
        raise ValueError("p_vec needs n >= 0 and a length-(2m+1) non-negative index")
    size = sum(valpha)
    p = MvPolynomial.paravector_var(cfg) ** (n + size)
    for i, a in enumerate(valpha, start=1):
        for _ in range(a):
            p = p.partial(i)
    return p / factorial(size)


def p_vec_recurrence_factors(n: int, valpha: Sequence[int]) -> dict[str, int]:
    """Constants that actually relate p_vec to its derivatives.

    d_0 P^n = (n + |valpha|) P^{n-1} and d_k P^n = (|valpha| + 1) P^{n-1}_{valpha + e_k};
    both follow from d_0 x^N = N x^{N-1} and the 1/|valpha|! normalisation.
    """
    size = sum(valpha)
    return {"d0": n + size, "dk": size + 1}


def s_beta(cfg: AlgebraConfig, beta: Sequence[int], nvars: int | None = None, offset: int = 0) -> RadialRational:
    beta = _check_index(cfg, beta)
    inv = RadialRational.inverse_var(cfg, nvars, offset)
    if sum(beta) == 0:
        return inv
    acc = None
    for seq in arrangements(beta):
        term = inv
        for i in seq:
            term = term * Multivector.basis(cfg, i) * inv
        acc = term if acc is None else acc + term
    return acc


def exp_series(cfg: AlgebraConfig, lam, n_terms: int) -> MvPolynomial:
    """Truncated sum_{n<=N} (lam x)^n / n!; ``lam`` is a rational scalar or paravector."""
    from .algebra import Paravector

    if isinstance(lam, Paravector):
        lam = lam.to_multivector()
    x = MvPolynomial.paravector_var(cfg)
    lx = lam * x if isinstance(lam, Multivector) else x.scale(lam)
    acc = MvPolynomial.constant(cfg, 1)
    term = MvPolynomial.constant(cfg, 1)
    for n in range(1, n_terms + 1):
        term = (term * lx) / n
        acc = acc + term
    return acc


# -- float evaluation by recurrence -------------------------------------------

def p_alpha_values(cfg: AlgebraConfig, x: np.ndarray, max_total: int) -> dict[MultiIndex, np.ndarray]:
    """Float P_alpha(x) for all 1 <= |alpha| <= max_total.

    Uses P_alpha = sum_{i: alpha_i > 0} P_{alpha - e_i} x e_i, which follows
    from splitting the arrangements by their last unit vector.
    """
    xa = paravector_array(cfg, x)
    units = [paravector_array(cfg, np.eye(cfg.dim)[i]) for i in range(cfg.dim)]
    steps = [right_mul_matrix(cfg, mv_product_array(cfg, xa, u)) for u in units]
    vals: dict[MultiIndex, np.ndarray] = {}
    for alpha in multi_indices(cfg, 1):
        vals[alpha] = units[alpha.index(1)].copy()
    for total in range(2, max_total + 1):
        for alpha in multi_indices(cfg, total):
            acc = np.zeros(cfg.blade_count)
            for i, a in enumerate(alpha):
                if a:
                    prev = alpha[:i] + (a - 1,) + alpha[i + 1:]
                    acc = acc + vals[prev] @ steps[i]
            vals[alpha] = acc
    return vals


def s_beta_values(cfg: AlgebraConfig, x: np.ndarray, max_total: int) -> dict[MultiIndex, np.ndarray]:
    """Float S_beta(x) for |beta| <= max_total via S_beta = sum_i S_{beta-e_i} e_i x^{-1}."""
    x = np.asarray(x, dtype=float)
    xinv = paravector_array(cfg, np.concatenate([[x[0]], -x[1:]]) / np.dot(x, x))
    units = [paravector_array(cfg, np.eye(cfg.dim)[i]) for i in range(cfg.dim)]
    steps = [right_mul_matrix(cfg, mv_product_array(cfg, u, xinv)) for u in units]
    vals: dict[MultiIndex, np.ndarray] = {(0,) * cfg.dim: xinv}
    for total in range(1, max_total + 1):
        for beta in multi_indices(cfg, total):
            acc = np.zeros(cfg.blade_count)
            for i, b in enumerate(beta):
                if b:
                    prev = beta[:i] + (b - 1,) + beta[i + 1:]
                    acc = acc + vals[prev] @ steps[i]
            vals[beta] = acc
    return vals


# -- generating function ------------------------------------------------------

@dataclass
class GeneratingRow:
    alpha: MultiIndex
    matches: bool
    factor: Fraction | None
    coefficient: MvPolynomial = field(repr=False)


def neumann_lambda_series(cfg: AlgebraConfig, n_max: int) -> MvPolynomial:
    """sum_{k<=N} (lam x)^k lam in variables (x block, lambda block)."""
    nv = 2 * cfg.dim
    x = MvPolynomial.paravector_var(cfg, nv, 0)
    lam = MvPolynomial.paravector_var(cfg, nv, cfg.dim)
    term = lam
    acc = lam
    for _ in range(n_max):
        term = lam * x * term
        acc = acc + term
    return acc


def _ratio(coeff: MvPolynomial, target: MvPolynomial) -> Fraction | None:
    if target.is_zero():
        return None
    key, val = next(iter(sorted(target.terms.items())))
    c = Fraction(coeff.terms.get(key, 0)) / Fraction(val)
    if c == 0 or coeff != target.scale(c):
        return None
    return c


def generating_series_check(cfg: AlgebraConfig, n_max: int) -> list[GeneratingRow]:
    """Group the Neumann series by lambda multidegree and compare with P_alpha.

    The multidegree keeps the lambda_0 exponent.  ``factor`` is the rational c
    with coefficient = c * P_alpha (None if no such constant exists).
    """
    if n_max < 1:
        raise ValueError("truncation degree must be >= 1")
    series = neumann_lambda_series(cfg, n_max)
    lam_block = range(cfg.dim, 2 * cfg.dim)
    grouped = series.split(lam_block)
    rows = []
    for total in range(1, n_max + 2):
        for alpha in multi_indices(cfg, total):
            coeff = grouped.get(alpha, MvPolynomial.zero(cfg, 2 * cfg.dim))
            target = p_alpha(cfg, alpha, nvars=2 * cfg.dim)
            factor = _ratio(coeff, target)
            rows.append(GeneratingRow(alpha, factor == 1, factor, coeff))
    return rows


def brute_force_lambda_coefficient(cfg: AlgebraConfig, alpha: MultiIndex) -> MvPolynomial:
    """Coefficient of lambda^alpha in (lam x)^{k} lam by summing over every index word."""
    from itertools import product

    total = sum(alpha)
    x = MvPolynomial.paravector_var(cfg, 2 * cfg.dim, 0)
    acc = MvPolynomial.zero(cfg, 2 * cfg.dim)
    for word in product(range(cfg.dim), repeat=total):
        if tuple(word.count(i) for i in range(cfg.dim)) != alpha:
            continue
        term = MvPolynomial.constant(cfg, Multivector.basis(cfg, word[0]), 2 * cfg.dim)
        for i in word[1:]:
            term = term * x * Multivector.basis(cfg, i)
        acc = acc + term
    return acc


# -- spanning -----------------------------------------------------------------

@dataclass
class Expansion:
    """Right coefficients with p = sum_alpha P_alpha * C_alpha."""

    coefficients: dict[MultiIndex, Multivector]
    rank_by_degree: dict[int, tuple[int, int]]

    def resum(self, cfg: AlgebraConfig) -> MvPolynomial:
        acc = MvPolynomial.zero(cfg)
        for alpha, c in sorted(self.coefficients.items()):
            acc = acc + p_alpha(cfg, alpha) * c
        return acc


@lru_cache(maxsize=None)
def _degree_system(cfg: AlgebraConfig, d: int):
    """Factored system for the degree-d part: columns P_alpha e_B with |alpha| = d + 1."""
    alphas = multi_indices(cfg, d + 1)
    columns = []
    for alpha in alphas:
        pa = p_alpha(cfg, alpha)
        for b in range(cfg.blade_count):
            columns.append(pa.blade_mul(b, "right").terms)
    rows = sorted({key for col in columns for key in col})
    row_of = {key: r for r, key in enumerate(rows)}
    matrix = [[0] * len(columns) for _ in rows]
    for j, col in enumerate(columns):
        for key, c in col.items():
            matrix[row_of[key]][j] = c
    return alphas, rows, ExactSolver(matrix)


def expand_in_p_basis(p: MvPolynomial) -> Expansion:
    """Exact right expansion of a holomorphic Cliffordian polynomial in the P_alpha.

    P_alpha is homogeneous of degree |alpha|-1, so each homogeneous part of ``p``
    is solved separately.  Unknowns are ordered by alpha (as listed by
    :func:`multi_indices`) then blade; free unknowns are set to zero.
    ``rank_by_degree[d] = (rank, unknowns)`` records how far the P_alpha e_B
    of that degree are from being independent.
    """
    cfg = p.cfg
    if p.nvars != cfg.dim:
        raise ValueError("expansion works on polynomials in the x variables only")
    residual = holomorphy_residual(p)
    if not residual.is_zero():
        raise NotHolomorphicError(f"D Delta^{cfg.m} p = {residual} is not zero", residual)
    coeffs: dict[MultiIndex, Multivector] = {}
    ranks: dict[int, tuple[int, int]] = {}
    for d in range(p.degree() + 1):
        part = p.homogeneous_part(d)
        alphas, rows, solver = _degree_system(cfg, d)
        unknown = set(part.terms) - set(rows)
        if unknown:
            raise InconsistentSystemError(
                f"degree-{d} part of the polynomial is not spanned by the P_alpha: "
                f"term {min(unknown)} lies outside every P_alpha e_B"
            )
        rhs = [part.terms.get(key, 0) for key in rows]
        try:
            sol = solver.solve(rhs)
        except InconsistentSystemError as exc:
            raise InconsistentSystemError(
                f"degree-{d} part of the polynomial is not spanned by the P_alpha: {exc}"
            ) from exc
        ranks[d] = (solver.rank, solver.n_cols)
        for a_idx, alpha in enumerate(alphas):
            block = sol[a_idx * cfg.blade_count:(a_idx + 1) * cfg.blade_count]
            mv = Multivector(cfg, {b: v for b, v in enumerate(block) if v != 0})
            if mv:
                coeffs[alpha] = mv
    out = Expansion(coeffs, ranks)
    if out.resum(cfg) != p:
        raise InconsistentSystemError("re-summation of the expansion does not reproduce the input")
    return out


def is_left_and_right_holomorphic(f: MvPolynomial | RadialRational) -> tuple[bool, bool]:
    return is_holomorphic_cliffordian(f, side="left"), is_holomorphic_cliffordian(f, side="right")


__all__ = [
    "Expansion",
    "GeneratingRow",
    "NotHolomorphicError",
    "arrangement_count",
    "arrangements",
    "brute_force_lambda_coefficient",
    "derivative_constant",
    "derivative_of_power",
    "exp_series",
    "expand_in_p_basis",
    "generating_series_check",
    "is_left_and_right_holomorphic",
    "multi_indices",
    "neumann_lambda_series",
    "p_alpha",
    "p_alpha_values",
    "p_alpha_via_derivative",
    "p_vec",
    "p_vec_recurrence_factors",
    "s_beta",
    "s_beta_values",
]
