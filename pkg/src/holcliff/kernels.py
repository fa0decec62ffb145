"""Cauchy kernels, the Delta^m chain on x^{-1}, and kernel series expansions.

The exact layer keeps powers of pi symbolic through :class:`PiRational`, so the
constant chain epsilon_m * c_m * omega_m = 1 is an identity between rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .algebra import AlgebraConfig, Multivector, Paravector, mv_product_array, paravector_array
from .basisfun import multi_indices, p_alpha, p_alpha_values, s_beta, s_beta_values
from .polycalc import dirac, dirac_star, laplacian
from .polynomial import MvPolynomial, RadialRational


class SingularityError(ZeroDivisionError):
    """A kernel was evaluated at its pole."""


class IdentityViolation(AssertionError):
    """An exact identity failed; the message carries the discrepancy."""


@dataclass(frozen=True)
class PiRational:
    """coeff * pi**pi_power with rational coeff."""

    coeff: Fraction
    pi_power: int = 0

    def __mul__(self, other):
        if isinstance(other, PiRational):
            return PiRational(self.coeff * other.coeff, self.pi_power + other.pi_power)
        return PiRational(self.coeff * Fraction(other), self.pi_power)

    __rmul__ = __mul__

    def inverse(self) -> PiRational:
        return PiRational(1 / self.coeff, -self.pi_power)

    def __truediv__(self, other):
        if not isinstance(other, PiRational):
            other = PiRational(Fraction(other))
        return self * other.inverse()

    def __float__(self):
        return float(self.coeff) * math.pi**self.pi_power

    def is_rational(self) -> bool:
        return self.pi_power == 0 or self.coeff == 0


@dataclass(frozen=True)
class KernelConstants:
    m: int

    @property
    def omega(self) -> PiRational:
        """Area of the unit sphere in R^{2m+2}: 2 pi^{m+1} / m!."""
        return PiRational(Fraction(2, factorial(self.m)), self.m + 1)

    @property
    def epsilon(self) -> PiRational:
        """Normalisation of N = epsilon x^{-1} for which Delta^m N = E.

        Equals (-1)^m / (2^{2m+1} m! pi^{m+1}) = 1 / (c_m omega_m).
        """
        m = self.m
        return PiRational(Fraction((-1) ** m, 2 ** (2 * m + 1) * factorial(m)), -(m + 1))

    @property
    def epsilon_closed_form(self) -> PiRational:
        """The quoted closed form (-1)^m (m+1) / (2^{2m+1} m! pi^{m+1}); off from :attr:`epsilon` by m+1."""
        m = self.m
        return PiRational(Fraction((-1) ** m * (m + 1), 2 ** (2 * m + 1) * factorial(m)), -(m + 1))

    @property
    def c(self) -> Fraction:
        """Delta^m x^{-1} = c * x*/|x|^{2m+2}."""
        m = self.m
        return Fraction((-1) ** m * 2 ** (2 * m) * factorial(m) ** 2)

    def chain_product(self, closed_form: bool = False) -> PiRational:
        eps = self.epsilon_closed_form if closed_form else self.epsilon
        return eps * self.c * self.omega


# -- float kernels --------------------------------------------------------------

def _coords(cfg: AlgebraConfig, x) -> np.ndarray:
    if isinstance(x, Paravector):
        x = [float(c) for c in x.coords]
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != cfg.dim:
        raise ValueError(f"points need {cfg.dim} coordinates")
    return x


def cauchy_kernel_E(cfg: AlgebraConfig, x) -> np.ndarray:
    """E(x) = x* / (omega_m |x|^{2m+2}) as float multivector array(s)."""
    x = _coords(cfg, x)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0):
        raise SingularityError("E is singular at the origin")
    xs = x.copy()
    xs[..., 1:] *= -1
    scale = 1.0 / (float(KernelConstants(cfg.m).omega) * r2 ** (cfg.m + 1))
    return paravector_array(cfg, xs * np.asarray(scale)[..., None])


def kernel_N_float(cfg: AlgebraConfig, x) -> np.ndarray:
    """N(x) = epsilon_m x^{-1} as float multivector array(s)."""
    x = _coords(cfg, x)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0):
        raise SingularityError("N is singular at the origin")
    xs = x.copy()
    xs[..., 1:] *= -1
    eps = float(KernelConstants(cfg.m).epsilon)
    return paravector_array(cfg, xs * np.asarray(eps / r2)[..., None])


# -- exact kernels ----------------------------------------------------------------

@dataclass
class ScaledRadial:
    """A symbolic constant times an exact radial rational function."""

    scale: PiRational
    form: RadialRational

    def laplacian(self, times: int = 1) -> ScaledRadial:
        return ScaledRadial(self.scale, laplacian(self.form, times))

    def dirac(self, side: str = "left") -> ScaledRadial:
        return ScaledRadial(self.scale, dirac(self.form, side=side))

    def is_zero(self) -> bool:
        return self.scale.coeff == 0 or self.form.is_zero()

    def equals(self, other: ScaledRadial) -> bool:
        # compare after moving the rational part of the ratio onto one form
        ratio = self.scale / other.scale
        if not ratio.is_rational():
            return self.is_zero() and other.is_zero()
        return self.form * ratio.coeff == other.form

    def evaluate(self, points) -> np.ndarray:
        return float(self.scale) * self.form.evaluate(points)


def kernel_N(cfg: AlgebraConfig, x=None):
    """Exact N = epsilon_m x^{-1} (no argument) or its float value at ``x``."""
    if x is not None:
        return kernel_N_float(cfg, x)
    return ScaledRadial(KernelConstants(cfg.m).epsilon, RadialRational.inverse_var(cfg))


def kernel_E_exact(cfg: AlgebraConfig) -> ScaledRadial:
    form = RadialRational(MvPolynomial.paravector_var(cfg, conjugate=True), cfg.m + 1)
    return ScaledRadial(KernelConstants(cfg.m).omega.inverse(), form)


def inverse_laplacians(cfg: AlgebraConfig, nvars: int | None = None, offset: int = 0) -> list[RadialRational]:
    """[Delta^j x^{-1} for j = 0..m], computed by exact radial calculus."""
    out = [RadialRational.inverse_var(cfg, nvars, offset)]
    for _ in range(cfg.m):
        out.append(laplacian(out[-1], 1, offset))
    return out


def laplacian_power_of_inverse(cfg: AlgebraConfig) -> RadialRational:
    """Delta^m x^{-1}, checked against c_m x*/rho^{2m+2}."""
    if cfg.m < 1:
        raise ValueError("needs m >= 1")
    got = inverse_laplacians(cfg)[-1]
    want = RadialRational(MvPolynomial.paravector_var(cfg, conjugate=True).scale(KernelConstants(cfg.m).c), cfg.m + 1)
    if got != want:
        raise IdentityViolation(f"Delta^{cfg.m} x^-1 = {got}, expected {want}")
    return got


# -- one-variable radial calculus ---------------------------------------------------

@dataclass(frozen=True)
class LogLaurent:
    """log_coeff * ln(rho) + sum_p powers[p] * rho^p."""

    log_coeff: Fraction
    powers: tuple[tuple[int, Fraction], ...]

    @classmethod
    def ln_rho(cls) -> LogLaurent:
        return cls(Fraction(1), ())

    def _dict(self) -> dict[int, Fraction]:
        return dict(self.powers)

    @staticmethod
    def _pack(log_coeff, d) -> LogLaurent:
        return LogLaurent(Fraction(log_coeff), tuple(sorted((p, c) for p, c in d.items() if c != 0)))

    def derivative(self) -> LogLaurent:
        d: dict[int, Fraction] = {}
        if self.log_coeff:
            d[-1] = d.get(-1, 0) + self.log_coeff
        for p, c in self.powers:
            if p:
                d[p - 1] = d.get(p - 1, 0) + p * c
        return self._pack(0, d)

    def radial_laplacian(self, m: int) -> LogLaurent:
        """d^2/drho^2 + ((2m+1)/rho) d/drho."""
        first = self.derivative()
        second = first.derivative()
        d = second._dict()
        for p, c in first.powers:
            d[p - 1] = d.get(p - 1, 0) + (2 * m + 1) * c
        return self._pack(second.log_coeff, d)


def radial_ln_coefficient(k: int, m: int) -> Fraction:
    """(-1)^{k+1} 2^{k-1} (k-1)! (2m)(2m-2)...(2m-2k+2)."""
    if k < 1:
        raise ValueError("k >= 1 required")
    falling = 1
    for j in range(k):
        falling *= 2 * m - 2 * j
    return Fraction((-1) ** (k + 1) * 2 ** (k - 1) * factorial(k - 1) * falling)


def radial_ln_laplacian(k: int, m: int) -> Fraction:
    """Coefficient a with Delta_rho^k ln(rho) = a rho^{-2k}, cross-checked by direct calculus."""
    claimed = radial_ln_coefficient(k, m)
    f = LogLaurent.ln_rho()
    for _ in range(k):
        f = f.radial_laplacian(m)
    got = f._dict()
    expect = {-2 * k: claimed} if claimed else {}
    if f.log_coeff != 0 or got != expect:
        raise IdentityViolation(f"Delta_rho^{k} ln rho = {f}, expected {claimed} rho^{-2 * k}")
    return claimed


def radial_route_inverse_laplacian(cfg: AlgebraConfig) -> RadialRational:
    """Delta^m x^{-1} computed as D*(a_m rho^{-2m}), a_m from the radial formula."""
    a = radial_ln_laplacian(cfg.m, cfg.m)
    rho_pow = RadialRational(MvPolynomial.constant(cfg, a), cfg.m)
    return dirac_star(rho_pow)


# -- Taylor / Laurent kernel series ----------------------------------------------------

def y_alpha(cfg: AlgebraConfig, alpha, nvars: int, offset: int) -> MvPolynomial:
    """Y^alpha = y_0^{a_0} (-y_1)^{a_1} ... (-y_{2m+1})^{a_{2m+1}}."""
    exps = [0] * nvars
    for i, a in enumerate(alpha):
        exps[offset + i] = a
    sign = -1 if sum(alpha[1:]) % 2 else 1
    return MvPolynomial.monomial(cfg, exps, sign)


@dataclass
class SeriesCheck:
    terms: dict[int, RadialRational]
    matches: dict[int, bool]

    @property
    def all_match(self) -> bool:
        return all(self.matches.values())

    def total(self) -> RadialRational:
        acc = None
        for _, t in sorted(self.terms.items()):
            acc = t if acc is None else acc + t
        return acc


def taylor_kernel_truncation(cfg: AlgebraConfig, n_max: int) -> SeriesCheck:
    """sum_{1<=|alpha|<=N} P_alpha(x) Y^alpha / |y|^{2|alpha|} in variables (x, y).

    Each degree-(n) part in x is compared with (y* x)^n y* / |y|^{2n+2}.
    """
    if n_max < 1:
        raise ValueError("N >= 1 required")
    dim = cfg.dim
    nv = 2 * dim
    x = MvPolynomial.paravector_var(cfg, nv, 0)
    ys = MvPolynomial.paravector_var(cfg, nv, dim, conjugate=True)
    terms, matches = {}, {}
    neumann = ys
    for total in range(1, n_max + 1):
        num = MvPolynomial.zero(cfg, nv)
        for alpha in multi_indices(cfg, total):
            num = num + p_alpha(cfg, alpha, nvars=nv) * y_alpha(cfg, alpha, nv, dim)
        terms[total] = RadialRational(num, total, offset=dim)
        matches[total] = num == neumann
        neumann = ys * x * neumann
    return SeriesCheck(terms, matches)


def y_beta(cfg: AlgebraConfig, beta, nvars: int, offset: int) -> MvPolynomial:
    exps = [0] * nvars
    for i, b in enumerate(beta):
        exps[offset + i] = b
    return MvPolynomial.monomial(cfg, exps, 1)


def laurent_kernel_truncation(cfg: AlgebraConfig, n_max: int) -> SeriesCheck:
    """sum_{|beta|<=N} S_beta(x) y^beta, compared per y-degree with (x^{-1} y)^k x^{-1}."""
    dim = cfg.dim
    nv = 2 * dim
    y = MvPolynomial.paravector_var(cfg, nv, dim)
    inv = RadialRational.inverse_var(cfg, nv, 0)
    terms, matches = {}, {}
    neumann = inv
    for total in range(0, n_max + 1):
        acc = None
        for beta in multi_indices(cfg, total):
            t = s_beta(cfg, beta, nvars=nv) * RadialRational(y_beta(cfg, beta, nv, dim), 0, 0)
            acc = t if acc is None else acc + t
        terms[total] = acc
        matches[total] = acc == neumann
        neumann = inv * RadialRational(y, 0, 0) * neumann
    return SeriesCheck(terms, matches)


def laurent_second_order_conventions(cfg: AlgebraConfig) -> dict[str, bool]:
    """Which reading of the displayed second-order Laurent sum equals (x^{-1}y)^2 x^{-1}.

    The display sums (x^-1 e_i x^-1 e_j x^-1 + x^-1 e_j x^-1 e_i x^-1) y_i y_j over
    index pairs; the readings differ in which pairs are visited.
    """
    dim = cfg.dim
    nv = 2 * dim
    inv = RadialRational.inverse_var(cfg, nv, 0)
    y = RadialRational(MvPolynomial.paravector_var(cfg, nv, dim), 0, 0)
    target = inv * y * inv * y * inv

    def pair(i, j):
        e_i, e_j = Multivector.basis(cfg, i), Multivector.basis(cfg, j)
        yy = RadialRational(MvPolynomial.coordinate(cfg, dim + i, nv) * MvPolynomial.coordinate(cfg, dim + j, nv), 0, 0)
        return (inv * e_i * inv * e_j * inv + inv * e_j * inv * e_i * inv) * yy

    def total(pairs):
        acc = None
        for i, j in pairs:
            t = pair(i, j)
            acc = t if acc is None else acc + t
        return acc

    idx = range(dim)
    readings = {
        "ordered_pairs": [(i, j) for i in idx for j in idx],
        "unordered_pairs_with_diagonal": [(i, j) for i in idx for j in idx if i <= j],
        "unordered_pairs_diagonal_halved": None,
    }
    out = {}
    for name, pairs in readings.items():
        if pairs is None:
            off = total([(i, j) for i in idx for j in idx if i < j])
            diag = total([(i, i) for i in idx]) * Fraction(1, 2)
            out[name] = (off + diag) == target
        else:
            out[name] = total(pairs) == target
    return out


# -- float remainders ----------------------------------------------------------------

def _inv_array(cfg, v):
    v = np.asarray(v, dtype=float)
    vs = v.copy()
    vs[1:] *= -1
    return paravector_array(cfg, vs / np.dot(v, v))


def taylor_remainders(cfg: AlgebraConfig, x, y, n_max: int) -> list[float]:
    """|(y-x)^{-1} - sum_{|alpha|<=N} P_alpha(x) Y^alpha/|y|^{2|alpha|}| for N = 1..n_max."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    exact = _inv_array(cfg, y - x)
    vals = p_alpha_values(cfg, x, n_max)
    ysign = np.concatenate([[y[0]], -y[1:]])
    ny2 = float(np.dot(y, y))
    partial = np.zeros(cfg.blade_count)
    out = []
    for total in range(1, n_max + 1):
        for alpha in multi_indices(cfg, total):
            partial = partial + vals[alpha] * (np.prod(ysign ** np.array(alpha)) / ny2**total)
        out.append(float(np.linalg.norm(exact - partial)))
    return out


def laurent_remainders(cfg: AlgebraConfig, x, y, n_max: int) -> list[float]:
    """|(x-y)^{-1} - sum_{|beta|<=N} S_beta(x) y^beta| for N = 0..n_max."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    exact = _inv_array(cfg, x - y)
    vals = s_beta_values(cfg, x, n_max)
    partial = np.zeros(cfg.blade_count)
    out = []
    for total in range(0, n_max + 1):
        for beta in multi_indices(cfg, total):
            partial = partial + vals[beta] * np.prod(y ** np.array(beta))
        out.append(float(np.linalg.norm(exact - partial)))
    return out


# -- exponential -----------------------------------------------------------------------

def _mv_exp(cfg: AlgebraConfig, a: np.ndarray, terms: int = 80) -> np.ndarray:
    out = np.zeros(cfg.blade_count)
    out[0] = 1.0
    term = out.copy()
    for n in range(1, terms):
        term = mv_product_array(cfg, term, a) / n
        out = out + term
    return out


def exp_identity_pointcheck(cfg: AlgebraConfig, lam: float, x) -> float:
    """Relative residual of D*(e^{lam x_0} cos(lam |vec x|)) = lam e^{lam x}.

    The left side uses the closed-form gradient; the right side evaluates the
    Clifford exponential of lam*x by its power series.
    """
    x = _coords(cfg, x)
    r = float(np.linalg.norm(x[1:]))
    if r == 0:
        raise SingularityError("the identity needs a nonzero vector part")
    g0 = math.exp(lam * x[0])
    lhs_coords = np.empty(cfg.dim)
    lhs_coords[0] = lam * g0 * math.cos(lam * r)
    # -e_i d_i g with d_i g = -lam e^{lam x0} sin(lam r) x_i / r
    lhs_coords[1:] = lam * g0 * math.sin(lam * r) * x[1:] / r
    lhs = paravector_array(cfg, lhs_coords)
    rhs = lam * _mv_exp(cfg, paravector_array(cfg, lam * x))
    scale = max(float(np.linalg.norm(rhs)), 1e-300)
    if lam == 0:
        return float(np.linalg.norm(lhs - rhs))
    return float(np.linalg.norm(lhs - rhs)) / scale
