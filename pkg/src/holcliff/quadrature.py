"""Product quadrature on S^{2m+1} and boundary-integral reconstruction.

The rule uses hyperspherical angles: the polar angle with weight sin^p is
integrated by Gauss-Jacobi in t = cos(theta) with weight (1 - t^2)^{(p-1)/2},
and the azimuth by the uniform trapezoid rule.  An order-q rule integrates
every polynomial of total degree <= q exactly.

Reconstruction follows the boundary representation for holomorphic
Cliffordian f on the unit ball B:

    f(x) = int E(y-x) n(y) f(y)
           - sum_k int (d_n Delta^{m-k} N(y-x)) D Delta^{k-1} f(y)
           + sum_k int (Delta^{m-k} N(y-x)) d_n D Delta^{k-1} f(y)

with n(y) = y on the unit sphere and the volume term dropped.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from math import gamma

import numpy as np
from scipy.special import roots_jacobi

from .algebra import AlgebraConfig, mv_product_array, paravector_array
from .basisfun import NotHolomorphicError, multi_indices, p_alpha_values
from .kernels import KernelConstants, inverse_laplacians, y_alpha
from .polycalc import dirac, holomorphy_residual, laplacian, radial_derivative
from .polynomial import MvPolynomial, RadialRational

DEFAULT_ORDER = 24
MAX_NODES = 250_000


class DomainError(ValueError):
    """Evaluation point outside the region the formula is valid for."""


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    m: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness_order: int

    @property
    def node_count(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over nodes, exactly rounded per column so results do not depend on order."""
        values = np.asarray(values, dtype=float)
        weighted = values * self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        if weighted.ndim == 1:
            return np.float64(math.fsum(weighted))
        flat = weighted.reshape(weighted.shape[0], -1)
        sums = np.array([math.fsum(flat[:, j]) for j in range(flat.shape[1])])
        return sums.reshape(weighted.shape[1:])


def sphere_rule(m: int, order: int = DEFAULT_ORDER, max_nodes: int = MAX_NODES) -> QuadratureRule:
    if order < 1:
        raise ValueError("order must be >= 1")
    d = 2 * m + 2
    n_polar = (order + 2) // 2
    n_azimuth = order + 1 + (order + 1) % 2
    count = n_polar ** (d - 2) * n_azimuth
    if count > max_nodes:
        raise ResourceLimitError(f"rule would need {count} nodes (cap {max_nodes})")
    phi = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
    pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    wts = np.full(n_azimuth, 2 * np.pi / n_azimuth)
    for p in range(1, d - 1):
        a = (p - 1) / 2
        t, w = roots_jacobi(n_polar, a, a)
        s = np.sqrt(1 - t * t)
        pts = np.concatenate(
            [np.repeat(t, len(pts))[:, None], (s[:, None, None] * pts[None, :, :]).reshape(-1, pts.shape[1])],
            axis=1,
        )
        wts = (w[:, None] * wts[None, :]).reshape(-1)
    return QuadratureRule(m, pts, wts, order)


def sphere_monomial_moment(exps) -> float:
    """Closed-form integral of prod y_i^{a_i} over the unit sphere."""
    if any(a % 2 for a in exps):
        return 0.0
    b = [(a + 1) / 2 for a in exps]
    return 2 * math.prod(gamma(v) for v in b) / gamma(sum(b))


@dataclass
class BoundaryData:
    """f with D Delta^{k-1} f and d_n D Delta^{k-1} f for k = 1..m, all exact."""

    f: MvPolynomial
    d_fields: list[MvPolynomial]
    dn_fields: list[MvPolynomial]

    @classmethod
    def from_function(cls, f: MvPolynomial) -> BoundaryData:
        m = f.cfg.m
        d_fields = [dirac(laplacian(f, k - 1)) for k in range(1, m + 1)]
        return cls(f, d_fields, [radial_derivative(g) for g in d_fields])

    def evaluate(self, nodes: np.ndarray):
        return (
            self.f.evaluate(nodes),
            [g.evaluate(nodes) for g in self.d_fields],
            [h.evaluate(nodes) for h in self.dn_fields],
        )


def _require_holomorphic(f: MvPolynomial):
    residual = holomorphy_residual(f)
    if not residual.is_zero():
        raise NotHolomorphicError(
            f"function is not holomorphic Cliffordian (D Delta^m f = {residual}); "
            "the dropped volume term would not vanish",
            residual,
        )


class _KernelTables:
    """Delta^j x^{-1} and its gradient as exact radial rationals, j = 0..m."""

    def __init__(self, cfg: AlgebraConfig):
        self.cfg = cfg
        self.values = inverse_laplacians(cfg)
        self.grads = [[k.partial(i) for i in range(cfg.dim)] for k in self.values]
        self.eps = float(KernelConstants(cfg.m).epsilon)

    def at(self, j: int, nodes: np.ndarray, z: np.ndarray):
        """(N_j(z), d_n N_j) with N_j = eps Delta^j x^{-1}, d_n = sum_i y_i d_i."""
        val = self.eps * self.values[j].evaluate(z)
        dn = np.zeros_like(val)
        for i, g in enumerate(self.grads[j]):
            dn += nodes[:, i:i + 1] * g.evaluate(z)
        return val, self.eps * dn


_TABLES: dict[AlgebraConfig, _KernelTables] = {}


def _tables(cfg: AlgebraConfig) -> _KernelTables:
    if cfg not in _TABLES:
        _TABLES[cfg] = _KernelTables(cfg)
    return _TABLES[cfg]


def boundary_integral(f: MvPolynomial, x, rule: QuadratureRule, data: BoundaryData | None = None) -> np.ndarray:
    """The right-hand side of the representation at any point off the sphere."""
    cfg = f.cfg
    if rule.m != cfg.m:
        raise ValueError("quadrature rule built for a different m")
    x = np.asarray(x, dtype=float)
    if x.shape != (cfg.dim,):
        raise ValueError(f"point needs {cfg.dim} coordinates")
    if abs(float(np.dot(x, x)) - 1.0) < 1e-12:
        raise DomainError("point lies on the boundary sphere")
    data = data or BoundaryData.from_function(f)
    nodes = rule.nodes
    z = nodes - x
    tables = _tables(cfg)
    normal = paravector_array(cfg, nodes)
    fv, gv, hv = data.evaluate(nodes)
    m = cfg.m
    kern_m, _ = tables.at(m, nodes, z)
    integrand = mv_product_array(cfg, mv_product_array(cfg, kern_m, normal), fv)
    for k in range(1, m + 1):
        val, dn = tables.at(m - k, nodes, z)
        integrand -= mv_product_array(cfg, dn, gv[k - 1])
        integrand += mv_product_array(cfg, val, hv[k - 1])
    return rule.integrate(integrand)


def cauchy_reconstruct(f: MvPolynomial, x, rule: QuadratureRule, data: BoundaryData | None = None) -> np.ndarray:
    """Value of f at an interior point from its boundary data."""
    x = np.asarray(x, dtype=float)
    if float(np.dot(x, x)) >= 1.0:
        raise DomainError("reconstruction point must satisfy |x| < 1")
    _require_holomorphic(f)
    return boundary_integral(f, x, rule, data)


# -- Taylor coefficients ---------------------------------------------------------------

def _alpha_kernel_fields(cfg: AlgebraConfig, alpha, nodes: np.ndarray):
    """Delta^j (Y^alpha/|y|^{2|alpha|}) and their radial derivatives at the nodes, j = 0..m."""
    ka = RadialRational(y_alpha(cfg, alpha, cfg.dim, 0), sum(alpha))
    vals, dns = [], []
    for j in range(cfg.m + 1):
        vals.append(ka.evaluate(nodes))
        dns.append(radial_derivative(ka).evaluate(nodes))
        ka = laplacian(ka)
    return vals, dns


def taylor_coefficients(
    f: MvPolynomial,
    alphas,
    rule: QuadratureRule,
    data: BoundaryData | None = None,
) -> dict[tuple[int, ...], np.ndarray]:
    """C_alpha for each alpha, with f(x) = sum P_alpha(x) C_alpha inside the ball.

    C_alpha = eps [ int Delta^m K n f - sum_j int (d_n Delta^{m-j} K) D Delta^{j-1} f
                    + sum_l int (Delta^{m-l} K) d_n D Delta^{l-1} f ],  K = Y^alpha/|y|^{2|alpha|}.
    """
    cfg = f.cfg
    _require_holomorphic(f)
    data = data or BoundaryData.from_function(f)
    nodes = rule.nodes
    normal = paravector_array(cfg, nodes)
    fv, gv, hv = data.evaluate(nodes)
    nf = mv_product_array(cfg, normal, fv)
    eps = float(KernelConstants(cfg.m).epsilon)
    m = cfg.m
    out = {}
    for alpha in alphas:
        alpha = tuple(alpha)
        if sum(alpha) < 1:
            raise ValueError("|alpha| >= 1 required")
        vals, dns = _alpha_kernel_fields(cfg, alpha, nodes)
        integrand = mv_product_array(cfg, vals[m], nf)
        for j in range(1, m + 1):
            integrand -= mv_product_array(cfg, dns[m - j], gv[j - 1])
            integrand += mv_product_array(cfg, vals[m - j], hv[j - 1])
        out[alpha] = eps * rule.integrate(integrand)
    return out


def taylor_resum(cfg: AlgebraConfig, coeffs: dict, x) -> np.ndarray:
    """sum_alpha P_alpha(x) C_alpha in floats."""
    max_total = max(sum(a) for a in coeffs)
    pv = p_alpha_values(cfg, np.asarray(x, dtype=float), max_total)
    acc = np.zeros(cfg.blade_count)
    for alpha, c in sorted(coeffs.items()):
        acc = acc + mv_product_array(cfg, pv[alpha], c)
    return acc


def all_alphas(cfg: AlgebraConfig, max_total: int) -> list[tuple[int, ...]]:
    return [a for t in range(1, max_total + 1) for a in multi_indices(cfg, t)]


@dataclass
class ReconstructionRow:
    function_id: str
    point: tuple[float, ...]
    reconstructed: np.ndarray
    exact: np.ndarray
    abs_error: float
    rule_order: int
    node_count: int
    wall_time_ms: float


def reconstruction_rows(function_id: str, f: MvPolynomial, points, rule: QuadratureRule, exterior: bool = False):
    """Reconstruct f at each point; exterior points compare against zero."""
    data = BoundaryData.from_function(f)
    _require_holomorphic(f)
    rows = []
    for x in points:
        x = np.asarray(x, dtype=float)
        t0 = time.perf_counter()
        if exterior:
            if float(np.dot(x, x)) <= 1.0:
                raise DomainError("exterior check needs |x| > 1")
            got = boundary_integral(f, x, rule, data)
            want = np.zeros(f.cfg.blade_count)
        else:
            got = cauchy_reconstruct(f, x, rule, data)
            want = f.evaluate(x[None, :])[0]
        ms = (time.perf_counter() - t0) * 1000
        rows.append(
            ReconstructionRow(
                function_id, tuple(float(v) for v in x), got, want,
                float(np.max(np.abs(got - want))), rule.exactness_order, rule.node_count, ms,
            )
        )
    return rows
