"""The operators D, D*, Delta and the holomorphy predicates.

All functions accept an :class:`MvPolynomial` or a :class:`RadialRational`
and return the same class.  Operators act on the paravector block starting at
``offset``; left action is the default, ``side="right"`` multiplies the unit
vectors on the right instead.
"""

from __future__ import annotations

from math import comb, prod

from .polynomial import MvPolynomial, RadialRational

Function = MvPolynomial | RadialRational


def _block(p: Function, offset: int) -> range:
    return range(offset, offset + p.cfg.dim)


def partial(p: Function, i: int) -> Function:
    return p.partial(i)


def _first_order(p: Function, offset: int, side: str, star: bool) -> Function:
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    cfg = p.cfg
    acc = p.partial(offset)
    for i in range(1, cfg.dim):
        term = p.partial(offset + i).blade_mul(cfg.coord_blade(i), side)
        acc = acc - term if star else acc + term
    return acc


def dirac(p: Function, offset: int = 0, side: str = "left") -> Function:
    """D p = sum_i e_i d_i p (or sum_i d_i p e_i on the right)."""
    return _first_order(p, offset, side, star=False)


def dirac_star(p: Function, offset: int = 0, side: str = "left") -> Function:
    """D* p = d_0 p - sum_{i>=1} e_i d_i p."""
    return _first_order(p, offset, side, star=True)


def laplacian(p: Function, times: int = 1, offset: int = 0) -> Function:
    if times < 0:
        raise ValueError("times must be non-negative")
    block = _block(p, offset)
    for _ in range(times):
        p = p.laplacian(block)
    return p


def laplacian_by_partials(p: Function, offset: int = 0) -> Function:
    """Delta p as the literal sum of second partials (no closed-form shortcuts)."""
    acc = None
    for i in _block(p, offset):
        t = p.partial(i).partial(i)
        acc = t if acc is None else acc + t
    return acc


def radial_derivative(p: Function, offset: int = 0) -> Function:
    """sum_i x_i d_i p; the outward normal derivative on the unit sphere."""
    return p.euler(_block(p, offset))


def is_zero(p: Function) -> bool:
    return p.is_zero()


def is_monogenic(p: Function, offset: int = 0, side: str = "left") -> bool:
    return dirac(p, offset, side).is_zero()


def holomorphy_residual(p: Function, offset: int = 0, side: str = "left") -> Function:
    """D Delta^m p, which vanishes exactly for holomorphic Cliffordian p."""
    return dirac(laplacian(p, p.cfg.m, offset), offset, side)


def is_holomorphic_cliffordian(p: Function, offset: int = 0, side: str = "left") -> bool:
    # for radial rationals this tests vanishing away from the origin
    return holomorphy_residual(p, offset, side).is_zero()


def is_polyharmonic(p: Function, order: int, offset: int = 0) -> bool:
    return laplacian(p, order, offset).is_zero()


def holomorphy_chain(p: Function, offset: int = 0) -> list[Function]:
    """(f_1, ..., f_{2m+2}) with f_1 = p, alternating D and D*, ending in D f_{2m+1}."""
    chain = [p]
    for _ in range(p.cfg.m):
        chain.append(dirac(chain[-1], offset))
        chain.append(dirac_star(chain[-1], offset))
    chain.append(dirac(chain[-1], offset))
    return chain


def x_times(g: Function, offset: int = 0, side: str = "left") -> Function:
    """x g (or g x)."""
    x = MvPolynomial.paravector_var(g.cfg, g.nvars, offset)
    if isinstance(g, RadialRational):
        x = RadialRational(x, 0, g.offset)
    return x * g if side == "left" else g * x


# -- functions of (x_0, |vec x|) -------------------------------------------------------

def harmonic_real_part(n: int) -> dict[tuple[int, int], int]:
    """Re((x_0 + i r)^n) as {(a, j): c} meaning sum c x_0^a s^j with s = r^2."""
    return {(n - 2 * j, j): comb(n, 2 * j) * (-1) ** j for j in range(n // 2 + 1)}


def r_derivative_power(g: dict, k: int) -> dict[tuple[int, int], int]:
    """(r^{-1} d/dr)^k in the (x_0, s) representation, where it is (2 d/ds)^k."""
    for _ in range(k):
        g = {(a, j - 1): 2 * j * c for (a, j), c in g.items() if j > 0}
    return g


def lift_radial(cfg, g: dict, nvars=None, offset: int = 0) -> MvPolynomial:
    """Substitute x_0 and s = |vec x|^2 to get a scalar polynomial on the paravector block."""
    nvars = cfg.dim if nvars is None else nvars
    x0 = MvPolynomial.coordinate(cfg, offset, nvars)
    s = MvPolynomial.zero(cfg, nvars)
    for i in range(1, cfg.dim):
        xi = MvPolynomial.coordinate(cfg, offset + i, nvars)
        s = s + xi * xi
    out = MvPolynomial.zero(cfg, nvars)
    for (a, j), c in sorted(g.items()):
        out = out + (x0 ** a) * (s ** j) * c
    return out


def radial_lemma_factor(m: int, k: int) -> int:
    """2m (2m-2) ... (2m-2k+2); zero once k > m."""
    return prod(2 * m - 2 * i for i in range(k))


def radial_lemma_holds(cfg, n: int, k: int) -> bool:
    """Delta^k f = factor * (r^{-1} d/dr)^k f for f = Re((x_0 + i|vec x|)^n)."""
    g = harmonic_real_part(n)
    lhs = laplacian(lift_radial(cfg, g), k)
    rhs = lift_radial(cfg, r_derivative_power(g, k)) * radial_lemma_factor(cfg.m, k)
    return lhs == rhs
