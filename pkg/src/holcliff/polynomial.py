"""Multivector-valued polynomials and radial rational functions.

A polynomial is stored flat: ``(exponents, blade) -> coefficient``.  Variables
are real scalars and commute with everything; the Clifford coefficients do
not commute with each other, so products keep their left/right order.

Variables are numbered ``0..nvars-1``.  The paravector variable x occupies a
block of ``cfg.dim`` consecutive variables starting at an offset (0 by
default); extra formal families such as lambda or y are further blocks.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from operator import add
from typing import Iterator

import numpy as np

from .algebra import (
    AlgebraConfig,
    ConfigurationError,
    Multivector,
    _exact,
    blade_name,
    multivector_from_json,
    multivector_to_json,
)


class DegreeLimitError(ConfigurationError):
    """A polynomial product would exceed the configured total degree."""


class MvPolynomial:
    __slots__ = ("cfg", "nvars", "terms")

    def __init__(self, cfg: AlgebraConfig, nvars: int, terms=None):
        self.cfg = cfg
        self.nvars = nvars
        if terms:
            self.terms = {k: c for k, c in terms.items() if c != 0}
        else:
            self.terms = {}

    # -- construction ----------------------------------------------------

    @classmethod
    def zero(cls, cfg, nvars=None):
        return cls(cfg, cfg.dim if nvars is None else nvars)

    @classmethod
    def constant(cls, cfg, value, nvars=None) -> MvPolynomial:
        nvars = cfg.dim if nvars is None else nvars
        if not isinstance(value, Multivector):
            value = Multivector.scalar(cfg, value)
        z = (0,) * nvars
        return cls(cfg, nvars, {(z, b): c for b, c in value.coeffs.items()})

    @classmethod
    def monomial(cls, cfg, exps, value=1) -> MvPolynomial:
        p = cls.constant(cfg, value, len(exps))
        exps = tuple(exps)
        return cls(cfg, p.nvars, {(exps, b): c for (_, b), c in p.terms.items()})

    @classmethod
    def coordinate(cls, cfg, i, nvars=None) -> MvPolynomial:
        nvars = cfg.dim if nvars is None else nvars
        e = [0] * nvars
        e[i] = 1
        return cls(cfg, nvars, {(tuple(e), 0): 1})

    @classmethod
    def paravector_var(cls, cfg, nvars=None, offset=0, conjugate=False) -> MvPolynomial:
        """x = sum e_i x_i over the block at ``offset`` (x* if ``conjugate``)."""
        nvars = cfg.dim if nvars is None else nvars
        terms = {}
        for i in range(cfg.dim):
            e = [0] * nvars
            e[offset + i] = 1
            terms[(tuple(e), cfg.coord_blade(i))] = -1 if (conjugate and i) else 1
        return cls(cfg, nvars, terms)

    @classmethod
    def norm_sq_var(cls, cfg, nvars=None, offset=0) -> MvPolynomial:
        """rho^2 = sum x_i^2 over one block."""
        nvars = cfg.dim if nvars is None else nvars
        terms = {}
        for i in range(cfg.dim):
            e = [0] * nvars
            e[offset + i] = 2
            terms[(tuple(e), 0)] = 1
        return cls(cfg, nvars, terms)

    # -- inspection ------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, block: range | None = None) -> int:
        if not self.terms:
            return -1
        if block is None:
            return max(sum(e) for e, _ in self.terms)
        return max(sum(e[i] for i in block) for e, _ in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self.terms}) <= 1

    def coefficient(self, exps) -> Multivector:
        exps = tuple(exps)
        return Multivector(self.cfg, {b: c for (e, b), c in self.terms.items() if e == exps})

    def items(self) -> Iterator[tuple[tuple[int, ...], Multivector]]:
        """(exponents, Multivector) pairs in sorted exponent order."""
        grouped: dict[tuple, dict] = {}
        for (e, b), c in self.terms.items():
            grouped.setdefault(e, {})[b] = c
        for e in sorted(grouped):
            yield e, Multivector(self.cfg, grouped[e])

    def blade_component(self, blade: int) -> MvPolynomial:
        """Real-valued polynomial carried by one blade (as a scalar polynomial)."""
        return MvPolynomial(
            self.cfg, self.nvars, {(e, 0): c for (e, b), c in self.terms.items() if b == blade}
        )

    def blades(self) -> set[int]:
        return {b for _, b in self.terms}

    def homogeneous_part(self, d: int, block: range | None = None) -> MvPolynomial:
        if block is None:
            block = range(self.nvars)
        return MvPolynomial(
            self.cfg,
            self.nvars,
            {(e, b): c for (e, b), c in self.terms.items() if sum(e[i] for i in block) == d},
        )

    def split(self, block: range) -> dict[tuple[int, ...], MvPolynomial]:
        """Group terms by their exponents on ``block``; those exponents are zeroed."""
        out: dict[tuple, dict] = {}
        for (e, b), c in self.terms.items():
            key = tuple(e[i] for i in block)
            rest = list(e)
            for i in block:
                rest[i] = 0
            out.setdefault(key, {})[(tuple(rest), b)] = c
        return {k: MvPolynomial(self.cfg, self.nvars, t) for k, t in sorted(out.items())}

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> MvPolynomial:
        if isinstance(other, MvPolynomial):
            if other.cfg != self.cfg:
                raise ConfigurationError("polynomials belong to different algebras")
            if other.nvars != self.nvars:
                raise ConfigurationError(
                    f"variable count mismatch: {self.nvars} vs {other.nvars}"
                )
            return other
        return MvPolynomial.constant(self.cfg, other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return MvPolynomial(self.cfg, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MvPolynomial(self.cfg, self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> MvPolynomial:
        c = _exact(c)
        return MvPolynomial(self.cfg, self.nvars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if self.terms and other.terms:
            d = self.degree() + other.degree()
            if d > self.cfg.max_degree:
                raise DegreeLimitError(
                    f"product degree {d} exceeds max_degree={self.cfg.max_degree}"
                )
        signs = self.cfg.signs
        out: dict = {}
        for (ea, ba), ca in self.terms.items():
            row = signs[ba]
            for (eb, bb), cb in other.terms.items():
                key = (tuple(map(add, ea, eb)), ba ^ bb)
                out[key] = out.get(key, 0) + row[bb] * ca * cb
        return MvPolynomial(self.cfg, self.nvars, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self._coerce(other) * self

    def __truediv__(self, c):
        c = _exact(c)
        if c == 0:
            raise ZeroDivisionError("polynomial divided by zero")
        return self.scale(Fraction(1) / c)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = MvPolynomial.constant(self.cfg, 1, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, RadialRational):
            return NotImplemented
        try:
            other = self._coerce(other)
        except (ConfigurationError, TypeError):
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.cfg.m, self.nvars, frozenset(self.terms.items())))

    def blade_mul(self, blade: int, side: str = "left") -> MvPolynomial:
        """e_B * p (left) or p * e_B (right) for a single blade, sign included."""
        signs = self.cfg.signs
        if side == "left":
            row = signs[blade]
            return MvPolynomial(
                self.cfg, self.nvars, {(e, blade ^ b): row[b] * c for (e, b), c in self.terms.items()}
            )
        return MvPolynomial(
            self.cfg, self.nvars, {(e, b ^ blade): signs[b][blade] * c for (e, b), c in self.terms.items()}
        )

    # -- calculus --------------------------------------------------------

    def partial(self, i: int) -> MvPolynomial:
        if not 0 <= i < self.nvars:
            raise ConfigurationError(f"unknown variable index {i} (nvars={self.nvars})")
        out = {}
        for (e, b), c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[(ne, b)] = out.get((ne, b), 0) + k * c
        return MvPolynomial(self.cfg, self.nvars, out)

    def euler(self, block: range) -> MvPolynomial:
        """sum_{i in block} x_i d/dx_i, the radial derivative scaled by |x|."""
        return MvPolynomial(
            self.cfg,
            self.nvars,
            {(e, b): c * sum(e[i] for i in block) for (e, b), c in self.terms.items()},
        )

    def laplacian(self, block: range) -> MvPolynomial:
        out = {}
        for (e, b), c in self.terms.items():
            for i in block:
                k = e[i]
                if k >= 2:
                    ne = e[:i] + (k - 2,) + e[i + 1:]
                    out[(ne, b)] = out.get((ne, b), 0) + k * (k - 1) * c
        return MvPolynomial(self.cfg, self.nvars, out)

    # -- evaluation ------------------------------------------------------

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Float values at points of shape (npts, nvars) -> (npts, blades)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.nvars:
            raise ConfigurationError(f"points need {self.nvars} coordinates")
        out = np.zeros((pts.shape[0], self.cfg.blade_count))
        cache: dict[tuple, np.ndarray] = {}
        for (e, b), c in self.terms.items():
            mono = cache.get(e)
            if mono is None:
                mono = np.ones(pts.shape[0])
                for i, k in enumerate(e):
                    if k:
                        mono = mono * pts[:, i] ** k
                cache[e] = mono
            out[:, b] += float(c) * mono
        return out

    def evaluate_exact(self, point) -> Multivector:
        acc: dict[int, object] = {}
        point = [_exact(v) for v in point]
        for (e, b), c in self.terms.items():
            v = c
            for xi, k in zip(point, e):
                if k:
                    v = v * xi**k
            acc[b] = acc.get(b, 0) + v
        return Multivector(self.cfg, acc)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, b), c in sorted(self.terms.items()):
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}*{blade_name(b)}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


class RadialRational:
    """numerator / (rho^2)^k with rho^2 the squared norm of one variable block.

    No cancellation of rho^2 factors is attempted; equality cross-multiplies.
    """

    __slots__ = ("num", "k", "offset")

    def __init__(self, num: MvPolynomial, k: int, offset: int = 0):
        if k < 0:
            raise ValueError("rho power must be non-negative")
        self.num = num
        self.k = k
        self.offset = offset

    @property
    def cfg(self) -> AlgebraConfig:
        return self.num.cfg

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def block(self) -> range:
        return range(self.offset, self.offset + self.cfg.dim)

    @classmethod
    def from_poly(cls, p: MvPolynomial, offset: int = 0) -> RadialRational:
        return cls(p, 0, offset)

    @classmethod
    def inverse_var(cls, cfg, nvars=None, offset=0) -> RadialRational:
        """x^{-1} = x*/rho^2."""
        return cls(MvPolynomial.paravector_var(cfg, nvars, offset, conjugate=True), 1, offset)

    def rho_sq(self) -> MvPolynomial:
        return MvPolynomial.norm_sq_var(self.cfg, self.nvars, self.offset)

    def _coerce(self, other) -> RadialRational:
        if isinstance(other, RadialRational):
            if other.offset != self.offset:
                raise ConfigurationError("radial rationals over different variable blocks")
            return other
        if isinstance(other, MvPolynomial):
            return RadialRational(other, 0, self.offset)
        return RadialRational(MvPolynomial.constant(self.cfg, other, self.nvars), 0, self.offset)

    def _common(self, other: RadialRational) -> tuple[MvPolynomial, MvPolynomial, int]:
        k = max(self.k, other.k)
        r2 = self.rho_sq()
        a = self.num * r2 ** (k - self.k) if k > self.k else self.num
        b = other.num * r2 ** (k - other.k) if k > other.k else other.num
        return a, b, k

    def __add__(self, other):
        other = self._coerce(other)
        a, b, k = self._common(other)
        return RadialRational(a + b, k, self.offset)

    __radd__ = __add__

    def __neg__(self):
        return RadialRational(-self.num, self.k, self.offset)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RadialRational(self.num.scale(other), self.k, self.offset)
        if isinstance(other, Multivector):
            return RadialRational(self.num * other, self.k, self.offset)
        other = self._coerce(other)
        return RadialRational(self.num * other.num, self.k + other.k, self.offset)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RadialRational(self.num.scale(other), self.k, self.offset)
        if isinstance(other, Multivector):
            return RadialRational(other * self.num, self.k, self.offset)
        return self._coerce(other) * self

    def __truediv__(self, c):
        return RadialRational(self.num / c, self.k, self.offset)

    def __eq__(self, other):
        if isinstance(other, (RadialRational, MvPolynomial, Multivector, int, Fraction)):
            other = self._coerce(other)
            a, b, _ = self._common(other)
            return a == b
        return NotImplemented

    def __hash__(self):
        raise TypeError("RadialRational equality is by cross-multiplication; not hashable")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def blade_mul(self, blade: int, side: str = "left") -> RadialRational:
        return RadialRational(self.num.blade_mul(blade, side), self.k, self.offset)

    def partial(self, i: int) -> RadialRational:
        if i not in self.block or self.k == 0:
            return RadialRational(self.num.partial(i), self.k, self.offset)
        # d_i (P / rho^{2k}) = (rho^2 d_i P - 2k x_i P) / rho^{2k+2}
        xi = MvPolynomial.coordinate(self.cfg, i, self.nvars)
        num = self.rho_sq() * self.num.partial(i) - (xi * self.num).scale(2 * self.k)
        return RadialRational(num, self.k + 1, self.offset)

    def euler(self, block: range) -> RadialRational:
        if block != self.block or self.k == 0:
            return RadialRational(self.num.euler(block), self.k, self.offset)
        # rho^{-2k} is homogeneous of degree -2k
        return RadialRational(self.num.euler(block) - self.num.scale(2 * self.k), self.k, self.offset)

    def laplacian(self, block: range) -> RadialRational:
        if block != self.block or self.k == 0:
            return RadialRational(self.num.laplacian(block), self.k, self.offset)
        # Delta(P rho^{-2k}) = [rho^2 Delta P - 4k E(P) - 2k(n-2k-2) P] / rho^{2k+2}
        k, n = self.k, self.cfg.dim
        num = (
            self.rho_sq() * self.num.laplacian(block)
            - self.num.euler(block).scale(4 * k)
            - self.num.scale(2 * k * (n - 2 * k - 2))
        )
        return RadialRational(num, k + 1, self.offset)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r2 = np.sum(pts[:, self.offset:self.offset + self.cfg.dim] ** 2, axis=1)
        return self.num.evaluate(pts) / (r2**self.k)[:, None]

    def __repr__(self):
        return f"({self.num}) / rho^{2 * self.k}"


# -- JSON --------------------------------------------------------------------

def poly_to_json(p: MvPolynomial) -> list[dict]:
    return [{"exponents": list(e), "coeff": multivector_to_json(mv)} for e, mv in p.items()]


def poly_from_json(cfg: AlgebraConfig, data, nvars: int | None = None) -> MvPolynomial:
    if isinstance(data, dict):
        data = data["terms"]
    if nvars is None:
        nvars = len(data[0]["exponents"]) if data else cfg.dim
    acc = MvPolynomial.zero(cfg, nvars)
    for item in data:
        exps = tuple(int(v) for v in item["exponents"])
        if len(exps) != nvars:
            raise ConfigurationError("inconsistent exponent vector length")
        acc = acc + MvPolynomial.monomial(cfg, exps, multivector_from_json(cfg, item["coeff"]))
    return acc


def radial_to_json(r: RadialRational) -> dict:
    return {"terms": poly_to_json(r.num), "rho_power": r.k, "offset": r.offset}


def radial_from_json(cfg: AlgebraConfig, data: dict, nvars: int | None = None) -> RadialRational:
    return RadialRational(poly_from_json(cfg, data["terms"], nvars), int(data["rho_power"]), int(data.get("offset", 0)))


def count_monomials(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)


def exponent_vectors(nvars: int, degree: int) -> Iterator[tuple[int, ...]]:
    """All exponent vectors of a given total degree, in lexicographic order."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in exponent_vectors(nvars - 1, degree - first):
            yield (first,) + rest


__all__ = [
    "DegreeLimitError",
    "MvPolynomial",
    "RadialRational",
    "poly_to_json",
    "poly_from_json",
    "radial_to_json",
    "radial_from_json",
    "exponent_vectors",
    "count_monomials",
]
