"""Exact arithmetic in the Clifford algebra R_{0,2m+1}.

Blades are encoded as bitmasks over the generators e_1..e_{2m+1}: bit ``i-1``
is set when e_i occurs.  The empty mask is the scalar unit, written e_0 at
the paravector level.  Every generator squares to -1.

Coefficients are Python ints or :class:`fractions.Fraction`; nothing in this
module rounds.  Float work happens in numpy arrays produced by the explicit
``to_array`` conversions, and in :func:`mv_product_array`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Scalar = int | Fraction

DEFAULT_MAX_M = 3


class ConfigurationError(ValueError):
    """Objects built over different algebras were combined, or bounds exceeded."""


def _reorder_sign(a: int, b: int) -> int:
    # transpositions needed to merge the generator lists of a and b
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def _sign_table(n_gen: int, fault: tuple[int, int] | None) -> tuple[tuple[int, ...], ...]:
    size = 1 << n_gen
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            s = _reorder_sign(a, b)
            # e_i e_i = -1 for every shared generator
            if bin(a & b).count("1") & 1:
                s = -s
            row.append(s)
        rows.append(row)
    if fault is not None:
        a, b = fault
        rows[a][b] = -rows[a][b]
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class AlgebraConfig:
    """The algebra R_{0,2m+1} acting on paravectors of R^{2m+2}.

    ``fault`` flips the sign of one entry of the product table.  It exists
    only so that verification runs can prove they detect a broken algebra.
    """

    m: int
    max_m: int = DEFAULT_MAX_M
    max_degree: int = 16
    fault: tuple[int, int] | None = None
    signs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 0:
            raise ConfigurationError(f"m must be non-negative, got {self.m}")
        if self.m > self.max_m:
            raise ConfigurationError(
                f"m={self.m} exceeds the configured bound max_m={self.max_m} "
                f"({1 << (2 * self.m + 1)} blades)"
            )
        object.__setattr__(self, "signs", _sign_table(self.generator_count, self.fault))

    @property
    def generator_count(self) -> int:
        return 2 * self.m + 1

    @property
    def blade_count(self) -> int:
        return 1 << self.generator_count

    @property
    def dim(self) -> int:
        """Number of paravector coordinates x_0..x_{2m+1}."""
        return 2 * self.m + 2

    def coord_blade(self, i: int) -> int:
        """Blade of e_i, with e_0 the scalar unit."""
        if not 0 <= i < self.dim:
            raise ConfigurationError(f"coordinate index {i} out of range for m={self.m}")
        return 0 if i == 0 else 1 << (i - 1)

    def blade_product(self, a: int, b: int) -> tuple[int, int]:
        return self.signs[a][b], a ^ b


def blade_from_indices(indices: Iterable[int]) -> tuple[int, int]:
    """Canonical (sign, mask) of the ordered product e_{i1} e_{i2} ... (i >= 1)."""
    sign, mask = 1, 0
    for i in indices:
        if i < 1:
            raise ValueError("generator indices start at 1")
        b = 1 << (i - 1)
        s = _reorder_sign(mask, b)
        if mask & b:
            s = -s
        sign *= s
        mask ^= b
    return sign, mask


def blade_indices(mask: int) -> list[int]:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def blade_grade(mask: int) -> int:
    return bin(mask).count("1")


def blade_name(mask: int) -> str:
    return "e" + "".join(str(i) for i in blade_indices(mask)) if mask else "1"


def _exact(c) -> Scalar:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return Fraction(c.numerator, c.denominator)
    if isinstance(c, str):
        return _exact(Fraction(c))
    raise TypeError(f"exact scalar expected, got {type(c).__name__}")


class Multivector:
    """Sparse exact multivector: blade mask -> nonzero rational coefficient."""

    __slots__ = ("cfg", "coeffs", "_hash")

    def __init__(self, cfg: AlgebraConfig, coeffs: Mapping[int, Scalar] | None = None):
        self.cfg = cfg
        clean = {}
        for b, c in (coeffs or {}).items():
            if not 0 <= b < cfg.blade_count:
                raise ConfigurationError(f"blade {b} outside algebra with m={cfg.m}")
            c = _exact(c)
            if c != 0:
                clean[b] = c
        self.coeffs = clean
        self._hash = None

    @classmethod
    def scalar(cls, cfg: AlgebraConfig, c: Scalar) -> Multivector:
        return cls(cfg, {0: c})

    @classmethod
    def blade(cls, cfg: AlgebraConfig, indices: Sequence[int], c: Scalar = 1) -> Multivector:
        sign, mask = blade_from_indices(indices)
        return cls(cfg, {mask: sign * _exact(c)})

    @classmethod
    def basis(cls, cfg: AlgebraConfig, i: int) -> Multivector:
        """The paravector unit e_i, i = 0..2m+1."""
        return cls(cfg, {cfg.coord_blade(i): 1})

    def _check(self, other: Multivector):
        if other.cfg != self.cfg:
            raise ConfigurationError("multivectors belong to different algebras")

    def __add__(self, other):
        if not isinstance(other, Multivector):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            other = Multivector.scalar(self.cfg, other)
        self._check(other)
        out = dict(self.coeffs)
        for b, c in other.coeffs.items():
            out[b] = out.get(b, 0) + c
        return Multivector(self.cfg, out)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.cfg, {b: -c for b, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, (Multivector, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geo_product(self, other)
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        other = _exact(other)
        return Multivector(self.cfg, {b: c * other for b, c in self.coeffs.items()})

    def __rmul__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        other = _exact(other)
        return Multivector(self.cfg, {b: other * c for b, c in self.coeffs.items()})

    def __truediv__(self, other):
        other = _exact(other)
        if other == 0:
            raise ZeroDivisionError("division of a multivector by zero")
        return self * (Fraction(1) / other)

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return self.cfg == other.cfg and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == ({0: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.cfg.m, frozenset(self.coeffs.items())))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*{blade_name(b)}" for b, c in sorted(self.coeffs.items()))

    def grades(self) -> set[int]:
        return {blade_grade(b) for b in self.coeffs}

    def scalar_part(self) -> Scalar:
        return self.coeffs.get(0, 0)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.cfg.blade_count)
        for b, c in self.coeffs.items():
            out[b] = float(c)
        return out


def geo_product(a: Multivector, b: Multivector) -> Multivector:
    """Geometric product a*b."""
    if a.cfg != b.cfg:
        raise ConfigurationError("multivectors belong to different algebras")
    signs = a.cfg.signs
    out: dict[int, Scalar] = {}
    for ba, ca in a.coeffs.items():
        row = signs[ba]
        for bb, cb in b.coeffs.items():
            k = ba ^ bb
            out[k] = out.get(k, 0) + row[bb] * ca * cb
    return Multivector(a.cfg, out)


class Paravector:
    """Point x = x_0 + e_1 x_1 + ... + e_{2m+1} x_{2m+1} of S + V.

    Coordinates may be exact or floats; exact ones stay exact through
    :meth:`to_multivector`.
    """

    __slots__ = ("cfg", "coords")

    def __init__(self, cfg: AlgebraConfig, coords: Sequence):
        if len(coords) != cfg.dim:
            raise ConfigurationError(f"paravector needs {cfg.dim} coordinates, got {len(coords)}")
        self.cfg = cfg
        self.coords = tuple(c if isinstance(c, float) else _exact(c) for c in coords)

    @property
    def is_exact(self) -> bool:
        return not any(isinstance(c, float) for c in self.coords)

    def to_multivector(self) -> Multivector:
        if not self.is_exact:
            raise TypeError("float paravectors have no exact multivector form; use to_array")
        return Multivector(self.cfg, {self.cfg.coord_blade(i): c for i, c in enumerate(self.coords)})

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.cfg.blade_count)
        for i, c in enumerate(self.coords):
            out[self.cfg.coord_blade(i)] = float(c)
        return out

    def norm_sq(self):
        return sum(c * c for c in self.coords)

    def __mul__(self, other):
        if isinstance(other, Paravector):
            other = other.to_multivector()
        return self.to_multivector() * other

    def __eq__(self, other):
        if not isinstance(other, Paravector):
            return NotImplemented
        return self.cfg == other.cfg and self.coords == other.coords

    def __hash__(self):
        return hash((self.cfg.m, self.coords))

    def __repr__(self):
        return f"Paravector({list(self.coords)})"


def conjugate(x: Paravector) -> Paravector:
    """x* = x_0 - sum e_i x_i."""
    return Paravector(x.cfg, (x.coords[0],) + tuple(-c for c in x.coords[1:]))


def paravector_inverse(x: Paravector) -> Paravector:
    n2 = x.norm_sq()
    if n2 == 0:
        raise ZeroDivisionError("the zero paravector has no inverse")
    xs = conjugate(x)
    if x.is_exact:
        n2 = Fraction(n2)
        return Paravector(x.cfg, [c / n2 for c in xs.coords])
    return Paravector(x.cfg, [float(c) / n2 for c in xs.coords])


# -- float layer -------------------------------------------------------------

@lru_cache(maxsize=None)
def _product_tables(cfg: AlgebraConfig) -> tuple[np.ndarray, np.ndarray]:
    """perm[i, k] = i ^ k and sign[i, k] = sign of e_i e_{i^k}, so (ab)_k = sum_i sign a_i b_perm."""
    n = cfg.blade_count
    perm = np.array([[i ^ k for k in range(n)] for i in range(n)])
    sign = np.array([[cfg.signs[i][i ^ k] for k in range(n)] for i in range(n)], dtype=float)
    return perm, sign


def mv_product_array(cfg: AlgebraConfig, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise geometric product of float multivector arrays of shape (..., blades)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    perm, sign = _product_tables(cfg)
    for i in range(cfg.blade_count):
        ai = a[..., i]
        if not ai.any():
            continue
        out += ai[..., None] * (b[..., perm[i]] * sign[i])
    return out


def right_mul_matrix(cfg: AlgebraConfig, c: np.ndarray) -> np.ndarray:
    """Matrix R with v @ R = v c for a single float multivector c."""
    perm, sign = _product_tables(cfg)
    return sign * np.asarray(c, dtype=float)[perm]


def paravector_array(cfg: AlgebraConfig, coords: np.ndarray) -> np.ndarray:
    """Embed float coordinates of shape (..., dim) as multivector arrays."""
    coords = np.asarray(coords, dtype=float)
    out = np.zeros(coords.shape[:-1] + (cfg.blade_count,))
    for i in range(cfg.dim):
        out[..., cfg.coord_blade(i)] = coords[..., i]
    return out


# -- JSON --------------------------------------------------------------------

def scalar_to_json(c) -> dict | float:
    if isinstance(c, float):
        return c
    c = Fraction(c)
    return {"num": str(c.numerator), "den": str(c.denominator)}


def scalar_from_json(obj) -> Scalar | float:
    if isinstance(obj, float):
        return obj
    if isinstance(obj, int):
        return obj
    return _exact(Fraction(int(obj["num"]), int(obj["den"])))


def multivector_to_json(mv: Multivector) -> list[dict]:
    out = []
    for b, c in sorted(mv.coeffs.items()):
        c = Fraction(c)
        out.append({"blade": blade_indices(b), "num": str(c.numerator), "den": str(c.denominator)})
    return out


def multivector_from_json(cfg: AlgebraConfig, data: list[dict]) -> Multivector:
    acc = Multivector(cfg)
    for item in data:
        c = Fraction(int(item["num"]), int(item["den"]))
        acc = acc + Multivector.blade(cfg, item["blade"], c)
    return acc


def paravector_to_json(x: Paravector) -> list:
    return [scalar_to_json(c) for c in x.coords]


def paravector_from_json(cfg: AlgebraConfig, data: list) -> Paravector:
    return Paravector(cfg, [scalar_from_json(c) for c in data])
