"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored in the power basis 1, z, ..., z^(phi(n)-1) modulo the
n-th cyclotomic polynomial, with :class:`fractions.Fraction` coordinates.
Elements living in different fields are compared and combined by lifting
both to Q(zeta_lcm).

Character values of a group of exponent ``e`` are algebraic integers of
Q(zeta_e); :func:`snap` recovers them exactly from floating point values of
all their Galois conjugates.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

import numpy as np

__all__ = ["Cyclo", "cyclotomic_poly", "snap", "units"]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def units(n: int) -> list[int]:
    """Residues coprime to ``n`` (``[1]`` for n = 1)."""
    if n == 1:
        return [1]
    return [k for k in range(1, n) if gcd(k, n) == 1]


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    # coefficients low -> high, den monic, division must be exact
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1]
        out[i] = q
        if q:
            for j, d in enumerate(den):
                num[i + j] -= q * d
    assert not any(num), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


def _reduce(coeffs: list, n: int) -> tuple:
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    c = [Fraction(x) for x in coeffs]
    for i in range(len(c) - 1, deg - 1, -1):
        q = c[i]
        if q:
            for j, p in enumerate(phi):
                c[i - deg + j] -= q * p
    c = c[:deg] + [Fraction(0)] * max(0, deg - len(c))
    return tuple(c)


@lru_cache(maxsize=None)
def _root_powers(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


class Cyclo:
    """An element of the cyclotomic field Q(zeta_n)."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs):
        self.n = int(n)
        self.c = _reduce(list(coeffs), self.n)

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, q) -> "Cyclo":
        return cls(1, [Fraction(q)])

    @classmethod
    def root(cls, n: int, j: int = 1) -> "Cyclo":
        j %= n
        return cls(n, [0] * j + [1])

    @staticmethod
    def coerce(x) -> "Cyclo":
        if isinstance(x, Cyclo):
            return x
        if isinstance(x, (int, Rational)):
            return Cyclo.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Cyclo")

    # -- field embedding ----------------------------------------------
    def lift(self, m: int) -> "Cyclo":
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"Q(zeta_{self.n}) is not a subfield of Q(zeta_{m})")
        step = m // self.n
        poly = [Fraction(0)] * (step * len(self.c) + 1)
        for j, a in enumerate(self.c):
            poly[j * step] += a
        return Cyclo(m, poly)

    def _pair(self, other):
        other = Cyclo.coerce(other)
        m = _lcm(self.n, other.n)
        return self.lift(m), other.lift(m), m

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        try:
            a, b, m = self._pair(other)
        except TypeError:
            return NotImplemented
        return Cyclo(m, [x + y for x, y in zip(a.c, b.c)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-Cyclo.coerce(other))

    def __rsub__(self, other):
        return Cyclo.coerce(other) + (-self)

    def __mul__(self, other):
        try:
            a, b, m = self._pair(other)
        except TypeError:
            return NotImplemented
        prod = [Fraction(0)] * (len(a.c) + len(b.c) - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    prod[i + j] += x * y
        return Cyclo(m, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            q = Fraction(other)
            return Cyclo(self.n, [x / q for x in self.c])
        return NotImplemented

    def galois(self, k: int) -> "Cyclo":
        """Apply the automorphism zeta -> zeta^k (k coprime to n)."""
        poly = [Fraction(0)] * self.n
        for j, a in enumerate(self.c):
            poly[(k * j) % self.n] += a
        return Cyclo(self.n, poly)

    def conjugate(self) -> "Cyclo":
        return self.galois(-1)

    # -- predicates ---------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def is_algebraic_integer(self) -> bool:
        return all(x.denominator == 1 for x in self.c)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.c[0] if self.c else Fraction(0)

    def __complex__(self) -> complex:
        w = _root_powers(self.n)
        return complex(sum(float(a) * w[j] for j, a in enumerate(self.c) if a))

    def __eq__(self, other):
        try:
            a, b, _ = self._pair(other)
        except TypeError:
            return NotImplemented
        return a.c == b.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.to_fraction())
        z = complex(self)
        return hash((round(z.real, 7), round(z.imag, 7)))

    def __repr__(self):
        if self.is_rational():
            return f"Cyclo({self.to_fraction()})"
        terms = []
        for j, a in enumerate(self.c):
            if a:
                terms.append(f"{a}*z{self.n}^{j}" if j else f"{a}")
        return "Cyclo(" + " + ".join(terms) + ")"

    def sort_key(self, digits: int = 9) -> tuple[float, float]:
        z = complex(self)
        return (round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0)


def snap(conjugates: dict[int, complex], n: int, tol: float = 1e-9) -> Cyclo | None:
    """Recover an algebraic integer of Q(zeta_n) from its Galois conjugates.

    ``conjugates[k]`` is the numerical value of sigma_k(x) for every unit k
    mod n. Returns ``None`` when the rounded integer coordinates do not
    reproduce the input within ``tol``.
    """
    ks = units(n)
    phi = len(cyclotomic_poly(n)) - 1
    w = _root_powers(n)
    vander = np.array([[w[(k * j) % n] for j in range(phi)] for k in ks])
    rhs = np.array([conjugates[k] for k in ks], dtype=complex)
    coords = np.linalg.solve(vander, rhs)
    ints = np.rint(coords.real)
    resid = np.max(np.abs(vander @ ints - rhs)) if len(rhs) else 0.0
    if resid > tol * max(1.0, float(np.max(np.abs(rhs)))):
        return None
    return Cyclo(n, [int(x) for x in ints])
