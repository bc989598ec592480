"""Finite places of F_q(x): monic irreducible polynomials of F_q[x]."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import chain
from typing import Iterator

from .algebra import Polynomial, _check_prime


@dataclass(frozen=True)
class Place:
    generator: Polynomial
    degree: int

    def __post_init__(self) -> None:
        g = self.generator
        if g.degree != self.degree or self.degree < 1:
            raise ValueError(f"degree {self.degree} does not match generator {g}")
        if not g.is_monic():
            raise ValueError(f"place generator {g} is not monic")

    @classmethod
    def of(cls, f: Polynomial) -> "Place":
        """Validated constructor: ``f`` must be monic and irreducible."""
        if f.is_zero() or f.degree < 1 or not f.is_monic() or not is_irreducible(f):
            raise ValueError(f"{f} is not a monic irreducible polynomial")
        return cls(f, f.degree)

    @property
    def q(self) -> int:
        return self.generator.q

    @property
    def sort_key(self) -> tuple:
        return (self.degree, self.generator.coeffs)

    def __lt__(self, other: "Place") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return str(self.generator)


@dataclass(frozen=True)
class ResidueLevel:
    """Residues modulo ``place.generator ** exponent``."""

    place: Place
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    @property
    def modulus(self) -> Polynomial:
        return _power(self.place.generator, self.exponent)

    @property
    def size(self) -> int:
        return self.place.q ** (self.exponent * self.place.degree)

    def representatives(self) -> Iterator[Polynomial]:
        """All remainders of degree < exponent * degree, in index order."""
        q = self.place.q
        return (Polynomial.from_index(i, q) for i in range(self.size))


@lru_cache(maxsize=4096)
def _power(g: Polynomial, e: int) -> Polynomial:
    return g**e


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    result = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            result = -result
        f += 1
    if n > 1:
        result = -result
    return result


def count_places(q: int, t: int) -> int:
    """Number of monic irreducibles of degree ``t`` over F_q."""
    if t < 1:
        raise ValueError("degree must be >= 1")
    total = sum(mobius(e) * q ** (t // e) for e in range(1, t + 1) if t % e == 0)
    return total // t


@lru_cache(maxsize=None)
def places_of_degree(q: int, t: int) -> tuple[Place, ...]:
    """Monic irreducibles of exact degree ``t``, in canonical order.

    A monic polynomial of degree t is kept when no irreducible of degree
    <= t/2 divides it.
    """
    _check_prime(q)
    if t < 1:
        raise ValueError("degree must be >= 1")
    smaller = [P.generator for s in range(1, t // 2 + 1) for P in places_of_degree(q, s)]
    found = []
    base = q**t
    for low in range(base):
        f = Polynomial.from_index(base + low, q)  # x^t + (low-degree part)
        if all((f % g) for g in smaller):
            found.append(Place(f, t))
    found.sort()
    return tuple(found)


def enumerate_places(q: int, max_degree: int) -> list[Place]:
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    return list(chain.from_iterable(places_of_degree(q, t) for t in range(1, max_degree + 1)))


def is_irreducible(f: Polynomial) -> bool:
    if f.degree < 1:
        return False
    q = f.q
    for s in range(1, f.degree // 2 + 1):
        for P in places_of_degree(q, s):
            if not (f % P.generator):
                return False
    return True


@lru_cache(maxsize=1 << 16)
def distinct_factors(f: Polynomial) -> tuple[Place, ...]:
    """Monic irreducible divisors of ``f`` in canonical place order."""
    if f.is_zero():
        raise ValueError("distinct_factors of the zero polynomial")
    q = f.q
    rest = f.monic()
    found = []
    t = 1
    while rest.degree >= 2 * t:
        for P in places_of_degree(q, t):
            g = P.generator
            quo, rem = divmod(rest, g)
            if rem:
                continue
            found.append(P)
            rest = quo
            while True:
                quo, rem = divmod(rest, g)
                if rem:
                    break
                rest = quo
            if rest.degree < 2 * t:
                break
        t += 1
    if rest.degree >= 1:
        found.append(Place(rest, rest.degree))
    found.sort()
    return tuple(found)


def residue_class(f: Polynomial, level: ResidueLevel) -> Polynomial:
    return f % level.modulus


def valuation_membership(f: Polynomial, place: Place, e: int = 1) -> bool:
    """True iff ``place.generator ** e`` divides ``f`` (always true for 0)."""
    if f.is_zero():
        return True
    if e == 1:
        return (f % place.generator).is_zero()
    return (f % _power(place.generator, e)).is_zero()


def valuation(f: Polynomial, place: Place) -> float:
    if f.is_zero():
        return float("inf")
    v = 0
    while True:
        quo, rem = divmod(f, place.generator)
        if rem:
            return v
        f = quo
        v += 1
