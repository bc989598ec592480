"""Exact evaluation of higher moments from local densities.

The r-th moment is ``sum_l S(r, l) * D_l`` where ``S`` is the Stirling
number of the second kind and ``D_l`` sums ``prod s_{P_j}`` over ordered
l-tuples of pairwise distinct places.  ``D_l = l! e_l`` is obtained from the
power sums ``p_j = sum_P s_P^j`` through Newton's identities.  Power sums are
truncated at place degree T and enclosed in rational intervals using the
tail bound ``s(t) <= C q^(-beta t)`` and ``N_q(t) <= q^t``.

Everything is exact: intervals carry ``Fraction`` endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .places import Place, count_places
from .systems import Coprime, Eisenstein, Flavor, SystemSpec, Unimodular, density_at_degree, local_density

Number = Union[int, Fraction]


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "RationalInterval":
        return cls(Fraction(x), Fraction(x))

    @staticmethod
    def _lift(other) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return other
        return RationalInterval.point(other)

    def __add__(self, other):
        o = self._lift(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        ends = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(ends), max(ends))

    __rmul__ = __mul__

    def __truediv__(self, k: Number):
        k = Fraction(k)
        if k == 0:
            raise ZeroDivisionError("interval division by zero")
        return self * (1 / k)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x: Number) -> bool:
        return self.lo <= x <= self.hi

    def issubset(self, other: "RationalInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def widen(self, eps: Number) -> "RationalInterval":
        return RationalInterval(self.lo - eps, self.hi + eps)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class TailModel:
    """Bound ``s(t) <= C * q^(-beta * t)`` on the density at degree t."""

    C: Fraction
    beta: int


def tail_model(spec: SystemSpec) -> TailModel:
    if isinstance(spec, Coprime):
        return TailModel(Fraction(1), spec.k)
    if isinstance(spec, Eisenstein):
        if spec.flavor is Flavor.PLAIN:
            return TailModel(Fraction(1), spec.d)
        if spec.flavor is Flavor.SHIFTED:
            return TailModel(Fraction(1), spec.d - 1)
        return TailModel(Fraction(2), spec.d - 1)
    if isinstance(spec, Unimodular):
        return TailModel(Fraction(spec.n), spec.m - spec.n + 1)
    raise TypeError(f"no tail model for {spec!r}")


@dataclass(frozen=True)
class MomentQuery:
    spec: SystemSpec
    q: int
    r: int
    truncation: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("moment order r must be >= 1")
        if self.truncation < 1:
            raise ValueError("truncation degree T must be >= 1")


def stirling2(n: int, l: int) -> int:
    """Stirling number of the second kind via the triangular recurrence."""
    if not (1 <= l <= n):
        raise ValueError(f"stirling2 needs 1 <= l <= n (got n={n}, l={l})")
    row = [1]  # S(0, 0)
    for i in range(1, n + 1):
        new = [0] * (i + 1)
        for j in range(1, i + 1):
            new[j] = j * (row[j] if j < len(row) else 0) + row[j - 1]
        row = new
    return row[l]


def stirling2_explicit(n: int, l: int) -> int:
    total = sum((-1) ** k * math.comb(l, k) * (l - k) ** n for k in range(l + 1))
    return total // math.factorial(l)


def tail_bound(spec: SystemSpec, q: int, j: int, T: int) -> Fraction:
    model = tail_model(spec)
    expo = 1 - j * model.beta
    if expo >= 0:
        raise ValueError(f"power sum of order {j} does not converge for {spec}")
    ratio = Fraction(q) ** expo
    return model.C**j * ratio ** (T + 1) / (1 - ratio)


def power_sum(spec: SystemSpec, q: int, j: int, T: int) -> RationalInterval:
    """Enclosure of ``sum_P s_P^j`` from the exact sum over deg P <= T plus the tail bound."""
    if j < 1:
        raise ValueError("power sum order must be >= 1")
    lo = sum(
        (count_places(q, t) * density_at_degree(spec, q, t) ** j for t in range(1, T + 1)),
        Fraction(0),
    )
    return RationalInterval(lo, lo + tail_bound(spec, q, j, T))


def finite_power_sums(spec: SystemSpec, places: Sequence[Place], count: int) -> list[RationalInterval]:
    """Exact power sums ``p_1 .. p_count`` over an explicit finite list of places."""
    dens = [local_density(spec, P) for P in places]
    return [RationalInterval.point(sum((s**j for s in dens), Fraction(0))) for j in range(1, count + 1)]


def _elementary(power_sums: Sequence[RationalInterval], upto: int) -> list[RationalInterval]:
    # Newton: l * e_l = sum_{i=1..l} (-1)^(i-1) e_{l-i} p_i
    e = [RationalInterval.point(1)]
    for l in range(1, upto + 1):
        acc = RationalInterval.point(0)
        for i in range(1, l + 1):
            term = e[l - i] * power_sums[i - 1]
            acc = acc + term if i % 2 else acc - term
        e.append(acc / l)
    return e


def distinct_tuple_sum(l: int, power_sums: Sequence[RationalInterval]) -> RationalInterval:
    """Sum over ordered pairwise-distinct l-tuples of places of ``prod s``."""
    if l < 1 or len(power_sums) < l:
        raise ValueError("need l >= 1 and at least l power sums")
    return _elementary(power_sums, l)[l] * math.factorial(l)


def moment_from_power_sums(r: int, power_sums: Sequence[RationalInterval]) -> RationalInterval:
    e = _elementary(power_sums, r)
    total = RationalInterval.point(0)
    for l in range(1, r + 1):
        total = total + e[l] * (stirling2(r, l) * math.factorial(l))
    return total


def moment(query: MomentQuery) -> RationalInterval:
    sums = [power_sum(query.spec, query.q, j, query.truncation) for j in range(1, query.r + 1)]
    return moment_from_power_sums(query.r, sums)


def moment_over_places(spec: SystemSpec, r: int, places: Sequence[Place]) -> Fraction:
    """Newton-identity evaluation restricted to a finite universe of places."""
    iv = moment_from_power_sums(r, finite_power_sums(spec, places, r))
    assert iv.lo == iv.hi
    return iv.lo


MOMENT_DIRECT_LIMIT = 2_000_000


def moment_direct(spec: SystemSpec, r: int, places: Sequence[Place]) -> Fraction:
    """Brute-force nested loops over ordered distinct tuples of ``places``."""
    n = len(places)
    work = sum(math.perm(n, l) for l in range(1, min(r, n) + 1))
    if work > MOMENT_DIRECT_LIMIT:
        raise ValueError(f"moment_direct would visit {work} tuples (limit {MOMENT_DIRECT_LIMIT})")
    dens = [local_density(spec, P) for P in places]
    # integer numerators over a common denominator keep the inner loop in int arithmetic
    den = math.lcm(1, *(s.denominator for s in dens))
    nums = [s.numerator * (den // s.denominator) for s in dens]
    depth_max = min(r, n)
    level_sums = [0] * (depth_max + 1)

    # depth-first walk over ordered distinct tuples, extending the product one place at a time
    def walk(depth: int, used: int, prod_: int) -> None:
        for i in range(n):
            if used >> i & 1:
                continue
            ext = prod_ * nums[i]
            level_sums[depth + 1] += ext
            if depth + 1 < depth_max:
                walk(depth + 1, used | 1 << i, ext)

    walk(0, 0, 1)
    return sum(
        (Fraction(stirling2(r, l) * level_sums[l], den**l) for l in range(1, depth_max + 1)),
        Fraction(0),
    )


def crude_bound(spec: SystemSpec, q: int, r: int, T: int) -> Fraction:
    p1 = power_sum(spec, q, 1, T)
    return 2**r * r * (1 + p1.hi) ** r
