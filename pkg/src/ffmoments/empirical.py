"""Exhaustive verification over Riemann-Roch boxes of F_q(x).

For the divisor ``D = m * P_inf`` the Riemann-Roch space is the set of
polynomials of degree <= m, so a box is ``(F_q[x]_{<= m})^dim`` with
``q^((m+1) dim)`` elements.  Tuples are indexed in base ``q^(m+1)``, first
coordinate most significant, so any index range is an independent chunk.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .algebra import Polynomial
from .places import Place
from .systems import SystemSpec, candidate_places, in_exceptional_set, member

DEFAULT_BUDGET = 2**26


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"box has {required} tuples, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class Box:
    q: int
    m: int
    dim: int

    @property
    def side(self) -> int:
        return self.q ** (self.m + 1)

    @property
    def size(self) -> int:
        return self.side**self.dim

    def check(self, budget: int = DEFAULT_BUDGET) -> None:
        if self.size > budget:
            raise BudgetExceeded(self.size, budget)


def enumerate_box(
    box: Box, start: int = 0, stop: int | None = None, budget: int = DEFAULT_BUDGET
) -> Iterator[tuple[Polynomial, ...]]:
    box.check(budget)
    side, dim = box.side, box.dim
    polys = [Polynomial.from_index(i, box.q) for i in range(side)]
    stop = box.size if stop is None else min(stop, box.size)
    weights = [side ** (dim - 1 - j) for j in range(dim)]
    for idx in range(start, stop):
        yield tuple(polys[(idx // w) % side] for w in weights)


def _chunks(size: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, size))
    step = -(-size // parts)
    return [(s, min(s + step, size)) for s in range(0, size, step)]


@dataclass
class IncidenceHistogram:
    """How many non-exceptional tuples meet exactly c places, for each c."""

    box_size: int
    excluded: int = 0
    counts: Counter = field(default_factory=Counter)

    def merge(self, other: "IncidenceHistogram") -> None:
        self.excluded += other.excluded
        self.counts.update(other.counts)

    def power_sum(self, r: int) -> int:
        return sum(c**r * n for c, n in self.counts.items())


def _histogram_chunk(spec: SystemSpec, box: Box, start: int, stop: int, budget: int) -> IncidenceHistogram:
    hist = IncidenceHistogram(box.size)
    for a in enumerate_box(box, start, stop, budget):
        if in_exceptional_set(spec, a):
            hist.excluded += 1
        else:
            hist.counts[len(candidate_places(spec, a))] += 1
    return hist


def incidence_histogram(
    spec: SystemSpec, q: int, m: int, budget: int = DEFAULT_BUDGET, workers: int = 1
) -> IncidenceHistogram:
    box = Box(q, m, spec.ambient_dim)
    box.check(budget)
    total = IncidenceHistogram(box.size)
    if workers <= 1 or box.size < 1024:
        total.merge(_histogram_chunk(spec, box, 0, box.size, budget))
        return total
    ranges = _chunks(box.size, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_histogram_chunk, spec, box, s, e, budget) for s, e in ranges]
        for fut in futures:
            total.merge(fut.result())
    return total


@dataclass(frozen=True)
class EmpiricalReport:
    spec: SystemSpec
    q: int
    r: int
    m: int
    sum_of_counts_powered: int
    box_size: int
    excluded_count: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.sum_of_counts_powered, self.box_size)


def reports_from_histogram(
    spec: SystemSpec, q: int, m: int, hist: IncidenceHistogram, orders: Sequence[int]
) -> list[EmpiricalReport]:
    return [
        EmpiricalReport(spec, q, r, m, hist.power_sum(r), hist.box_size, hist.excluded)
        for r in orders
    ]


def empirical_moment(
    spec: SystemSpec, q: int, r: int, m: int, budget: int = DEFAULT_BUDGET, workers: int = 1
) -> EmpiricalReport:
    if r < 1:
        raise ValueError("moment order r must be >= 1")
    hist = incidence_histogram(spec, q, m, budget, workers)
    return reports_from_histogram(spec, q, m, hist, [r])[0]


def empirical_joint_density(
    spec: SystemSpec, q: int, places: Sequence[Place], m: int, budget: int = DEFAULT_BUDGET
) -> Fraction:
    if len(set(places)) != len(places):
        raise ValueError("places must be pairwise distinct")
    box = Box(q, m, spec.ambient_dim)
    hits = 0
    for a in enumerate_box(box, budget=budget):
        if all(member(spec, a, P) for P in places) and not in_exceptional_set(spec, a):
            hits += 1
    return Fraction(hits, box.size)


def _exceeds(degree: int, c_prime: Fraction, m: int, alpha: Fraction) -> bool:
    """Exact test of ``degree > c_prime * m**alpha`` for rational alpha >= 0."""
    if c_prime <= 0:
        return degree > 0 or c_prime < 0
    if m == 0:
        return degree > (c_prime if alpha == 0 else 0)
    # degree / c_prime > m ** (num/den)  <=>  (degree / c_prime) ** den > m ** num
    ratio = Fraction(degree) / c_prime
    return ratio**alpha.denominator > Fraction(m) ** alpha.numerator


def newcond_diagnostic(
    spec: SystemSpec,
    q: int,
    m: int,
    c_prime: Fraction,
    alpha: Fraction,
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Largest number of high-degree places any non-exceptional box element meets.

    High degree means ``deg P > c_prime * m**alpha``.
    """
    c_prime, alpha = Fraction(c_prime), Fraction(alpha)
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    box = Box(q, m, spec.ambient_dim)
    best = 0
    for a in enumerate_box(box, budget=budget):
        if in_exceptional_set(spec, a):
            continue
        n = sum(1 for P in candidate_places(spec, a) if _exceeds(P.degree, c_prime, m, alpha))
        best = max(best, n)
    return best
