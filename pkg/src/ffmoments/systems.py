"""The three local-to-global systems over F_q[x].

* ``Coprime(k)``: k-tuples whose entries all lie in P.
* ``Eisenstein(d, flavor)``: coefficient vectors ``(a_0, ..., a_d)`` that are
  P-Eisenstein (plain), P-Eisenstein after a shift ``y -> y + t`` (shifted),
  or shifted-or-reversed (affine).
* ``Unimodular(n, m)``: n x m matrices (row-major tuples) whose maximal
  minors all lie in P, i.e. whose reduction mod P is rank deficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Sequence, Union

from .algebra import (
    Polynomial,
    discriminant,
    gcd_many,
    inverse_mod,
    reverse_coeffs,
    separable_core,
    shift_coeffs,
)
from .places import Place, ResidueLevel, distinct_factors, valuation_membership

EXHAUSTIVE_GUARD = 2**20


class SpecError(ValueError):
    pass


class FeasibilityError(RuntimeError):
    def __init__(self, required: int, limit: int, what: str = "tuples"):
        super().__init__(f"enumeration needs {required} {what}, limit is {limit}")
        self.required = required
        self.limit = limit


class Flavor(str, Enum):
    PLAIN = "plain"
    SHIFTED = "shifted"
    AFFINE = "affine"


def _check_int(name: str, value) -> None:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpecError(f"{name} must be an integer (got {value!r})")


@dataclass(frozen=True)
class Coprime:
    k: int

    def __post_init__(self) -> None:
        _check_int("k", self.k)
        if self.k < 2:
            raise SpecError(f"coprime requires k >= 2 (got k={self.k})")

    @property
    def ambient_dim(self) -> int:
        return self.k

    def __str__(self) -> str:
        return f"coprime:k={self.k}"


@dataclass(frozen=True)
class Eisenstein:
    d: int
    flavor: Flavor = Flavor.PLAIN

    def __post_init__(self) -> None:
        _check_int("d", self.d)
        if self.d < 3:
            raise SpecError(f"eisenstein requires degree d >= 3 (got d={self.d})")
        object.__setattr__(self, "flavor", Flavor(self.flavor))

    @property
    def ambient_dim(self) -> int:
        return self.d + 1

    def __str__(self) -> str:
        return f"eisenstein:d={self.d}:flavor={self.flavor.value}"


@dataclass(frozen=True)
class Unimodular:
    n: int
    m: int

    def __post_init__(self) -> None:
        _check_int("n", self.n)
        _check_int("m", self.m)
        if self.n < 1:
            raise SpecError(f"unimodular requires n >= 1 (got n={self.n})")
        if not self.n < self.m:
            raise SpecError(f"unimodular requires n < m (got n={self.n}, m={self.m})")

    @property
    def ambient_dim(self) -> int:
        return self.n * self.m

    def __str__(self) -> str:
        return f"unimodular:n={self.n}:m={self.m}"


SystemSpec = Union[Coprime, Eisenstein, Unimodular]


def parse_spec(text: str) -> SystemSpec:
    """Parse the canonical form, e.g. ``eisenstein:d=3:flavor=affine``."""
    head, *fields = text.strip().split(":")
    params: dict[str, str] = {}
    for f in fields:
        key, sep, value = f.partition("=")
        if not sep or not key:
            raise SpecError(f"malformed field {f!r} in spec {text!r}")
        if key in params:
            raise SpecError(f"duplicate field {key!r} in spec {text!r}")
        params[key] = value

    def integer(name: str) -> int:
        if name not in params:
            raise SpecError(f"spec {text!r} is missing {name}=")
        try:
            return int(params.pop(name))
        except ValueError:
            raise SpecError(f"{name} must be an integer in spec {text!r}") from None

    kind = head.lower()
    if kind == "coprime":
        spec: SystemSpec = Coprime(integer("k"))
    elif kind == "eisenstein":
        d = integer("d")
        flavor = params.pop("flavor", "plain")
        try:
            flavor_value = Flavor(flavor)
        except ValueError:
            raise SpecError(f"unknown eisenstein flavor {flavor!r}") from None
        spec = Eisenstein(d, flavor_value)
    elif kind == "unimodular":
        spec = Unimodular(integer("n"), integer("m"))
    else:
        raise SpecError(f"unknown system {head!r}")
    if params:
        raise SpecError(f"unexpected fields {sorted(params)} in spec {text!r}")
    return spec


# -- local densities ----------------------------------------------------------


def density_at_degree(spec: SystemSpec, q: int, t: int) -> Fraction:
    """Local density of a place of degree ``t``; every system depends on P only via deg P."""
    u = Fraction(1, q**t)  # measure of P inside the completed valuation ring
    if isinstance(spec, Coprime):
        return u**spec.k
    if isinstance(spec, Eisenstein):
        base = (1 - u) ** 2 * u**spec.d
        if spec.flavor is Flavor.PLAIN:
            return base
        if spec.flavor is Flavor.SHIFTED:
            return base * q**t
        return base * (1 + q**t)
    if isinstance(spec, Unimodular):
        prod_ = Fraction(1)
        for i in range(spec.n):
            prod_ *= 1 - u ** (spec.m - i)
        return 1 - prod_
    raise TypeError(f"unsupported spec {spec!r}")


def local_density(spec: SystemSpec, place: Place) -> Fraction:
    return density_at_degree(spec, place.q, place.degree)


def _residue_exponent(spec: SystemSpec) -> int:
    return 2 if isinstance(spec, Eisenstein) else 1


def local_density_exhaustive(
    spec: SystemSpec, place: Place, guard: int = EXHAUSTIVE_GUARD
) -> Fraction:
    """Count residue tuples mod P^e satisfying the defining conditions.

    ``e`` is 2 for the Eisenstein systems and 1 otherwise.  This is an
    independent oracle for :func:`local_density`.
    """
    e = _residue_exponent(spec)
    level = ResidueLevel(place, e)
    dim = spec.ambient_dim
    total = level.size**dim
    if total > guard:
        raise FeasibilityError(total, guard, "residue tuples")

    if isinstance(spec, Coprime):
        hits = sum(1 for tup in product(range(level.size), repeat=dim) if not any(tup))
        return Fraction(hits, total)
    if isinstance(spec, Unimodular):
        return Fraction(_count_rank_deficient(spec, place), total)
    return Fraction(_count_eisenstein_residues(spec, level), total)


def _count_eisenstein_residues(spec: Eisenstein, level: ResidueLevel) -> int:
    reps = list(level.representatives())
    P = level.place
    in_p = [valuation_membership(r, P, 1) for r in reps]
    in_p2 = [valuation_membership(r, P, 2) for r in reps]
    d = spec.d
    plain = []
    for tup in product(range(len(reps)), repeat=d + 1):
        if (
            in_p[tup[0]]
            and not in_p2[tup[0]]
            and all(in_p[i] for i in tup[1:d])
            and not in_p[tup[d]]
        ):
            plain.append(tuple(reps[i] for i in tup))
    if spec.flavor is Flavor.PLAIN:
        return len(plain)

    # union of the images of the plain set under every shift t mod P^2
    # (and under reversal for the affine flavor), computed as a set of residues
    mod = level.modulus
    union: set[tuple] = set()
    for t in reps:
        for a in plain:
            union.add(tuple((c % mod).coeffs for c in shift_coeffs(a, t)))
    if spec.flavor is Flavor.AFFINE:
        for a in plain:
            union.add(tuple(c.coeffs for c in reverse_coeffs(a)))
    return len(union)


class ResidueField:
    """Lookup tables for F_q[x]/(P), elements indexed via ``Polynomial.from_index``."""

    def __init__(self, place: Place):
        self.place = place
        size = place.q**place.degree
        self.size = size
        elems = [Polynomial.from_index(i, place.q) for i in range(size)]
        g = place.generator
        self.add = [[(a + b).index() for b in elems] for a in elems]
        self.sub = [[(a - b).index() for b in elems] for a in elems]
        self.mul = [[((a * b) % g).index() for b in elems] for a in elems]
        self.inv = [0] * size
        for i in range(1, size):
            self.inv[i] = self.mul[i].index(1)

    def rank(self, rows: Sequence[Sequence[int]]) -> int:
        a = [list(r) for r in rows]
        n_rows, n_cols = len(a), len(a[0]) if a else 0
        rank = 0
        for c in range(n_cols):
            piv = next((i for i in range(rank, n_rows) if a[i][c]), None)
            if piv is None:
                continue
            a[rank], a[piv] = a[piv], a[rank]
            inv = self.inv[a[rank][c]]
            a[rank] = [self.mul[inv][v] for v in a[rank]]
            for i in range(n_rows):
                if i != rank and a[i][c]:
                    f = a[i][c]
                    a[i] = [self.sub[v][self.mul[f][w]] for v, w in zip(a[i], a[rank])]
            rank += 1
            if rank == n_rows:
                break
        return rank


def _count_rank_deficient(spec: Unimodular, place: Place) -> int:
    field = ResidueField(place)
    n, m = spec.n, spec.m
    hits = 0
    for flat in product(range(field.size), repeat=n * m):
        rows = [flat[i * m : (i + 1) * m] for i in range(n)]
        if field.rank(rows) < n:
            hits += 1
    return hits


# -- membership ---------------------------------------------------------------


def _check_tuple(spec: SystemSpec, a: Sequence[Polynomial]) -> None:
    if len(a) != spec.ambient_dim:
        raise ValueError(f"{spec} expects {spec.ambient_dim} entries, got {len(a)}")


def is_eisenstein(a: Sequence[Polynomial], place: Place) -> bool:
    """Plain P-Eisenstein test on the coefficient vector ``(a_0, ..., a_d)``."""
    d = len(a) - 1
    if valuation_membership(a[d], place):
        return False
    if valuation_membership(a[0], place, 2):
        return False
    return all(valuation_membership(a[i], place) for i in range(d))


def eisenstein_shift(a: Sequence[Polynomial], place: Place):
    """Return a residue ``t`` with ``a(y + t)`` P-Eisenstein, or ``None``.

    When ``d * a_d`` is a unit mod P the top congruence
    ``a_{d-1} + d t a_d = 0 (mod P)`` pins t down; otherwise every residue
    mod P is tried.
    """
    d = len(a) - 1
    ad = a[d]
    g = place.generator
    if valuation_membership(ad, place):
        return None
    q = place.q
    if d % q:
        t = (-a[d - 1] * inverse_mod(ad * d, g)) % g
        trials = [t]
    else:
        trials = ResidueLevel(place, 1).representatives()
    for t in trials:
        if is_eisenstein(shift_coeffs(a, t), place):
            return t
    return None


def determinant(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Leibniz expansion; only meant for the small square blocks of a minor."""
    n = len(matrix)
    q = matrix[0][0].q
    total = Polynomial.zero(q)
    for perm in permutations(range(n)):
        term = Polynomial.one(q)
        for i, j in enumerate(perm):
            term = term * matrix[i][j]
            if term.is_zero():
                break
        if term.is_zero():
            continue
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total = total - term if inversions % 2 else total + term
    return total


def minors(spec: SystemSpec, a: Sequence[Polynomial]) -> list[Polynomial]:
    """All maximal minors, column subsets in lexicographic order."""
    if not isinstance(spec, Unimodular):
        raise SpecError(f"minors are only defined for unimodular systems, not {spec}")
    _check_tuple(spec, a)
    n, m = spec.n, spec.m
    rows = [a[i * m : (i + 1) * m] for i in range(n)]
    return [
        determinant([[row[c] for c in cols] for row in rows])
        for cols in combinations(range(m), n)
    ]


def member(spec: SystemSpec, a: Sequence[Polynomial], place: Place) -> bool:
    _check_tuple(spec, a)
    if isinstance(spec, Coprime):
        return all(valuation_membership(x, place) for x in a)
    if isinstance(spec, Unimodular):
        return all(valuation_membership(x, place) for x in minors(spec, a))
    if spec.flavor is Flavor.PLAIN:
        return is_eisenstein(a, place)
    if eisenstein_shift(a, place) is not None:
        return True
    return spec.flavor is Flavor.AFFINE and is_eisenstein(reverse_coeffs(a), place)


# -- exceptional set and candidate places -------------------------------------


def _shift_core(a: Sequence[Polynomial]):
    """Separable core of a coefficient vector with ``a_d != 0``."""
    return separable_core(tuple(a))


def in_exceptional_set(spec: SystemSpec, a: Sequence[Polynomial]) -> bool:
    """Whether ``a`` must be treated as lying in infinitely many U_P."""
    _check_tuple(spec, a)
    if isinstance(spec, Coprime):
        return all(x.is_zero() for x in a)
    if isinstance(spec, Unimodular):
        return all(x.is_zero() for x in minors(spec, a))
    if spec.flavor is Flavor.PLAIN:
        return False
    if a[-1].is_zero():
        # shifts keep a_d, and the reversal has constant term a_d = 0
        return False
    g, _ = _shift_core(a)
    return len(g) - 1 <= 1


def shift_witness(a: Sequence[Polynomial]):
    """Nonzero polynomial divisible by every P at which ``a`` is shifted-Eisenstein.

    Returns ``None`` when no place can qualify.  Requires ``a_d != 0`` and a
    separable core of degree >= 2.  The core discriminant is used when it is
    nonzero.  Otherwise the core ``g`` (degree e = p^j * e', p not dividing
    e') has a repeated factor, and membership forces
    ``g = c (z - s)^e (mod P)``; comparing ``(e' c)^e' g(z)`` against
    ``c (e' c z^(p^j) + g_{e - p^j})^e'`` coefficientwise gives polynomials
    that must all lie in P.  If they all vanish then ``g = c (z - r)^e``
    identically, whose shifts are never Eisenstein.
    """
    g, _ = _shift_core(a)
    e = len(g) - 1
    disc = discriminant(g)
    if disc:
        return disc
    q = g[0].q
    e1, pj = e, 1
    while e1 % q == 0:
        e1 //= q
        pj *= q
    c, b = g[e], g[e - pj]
    ec = c * e1
    scale = ec**e1
    diff = [coef * scale for coef in g]
    for i in range(e1 + 1):
        diff[pj * i] = diff[pj * i] - c * math.comb(e1, i) * ec**i * b ** (e1 - i)
    w = gcd_many(diff, q)
    return w if w else None


def candidate_places(spec: SystemSpec, a: Sequence[Polynomial]) -> tuple[Place, ...]:
    """Places P with ``member(spec, a, P)``, found by factoring.

    The set is derived from a nonzero polynomial that every qualifying P
    must divide, then filtered by :func:`member` where that polynomial only
    yields a superset.
    """
    if in_exceptional_set(spec, a):
        raise ValueError(f"{tuple(map(str, a))} lies in the exceptional set of {spec}")
    q = a[0].q
    if isinstance(spec, Coprime):
        return distinct_factors(gcd_many(a, q))
    if isinstance(spec, Unimodular):
        return distinct_factors(gcd_many(minors(spec, a), q))

    d = spec.d
    found: set[Place] = set()
    if spec.flavor is Flavor.PLAIN:
        if a[0]:
            found.update(distinct_factors(gcd_many(a[:d], q)))
    else:
        if a[d]:
            w = shift_witness(a)
            if w is not None:
                found.update(distinct_factors(w))
        if spec.flavor is Flavor.AFFINE and a[d]:
            found.update(distinct_factors(gcd_many(a[1:], q)))
    return tuple(sorted(P for P in found if member(spec, a, P)))


def incidence_count(spec: SystemSpec, a: Sequence[Polynomial]) -> int:
    """``|{P : a in U_P}|`` for a tuple outside the exceptional set."""
    return len(candidate_places(spec, a))
