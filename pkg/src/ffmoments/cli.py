"""Command-line interface.

Exit status: 0 on success, 2 when an argument fails validation, 3 when an
enumeration would exceed its budget (``FFM_BUDGET`` overrides the default).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import Polynomial, is_prime
from .empirical import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    empirical_joint_density,
    incidence_histogram,
    newcond_diagnostic,
    reports_from_histogram,
)
from .moments import MomentQuery, crude_bound, moment
from .places import Place, enumerate_places
from .systems import FeasibilityError, SpecError, local_density, local_density_exhaustive, parse_spec

COMMANDS = ("places", "theoretical", "empirical", "jointdensity", "localdensity", "diagnose")

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


def frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RunConfig:
    command: str
    q: int
    spec: Optional[str] = None
    r: int = 1
    m: Optional[int] = None
    truncate: int = 30
    output: str = "json"
    places: tuple[str, ...] = ()
    place: Optional[str] = None
    max_degree: Optional[int] = None
    c_prime: str = "1"
    alpha: str = "1"
    exhaustive: bool = False
    workers: int = 1
    timing: bool = True

    def argv(self) -> list[str]:
        """Canonical argument list; ``RunConfig.from_argv(cfg.argv()) == cfg``."""
        out = [self.command, "--q", str(self.q)]
        if self.command == "places":
            out += ["--max-degree", str(self.max_degree), "--output", self.output]
            return out
        out += ["--spec", str(self.spec)]
        if self.command == "theoretical":
            out += ["--r", str(self.r), "--truncate", str(self.truncate)]
        elif self.command == "empirical":
            out += ["--r", str(self.r), "--m", str(self.m), "--truncate", str(self.truncate)]
            out += ["--workers", str(self.workers)]
        elif self.command == "jointdensity":
            out += ["--m", str(self.m), "--places", *self.places]
        elif self.command == "localdensity":
            out += ["--place", str(self.place)]
            if self.exhaustive:
                out.append("--exhaustive")
        elif self.command == "diagnose":
            out += ["--m", str(self.m), "--c-prime", self.c_prime, "--alpha", self.alpha]
        if not self.timing:
            out.append("--no-timing")
        out += ["--output", self.output]
        return out

    @classmethod
    def from_argv(cls, argv: Sequence[str]) -> "RunConfig":
        ns = build_parser().parse_args(list(argv))
        return cls.from_namespace(ns)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        if not is_prime(ns.q):
            raise ConfigError("--q", f"{ns.q} is not prime")
        kwargs = {"command": ns.command, "q": ns.q, "output": ns.output}
        if ns.command == "places":
            if ns.max_degree < 1:
                raise ConfigError("--max-degree", "must be >= 1")
            return cls(max_degree=ns.max_degree, **kwargs)
        try:
            spec = parse_spec(ns.spec)
        except SpecError as exc:
            raise ConfigError("--spec", str(exc)) from None
        kwargs["spec"] = str(spec)
        kwargs["timing"] = not getattr(ns, "no_timing", False)
        if hasattr(ns, "r"):
            if ns.r < 1:
                raise ConfigError("--r", "moment order must be >= 1")
            kwargs["r"] = ns.r
        if hasattr(ns, "truncate"):
            if ns.truncate < 1:
                raise ConfigError("--truncate", "truncation degree must be >= 1")
            kwargs["truncate"] = ns.truncate
        if hasattr(ns, "m"):
            if ns.m < 0:
                raise ConfigError("--m", "divisor degree must be >= 0")
            kwargs["m"] = ns.m
        if hasattr(ns, "workers"):
            if ns.workers < 1:
                raise ConfigError("--workers", "must be >= 1")
            kwargs["workers"] = ns.workers
        if ns.command == "jointdensity":
            places = tuple(str(_parse_place(p, ns.q, "--places")) for p in ns.places)
            if len(set(places)) != len(places):
                raise ConfigError("--places", "places must be pairwise distinct")
            kwargs["places"] = places
        if ns.command == "localdensity":
            kwargs["place"] = str(_parse_place(ns.place, ns.q, "--place"))
            kwargs["exhaustive"] = ns.exhaustive
        if ns.command == "diagnose":
            for name, flag in (("c_prime", "--c-prime"), ("alpha", "--alpha")):
                try:
                    value = Fraction(getattr(ns, name))
                except (ValueError, ZeroDivisionError):
                    raise ConfigError(flag, f"{getattr(ns, name)!r} is not a rational number") from None
                if value < 0:
                    raise ConfigError(flag, "must be >= 0")
                kwargs[name] = str(value)
        return cls(**kwargs)


def _parse_place(text: str, q: int, flag: str) -> Place:
    try:
        poly = Polynomial.parse(text, q)
        return Place.of(poly)
    except ValueError as exc:
        raise ConfigError(flag, str(exc)) from None


def _budget() -> int:
    raw = os.environ.get("FFM_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    if not raw.strip().isdigit():
        raise ConfigError("FFM_BUDGET", f"{raw!r} is not a decimal integer")
    return int(raw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffmoments",
        description="Higher moments of local-to-global systems over F_q[x].",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_spec: bool = True) -> None:
        p.add_argument("--q", type=int, required=True, help="prime field size")
        if with_spec:
            p.add_argument(
                "--spec",
                required=True,
                help="coprime:k=2 | eisenstein:d=3:flavor=plain|shifted|affine | unimodular:n=2:m=3",
            )
            p.add_argument("--no-timing", action="store_true", help="omit runtime_ms from output")

    p = sub.add_parser("places", help="list finite places up to a degree")
    common(p, with_spec=False)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--output", choices=("csv", "json"), default="csv")

    p = sub.add_parser("theoretical", help="moment enclosure from local densities")
    common(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--truncate", type=int, default=30)
    p.add_argument("--output", choices=("csv", "json"), default="json")

    p = sub.add_parser("empirical", help="exhaustive moment over the box L(m P_inf)")
    common(p)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--truncate", type=int, default=30, help="T for the theoretical columns in CSV")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", choices=("csv", "json"), default="json")

    p = sub.add_parser("jointdensity", help="box density of the intersection over given places")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--places", nargs="+", required=True)
    p.add_argument("--output", choices=("csv", "json"), default="json")

    p = sub.add_parser("localdensity", help="local density at one place")
    common(p)
    p.add_argument("--place", required=True)
    p.add_argument("--exhaustive", action="store_true", help="also count residues exhaustively")
    p.add_argument("--output", choices=("csv", "json"), default="json")

    p = sub.add_parser("diagnose", help="max count of high-degree places over the box")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c-prime", default="1")
    p.add_argument("--alpha", default="1")
    p.add_argument("--output", choices=("csv", "json"), default="json")
    return parser


def _emit(cfg: RunConfig, record: dict, rows: Optional[list[dict]] = None) -> str:
    if cfg.output == "json":
        return json.dumps(record, indent=2) + "\n"
    rows = rows if rows is not None else [record]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v) if isinstance(v, list) else v for k, v in row.items()})
    return buf.getvalue()


def run(cfg: RunConfig) -> str:
    """Execute a validated config and return the document to print."""
    q = cfg.q
    if cfg.command == "places":
        rows = [
            {"degree": P.degree, "generator": str(P), "count_cumulative": i}
            for i, P in enumerate(enumerate_places(q, cfg.max_degree), start=1)
        ]
        if cfg.output == "json":
            return json.dumps(rows, indent=2) + "\n"
        return _emit(cfg, {}, rows)

    spec = parse_spec(cfg.spec)
    budget = _budget()
    started = time.perf_counter()

    def stamp(record: dict) -> dict:
        if cfg.timing:
            record["runtime_ms"] = int(round((time.perf_counter() - started) * 1000))
        return record

    if cfg.command == "theoretical":
        iv = moment(MomentQuery(spec, q, cfg.r, cfg.truncate))
        record = {
            "spec": str(spec),
            "q": q,
            "r": cfg.r,
            "T": cfg.truncate,
            "lo": frac(iv.lo),
            "hi": frac(iv.hi),
            "crude_bound": frac(crude_bound(spec, q, cfg.r, cfg.truncate)),
        }
        return _emit(cfg, record)

    if cfg.command == "empirical":
        if cfg.output == "csv":
            theory = moment(MomentQuery(spec, q, cfg.r, cfg.truncate))
            rows = []
            for m in range(cfg.m + 1):
                hist = incidence_histogram(spec, q, m, budget, cfg.workers)
                rep = reports_from_histogram(spec, q, m, hist, [cfg.r])[0]
                rows.append(
                    {
                        "m": m,
                        "empirical": frac(rep.value),
                        "theoretical_lo": frac(theory.lo),
                        "theoretical_hi": frac(theory.hi),
                    }
                )
            return _emit(cfg, {}, rows)
        hist = incidence_histogram(spec, q, cfg.m, budget, cfg.workers)
        rep = reports_from_histogram(spec, q, cfg.m, hist, [cfg.r])[0]
        record = {
            "spec": str(spec),
            "q": q,
            "r": cfg.r,
            "m": cfg.m,
            "value": frac(rep.value),
            "excluded": rep.excluded_count,
            "box_size": rep.box_size,
        }
        return _emit(cfg, stamp(record))

    if cfg.command == "jointdensity":
        places = [Place.of(Polynomial.parse(p, q)) for p in cfg.places]
        value = empirical_joint_density(spec, q, places, cfg.m, budget)
        product_ = Fraction(1)
        for P in places:
            product_ *= local_density(spec, P)
        record = {
            "spec": str(spec),
            "q": q,
            "m": cfg.m,
            "places": [str(P) for P in places],
            "value": frac(value),
            "product_of_local_densities": frac(product_),
            "box_size": q ** ((cfg.m + 1) * spec.ambient_dim),
        }
        return _emit(cfg, stamp(record))

    if cfg.command == "localdensity":
        place = Place.of(Polynomial.parse(cfg.place, q))
        record = {
            "spec": str(spec),
            "q": q,
            "place": str(place),
            "degree": place.degree,
            "value": frac(local_density(spec, place)),
        }
        if cfg.exhaustive:
            record["exhaustive"] = frac(local_density_exhaustive(spec, place))
        return _emit(cfg, record)

    if cfg.command == "diagnose":
        c_prime, alpha = Fraction(cfg.c_prime), Fraction(cfg.alpha)
        count = newcond_diagnostic(spec, q, cfg.m, c_prime, alpha, budget)
        record = {
            "spec": str(spec),
            "q": q,
            "m": cfg.m,
            "c_prime": frac(c_prime),
            "alpha": frac(alpha),
            "max_count": count,
        }
        return _emit(cfg, stamp(record))

    raise ConfigError("command", f"unknown command {cfg.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # argparse exits with status 2 on its own errors
    try:
        cfg = RunConfig.from_namespace(ns)
        document = run(cfg)
    except ConfigError as exc:
        print(f"ffmoments: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (BudgetExceeded, FeasibilityError) as exc:
        print(f"ffmoments: budget exceeded: {exc} (raise FFM_BUDGET to allow it)", file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(document)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
