"""Monte Carlo and exact checks of the primitive-set density.

Exact routines enumerate boxes and refuse (``SizeGuardError``) rather than
truncate when the enumeration would be too large.
"""

from __future__ import annotations

import itertools
import math
import operator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .errors import ContractError, DomainError, ShapeError, SizeGuardError
from .lattice import (
    IntMatrix,
    as_points,
    hnf,
    hnf_bounded,
    incremental_gcd_check,
    is_primitive,
    random_unimodular,
)
from .numbers import DEFAULT_ZETA_TERMS, CertifiedValue, mobius_sieve, target_probability
from .sampling import BoxFamily, BoxSpec, SeededSampler, derive_seed, sample_pointset

#: Largest number of cases any exact enumeration will visit.
ENUMERATION_LIMIT = 10**8

SCHEMA_VERSION = 1


def _fraction_str(x):
    return f"{x.numerator}/{x.denominator}"


def _sig(x, digits=10):
    return float(f"{float(x):.{digits}g}")


@dataclass(frozen=True)
class EstimateResult:
    d: int
    m: int
    n: int
    box: str
    seed: int
    trials: int
    successes: int
    target: CertifiedValue

    @property
    def estimate(self):
        return Fraction(self.successes, self.trials)

    @property
    def std_error(self):
        p = self.successes / self.trials
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def gap(self):
        return float(abs(self.estimate - self.target.mid))

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "d": self.d,
            "m": self.m,
            "n": self.n,
            "box": self.box,
            "seed": self.seed,
            "trials": self.trials,
            "successes": self.successes,
            "estimate": _sig(self.estimate),
            "estimate_exact": _fraction_str(self.estimate),
            "std_error": _sig(self.std_error),
            "target": self.target.to_dict(),
            "target_mid": _sig(self.target.mid),
            "gap": _sig(self.gap),
        }

    def csv_row(self):
        return [
            self.n,
            self.trials,
            f"{float(self.estimate):.10g}",
            f"{self.std_error:.10g}",
            f"{float(self.target.lo):.10g}",
            f"{float(self.target.hi):.10g}",
            f"{self.gap:.10g}",
        ]


CSV_HEADER = ["n", "trials", "estimate", "std_error", "target_lo", "target_hi", "gap"]


def _count_block(box, seed, start, stop):
    sampler = SeededSampler(seed)
    return sum(is_primitive(sample_pointset(box, sampler, t)) for t in range(start, stop))


def _blocks(total, pieces):
    step = -(-total // pieces)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def estimate_primitive_probability(
    d,
    m,
    box_family="centered",
    n=10**6,
    trials=10**5,
    seed=0,
    workers=1,
    terms=DEFAULT_ZETA_TERMS,
):
    """Monte Carlo estimate of P(m uniform points of the box form a primitive set).

    Trial ``t`` always uses the stream derived from ``(seed, t)``, so the
    success count does not depend on ``workers``.
    """
    if not 1 <= m <= d:
        raise DomainError(f"need 1 <= m <= d, got d={d}, m={m}")
    if trials < 1 or workers < 1:
        raise DomainError("trials and workers must be >= 1")
    family = BoxFamily.parse(box_family) if isinstance(box_family, str) else box_family
    box = family.box(d, m, n)
    if workers == 1:
        successes = _count_block(box, seed, 0, trials)
    else:
        blocks = _blocks(trials, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_count_block, box, seed, lo, hi) for lo, hi in blocks]
            successes = sum(f.result() for f in futures)
    return EstimateResult(
        d, m, n, str(family), seed, trials, successes, target_probability(d, m, terms)
    )


def convergence_table(
    d, m, box_family, n_list, trials, seed=0, workers=1, terms=DEFAULT_ZETA_TERMS
):
    """One estimate per side length; row seeds derive from ``(seed, n)``."""
    n_list = list(n_list)
    if any(b < a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("n_list must be nondecreasing")
    return [
        estimate_primitive_probability(
            d, m, box_family, n, trials, derive_seed(seed, "n", n), workers, terms
        )
        for n in n_list
    ]


def _check_box(box, d=None, m=None):
    if not isinstance(box, BoxSpec):
        raise TypeError("expected a BoxSpec")
    if d is not None and box.d != d:
        raise ShapeError(f"box dimension {box.d} != {d}")
    if m is not None and box.m != m:
        raise ShapeError(f"box holds {box.m} points, expected {m}")


def _guard(size):
    if size > ENUMERATION_LIMIT:
        raise SizeGuardError(size, ENUMERATION_LIMIT)


def exact_primitive_probability(d, m, box):
    """Exact fraction of point tuples in the box that form a primitive set."""
    _check_box(box, d, m)
    total = box.n ** (d * m)
    _guard(total)
    if m == 0:
        return Fraction(1)
    if m == 1:
        # m = 1: primitive iff the coordinates are coprime.
        hits = sum(math.gcd(*x) == 1 for x in box.points(0))
    else:
        hits = sum(
            is_primitive(tup)
            for tup in itertools.product(*(list(box.points(k)) for k in range(m)))
        )
    return Fraction(hits, total)


# -- the sublattices Lambda_D ------------------------------------------------


@dataclass(frozen=True)
class LambdaSpec:
    """``{x : D | x . U[:, i] for i >= len(prefix)}`` for a primitive prefix.

    ``multiplier`` is any unimodular ``U`` with ``prefix @ U`` in HNF; it
    defaults to :func:`hnf`'s. The lattice has index ``D**(d-m+1)``.
    """

    prefix: tuple
    multiplier: IntMatrix
    modulus: int

    @classmethod
    def build(cls, prefix, modulus, dim=None, multiplier=None):
        pts = as_points(prefix, dim)
        if not pts and dim is None:
            raise ShapeError("dimension required for an empty prefix")
        d = len(pts[0]) if pts else dim
        if modulus < 1:
            raise DomainError(f"modulus must be >= 1, got {modulus}")
        if not is_primitive(pts):
            raise ContractError("prefix is not a primitive set")
        if multiplier is None:
            multiplier = hnf(pts).u if pts else IntMatrix.identity(d)
        return cls(pts, IntMatrix(multiplier), modulus)

    @property
    def d(self):
        return self.multiplier.nrows

    @property
    def m(self):
        return len(self.prefix) + 1

    @property
    def index(self):
        return self.modulus ** (self.d - self.m + 1)

    def tail(self):
        """Columns ``U^(i)`` for ``m <= i <= d`` (1-based)."""
        return tuple(self.multiplier.columns()[self.m - 1 :])

    def contains(self, x):
        D = self.modulus
        return all(sum(map(operator.mul, x, col)) % D == 0 for col in self.tail())


class CountResult(NamedTuple):
    count: int
    volume: int

    @property
    def ratio(self):
        return Fraction(self.count, self.volume)


@lru_cache(maxsize=32)
def _box_products(tail, lower, n):
    return [
        tuple(sum(map(operator.mul, x, col)) for col in tail)
        for x in itertools.product(*(range(b, b + n) for b in lower))
    ]


def _products(spec, box):
    _check_box(box, spec.d)
    _guard(box.n**box.d)
    return _box_products(spec.tail(), box.lower[-1], box.n)


def count_lambda_points(spec, box):
    """``|S_nD|`` for the box of the last point: ``p_nD = count / n**d``."""
    D = spec.modulus
    prods = _products(spec, box)
    count = sum(1 for ps in prods if all(p % D == 0 for p in ps))
    return CountResult(count, box.n**box.d)


def covering_report(spec, box):
    """Lemma-style covering bounds and per-cube counts, as a dict of checks."""
    D, n, d = spec.modulus, box.n, box.d
    if not 1 <= D <= n:
        raise DomainError(f"need 1 <= D <= n, got D={D}, n={n}")
    prods = _products(spec, box)
    lower = box.lower[-1]
    per_cube = D ** (spec.m - 1)
    k = n // D
    cubes = dict.fromkeys(itertools.product(range(k), repeat=d), 0)
    count = 0
    for x, ps in zip(itertools.product(*(range(b, b + n) for b in lower)), prods):
        if all(p % D == 0 for p in ps):
            count += 1
            cell = tuple((xi - bi) // D for xi, bi in zip(x, lower))
            if cell in cubes:
                cubes[cell] += 1
    lo = per_cube * (Fraction(n, D) - 1) ** d
    hi = per_cube * (Fraction(n, D) + 1) ** d
    return {
        "count": count,
        "lower_bound": lo,
        "upper_bound": hi,
        "bounds_hold": lo <= count <= hi,
        "cubes": len(cubes),
        "per_cube_expected": per_cube,
        "cubes_hold": all(c == per_cube for c in cubes.values()),
    }


def check_covering_bounds(spec, box):
    """True iff ``D^(m-1)(n/D-1)^d <= |S_nD| <= D^(m-1)(n/D+1)^d`` and every
    aligned ``D``-cube inside the box holds exactly ``D^(m-1)`` points."""
    report = covering_report(spec, box)
    return report["bounds_hold"] and report["cubes_hold"]


class IdentityResult(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    equal: bool


def inclusion_exclusion_identity(prefix, box):
    """Compare the coprime fraction with ``sum_D mu(D) p_nD`` at finite ``n``.

    Points whose products are all zero lie in every ``Lambda_D`` and are
    never coprime; they are removed from each ``p_nD`` so the finite sum is
    exact. The sum stops at the largest, over the box, of the smallest
    nonzero ``|product|``, which bounds every nonzero gcd.
    """
    _check_box(box)
    base = LambdaSpec.build(prefix, 1, dim=box.d)
    pts = base.prefix
    volume = box.n**box.d
    _guard(volume)
    lhs = Fraction(
        sum(incremental_gcd_check(pts, x) for x in box.points(box.m - 1)), volume
    )
    prods = _products(base, box)
    degenerate = sum(1 for ps in prods if not any(ps))
    support = max(
        (min(abs(p) for p in ps if p) for ps in prods if any(ps)), default=0
    )
    rhs = Fraction(0)
    if support:
        mu = mobius_sieve(support)
        for D, sign in mu.squarefree():
            spec = LambdaSpec(pts, base.multiplier, D)
            rhs += sign * Fraction(count_lambda_points(spec, box).count - degenerate, volume)
    return IdentityResult(lhs, rhs, lhs == rhs)


def alternative_multiplier(prefix, dim):
    """A second valid HNF multiplier, distinct from :func:`hnf`'s when possible."""
    pts = as_points(prefix, dim)
    if not pts:
        return random_unimodular(dim, 3 * dim, 3, seed=dim)
    u = hnf(pts).u
    v = hnf_bounded(pts)[0].u
    if v != u:
        return v
    # hnf of the column-reversed prefix, rows restored: A (P U') = HNF(A P).
    w = hnf([row[::-1] for row in pts]).u
    return IntMatrix(w[::-1])


def u_independence_check(prefix, D, box):
    """``|S_nD|`` agrees under two different multipliers for the prefix."""
    _check_box(box)
    first = LambdaSpec.build(prefix, D, dim=box.d)
    alt = alternative_multiplier(first.prefix, box.d)
    second = LambdaSpec.build(first.prefix, D, dim=box.d, multiplier=alt)
    return count_lambda_points(first, box).count == count_lambda_points(second, box).count
