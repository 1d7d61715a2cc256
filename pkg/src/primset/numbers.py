"""Moebius function, certified zeta enclosures and the primitive-set density.

Every interval endpoint is an exact :class:`fractions.Fraction`; floats only
appear when a value is rendered for output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError, DomainError

#: Largest sieve limit accepted by :func:`mobius_sieve` unless overridden.
MAX_SIEVE_LIMIT = 10**8

#: Default number of partial-sum terms used for zeta enclosures.
DEFAULT_ZETA_TERMS = 10**4

#: Decimal places kept when an interval is rendered as rationals.
RENDER_PLACES = 30


@dataclass(frozen=True)
class MobiusTable:
    """Values of mu(1..limit). ``values[0]`` is a placeholder (0)."""

    limit: int
    values: tuple

    def __getitem__(self, k):
        if not 1 <= k <= self.limit:
            raise IndexError(f"mu({k}) outside table range 1..{self.limit}")
        return self.values[k]

    def __len__(self):
        return self.limit

    def squarefree(self):
        """Yield ``(k, mu(k))`` for every squarefree ``k`` in the table."""
        for k in range(1, self.limit + 1):
            mu = self.values[k]
            if mu:
                yield k, mu


def mobius_sieve(limit, budget=MAX_SIEVE_LIMIT):
    """Tabulate the Moebius function on ``1..limit`` with a linear sieve."""
    if limit < 1:
        raise DomainError(f"sieve limit must be >= 1, got {limit}")
    if limit > budget:
        raise CapacityError(f"sieve limit {limit} exceeds memory budget {budget}")
    mu = [0] * (limit + 1)
    mu[1] = 1
    composite = bytearray(limit + 1)
    primes = []
    for i in range(2, limit + 1):
        if not composite[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            ip = i * p
            if ip > limit:
                break
            composite[ip] = 1
            if i % p == 0:
                # p^2 | ip
                break
            mu[ip] = -mu[i]
    return MobiusTable(limit, tuple(mu))


@lru_cache(maxsize=8)
def _cached_sieve(limit):
    return mobius_sieve(limit)


@dataclass(frozen=True, repr=False)
class CertifiedValue:
    """A closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __repr__(self):
        return f"CertifiedValue(~{float(self.lo):.12g}, ~{float(self.hi):.12g})"

    @classmethod
    def point(cls, value):
        return cls(value, value)

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def contains_interval(self, other):
        return self.lo <= other.lo and other.hi <= self.hi

    def __mul__(self, other):
        if not isinstance(other, CertifiedValue):
            return NotImplemented
        products = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return CertifiedValue(min(products), max(products))

    def reciprocal(self):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return CertifiedValue(1 / self.hi, 1 / self.lo)

    def outward(self, places=RENDER_PLACES):
        """Smallest enclosing interval with denominators ``10**places``."""
        scale = 10**places
        lo = Fraction(math.floor(self.lo * scale), scale)
        hi = Fraction(math.ceil(self.hi * scale), scale)
        return CertifiedValue(lo, hi)

    def to_dict(self, digits=10):
        """JSON form; the rational endpoints are rounded outward so the
        rendered interval still encloses the exact one."""
        rendered = self.outward()
        return {
            "lo": f"{rendered.lo.numerator}/{rendered.lo.denominator}",
            "hi": f"{rendered.hi.numerator}/{rendered.hi.denominator}",
            "lo_decimal": float(f"{float(self.lo):.{digits}g}"),
            "hi_decimal": float(f"{float(self.hi):.{digits}g}"),
        }


def _lcm_upto(n):
    out = 1
    for i in range(2, n + 1):
        out = out * i // math.gcd(out, i)
    return out


@lru_cache(maxsize=64)
def zeta_certified(a, terms=DEFAULT_ZETA_TERMS):
    """Enclose zeta(a) using an exact partial sum and integral-test tails.

    With ``S = sum_{i<=terms} i**-a`` the result is
    ``[S + 1/((a-1)(terms+1)**(a-1)), S + 1/((a-1)terms**(a-1))]``.
    """
    if a < 2:
        raise DomainError(f"zeta({a}) diverges; need a >= 2")
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    denom = _lcm_upto(terms) ** a
    partial = Fraction(sum(denom // i**a for i in range(1, terms + 1)), denom)
    lo = partial + Fraction(1, (a - 1) * (terms + 1) ** (a - 1))
    hi = partial + Fraction(1, (a - 1) * terms ** (a - 1))
    return CertifiedValue(lo, hi)


def mobius_sum_reciprocal_zeta(a, terms):
    """Exact partial sum ``sum_{D<=terms} mu(D) D**-a`` as a Fraction."""
    if a < 2:
        raise DomainError(f"need a >= 2, got {a}")
    if terms < 1:
        raise DomainError(f"terms must be >= 1, got {terms}")
    table = _cached_sieve(terms)
    # Squarefree D <= terms all divide the primorial, so primorial**a is a
    # common denominator. Dividing by D repeatedly keeps each step on the
    # cheap small-divisor path.
    primorial = math.prod(primes_upto(terms))
    denom = primorial**a
    num = 0
    for D, mu in table.squarefree():
        q = denom
        for _ in range(a):
            q //= D
        num += q if mu > 0 else -q
    return Fraction(num, denom)


def primes_upto(n):
    """Primes ``<= n`` by the sieve of Eratosthenes."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i in range(n + 1) if flags[i]]


@lru_cache(maxsize=64)
def target_probability(d, m, terms=DEFAULT_ZETA_TERMS):
    """Certified enclosure of ``1 / (zeta(d) zeta(d-1) ... zeta(d-m+1))``.

    ``m == 0`` gives the empty product ``[1, 1]``; ``m == d`` gives ``[0, 0]``
    because the factor zeta(1) diverges.
    """
    if m < 0 or d < 1:
        raise DomainError(f"invalid dimensions d={d}, m={m}")
    if m > d:
        raise DomainError(f"set size m={m} exceeds dimension d={d}")
    if m == 0:
        return CertifiedValue.point(1)
    if m == d:
        return CertifiedValue.point(0)
    product = CertifiedValue.point(1)
    for k in range(m):
        product = product * zeta_certified(d - k, terms)
    return product.reciprocal()
