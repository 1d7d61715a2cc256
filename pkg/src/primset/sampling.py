"""Sampling boxes and seeded, replayable draws of point sets.

Point ``k`` coordinate ``i`` is drawn uniformly from the half-open range
``[lower[k][i], lower[k][i] + n)``.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import operator
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError, ParseError, ShapeError, SizeGuardError
from .lattice import parse_rows
from .numbers import primes_upto

#: Largest number of cells ``n**d`` for which a CRT blind box is built.
CRT_MAX_CELLS = 64

BOX_KINDS = ("origin", "centered", "poly", "explicit", "crt")


@dataclass(frozen=True)
class BoxSpec:
    d: int
    m: int
    n: int
    lower: tuple

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"box side n must be >= 1, got {self.n}")
        lower = tuple(tuple(operator.index(x) for x in row) for row in self.lower)
        if len(lower) != self.m or any(len(row) != self.d for row in lower):
            raise ShapeError(f"lower bounds must be {self.m}x{self.d}")
        object.__setattr__(self, "lower", lower)

    def ranges(self, k):
        """Coordinate ranges for point ``k``."""
        return [range(b, b + self.n) for b in self.lower[k]]

    def points(self, k):
        """Every integer point of the box for point ``k`` (row-major)."""
        return itertools.product(*self.ranges(k))

    def contains(self, pointset):
        return len(pointset) == self.m and all(
            b <= x < b + self.n
            for row, bounds in zip(pointset, self.lower)
            for x, b in zip(row, bounds)
        )

    def to_dict(self):
        return {"d": self.d, "m": self.m, "n": self.n, "lower": [list(r) for r in self.lower]}


@dataclass(frozen=True)
class BoxFamily:
    """A rule producing a :class:`BoxSpec` for each side length ``n``.

    ``kind`` is one of ``origin``, ``centered``, ``poly`` (with ``degree``),
    ``explicit`` (with fixed ``lower`` bounds) or ``crt``.
    """

    kind: str = "centered"
    degree: int | None = None
    lower: tuple | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in BOX_KINDS:
            raise DomainError(f"unknown box kind {self.kind!r}")
        if self.kind == "poly" and (self.degree is None or self.degree < 0):
            raise DomainError("polynomial-offset boxes need a degree >= 0")
        if self.kind == "explicit" and self.lower is None:
            raise DomainError("explicit boxes need lower bounds")

    @classmethod
    def parse(cls, text):
        """Parse ``origin``, ``centered``, ``poly:J``, ``crt`` or ``file=PATH``."""
        if text.startswith("poly:"):
            try:
                return cls("poly", degree=int(text[5:]))
            except ValueError:
                raise ParseError(f"bad polynomial degree in {text!r}") from None
        if text.startswith("file="):
            path = Path(text[5:])
            return cls("explicit", lower=tuple(parse_rows(path.read_text())))
        if text in ("origin", "centered", "crt"):
            return cls(text)
        raise ParseError(f"unknown box family {text!r}")

    def __str__(self):
        if self.kind == "poly":
            return f"poly:{self.degree}"
        return self.kind

    def box(self, d, m, n):
        return make_box(self, d, m, n)


def make_box(kind, d, m, n, *, degree=None, lower=None):
    """Build the sampling box of a family at side length ``n``.

    ``origin`` puts every lower bound at 0, ``centered`` at ``-(n // 2)``,
    ``poly`` at ``(-1)**(k+i) * n**degree`` (1-based ``k``, ``i``), and
    ``explicit`` uses the supplied bounds.
    """
    if isinstance(kind, BoxFamily):
        family = kind
    else:
        family = BoxFamily(kind, degree=degree, lower=lower)
    if d < 1 or m < 0:
        raise DomainError(f"invalid box dimensions d={d}, m={m}")
    if family.kind == "origin":
        rows = [[0] * d for _ in range(m)]
    elif family.kind == "centered":
        rows = [[-(n // 2)] * d for _ in range(m)]
    elif family.kind == "poly":
        offset = n**family.degree
        rows = [[(-1) ** (k + i) * offset for i in range(1, d + 1)] for k in range(1, m + 1)]
    elif family.kind == "explicit":
        rows = family.lower
    else:
        if m != 1:
            raise DomainError("CRT blind boxes are defined for m = 1 only")
        return crt_blind_box(d, n)
    return BoxSpec(d, m, n, rows)


def crt(residues, moduli):
    """Least nonnegative ``x`` with ``x = r (mod p)`` for pairwise coprime moduli."""
    x, modulus = 0, 1
    for r, p in zip(residues, moduli):
        # x + modulus * t = r (mod p)
        t = ((r - x) * pow(modulus, -1, p)) % p
        x += modulus * t
        modulus *= p
    return x % modulus


def crt_blind_box(d, n):
    """A box of side ``n`` (``m = 1``) containing no visible point.

    Cell offset ``c`` (row-major over ``{0..n-1}^d``) gets the ``c``-th prime
    ``p_c``, and the lower corner solves ``b_j = -c_j (mod p_c)`` for all
    cells, so every coordinate of ``b + c`` is divisible by ``p_c``.
    """
    if d < 2:
        raise DomainError(f"CRT blind box needs d >= 2, got {d}")
    if n < 1:
        raise DomainError(f"box side n must be >= 1, got {n}")
    cells = n**d
    if cells > CRT_MAX_CELLS:
        raise SizeGuardError(cells, CRT_MAX_CELLS, "CRT blind box cell count")
    offsets = list(itertools.product(range(n), repeat=d))
    primes = _first_primes(cells)
    lower = [crt([-c[j] for c in offsets], primes) for j in range(d)]
    return BoxSpec(d, 1, n, [lower])


def _first_primes(count):
    # p_k < k (ln k + ln ln k) for k >= 6
    limit = 15 if count < 6 else int(count * (math.log(count) + math.log(math.log(count)))) + 1
    return primes_upto(limit)[:count]


def derive_seed(*parts):
    """64-bit seed from a stable hash of ``parts`` (ints or strings)."""
    digest = hashlib.blake2b(":".join(map(str, parts)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class SeededSampler:
    """Counter-based seeding: trial ``t`` always gets the same generator."""

    seed: int = 0

    def stream(self, trial):
        return random.Random(derive_seed(self.seed, trial))


def sample_pointset(box, sampler, trial):
    """Draw the ``trial``-th point set; ``randrange`` rejects, so no modulo bias."""
    rng = sampler.stream(trial)
    n = box.n
    return tuple(tuple(b + rng.randrange(n) for b in row) for row in box.lower)
