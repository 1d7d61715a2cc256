"""Exact integer-matrix algorithms for primitive sets.

Conventions: Hermite normal form is lower triangular and is reached by
unimodular *column* operations, ``A @ U == H``. A point set is any sequence
of equal-length integer sequences (the rows ``s_1 .. s_m``).
"""

from __future__ import annotations

import itertools
import math
import operator
import random
from dataclasses import dataclass

from .errors import ContractError, DomainError, ParseError, RankError, ShapeError


class IntMatrix:
    """Immutable dense matrix of Python ints, stored row-major."""

    __slots__ = ("_rows",)

    def __init__(self, rows):
        if isinstance(rows, IntMatrix):
            self._rows = rows._rows
            return
        data = tuple(tuple(operator.index(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ShapeError("matrix must have at least one row and one column")
        width = len(data[0])
        for i, row in enumerate(data):
            if len(row) != width:
                raise ShapeError(f"row {i} has {len(row)} entries, expected {width}")
        self._rows = data

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def nrows(self):
        return len(self._rows)

    @property
    def ncols(self):
        return len(self._rows[0])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, key):
        if isinstance(key, tuple):
            i, j = key
            return self._rows[i][j]
        return self._rows[key]

    def __iter__(self):
        return iter(self._rows)

    def __len__(self):
        return len(self._rows)

    def column(self, j):
        return tuple(row[j] for row in self._rows)

    def columns(self):
        return list(zip(*self._rows))

    @property
    def T(self):
        return IntMatrix(zip(*self._rows))

    def tolist(self):
        return [list(row) for row in self._rows]

    def max_abs(self):
        return max(abs(x) for row in self._rows for x in row)

    def __matmul__(self, other):
        other = IntMatrix(other)
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        return IntMatrix(
            [[sum(map(operator.mul, row, col)) for col in cols] for row in self._rows]
        )

    def __eq__(self, other):
        if isinstance(other, IntMatrix):
            return self._rows == other._rows
        try:
            return self._rows == IntMatrix(other)._rows
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"


@dataclass(frozen=True)
class HnfResult:
    h: IntMatrix
    u: IntMatrix

    def __iter__(self):
        return iter((self.h, self.u))


@dataclass(frozen=True)
class BoundReport:
    """Certificate that a multiplier obeys ``max|U_ij| <= p! q M0**p``."""

    p: int
    q: int
    m0: int
    bound: int
    max_abs_u: int

    @property
    def holds(self):
        return self.max_abs_u <= self.bound

    def to_dict(self):
        return {
            "p": self.p,
            "q": self.q,
            "m0": self.m0,
            "bound": self.bound,
            "max_abs_u": self.max_abs_u,
            "holds": self.holds,
        }


# -- scalar helpers ---------------------------------------------------------


def xgcd(a, b):
    """Return ``(g, x, y)`` with ``g = gcd(a, b) >= 0`` and ``x*a + y*b == g``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _as_rows(a):
    if isinstance(a, IntMatrix):
        return [list(r) for r in a]
    return [[operator.index(x) for x in r] for r in a]


def determinant(m):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    rows = _as_rows(m)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ShapeError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for r in range(k + 1, n):
                if rows[r][k]:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        for i in range(k + 1, n):
            ri, rk = rows[i], rows[k]
            lead = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - lead * rk[j]) // prev
        prev = pivot
    return sign * rows[n - 1][n - 1]


def rank(m):
    """Exact rank over the rationals (fraction-free elimination)."""
    rows = [r for r in _as_rows(m)]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            lead = rows[i][c]
            if lead:
                rows[i] = [x * p - lead * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def adjugate(m):
    """Classical adjoint: ``m @ adjugate(m) == det(m) * I``."""
    rows = _as_rows(m)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ShapeError("adjugate needs a square matrix")
    if n == 1:
        return IntMatrix([[1]])
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1 :] for k, r in enumerate(rows) if k != i]
            adj[j][i] = (-1) ** (i + j) * determinant(minor)
    return IntMatrix(adj)


# -- Hermite normal form ----------------------------------------------------


def hnf(a):
    """Lower-triangular Hermite normal form with its unimodular multiplier.

    Row by row, extended-gcd column operations clear everything right of the
    diagonal; the diagonal is made positive and the entries to its left are
    reduced into ``[0, h_ii)``. The multiplier is accumulated alongside, so
    ``a @ u == h`` holds exactly.

    Raises :class:`RankError` unless ``a`` has full row rank.
    """
    a = IntMatrix(a)
    p, q = a.shape
    if p > q:
        raise RankError(rank(a), p)
    cols = [list(c) for c in a.columns()]
    ucols = [[int(i == j) for i in range(q)] for j in range(q)]
    for i in range(p):
        for j in range(i + 1, q):
            b = cols[j][i]
            if b == 0:
                continue
            g, x, y = xgcd(cols[i][i], b)
            ag, bg = cols[i][i] // g, b // g
            for vecs in (cols, ucols):
                ci, cj = vecs[i], vecs[j]
                vecs[i] = [x * s + y * t for s, t in zip(ci, cj)]
                vecs[j] = [ag * t - bg * s for s, t in zip(ci, cj)]
        piv = cols[i][i]
        if piv == 0:
            raise RankError(rank(a), p)
        if piv < 0:
            cols[i] = [-s for s in cols[i]]
            ucols[i] = [-s for s in ucols[i]]
            piv = -piv
        for j in range(i):
            f = cols[j][i] // piv
            if f:
                for vecs in (cols, ucols):
                    vecs[j] = [s - f * t for s, t in zip(vecs[j], vecs[i])]
    return HnfResult(IntMatrix(zip(*cols)), IntMatrix(zip(*ucols)))


def is_hnf(h):
    """Check the three Hermite normal form conditions entry by entry."""
    h = IntMatrix(h)
    p, q = h.shape
    if p > q:
        return False
    for i in range(p):
        if h[i, i] <= 0:
            return False
        if any(h[i, j] != 0 for j in range(i + 1, q)):
            return False
        if any(not 0 <= h[i, j] < h[i, i] for j in range(i)):
            return False
    return True


def is_unimodular(u):
    u = IntMatrix(u)
    if u.nrows != u.ncols:
        raise ShapeError(f"unimodularity needs a square matrix, got {u.shape}")
    return abs(determinant(u)) == 1


def hnf_bounded(a, m0=None):
    """HNF via the square completion ``B = [A; e_i...]`` with a size certificate.

    Unit rows are appended greedily in index order whenever they raise the
    rank. Because ``B`` is nonsingular, ``B @ V`` is its unique HNF and
    ``V = adj(B) (B V) / det(B)``, which gives ``max|V_ij| <= p! q M0**p``
    for any strict entry bound ``M0`` of ``a``.
    """
    a = IntMatrix(a)
    p, q = a.shape
    r = rank(a)
    if r < p:
        raise RankError(r, p)
    if m0 is None:
        m0 = a.max_abs() + 1
    elif m0 <= a.max_abs():
        raise DomainError(f"M0={m0} is not a strict bound on the entries (max {a.max_abs()})")
    rows = a.tolist()
    for i in range(q):
        if len(rows) == q:
            break
        unit = [int(j == i) for j in range(q)]
        if rank(rows + [unit]) > len(rows):
            rows.append(unit)
    v = hnf(rows).u
    h = a @ v
    report = BoundReport(p, q, m0, math.factorial(p) * q * m0**p, v.max_abs())
    return HnfResult(h, v), report


def random_unimodular(dim, steps, entry_cap, seed):
    """Identity transformed by ``steps`` random elementary column operations."""
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    rng = random.Random(seed)
    cols = [[int(i == j) for i in range(dim)] for j in range(dim)]
    for _ in range(steps):
        op = rng.choice(("swap", "negate", "add")) if dim > 1 else "negate"
        if op == "negate":
            j = rng.randrange(dim)
            cols[j] = [-x for x in cols[j]]
            continue
        i, j = rng.sample(range(dim), 2)
        if op == "swap":
            cols[i], cols[j] = cols[j], cols[i]
        else:
            k = rng.randint(-entry_cap, entry_cap)
            cols[i] = [x + k * y for x, y in zip(cols[i], cols[j])]
    return IntMatrix(zip(*cols))


# -- primitivity --------------------------------------------------------------


def as_points(s, dim=None):
    """Normalise a point set to a tuple of int tuples; check dimensions agree."""
    pts = tuple(tuple(operator.index(x) for x in p) for p in s)
    if pts:
        d = len(pts[0])
        for k, p in enumerate(pts):
            if len(p) != d:
                raise ShapeError(f"point {k} has dimension {len(p)}, expected {d}")
        if dim is not None and dim != d:
            raise ShapeError(f"points have dimension {d}, expected {dim}")
    return pts


def is_primitive(s):
    """True iff the rows of ``s`` are a Z-basis of ``span_R(s) & Z^d``.

    Dependent rows (including a zero row, or more rows than coordinates) are
    never primitive; the empty set is.
    """
    pts = as_points(s)
    if not pts:
        return True
    if len(pts) > len(pts[0]):
        return False
    try:
        h = hnf(pts).h
    except RankError:
        return False
    return all(h[i, i] == 1 for i in range(len(pts)))


def maximal_minors(s):
    """All ``m x m`` minors of the ``m x d`` matrix, columns in lexicographic order."""
    pts = as_points(s)
    m = len(pts)
    if m == 0:
        return [1]
    cols = list(zip(*pts))
    return [
        determinant(list(zip(*(cols[c] for c in combo))))
        for combo in itertools.combinations(range(len(cols)), m)
    ]


def is_primitive_minors(s):
    """Independent primitivity test: gcd of the maximal minors equals 1."""
    return math.gcd(*maximal_minors(s)) == 1


def saturation_index(s):
    """Index of ``span_Z(s)`` inside ``span_R(s) & Z^d``: the HNF diagonal product."""
    pts = as_points(s)
    if not pts:
        return 1
    h = hnf(pts).h
    return math.prod(h[i, i] for i in range(len(pts)))


def incremental_gcd_check(prefix, point):
    """Decide primitivity of ``prefix + [point]`` from the prefix multiplier.

    With ``A @ U`` in HNF for the (primitive) prefix, the extended set is
    primitive iff ``point @ U[:, i]`` for ``i >= len(prefix)`` are coprime.
    """
    point = tuple(operator.index(x) for x in point)
    pts = as_points(prefix, dim=len(point))
    d = len(point)
    if not is_primitive(pts):
        raise ContractError("prefix is not a primitive set")
    if len(pts) >= d:
        return False
    if pts:
        tail = hnf(pts).u.columns()[len(pts) :]
    else:
        tail = IntMatrix.identity(d).columns()
    return math.gcd(*(sum(map(operator.mul, point, col)) for col in tail)) == 1


def complete_to_basis(s, dim=None):
    """Extend a primitive set to a unimodular ``d x d`` matrix.

    If ``A @ U == [I | 0]`` then ``A`` is the top of ``U^-1``, and
    ``U^-1 = det(U) * adj(U)`` since ``det(U) = +-1``.
    """
    pts = as_points(s, dim)
    if not pts:
        if dim is None:
            raise ShapeError("dimension required to complete the empty set")
        return IntMatrix.identity(dim)
    if not is_primitive(pts):
        raise ContractError("cannot complete a non-primitive set to a basis of Z^d")
    u = hnf(pts).u
    det_u = determinant(u)
    basis = IntMatrix([[det_u * x for x in row] for row in adjugate(u)])
    assert tuple(basis[: len(pts)]) == pts
    assert abs(determinant(basis)) == 1
    return basis


# -- matrix text format -----------------------------------------------------


def parse_rows(text):
    """Parse the matrix text format into a list of int tuples (possibly empty).

    One row per line, decimal integers separated by spaces; blank lines and
    lines starting with ``#`` are skipped.
    """
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = tuple(int(tok, 10) for tok in line.split())
        except ValueError:
            raise ParseError(f"non-integer entry in {raw!r}", lineno) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"expected {width} entries, found {len(row)}", lineno)
        rows.append(row)
    return rows


def parse_matrix(text):
    rows = parse_rows(text)
    if not rows:
        raise ParseError("no matrix rows found")
    return IntMatrix(rows)


def format_matrix(m):
    return "\n".join(" ".join(str(x) for x in row) for row in m) + "\n"
