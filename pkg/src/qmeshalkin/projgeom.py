"""The lattice of flats of the projective geometry PG(n-1, q).

A flat of rank ``k`` is a ``k``-dimensional subspace of GF(q)^n, stored as
the unique reduced row echelon basis of that subspace.  Two flats are equal
exactly when their RREF matrices are equal, so flats hash and compare
cheaply.
"""

from __future__ import annotations

import warnings
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

from .gfq import FieldSpec, make_field
from .qnum import gaussian_binomial

DEFAULT_FLAT_BUDGET = 10**6

Row = tuple[int, ...]
Matrix = tuple[Row, ...]


class LatticeBudgetError(RuntimeError):
    """Raised when caching a level would exceed the lattice's flat budget."""


class Flat:
    """A subspace of GF(q)^n in reduced row echelon form.

    Do not build these directly from arbitrary rows; use
    :meth:`Lattice.canonicalize` (or :func:`canonicalize`).
    """

    __slots__ = ("rows", "n", "field", "_hash")

    def __init__(self, rows: Matrix, n: int, field: FieldSpec):
        self.rows = rows
        self.n = n
        self.field = field
        self._hash = hash((n, field.q, rows))

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x) for row in self.rows)

    def sort_key(self):
        return (self.rank, self.rows)

    def __eq__(self, other):
        if not isinstance(other, Flat):
            return NotImplemented
        return self.n == other.n and self.field.q == other.field.q and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Flat"):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        body = " ".join("".join(str(x) for x in row) if self.q <= 10 else str(list(row)) for row in self.rows)
        return f"Flat(n={self.n}, q={self.q}, rank={self.rank}, [{body}])"

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "rows": [list(r) for r in self.rows]}


def _rref(rows: Iterable[Sequence[int]], n: int, F: FieldSpec) -> Matrix:
    mat = [list(r) for r in rows if any(r)]
    r = 0
    for col in range(n):
        if r == len(mat):
            break
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        lead = mat[r][col]
        if lead != 1:
            s = F.inv(lead)
            mat[r] = [F.mul(s, x) for x in mat[r]]
        prow = mat[r]
        for i in range(len(mat)):
            c = mat[i][col]
            if i != r and c:
                mat[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(mat[i], prow)]
        r += 1
    return tuple(tuple(row) for row in mat[:r])


def is_rref(rows: Sequence[Sequence[int]]) -> bool:
    """True if ``rows`` is already in reduced row echelon form with no zero rows."""
    last = -1
    pivots = []
    for row in rows:
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is None or lead <= last or row[lead] != 1:
            return False
        pivots.append(lead)
        last = lead
    for i, col in enumerate(pivots):
        if any(rows[k][col] for k in range(len(rows)) if k != i):
            return False
    return True


def _reduce(vec: Sequence[int], flat: Flat) -> list[int]:
    """Residue of ``vec`` after eliminating the pivot columns of ``flat``."""
    F = flat.field
    x = list(vec)
    for row, col in zip(flat.rows, flat.pivots):
        c = x[col]
        if c:
            x = [F.sub(a, F.mul(c, b)) for a, b in zip(x, row)]
    return x


def _same_space(a: Flat, b: Flat) -> None:
    if a.n != b.n or a.q != b.q:
        raise ValueError(
            f"flats live in different geometries: PG({a.n - 1},{a.q}) vs PG({b.n - 1},{b.q})"
        )


@lru_cache(maxsize=1 << 18)
def join(a: Flat, b: Flat) -> Flat:
    """Smallest flat containing ``a`` and ``b`` (row space of the stacked matrices)."""
    _same_space(a, b)
    if not b.rows:
        return a
    if not a.rows:
        return b
    return Flat(_rref(a.rows + b.rows, a.n, a.field), a.n, a.field)


def dual(a: Flat) -> Flat:
    """Annihilator of ``a`` under the standard dot product (an order-reversing involution)."""
    F = a.field
    pivots = a.pivots
    free = [j for j in range(a.n) if j not in pivots]
    rows = []
    for f in free:
        v = [0] * a.n
        v[f] = 1
        for row, col in zip(a.rows, pivots):
            v[col] = F.neg(row[f])
        rows.append(v)
    return Flat(_rref(rows, a.n, F), a.n, F)


@lru_cache(maxsize=1 << 16)
def meet(a: Flat, b: Flat) -> Flat:
    """Intersection of ``a`` and ``b``, computed as the dual of the join of the duals."""
    _same_space(a, b)
    return dual(join(dual(a), dual(b)))


def leq(a: Flat, b: Flat) -> bool:
    """True iff ``a`` is contained in ``b``."""
    _same_space(a, b)
    if a.rank > b.rank:
        return False
    return all(not any(_reduce(row, b)) for row in a.rows)


def is_independent(a: Flat, b: Flat) -> bool:
    """True iff ``a`` and ``b`` meet in the bottom flat, i.e. ranks add under join."""
    return join(a, b).rank == a.rank + b.rank


class Lattice:
    """All flats of PG(n-1, q), with levels built lazily and cached.

    ``max_flats`` bounds the total number of cached flats; building a level
    that would go past it raises :class:`LatticeBudgetError`.
    """

    def __init__(self, n: int, q: int, max_flats: int = DEFAULT_FLAT_BUDGET):
        if n < 0:
            raise ValueError(f"geometry rank must be nonnegative, got {n}")
        self.n = n
        self.field = make_field(q)
        self.q = q
        self.max_flats = max_flats
        self._levels: dict[int, tuple[Flat, ...]] = {}
        self._index: dict[Flat, int] = {}
        self._cached = 0
        self.bottom = Flat((), n, self.field)
        identity = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        self.top = Flat(identity, n, self.field)

    def __repr__(self):
        return f"Lattice(n={self.n}, q={self.q})"

    def __eq__(self, other):
        return isinstance(other, Lattice) and (self.n, self.q) == (other.n, other.q)

    def __hash__(self):
        return hash(("Lattice", self.n, self.q))

    def canonicalize(self, rows: Iterable[Sequence[int]]) -> Flat:
        rows = [tuple(self.field.check(x) for x in row) for row in rows]
        for row in rows:
            if len(row) != self.n:
                raise ValueError(f"row {row} has length {len(row)}, expected {self.n}")
        return Flat(_rref(rows, self.n, self.field), self.n, self.field)

    def contains(self, flat: Flat) -> bool:
        return flat.n == self.n and flat.q == self.q

    def level_size(self, k: int) -> int:
        return gaussian_binomial(self.n, k, self.q)

    def level(self, k: int) -> tuple[Flat, ...]:
        """All flats of rank ``k`` (see :func:`enumerate_flats`)."""
        if not 0 <= k <= self.n:
            raise ValueError(f"rank {k} outside [0, {self.n}]")
        if k not in self._levels:
            size = self.level_size(k)
            if self._cached + size > self.max_flats:
                raise LatticeBudgetError(
                    f"level {k} of PG({self.n - 1},{self.q}) has {size} flats; "
                    f"budget {self.max_flats} with {self._cached} already cached"
                )
            flats = tuple(self._generate_level(k))
            self._levels[k] = flats
            for i, f in enumerate(flats):
                self._index[f] = i
            self._cached += size
        return self._levels[k]

    def _generate_level(self, k: int):
        n, F = self.n, self.field
        for pivots in combinations(range(n), k):
            pivot_set = set(pivots)
            free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivot_set]
            for values in product(range(F.q), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, j), v in zip(free, values):
                    rows[i][j] = v
                yield Flat(tuple(tuple(r) for r in rows), n, F)

    def flats(self) -> list[Flat]:
        return [f for k in range(self.n + 1) for f in self.level(k)]

    def index(self, flat: Flat) -> int:
        """Position of ``flat`` inside its level."""
        self.level(flat.rank)
        return self._index[flat]

    def complements(self, a: Flat) -> list[Flat]:
        """All flats ``c`` with ``a ^ c = 0`` and ``a v c = 1``.

        By modularity these are exactly the rank ``n - r(a)`` flats whose join
        with ``a`` is the top, so only that level is scanned.
        """
        if not self.contains(a):
            raise ValueError(f"{a!r} is not a flat of {self!r}")
        return [c for c in self.level(self.n - a.rank) if join(a, c).rank == self.n]


def canonicalize(rows: Iterable[Sequence[int]], lattice: Lattice) -> Flat:
    return lattice.canonicalize(rows)


def enumerate_flats(lattice: Lattice, k: int) -> list[Flat]:
    """Every rank-``k`` flat exactly once.

    Flats are generated straight from RREF shapes: each choice of ``k``
    pivot columns, then every filling of the free entries.  The order is
    that of ``itertools.combinations`` then ``itertools.product``.
    """
    return list(lattice.level(k))


def complements(lattice: Lattice, a: Flat) -> list[Flat]:
    return lattice.complements(a)


def flat_from_json(doc: dict, lattice: Lattice | None = None) -> Flat:
    """Load ``{"n", "q", "rows"}``; non-RREF input is canonicalized with a warning."""
    if lattice is None:
        lattice = Lattice(int(doc["n"]), int(doc["q"]))
    elif (doc.get("n", lattice.n), doc.get("q", lattice.q)) != (lattice.n, lattice.q):
        raise ValueError(f"flat document is for n={doc.get('n')}, q={doc.get('q')}, not {lattice!r}")
    return matrix_to_flat(doc["rows"], lattice)


def matrix_to_flat(rows: Sequence[Sequence[int]], lattice: Lattice, where: str = "matrix") -> Flat:
    flat = lattice.canonicalize(rows)
    if [list(r) for r in flat.rows] != [list(r) for r in rows]:
        warnings.warn(f"{where}: not in reduced row echelon form, canonicalized", stacklevel=2)
    return flat
