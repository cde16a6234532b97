"""Meshalkin sequences, families of them, LYM sums and the extremal bounds.

A Meshalkin sequence of length ``p`` is a tuple of flats whose ranks add up
to the rank of their join.  It is *full* when the join is the whole
geometry, *partial* otherwise.  Coordinates are 0-based throughout: the
projection ``family.projection(0)`` is the set of first members.

Chain convention: a set of flats is ``l``-chain-free when its longest chain
has at most ``l`` elements, so ``l = 1`` means antichain.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .projgeom import Flat, Lattice, join, leq
from .qnum import (
    RankVector,
    enumerate_compositions,
    gaussian_binomial,
    gaussian_multinomial,
    s2,
)


class SequenceMode(str, enum.Enum):
    FULL = "full"
    PARTIAL = "partial"


class LymMode(str, enum.Enum):
    MAIN = "main"
    WEAK = "weak"
    PARTIAL = "partial"


class BoundMode(str, enum.Enum):
    MAIN = "main"
    PARTIAL = "partial"
    ROTA_HARPER = "rota_harper"
    WEAK = "weak"


class NotMeshalkinError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemParams:
    n: int
    p: int
    l: int
    q: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.l < 1:
            raise ValueError(f"l must be >= 1, got {self.l}")
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")


@dataclass(frozen=True)
class MeshalkinSequence:
    flats: tuple[Flat, ...]
    rank_vector: RankVector = field(compare=False)
    join_flat: Flat = field(compare=False)

    @classmethod
    def from_flats(cls, flats: Sequence[Flat]) -> "MeshalkinSequence":
        flats = tuple(flats)
        if not flats:
            raise NotMeshalkinError("a Meshalkin sequence needs at least one flat")
        top = flats[0]
        for f in flats[1:]:
            top = join(top, f)
        ranks = tuple(f.rank for f in flats)
        if sum(ranks) != top.rank:
            raise NotMeshalkinError(
                f"ranks {ranks} sum to {sum(ranks)} but the join has rank {top.rank}"
            )
        return cls(flats, ranks, top)

    @property
    def p(self) -> int:
        return len(self.flats)

    @property
    def n(self) -> int:
        return self.flats[0].n

    @property
    def is_full(self) -> bool:
        return self.join_flat.rank == self.n

    def sort_key(self):
        return (self.rank_vector, tuple(f.rows for f in self.flats))

    def __repr__(self):
        return f"MeshalkinSequence({list(self.flats)!r})"


def is_meshalkin(
    flats: Sequence[Flat], mode: SequenceMode | str, lattice: Lattice
) -> tuple[bool, str | None]:
    """Check whether ``flats`` form a (full or partial) Meshalkin sequence.

    Returns ``(ok, reason)`` where ``reason`` names the first failed condition.
    """
    mode = SequenceMode(mode)
    if not flats:
        raise ValueError("need at least one flat")
    for i, f in enumerate(flats):
        if not lattice.contains(f):
            raise ValueError(f"flat {i} is not in {lattice!r}")
    top = flats[0]
    for f in flats[1:]:
        top = join(top, f)
    total = sum(f.rank for f in flats)
    if total != top.rank:
        return False, f"rank additivity fails: ranks sum to {total}, join has rank {top.rank}"
    if mode is SequenceMode.FULL and top.rank != lattice.n:
        return False, f"join has rank {top.rank}, not the whole geometry (rank {lattice.n})"
    return True, None


class Family:
    """A set of Meshalkin sequences of common length ``p`` in one lattice.

    Duplicates collapse.  Sequences are kept in a canonical sorted order so
    that iteration and serialization are deterministic.
    """

    def __init__(
        self,
        lattice: Lattice,
        p: int,
        sequences: Iterable[MeshalkinSequence] = (),
        mode: SequenceMode | str = SequenceMode.FULL,
    ):
        self.lattice = lattice
        self.p = p
        self.mode = SequenceMode(mode)
        unique = set()
        for s in sequences:
            if s.p != p:
                raise ValueError(f"sequence of length {s.p} in a family with p={p}")
            if not lattice.contains(s.flats[0]):
                raise ValueError(f"sequence {s!r} is not in {lattice!r}")
            if self.mode is SequenceMode.FULL and not s.is_full:
                raise NotMeshalkinError(f"sequence {s!r} does not join to the whole geometry")
            unique.add(s)
        self.sequences = tuple(sorted(unique, key=MeshalkinSequence.sort_key))
        self.profile = Counter(s.rank_vector for s in self.sequences)

    def __len__(self):
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    def __contains__(self, seq):
        return seq in set(self.sequences)

    def __eq__(self, other):
        if not isinstance(other, Family):
            return NotImplemented
        return (
            self.lattice == other.lattice
            and self.p == other.p
            and self.mode == other.mode
            and self.sequences == other.sequences
        )

    def __hash__(self):
        return hash((self.lattice, self.p, self.mode, self.sequences))

    def __repr__(self):
        return (
            f"Family(n={self.lattice.n}, q={self.lattice.q}, p={self.p}, "
            f"mode={self.mode.value}, size={len(self)})"
        )

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def q(self) -> int:
        return self.lattice.q

    def projection(self, k: int) -> frozenset[Flat]:
        """The set of ``k``-th members (0-based) over all sequences."""
        return frozenset(s.flats[k] for s in self.sequences)

    def constrained_coordinates(self, scope: SequenceMode | str | None = None) -> range:
        """Coordinates subject to the chain condition: all but the last for FULL."""
        scope = self.mode if scope is None else SequenceMode(scope)
        return range(self.p - 1) if scope is SequenceMode.FULL else range(self.p)


def _sequences(lattice: Lattice, alpha: RankVector, full: bool):
    p = len(alpha)
    out: list[MeshalkinSequence] = []

    def extend(prefix: tuple[Flat, ...], top: Flat):
        k = len(prefix)
        if k == p:
            out.append(MeshalkinSequence(prefix, alpha, top))
            return
        want = top.rank + alpha[k]
        if full and k == p - 1:
            candidates = lattice.complements(top)
        else:
            candidates = lattice.level(alpha[k])
        for c in candidates:
            j = join(top, c)
            if j.rank == want:
                extend(prefix + (c,), j)

    extend((), lattice.bottom)
    return tuple(out)


@lru_cache(maxsize=512)
def _cached_sequences(lattice: Lattice, alpha: RankVector, full: bool):
    return _sequences(lattice, alpha, full)


def enumerate_sequences(
    lattice: Lattice, alpha: Sequence[int], mode: SequenceMode | str = SequenceMode.FULL
) -> list[MeshalkinSequence]:
    """Every Meshalkin sequence with rank vector ``alpha``, each once.

    FULL needs ``sum(alpha) == n``; PARTIAL needs ``sum(alpha) <= n``.  The
    sequences are built member by member, keeping the running join, and the
    last member of a full sequence ranges over complements of that join.
    """
    mode = SequenceMode(mode)
    alpha = tuple(alpha)
    if not alpha or any(a < 0 for a in alpha):
        raise ValueError(f"bad rank vector {alpha}")
    m = sum(alpha)
    if mode is SequenceMode.FULL and m != lattice.n:
        raise ValueError(f"full sequences need ranks summing to {lattice.n}, got {alpha}")
    if m > lattice.n:
        raise ValueError(f"ranks {alpha} sum past the geometry rank {lattice.n}")
    return list(_cached_sequences(lattice, alpha, mode is SequenceMode.FULL))


def rank_vectors(n: int, p: int, mode: SequenceMode | str) -> list[RankVector]:
    """All rank vectors a length-``p`` sequence of the given mode can have."""
    if SequenceMode(mode) is SequenceMode.FULL:
        return enumerate_compositions(n, p)
    return sorted(a for m in range(n + 1) for a in enumerate_compositions(m, p))


def all_sequences(lattice: Lattice, p: int, mode: SequenceMode | str) -> list[MeshalkinSequence]:
    return [s for a in rank_vectors(lattice.n, p, mode) for s in enumerate_sequences(lattice, a, mode)]


def longest_chain(flats: Iterable[Flat]) -> list[Flat]:
    """A longest chain (listed bottom to top) among ``flats``."""
    ordered = sorted(set(flats))
    best: list[int] = []
    prev: list[int] = []
    for i, f in enumerate(ordered):
        length, parent = 1, -1
        for j in range(i):
            g = ordered[j]
            if g.rank < f.rank and best[j] + 1 > length and leq(g, f):
                length, parent = best[j] + 1, j
        best.append(length)
        prev.append(parent)
    if not ordered:
        return []
    i = max(range(len(ordered)), key=lambda k: (best[k], -k))
    chain = []
    while i >= 0:
        chain.append(ordered[i])
        i = prev[i]
    return chain[::-1]


def chain_stats(flats: Iterable[Flat]) -> int:
    """Number of elements in a longest chain; 0 for the empty set."""
    return len(longest_chain(flats))


@dataclass
class ChainCheck:
    ok: bool
    coordinate: int | None = None
    chain: list[Flat] | None = None

    def __bool__(self):
        return self.ok


def check_chain_condition(
    family: Family, params: ProblemParams, scope: SequenceMode | str | None = None
) -> ChainCheck:
    """Check that every constrained projection has no chain longer than ``params.l``.

    FULL scope leaves the last coordinate unconstrained; PARTIAL checks all.
    On failure the offending coordinate and a too-long chain are returned.
    """
    if params.p != family.p:
        raise ValueError(f"family has p={family.p}, params say p={params.p}")
    for k in family.constrained_coordinates(scope):
        chain = longest_chain(family.projection(k))
        if len(chain) > params.l:
            return ChainCheck(False, k, chain)
    return ChainCheck(True)


def lym_denominator(n: int, alpha: Sequence[int], q: int, mode: LymMode | str) -> int:
    mode = LymMode(mode)
    if mode is LymMode.MAIN:
        return gaussian_multinomial(n, alpha, q) * q ** s2(alpha)
    if mode is LymMode.WEAK:
        return gaussian_multinomial(n, alpha, q)
    m = sum(alpha)
    return gaussian_binomial(n, m, q) * gaussian_multinomial(m, alpha, q) * q ** s2(alpha)


def lym_sum(family: Family, mode: LymMode | str = LymMode.MAIN) -> Fraction:
    """Exact LYM sum of ``family``.

    MAIN weighs a sequence by ``1 / ([n; r(a)] q^s2(r(a)))``, WEAK by
    ``1 / [n; r(a)]`` and PARTIAL by ``1 / ([n; m] [m; r(a)] q^s2(r(a)))``
    where ``m`` is the rank of the join.  MAIN and WEAK need full sequences.
    """
    mode = LymMode(mode)
    n, q = family.n, family.q
    if mode is not LymMode.PARTIAL:
        for alpha in family.profile:
            if sum(alpha) != n:
                raise ValueError(f"{mode.value} LYM sum needs full sequences, found rank vector {alpha}")
    total = Fraction(0)
    for alpha, count in family.profile.items():
        total += Fraction(count, lym_denominator(n, alpha, q, mode))
    return total


def rota_harper_sum(flats: Iterable[Flat], n: int, q: int) -> Fraction:
    """Sum of ``1 / [n; r(a)]`` over a set of flats."""
    ranks = Counter(f.rank for f in set(flats))
    return sum((Fraction(c, gaussian_binomial(n, r, q)) for r, c in ranks.items()), Fraction(0))


@dataclass
class BoundResult:
    value: int
    alphas: list[RankVector]
    summands: int
    candidates: int


def _largest(candidates: list[tuple[RankVector, int]], take: int) -> BoundResult:
    ranked = sorted(candidates, key=lambda c: (-c[1], c[0]))
    chosen = ranked[:take]
    return BoundResult(sum(v for _, v in chosen), [a for a, _ in chosen], take, len(candidates))


def bound(params: ProblemParams, mode: BoundMode | str = BoundMode.MAIN) -> BoundResult:
    """Upper bound on the size (or WEAK LYM sum) of an admissible family.

    The bound is the sum of the ``P`` largest candidate quantities, ``P``
    capped at the number of candidates.  Ties are broken by lexicographic
    rank vector, which changes only the reported ``alphas``, never the value.

    * MAIN: ``[n; a] q^s2(a)`` over p-part compositions, ``P = l^(p-1)``.
    * PARTIAL: the same over (p+1)-part compositions, ``P = l^p``.
    * ROTA_HARPER: ``[n; j]`` for ``0 <= j <= n``, ``P = l``; alphas are ``(j,)``.
    * WEAK: ``q^s2(a)`` over p-part compositions, ``P = l^(p-1)``.
    """
    mode = BoundMode(mode)
    n, p, l, q = params.n, params.p, params.l, params.q
    if mode is BoundMode.ROTA_HARPER:
        cands = [((j,), gaussian_binomial(n, j, q)) for j in range(n + 1)]
        return _largest(cands, min(l, len(cands)))
    if mode is BoundMode.PARTIAL:
        comps = enumerate_compositions(n, p + 1)
        cands = [(a, gaussian_multinomial(n, a, q) * q ** s2(a)) for a in comps]
        return _largest(cands, min(l**p, len(cands)))
    comps = enumerate_compositions(n, p)
    if mode is BoundMode.WEAK:
        cands = [(a, q ** s2(a)) for a in comps]
    else:
        cands = [(a, gaussian_multinomial(n, a, q) * q ** s2(a)) for a in comps]
    return _largest(cands, min(l ** (p - 1), len(cands)))


def lym_limit(params: ProblemParams, mode: LymMode | str) -> Fraction | int:
    """Right-hand side an admissible family's LYM sum must not exceed."""
    mode = LymMode(mode)
    if mode is LymMode.MAIN:
        return params.l ** (params.p - 1)
    if mode is LymMode.PARTIAL:
        return params.l**params.p
    return bound(params, BoundMode.WEAK).value


@dataclass
class HKRCertificate:
    p_prime: int
    p_double_prime: int
    middle_sum: Fraction
    above_ok: bool
    below_ok: bool
    middle_ok: bool

    @property
    def holds(self) -> bool:
        return self.above_ok and self.below_ok and self.middle_ok


@dataclass
class HKRResult:
    value: Fraction
    bound: Fraction
    holds: bool
    equality: bool
    certificate: HKRCertificate | None


def hkr_apply(m: Sequence, qs: Sequence, P: int) -> HKRResult:
    """Evaluate the weighted-sum inequality ``sum q_k m_k <= m_1 + ... + m_P``.

    ``m`` must be nonincreasing and nonnegative, each ``q_k`` in ``[0, 1]``
    with ``sum(qs) <= P`` and ``1 <= P <= len(m)``.  When ``m_P > 0``,
    ``equality`` is decided from the structural certificate: ``q_k = 1``
    wherever ``m_k > m_P``, ``q_k = 0`` wherever ``m_k < m_P``, and the
    weights on the block of values equal to ``m_P`` sum to ``P - P'``.
    When ``m_P = 0`` there is no certificate and equality is read off the
    values.
    """
    m = [Fraction(x) for x in m]
    qs = [Fraction(x) for x in qs]
    N = len(m)
    if len(qs) != N:
        raise ValueError(f"{N} values but {len(qs)} weights")
    if not 1 <= P <= N:
        raise ValueError(f"P={P} outside [1, {N}]")
    for i, x in enumerate(m):
        if x < 0:
            raise ValueError(f"m[{i}] = {x} is negative")
        if i and x > m[i - 1]:
            raise ValueError(f"m is not sorted descending at index {i}")
    for i, x in enumerate(qs):
        if not 0 <= x <= 1:
            raise ValueError(f"qs[{i}] = {x} outside [0, 1]")
    if sum(qs) > P:
        raise ValueError(f"weights sum to {sum(qs)} > P={P}")

    value = sum((a * b for a, b in zip(qs, m)), Fraction(0))
    top = sum(m[:P], Fraction(0))
    mP = m[P - 1]
    if mP == 0:
        return HKRResult(value, top, value <= top, value == top, None)
    first = next(i for i in range(N) if m[i] == mP)
    last = max(i for i in range(N) if m[i] == mP)
    p1, p2 = first, last + 1
    middle = sum(qs[first : last + 1], Fraction(0))
    cert = HKRCertificate(
        p_prime=p1,
        p_double_prime=p2,
        middle_sum=middle,
        above_ok=all(qs[i] == 1 for i in range(first)),
        below_ok=all(qs[i] == 0 for i in range(last + 1, N)),
        middle_ok=middle == P - p1,
    )
    return HKRResult(value, top, value <= top, cert.holds, cert)


def rota_harper_lift(flats: Iterable[Flat], lattice: Lattice) -> Family:
    """The full family ``{(a, c) : a in flats, c a complement of a}``."""
    seqs = []
    for a in set(flats):
        for c in lattice.complements(a):
            seqs.append(MeshalkinSequence((a, c), (a.rank, c.rank), lattice.top))
    return Family(lattice, 2, seqs, SequenceMode.FULL)
