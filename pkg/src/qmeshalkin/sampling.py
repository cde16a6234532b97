"""Random admissible families for property checks.

Two strategies, picked at random per family:

``levels``
    Each constrained coordinate is restricted to ``l`` randomly chosen
    ranks.  A union of ``l`` levels has no chain longer than ``l``, so any
    subset of the matching sequences is admissible.  Keeping whole rank
    classes with probability 1 reaches the equality cases.
``greedy``
    Random sequences of random rank vectors are offered one at a time and
    kept only if the chain condition still holds.  This produces projections
    that are not unions of levels.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .meshalkin import (
    Family,
    MeshalkinSequence,
    ProblemParams,
    SequenceMode,
    enumerate_sequences,
    longest_chain,
    rank_vectors,
)
from .projgeom import Flat, Lattice, join, leq


def random_sequence(lattice: Lattice, alpha, mode, rng: random.Random) -> MeshalkinSequence:
    full = SequenceMode(mode) is SequenceMode.FULL
    alpha = tuple(alpha)
    top = lattice.bottom
    flats: list[Flat] = []
    for k, a in enumerate(alpha):
        if full and k == len(alpha) - 1:
            options = lattice.complements(top)
        else:
            options = [c for c in lattice.level(a) if join(top, c).rank == top.rank + a]
        c = rng.choice(options)
        flats.append(c)
        top = join(top, c)
    return MeshalkinSequence(tuple(flats), alpha, top)


def _fits(x: Flat, current: set[Flat], l: int) -> bool:
    if x in current:
        return True
    below = [y for y in current if y.rank < x.rank and leq(y, x)]
    above = [y for y in current if y.rank > x.rank and leq(x, y)]
    return len(longest_chain(below)) + 1 + len(longest_chain(above)) <= l


def _levels_family(lattice: Lattice, params: ProblemParams, mode: SequenceMode, rng: random.Random):
    n, p, l = lattice.n, params.p, params.l
    constrained = range(p - 1) if mode is SequenceMode.FULL else range(p)
    vectors = rank_vectors(n, p, mode)
    while True:
        allowed_ranks = {k: set(rng.sample(range(n + 1), min(l, n + 1))) for k in constrained}
        allowed = [a for a in vectors if all(a[k] in allowed_ranks[k] for k in constrained)]
        if allowed:
            break
    chosen = [a for a in allowed if rng.random() < 0.6] or [rng.choice(allowed)]
    keep = rng.choice([1.0, 1.0, 0.5, 0.2, rng.random()])
    seqs = []
    for a in chosen:
        for s in enumerate_sequences(lattice, a, mode):
            if keep == 1.0 or rng.random() < keep:
                seqs.append(s)
    return seqs


def _greedy_family(lattice: Lattice, params: ProblemParams, mode: SequenceMode, rng: random.Random):
    p, l = params.p, params.l
    constrained = range(p - 1) if mode is SequenceMode.FULL else range(p)
    vectors = rank_vectors(lattice.n, p, mode)
    projections: dict[int, set[Flat]] = {k: set() for k in constrained}
    seqs = []
    for _ in range(rng.randint(1, 80)):
        s = random_sequence(lattice, rng.choice(vectors), mode, rng)
        if all(_fits(s.flats[k], projections[k], l) for k in constrained):
            seqs.append(s)
            for k in constrained:
                projections[k].add(s.flats[k])
    return seqs


def random_family(
    lattice: Lattice,
    params: ProblemParams,
    mode: SequenceMode | str = SequenceMode.FULL,
    rng: random.Random | None = None,
    strategy: str | None = None,
) -> Family:
    """Draw an admissible family for ``params`` (chain-free in every constrained coordinate)."""
    mode = SequenceMode(mode)
    rng = rng or random.Random()
    if (lattice.n, lattice.q) != (params.n, params.q):
        raise ValueError(f"params {params} do not match {lattice!r}")
    strategy = strategy or rng.choice(["levels", "greedy"])
    if strategy == "levels":
        seqs = _levels_family(lattice, params, mode, rng)
    elif strategy == "greedy":
        seqs = _greedy_family(lattice, params, mode, rng)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return Family(lattice, params.p, seqs, mode)


def random_antichain(lattice: Lattice, rng: random.Random, max_size: int | None = None) -> frozenset[Flat]:
    """Greedy random antichain: shuffle all flats, keep each one incomparable to those kept."""
    flats = lattice.flats()
    rng.shuffle(flats)
    cap = max_size if max_size is not None else rng.randint(1, len(flats))
    chosen: list[Flat] = []
    for f in flats:
        if len(chosen) >= cap:
            break
        if all(not leq(f, g) and not leq(g, f) for g in chosen):
            chosen.append(f)
    return frozenset(chosen)


def random_hkr_instance(rng: random.Random):
    """Random ``(m, qs, P)`` meeting the weighted-sum lemma's hypotheses.

    About a third of the instances are built to sit exactly on the equality
    pattern, and some of those are then nudged off it.
    """
    N = rng.randint(1, 8)
    m = sorted((Fraction(rng.randint(0, 6), rng.choice([1, 1, 2, 3])) for _ in range(N)), reverse=True)
    P = rng.randint(1, N)
    kind = rng.random()
    if kind < 0.35 and m[P - 1] > 0:
        mP = m[P - 1]
        first = next(i for i in range(N) if m[i] == mP)
        last = max(i for i in range(N) if m[i] == mP)
        qs = [Fraction(1)] * first + [Fraction(0)] * (N - first)
        remaining = Fraction(P - first)
        block = list(range(first, last + 1))
        rng.shuffle(block)
        for i in block:
            share = min(Fraction(1), remaining) if i == block[-1] else min(
                Fraction(1), remaining, Fraction(rng.randint(0, 4), 4)
            )
            qs[i] = share
            remaining -= share
        if remaining:
            # could not place all weight in the block; fill greedily
            for i in block:
                extra = min(1 - qs[i], remaining)
                qs[i] += extra
                remaining -= extra
        if rng.random() < 0.3:
            i = rng.randrange(N)
            qs[i] = Fraction(rng.randint(0, 2), 2)
    else:
        qs = [rng.choice([Fraction(0), Fraction(1), Fraction(rng.randint(0, 5), 5)]) for _ in range(N)]
    while sum(qs) > P:
        i = max(range(N), key=lambda k: qs[k])
        qs[i] = max(Fraction(0), qs[i] - Fraction(1, 2))
    return m, qs, P
