"""Equality constructions and exhaustive search for maximum admissible families.

The search works on projections rather than on sequences.  Once the sets
``S_k`` of allowed members are fixed for the constrained coordinates, the
largest family with those projections takes every sequence whose
constrained members lie in the ``S_k``; a maximum family is therefore the
closure of its own projections.  The branch and bound decides, flat by
flat, whether each flat joins ``S_k``, and bounds a node by the number of
sequences that can still be completed.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field

from .meshalkin import (
    BoundMode,
    Family,
    ProblemParams,
    SequenceMode,
    all_sequences,
    bound,
    enumerate_sequences,
)
from .projgeom import Flat, Lattice, leq
from .qnum import balanced_composition, balanced_rank_vectors, gaussian_binomial

DEFAULT_NODE_BUDGET = 10**6


def default_budget() -> int:
    return int(os.environ.get("MESHALKIN_BUDGET", DEFAULT_NODE_BUDGET))


class SearchTooLarge(ValueError):
    """The sequence universe alone exceeds the node budget."""


def construct_balanced_family(lattice: Lattice, p: int) -> Family:
    """All full sequences whose rank vector is ``balanced_composition(n, p)``."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    alpha = balanced_composition(lattice.n, p)
    return Family(lattice, p, enumerate_sequences(lattice, alpha), SequenceMode.FULL)


def construct_balanced_partial_family(lattice: Lattice, p: int) -> Family:
    """Partial sequences whose ranks are the first ``p`` parts of ``balanced_composition(n, p+1)``."""
    alpha = balanced_composition(lattice.n, p + 1)[:p]
    return Family(lattice, p, enumerate_sequences(lattice, alpha, SequenceMode.PARTIAL), SequenceMode.PARTIAL)


def rh_level_ranks(n: int, q: int, l: int, tie: str = "lower") -> list[int]:
    """Ranks of the ``l`` largest levels; ties between equal sizes go to the lower (or upper) rank."""
    if not 1 <= l <= n + 1:
        raise ValueError(f"l must be in [1, {n + 1}], got {l}")
    if tie not in ("lower", "upper"):
        raise ValueError(f"tie must be 'lower' or 'upper', got {tie!r}")
    sign = 1 if tie == "lower" else -1
    ranks = sorted(range(n + 1), key=lambda k: (-gaussian_binomial(n, k, q), sign * k))
    return sorted(ranks[:l])


def construct_rh_levels(lattice: Lattice, l: int, tie: str = "lower") -> frozenset[Flat]:
    """Union of the ``l`` largest levels of the lattice."""
    ranks = rh_level_ranks(lattice.n, lattice.q, l, tie)
    return frozenset(f for k in ranks for f in lattice.level(k))


@dataclass
class SearchConfig:
    params: ProblemParams
    mode: SequenceMode = SequenceMode.FULL
    node_budget: int = field(default_factory=default_budget)
    report_all_maxima: bool = False
    order_seed: int | None = None

    def __post_init__(self):
        self.mode = SequenceMode(self.mode)
        if self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


@dataclass
class SearchResult:
    max_size: int
    witnesses: list[Family]
    bound: int
    gap: int
    exhausted: bool
    nodes: int


class _Search:
    """Branch and bound over the variables "flat f is in S_k".

    Variables are numbered; ``below[v]`` / ``above[v]`` are bitmasks of the
    variables of the same coordinate strictly below / above ``v``.  Each
    candidate sequence is reduced to the bitmask of its constrained members,
    and sequences sharing a mask are counted together.
    """

    def __init__(self, config: SearchConfig, lattice: Lattice):
        params = config.params
        if (params.n, params.q) != (lattice.n, lattice.q):
            raise ValueError(f"params {params} do not match {lattice!r}")
        self.config = config
        self.lattice = lattice
        self.l = params.l
        self.p = params.p
        self.universe = all_sequences(lattice, params.p, config.mode)
        if len(self.universe) > config.node_budget:
            raise SearchTooLarge(
                f"{len(self.universe)} candidate sequences exceed the node budget {config.node_budget}"
            )
        self.coords = list(range(self.p - 1) if config.mode is SequenceMode.FULL else range(self.p))
        degree: dict[tuple[int, Flat], int] = {}
        for s in self.universe:
            for k in self.coords:
                degree[(k, s.flats[k])] = degree.get((k, s.flats[k]), 0) + 1
        variables = sorted(degree, key=lambda v: (-degree[v], v[0], v[1].sort_key()))
        if config.order_seed is not None:
            random.Random(config.order_seed).shuffle(variables)
        self.variables = variables
        index = {v: i for i, v in enumerate(variables)}
        self.below = [0] * len(variables)
        self.above = [0] * len(variables)
        for i, (k, f) in enumerate(variables):
            for j, (k2, g) in enumerate(variables):
                if k2 == k and g.rank < f.rank and leq(g, f):
                    self.below[i] |= 1 << j
                    self.above[j] |= 1 << i
        weights: dict[int, int] = {}
        for s in self.universe:
            m = 0
            for k in self.coords:
                m |= 1 << index[(k, s.flats[k])]
            weights[m] = weights.get(m, 0) + 1
        self.masks = list(weights.items())
        self._chain_memo: dict[int, int] = {0: 0}
        self.nodes = 0
        self.exhausted = True
        self.best = -1
        self.best_sets: list[int] = []

    def _chain_len(self, mask: int) -> int:
        memo = self._chain_memo
        if mask in memo:
            return memo[mask]
        best = 0
        rest = mask
        while rest:
            low = rest & -rest
            e = low.bit_length() - 1
            rest ^= low
            best = max(best, 1 + self._chain_len(mask & self.below[e]))
        memo[mask] = best
        return best

    def _fits(self, v: int, chosen: int) -> bool:
        b, a = self.below[v] & chosen, self.above[v] & chosen
        if self.l == 1:
            return not (a or b)
        return self._chain_len(b) + 1 + self._chain_len(a) <= self.l

    def _count(self, allowed: int) -> int:
        return sum(w for m, w in self.masks if m & allowed == m)

    def run(self):
        self._branch(0, 0)

    def _branch(self, i: int, chosen: int):
        self.nodes += 1
        if self.nodes > self.config.node_budget:
            self.exhausted = False
            return
        nvars = len(self.variables)
        # variables that no longer fit are excluded for good: chosen only grows
        while i < nvars and not self._fits(i, chosen):
            i += 1
        if i == nvars:
            value = self._count(chosen)
            if value > self.best:
                self.best = value
                self.best_sets = []
            if value == self.best and (self.config.report_all_maxima or not self.best_sets):
                self.best_sets.append(chosen)
            return
        optimistic = chosen
        for v in range(i, nvars):
            if self._fits(v, chosen):
                optimistic |= 1 << v
        upper = self._count(optimistic)
        if upper < self.best or (upper == self.best and not self.config.report_all_maxima):
            return
        self._branch(i + 1, chosen | (1 << i))
        if not self.exhausted:
            return
        self._branch(i + 1, chosen)

    def family(self, chosen: int) -> Family:
        sets = {k: set() for k in self.coords}
        for v, (k, f) in enumerate(self.variables):
            if chosen >> v & 1:
                sets[k].add(f)
        seqs = [s for s in self.universe if all(s.flats[k] in sets[k] for k in self.coords)]
        return Family(self.lattice, self.p, seqs, self.config.mode)


def _families(search: _Search) -> list[Family]:
    unique = {search.family(sets) for sets in search.best_sets}
    return sorted(unique, key=lambda fam: [s.sort_key() for s in fam])


def search_max_family(config: SearchConfig, lattice: Lattice) -> SearchResult:
    """Largest admissible family, by branch and bound.

    ``exhausted`` is False when the node budget ran out; ``max_size`` is
    then only a lower bound.  The theorem's bound is reported alongside but
    never used to prune, so the search checks it independently.
    """
    search = _Search(config, lattice)
    search.run()
    bmode = BoundMode.MAIN if config.mode is SequenceMode.FULL else BoundMode.PARTIAL
    b = bound(config.params, bmode).value
    best = max(search.best, 0)
    return SearchResult(best, _families(search), b, b - best, search.exhausted, search.nodes)


def enumerate_maximum_families(config: SearchConfig, lattice: Lattice) -> list[Family]:
    """Every admissible family of maximum size (as exact sets of sequences)."""
    if not config.report_all_maxima:
        config = SearchConfig(config.params, config.mode, config.node_budget, True, config.order_seed)
    return search_max_family(config, lattice).witnesses


def conjectured_maxima(lattice: Lattice, params: ProblemParams, mode: SequenceMode | str) -> list[Family]:
    """The largest antichain equality families.

    In these every member of coordinate ``k`` has rank ceil or floor of
    ``n/p`` (full) or ``n/(p+1)`` (partial), and the coordinate is a whole
    level.  For full sequences all arrangements of ``balanced_composition``
    give the same size.  For partial ones the rank vector is the first ``p``
    parts of an arrangement of ``balanced_composition(n, p + 1)``, sizes
    differ, and only the largest are kept.
    """
    mode = SequenceMode(mode)
    n, p = lattice.n, params.p
    if mode is SequenceMode.FULL:
        vectors = balanced_rank_vectors(n, p)
    else:
        vectors = sorted({a[:p] for a in balanced_rank_vectors(n, p + 1)})
    fams = {Family(lattice, p, enumerate_sequences(lattice, a, mode), mode) for a in vectors}
    largest = max(len(f) for f in fams)
    return sorted((f for f in fams if len(f) == largest), key=lambda fam: [s.sort_key() for s in fam])


@dataclass
class UniquenessReport:
    verdict: str
    max_size: int
    maxima: list[Family]
    constructed: list[Family]
    exhausted: bool


def check_uniqueness(config: SearchConfig, lattice: Lattice) -> UniquenessReport:
    """Compare all maximum families with the antichain equality constructions.

    Verdicts: CONFIRMED, COUNTEREXAMPLE, INCONCLUSIVE (budget ran out) or
    NOT_APPLICABLE (``l > 1``, where no uniqueness is conjectured).
    """
    cfg = SearchConfig(config.params, config.mode, config.node_budget, True, config.order_seed)
    result = search_max_family(cfg, lattice)
    constructed = conjectured_maxima(lattice, config.params, config.mode)
    if config.params.l != 1:
        verdict = "NOT_APPLICABLE"
    elif not result.exhausted:
        verdict = "INCONCLUSIVE"
    elif set(result.witnesses) == set(constructed):
        verdict = "CONFIRMED"
    else:
        verdict = "COUNTEREXAMPLE"
    return UniquenessReport(verdict, result.max_size, result.witnesses, constructed, result.exhausted)
