"""Exact q-analog arithmetic.

Everything here works for any integer ``q >= 2``; no field structure is
needed.  Counts are plain Python ints and ratios are
:class:`fractions.Fraction`, so nothing ever rounds.

A *rank vector* is a tuple of nonnegative ints ``(a_1, ..., a_p)``.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

RankVector = tuple[int, ...]


def _check_q(q: int) -> None:
    if q < 2:
        raise ValueError(f"q must be an integer >= 2, got {q}")


@lru_cache(maxsize=None)
def q_factorial(n: int, q: int) -> int:
    """Return ``(q^n - 1)(q^(n-1) - 1)...(q - 1)``; the empty product is 1."""
    _check_q(q)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    result = 1
    for i in range(1, n + 1):
        result *= q**i - 1
    return result


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of rank-``k`` flats of a rank-``n`` projective geometry of order ``q``.

    Returns 0 when ``k`` is outside ``[0, n]``.
    """
    _check_q(q)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if k < 0 or k > n:
        return 0
    num = q_factorial(n, q)
    den = q_factorial(k, q) * q_factorial(n - k, q)
    value, rem = divmod(num, den)
    assert rem == 0
    return value


def _as_rank_vector(alpha: Sequence[int]) -> RankVector:
    alpha = tuple(int(a) for a in alpha)
    if not alpha:
        raise ValueError("a rank vector needs at least one part")
    if any(a < 0 for a in alpha):
        raise ValueError(f"rank vector parts must be nonnegative: {alpha}")
    return alpha


def gaussian_multinomial(n: int, alpha: Sequence[int], q: int) -> int:
    """``n!_q / (alpha_1!_q ... alpha_p!_q)`` for a composition ``alpha`` of ``n``."""
    _check_q(q)
    alpha = _as_rank_vector(alpha)
    if sum(alpha) != n:
        raise ValueError(f"parts of {alpha} sum to {sum(alpha)}, expected {n}")
    den = 1
    for a in alpha:
        den *= q_factorial(a, q)
    value, rem = divmod(q_factorial(n, q), den)
    assert rem == 0
    return value


def s2(alpha: Sequence[int]) -> int:
    """Second elementary symmetric function: sum of ``alpha_i * alpha_j`` over ``i < j``."""
    total = 0
    running = 0
    for a in alpha:
        total += running * a
        running += a
    return total


def weighted_count(n: int, alpha: Sequence[int], q: int) -> int:
    """``gaussian_multinomial(n, alpha, q) * q**s2(alpha)``.

    This is the number of Meshalkin sequences with rank vector ``alpha``.
    """
    return gaussian_multinomial(n, alpha, q) * q ** s2(alpha)


def partial_count(n: int, alpha: Sequence[int], q: int) -> int:
    """Number of partial Meshalkin sequences with rank vector ``alpha`` in rank ``n``.

    Choose the join (a flat of rank ``m = sum(alpha)``), then a full sequence
    inside it.
    """
    alpha = _as_rank_vector(alpha)
    m = sum(alpha)
    if m > n:
        return 0
    return gaussian_binomial(n, m, q) * weighted_count(m, alpha, q)


def _compositions(n: int, p: int) -> Iterator[RankVector]:
    if p == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, p - 1):
            yield (first,) + rest


def enumerate_compositions(n: int, p: int) -> list[RankVector]:
    """All weak compositions of ``n`` into ``p`` parts, in lexicographic order.

    There are ``comb(n + p - 1, p - 1)`` of them.
    """
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return list(_compositions(n, p))


def composition_count(n: int, p: int) -> int:
    return comb(n + p - 1, p - 1)


def balanced_composition(n: int, p: int) -> RankVector:
    """The composition of ``n`` into ``p`` parts that are as equal as possible.

    ``n mod p`` parts equal ``ceil(n/p)`` and come first; the rest equal
    ``floor(n/p)``.
    """
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    base, extra = divmod(n, p)
    return (base + 1,) * extra + (base,) * (p - extra)


def balanced_rank_vectors(n: int, p: int) -> list[RankVector]:
    """Every distinct arrangement of :func:`balanced_composition`, lexicographic."""
    target = sorted(balanced_composition(n, p))
    return [a for a in enumerate_compositions(n, p) if sorted(a) == target]
