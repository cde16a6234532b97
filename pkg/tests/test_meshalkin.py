import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qmeshalkin.meshalkin import (
    BoundMode,
    Family,
    LymMode,
    MeshalkinSequence,
    NotMeshalkinError,
    ProblemParams,
    SequenceMode,
    bound,
    chain_stats,
    check_chain_condition,
    enumerate_sequences,
    hkr_apply,
    is_meshalkin,
    lym_denominator,
    lym_limit,
    lym_sum,
    rank_vectors,
    rota_harper_lift,
    rota_harper_sum,
)
from qmeshalkin.projgeom import Lattice, join, leq, meet
from qmeshalkin.qnum import gaussian_binomial, partial_count, weighted_count
from qmeshalkin.sampling import random_antichain, random_family

FULL, PARTIAL = SequenceMode.FULL, SequenceMode.PARTIAL


def six(line):
    return Family(line, 2, enumerate_sequences(line, (1, 1)))


def test_is_meshalkin_examples(line):
    z = line.bottom
    assert is_meshalkin([z, z, z], PARTIAL, line) == (True, None)
    P, Q, _ = line.level(1)
    assert is_meshalkin([P, Q], FULL, line)[0]
    ok, reason = is_meshalkin([P, P], FULL, line)
    assert not ok and "additivity" in reason
    ok, reason = is_meshalkin([P, z], FULL, line)
    assert not ok and "whole geometry" in reason
    assert is_meshalkin([P, z], PARTIAL, line)[0]


def test_from_flats(line):
    P, Q, _ = line.level(1)
    s = MeshalkinSequence.from_flats([P, Q])
    assert s.rank_vector == (1, 1) and s.is_full
    with pytest.raises(NotMeshalkinError):
        MeshalkinSequence.from_flats([P, P])


def test_enumerate_examples(line, fano):
    assert len(enumerate_sequences(line, (1, 1))) == 6
    assert len(enumerate_sequences(fano, (1, 2))) == 28
    assert len(enumerate_sequences(line, (1,), PARTIAL)) == 3
    with pytest.raises(ValueError):
        enumerate_sequences(line, (1, 0))
    with pytest.raises(ValueError):
        enumerate_sequences(line, (2, 1), PARTIAL)


@pytest.mark.parametrize(
    "n,q,p", [(2, 2, 2), (3, 2, 2), (3, 2, 3), (2, 3, 2), (4, 2, 2), (2, 2, 3), (3, 3, 2)]
)
def test_counts_match_formulas(n, q, p):
    lat = Lattice(n, q)
    for alpha in rank_vectors(n, p, FULL):
        seqs = enumerate_sequences(lat, alpha)
        assert len(seqs) == len(set(seqs)) == weighted_count(n, alpha, q)
        assert all(is_meshalkin(s.flats, FULL, lat)[0] for s in seqs)
    for alpha in rank_vectors(n, p, PARTIAL):
        assert len(enumerate_sequences(lat, alpha, PARTIAL)) == partial_count(n, alpha, q)


@pytest.mark.parametrize("n,q,p", [(2, 2, 2), (3, 2, 2), (2, 3, 2), (3, 2, 3)])
def test_counts_match_brute_force(n, q, p):
    lat = Lattice(n, q)
    for alpha in rank_vectors(n, p, PARTIAL):
        full = sum(alpha) == n
        brute = oracles.count_meshalkin(n, q, alpha, full=False)
        assert len(enumerate_sequences(lat, alpha, PARTIAL)) == brute
        if full:
            assert len(enumerate_sequences(lat, alpha, FULL)) == brute


def test_members_are_pairwise_disjoint(pg32):
    # rank additivity forces every pair of members to meet in the bottom
    rng = random.Random(1)
    seqs = enumerate_sequences(pg32, (1, 1, 2))
    for s in rng.sample(seqs, 200):
        for i in range(3):
            for j in range(i + 1, 3):
                assert meet(s.flats[i], s.flats[j]) == pg32.bottom
        assert join(join(s.flats[0], s.flats[1]), s.flats[2]) == pg32.top


def test_chain_stats_examples(fano):
    assert chain_stats([]) == 0
    assert chain_stats(fano.level(1)) == 1
    P = fano.level(1)[0]
    L = next(x for x in fano.level(2) if leq(P, x))
    assert chain_stats({P, L}) == 2
    assert chain_stats(fano.flats()) == 4


def test_chain_condition_examples(line):
    fam = six(line)
    assert check_chain_condition(fam, ProblemParams(2, 2, 1, 2))
    assert check_chain_condition(fam, ProblemParams(2, 2, 1, 2), PARTIAL)
    P, Q, _ = line.level(1)
    bad = Family(line, 2, [MeshalkinSequence.from_flats([line.bottom, line.top]), MeshalkinSequence.from_flats([P, Q])])
    res = check_chain_condition(bad, ProblemParams(2, 2, 1, 2))
    assert not res and res.coordinate == 0 and res.chain == [line.bottom, P]
    assert check_chain_condition(bad, ProblemParams(2, 2, 2, 2))


def test_lym_examples(line):
    assert lym_sum(Family(line, 2)) == 0
    assert lym_sum(six(line), LymMode.MAIN) == 1
    assert lym_sum(six(line), LymMode.WEAK) == 2
    with pytest.raises(ValueError):
        lym_sum(Family(line, 1, enumerate_sequences(line, (1,), PARTIAL), PARTIAL), LymMode.MAIN)


def test_bound_examples():
    b = bound(ProblemParams(2, 2, 1, 2), BoundMode.MAIN)
    assert (b.value, b.alphas) == (6, [(1, 1)])
    assert bound(ProblemParams(3, 1, 2, 2), BoundMode.ROTA_HARPER).value == 14
    b = bound(ProblemParams(3, 2, 1, 2), BoundMode.MAIN)
    assert b.value == 28 and b.alphas == [(1, 2)]
    assert bound(ProblemParams(2, 1, 1, 2), BoundMode.PARTIAL).value == 6
    assert bound(ProblemParams(2, 2, 1, 2), BoundMode.WEAK).value == 2


def test_bound_caps_at_candidate_count():
    b = bound(ProblemParams(2, 2, 5, 2), BoundMode.MAIN)
    assert b.summands == b.candidates == 3 and b.value == 8


def test_hkr_examples():
    r = hkr_apply([6, 1, 1], [1, Fraction(1, 2), Fraction(1, 2)], 2)
    assert r.value == r.bound == 7 and r.equality
    c = r.certificate
    assert (c.p_prime, c.p_double_prime, c.middle_sum) == (1, 3, 1)
    r = hkr_apply([5, 3], [0, 1], 1)
    assert r.value == 3 and r.bound == 5 and r.holds and not r.equality
    assert hkr_apply([4, 2, 1], [0, 0, 0], 2).value == 0


@pytest.mark.parametrize(
    "m,qs,P",
    [([1, 2], [0, 0], 1), ([-1], [0], 1), ([1], [2], 1), ([1, 1], [1, 1], 1), ([1], [1, 0], 1), ([1], [1], 2)],
)
def test_hkr_rejects_bad_input(m, qs, P):
    with pytest.raises(ValueError):
        hkr_apply(m, qs, P)


@st.composite
def hkr_instances(draw):
    N = draw(st.integers(1, 6))
    m = sorted(draw(st.lists(st.fractions(0, 5, max_denominator=3), min_size=N, max_size=N)), reverse=True)
    P = draw(st.integers(1, N))
    qs = draw(st.lists(st.sampled_from([Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3)]), min_size=N, max_size=N))
    while sum(qs) > P:
        qs[qs.index(max(qs))] = 0
    return m, qs, P


@given(hkr_instances())
def test_hkr_agrees_with_direct_evaluation(inst):
    m, qs, P = inst
    r = hkr_apply(m, qs, P)
    value = sum(a * b for a, b in zip(qs, m))
    assert r.holds and value <= sum(m[:P])
    assert r.equality == (value == sum(m[:P]))


def test_lift_examples(line, fano):
    fam = rota_harper_lift({line.bottom}, line)
    assert len(fam) == 1 and next(iter(fam)).flats == (line.bottom, line.top)
    assert lym_sum(fam) == 1
    fam = rota_harper_lift(line.level(1), line)
    assert len(fam) == 6 and lym_sum(fam) == 1
    fam = rota_harper_lift(fano.level(1), fano)
    assert len(fam) == 28 and lym_sum(fam) == 1


@pytest.mark.parametrize("seed", range(5))
def test_lift_identity(seed, pg32):
    anti = random_antichain(pg32, random.Random(seed))
    assert lym_sum(rota_harper_lift(anti, pg32)) == rota_harper_sum(anti, 4, 2)


@given(st.integers(0, 6), st.integers(0, 6), st.sampled_from([2, 3, 4, 5]))
def test_one_part_partial_denominator(n, r, q):
    if r <= n:
        assert lym_denominator(n, (r,), q, LymMode.PARTIAL) == gaussian_binomial(n, r, q)


@pytest.mark.parametrize("n,p,l", [(2, 2, 1), (3, 2, 1), (3, 2, 2), (3, 3, 1), (3, 3, 2)])
def test_random_families_obey_bounds(n, p, l):
    lat = Lattice(n, 2)
    params = ProblemParams(n, p, l, 2)
    rng = random.Random(n * 100 + p * 10 + l)
    main_size = bound(params, BoundMode.MAIN).value
    for _ in range(30):
        fam = random_family(lat, params, FULL, rng)
        assert check_chain_condition(fam, params)
        assert lym_sum(fam, LymMode.MAIN) <= lym_limit(params, LymMode.MAIN)
        assert lym_sum(fam, LymMode.WEAK) <= lym_limit(params, LymMode.WEAK)
        assert len(fam) <= main_size
        part = random_family(lat, params, PARTIAL, rng)
        assert check_chain_condition(part, params, PARTIAL)
        assert lym_sum(part, LymMode.PARTIAL) <= l**p
        assert len(part) <= bound(params, BoundMode.PARTIAL).value


@pytest.mark.parametrize("kw", [dict(n=-1), dict(p=0), dict(l=0), dict(q=1)])
def test_problem_params_validation(kw):
    base = dict(n=2, p=2, l=1, q=2)
    base.update(kw)
    with pytest.raises(ValueError):
        ProblemParams(**base)


def test_family_rejects_mixed_input(line):
    P, Q, _ = line.level(1)
    with pytest.raises(NotMeshalkinError):
        Family(line, 2, [MeshalkinSequence.from_flats([P, line.bottom])], FULL)
    with pytest.raises(ValueError):
        Family(line, 3, [MeshalkinSequence.from_flats([P, Q])])
    fam = Family(line, 2, enumerate_sequences(line, (1, 1)) * 2)
    assert len(fam) == 6
