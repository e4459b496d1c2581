import math
from fractions import Fraction

import pytest

from lacunaria.errors import IntervalEmpty
from lacunaria.seqgen import (
    External,
    IntegerSequence,
    Power,
    RStarParams,
    gap_profile,
    gen_geometric,
    gen_power,
    gen_random_rstar,
    gen_smooth,
    read_sequence,
    rstar_interval,
    write_sequence,
)


# ---------------- gen_geometric ----------------

def test_geometric_doubling():
    assert gen_geometric(2, 1, 5).prefix(5) == [1, 2, 4, 8, 16]


def test_geometric_three_halves_hand_iteration():
    # ceil(3/2 * 2) = 3, ceil(4.5) = 5, ceil(7.5) = 8
    assert gen_geometric(Fraction(3, 2), 2, 4).prefix(4) == [2, 3, 5, 8]


def test_geometric_single_term():
    assert gen_geometric(2, 1, 1).prefix(1) == [1]


def test_geometric_ratio_invariant():
    for q in (Fraction(3, 2), Fraction(7, 5), 2, Fraction(21, 20)):
        seq = gen_geometric(q, 3, 40)
        for r in gap_profile(seq).per_k_ratios:
            assert r >= q


def test_geometric_rejects_bad_q():
    with pytest.raises(ValueError):
        gen_geometric(1, 1, 3)
    with pytest.raises(ValueError):
        gen_geometric(Fraction(1, 2), 1, 3)
    with pytest.raises(ValueError):
        gen_geometric(1.5, 1, 3)  # floats are not exact rationals


# ---------------- gen_power ----------------

def test_power_examples():
    assert gen_power(2, 0, 4).prefix(4) == [2, 4, 8, 16]
    assert gen_power(2, -1, 4).prefix(4) == [1, 3, 7, 15]


def test_power_bit_length():
    seq = gen_power(2, 0, 256)
    assert seq.term(256).bit_length() == 257


def test_power_is_lazy_for_huge_counts():
    seq = gen_power(2, 0, 1 << 20)
    assert len(seq) == 1 << 20
    assert seq.term(20) == 1 << 20
    assert seq.max_term == 1 << (1 << 20)


def test_power_rejects_bad_args():
    with pytest.raises(ValueError):
        gen_power(1, 0, 3)
    with pytest.raises(ValueError):
        gen_power(2, -2, 3)


# ---------------- gen_smooth ----------------

def brute_smooth(primes, limit):
    """All products p1^k1*...*pr^kr <= limit, by exhaustive exponent search."""
    found = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for v in frontier:
            for p in primes:
                w = v * p
                if w <= limit and w not in found:
                    found.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(found)


def test_smooth_powers_of_two():
    assert gen_smooth({2}, 5).prefix(5) == [1, 2, 4, 8, 16]


def test_smooth_2_3():
    assert gen_smooth({2, 3}, 7).prefix(7) == [1, 2, 3, 4, 6, 8, 9]


def test_smooth_2_3_5():
    assert gen_smooth({2, 3, 5}, 4).prefix(4) == [1, 2, 3, 4]


def test_smooth_against_brute_force():
    for primes in ({2, 3}, {2, 5}, {3, 5, 7}, {2, 3, 5}, {4, 9, 5}):
        seq = gen_smooth(primes, 60)
        expected = brute_smooth(sorted(primes), seq.term(60))
        assert seq.prefix(60) == expected[:60]


def test_smooth_exclude_one():
    seq = gen_smooth({2, 3}, 6, include_one=False)
    assert seq.prefix(6) == [2, 3, 4, 6, 8, 9]


def test_smooth_rejects_bad_input():
    with pytest.raises(ValueError):
        gen_smooth(set(), 5)
    with pytest.raises(ValueError):
        gen_smooth({2, 4}, 5)  # not coprime
    with pytest.raises(ValueError):
        gen_smooth({1, 3}, 5)


# ---------------- gen_random_rstar ----------------

def test_rstar_single_term_boundary():
    seq = gen_random_rstar(RStarParams(alpha=1.0, a=10, count=1, seed=99))
    assert 1 <= seq.term(1) <= 10


def test_rstar_invariants():
    params = RStarParams(alpha=1.0, a=50, count=30, seed=7)
    seq = gen_random_rstar(params)
    prev = 0
    for k in range(1, 31):
        nk = seq.term(k)
        assert nk > prev
        prev = nk
        if k >= 2:
            _, hi = rstar_interval(k, params)
            assert nk <= hi  # hi = ceil(a * k**omega_k) - 1 < a * k**omega_k


def test_rstar_determinism():
    params = RStarParams(alpha=1.0, a=50, count=30, seed=11)
    assert gen_random_rstar(params).prefix(30) == gen_random_rstar(params).prefix(30)


def test_rstar_seed_sensitivity():
    p1 = RStarParams(alpha=1.0, a=50, count=30, seed=1)
    p2 = RStarParams(alpha=1.0, a=50, count=30, seed=2)
    assert gen_random_rstar(p1).prefix(30) != gen_random_rstar(p2).prefix(30)


def test_rstar_interval_forms_differ():
    # "current" puts the left endpoint at a*(k-1)**omega_k (larger for k >= 3)
    p_trailing = RStarParams(alpha=1.0, a=50, count=5, seed=3, interval_form="trailing")
    p_current = RStarParams(alpha=1.0, a=50, count=5, seed=3, interval_form="current")
    lo_t, hi_t = rstar_interval(4, p_trailing)
    lo_c, hi_c = rstar_interval(4, p_current)
    assert hi_t == hi_c
    assert lo_c > lo_t


def test_rstar_small_scale_fails():
    # alpha=3, a=2 leaves I_2 = {2}; seed 4 draws n_1 = 2, so the strict-
    # increase adjustment pushes n_2 past the right endpoint
    with pytest.raises(IntervalEmpty):
        gen_random_rstar(RStarParams(alpha=3.0, a=2, count=50, seed=4))


# ---------------- gap_profile ----------------

def test_gap_profile_values():
    assert gap_profile(gen_power(2, 0, 4)).min_ratio == 2
    assert gap_profile(gen_power(2, -1, 4)).min_ratio == Fraction(15, 7)
    assert gap_profile(gen_geometric(Fraction(3, 2), 2, 4)).min_ratio == Fraction(3, 2)


def test_gap_profile_needs_two_terms():
    with pytest.raises(ValueError):
        gap_profile(gen_power(2, 0, 1))


def test_gap_profile_erdos_fit_recovers_exponent():
    # ratios ~ 1 + 0.01 * k^{-1/2}; large terms keep ceiling distortion small
    terms = [10**9]
    for k in range(1, 40):
        terms.append(math.ceil(terms[-1] * (1 + 0.01 * k**-0.5)))
    seq = IntegerSequence(terms, External("synthetic"))
    fit = gap_profile(seq).erdos_exponent_fit
    assert fit is not None
    assert 0.4 < fit < 0.6


# ---------------- sequence files ----------------

def test_sequence_file_roundtrip(tmp_path):
    seq = gen_power(2, -1, 12)
    path = tmp_path / "seq.txt"
    write_sequence(seq, path)
    back = read_sequence(path)
    assert back.prefix(12) == seq.prefix(12)
    assert isinstance(back.provenance, Power)
    assert back.provenance.offset == -1


def test_sequence_file_headerless(tmp_path):
    path = tmp_path / "plain.txt"
    path.write_text("3\n5\n9\n")
    back = read_sequence(path)
    assert back.prefix(3) == [3, 5, 9]
    assert isinstance(back.provenance, External)


def test_sequence_validation():
    with pytest.raises(ValueError):
        IntegerSequence([3, 3, 5], External("x"))
    with pytest.raises(ValueError):
        IntegerSequence([0, 1], External("x"))
    with pytest.raises(ValueError):
        IntegerSequence([], External("x"))
