"""Solution counting for linear Diophantine equations over sequence prefixes.

Two-term counts cover a*n_k + b*n_l = c over ordered pairs (k, l); profiles
hash every realized value to expose where the count is bounded uniformly in c
(condition D2 / D2*) and where it grows with the prefix length.  Multi-term
counts (condition R / R* / R**) use meet-in-the-middle enumeration with an
explicit work budget: exceeding it is an error, never a truncation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Iterable

from .errors import WorkBudgetExceeded
from .seqgen import IntegerSequence

DEFAULT_BUDGET = 10**8


# ----------------------------------------------------------------------
# Queries and reports
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TwoTermQuery:
    a: int
    b: int
    c: int
    count: int
    require_distinct: bool = False

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise ValueError("coefficients a, b must be nonzero")
        if self.count < 1:
            raise ValueError("prefix length must be at least 1")


@dataclass
class DioReport:
    """Per-(a, b) profile of ordered-pair solution counts over realized c."""

    a: int
    b: int
    max_count: int
    argmax_c: int | None
    histogram: dict[int, int]
    witnesses: list[tuple[int, int]]
    prefix_growth: list[tuple[int, int]]  # (prefix length, max count)

    def __post_init__(self):
        if self.histogram:
            if self.max_count != max(self.histogram.values()):
                raise ValueError("max_count inconsistent with histogram")

    def to_json_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "max_count": self.max_count,
            "argmax_c": None if self.argmax_c is None else str(self.argmax_c),
            "histogram": {str(c): n for c, n in sorted(self.histogram.items())},
            "witnesses": [[k, l] for k, l in self.witnesses],
            "prefix_growth": [[n, m] for n, m in self.prefix_growth],
        }

    def csv_row(self) -> list:
        growth = {n: m for n, m in self.prefix_growth}
        prefixes = sorted(growth)
        return [
            self.a,
            self.b,
            self.max_count,
            "" if self.argmax_c is None else str(self.argmax_c),
            *[growth[p] for p in prefixes],
        ]


@dataclass(frozen=True)
class MultiTermQuery:
    p: int
    coeff_bound: int
    count: int
    signed_only: bool = False
    nondegenerate_only: bool = False
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("need at least 2 terms")
        if self.coeff_bound < 1:
            raise ValueError("coefficient bound must be at least 1")
        if self.count < 1:
            raise ValueError("prefix length must be at least 1")


# ----------------------------------------------------------------------
# Two-term counting
# ----------------------------------------------------------------------

def count_two_term(seq: IntegerSequence, query: TwoTermQuery) -> tuple[int, list[tuple[int, int]]]:
    """Exact count of ordered pairs (k, l) in [1, N]^2 with a*n_k + b*n_l = c.

    Terms are strictly increasing, so for each k there is at most one l;
    the scan is O(N) after building a value -> index map.
    """
    n = query.count
    if n > len(seq):
        raise ValueError(f"prefix {n} exceeds sequence length {len(seq)}")
    terms = seq.prefix(n)
    index_of = {v: i + 1 for i, v in enumerate(terms)}
    witnesses = []
    for k in range(1, n + 1):
        rest = query.c - query.a * terms[k - 1]
        if rest % query.b:
            continue
        target = rest // query.b
        l = index_of.get(target)
        if l is None:
            continue
        if query.require_distinct and l == k:
            continue
        witnesses.append((k, l))
    return len(witnesses), witnesses


def _coefficient_pairs(bound: int) -> list[tuple[int, int]]:
    rng = [v for v in range(-bound, bound + 1) if v != 0]
    return [(a, b) for a in rng for b in rng]


def _pair_histogram(
    terms: list[int],
    a: int,
    b: int,
    *,
    include_zero: bool,
    exclude_diagonal_at_zero: bool,
) -> dict[int, int]:
    """Counts of a*n_k + b*n_l over ordered pairs, keyed by the value c."""
    hist: dict[int, int] = {}
    left = [a * t for t in terms]
    right = [b * t for t in terms]
    n = len(terms)
    for k in range(n):
        lk = left[k]
        for l in range(n):
            c = lk + right[l]
            if c == 0:
                if not include_zero:
                    continue
                if exclude_diagonal_at_zero and k == l:
                    continue
            hist[c] = hist.get(c, 0) + 1
    return hist


def _argmax_c(hist: dict[int, int]) -> tuple[int, int | None]:
    if not hist:
        return 0, None
    best = max(hist.items(), key=lambda item: (item[1], -abs(item[0]), item[0]))
    return best[1], best[0]


def _profile(
    seq: IntegerSequence,
    coeff_bound: int,
    count: int,
    *,
    include_zero: bool,
    diagonal: str,
) -> dict[tuple[int, int], DioReport]:
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be at least 1")
    if count > len(seq):
        raise ValueError(f"prefix {count} exceeds sequence length {len(seq)}")
    terms = seq.prefix(count)
    prefixes = sorted({max(1, count // 4), max(1, count // 2), count})
    reports: dict[tuple[int, int], DioReport] = {}
    for a, b in _coefficient_pairs(coeff_bound):
        if diagonal == "sum_zero":
            drop_diag = a + b == 0
        elif diagonal == "literal":
            drop_diag = a == b
        else:
            raise ValueError("diagonal must be 'sum_zero' or 'literal'")
        hist = _pair_histogram(
            terms, a, b, include_zero=include_zero,
            exclude_diagonal_at_zero=include_zero and drop_diag,
        )
        max_count, arg = _argmax_c(hist)
        growth = []
        for pfx in prefixes:
            if pfx == count:
                growth.append((pfx, max_count))
            else:
                sub = _pair_histogram(
                    terms[:pfx], a, b, include_zero=include_zero,
                    exclude_diagonal_at_zero=include_zero and drop_diag,
                )
                growth.append((pfx, _argmax_c(sub)[0]))
        witnesses = []
        if arg is not None:
            q = TwoTermQuery(a=a, b=b, c=arg, count=count,
                             require_distinct=include_zero and drop_diag and arg == 0)
            _, witnesses = count_two_term(seq, q)
        reports[(a, b)] = DioReport(
            a=a, b=b, max_count=max_count, argmax_c=arg,
            histogram=hist, witnesses=witnesses, prefix_growth=growth,
        )
    return reports


def d2_profile(seq: IntegerSequence, coeff_bound: int, count: int) -> dict[tuple[int, int], DioReport]:
    """Solution-count histogram over realized nonzero c, for all 0 < |a|,|b| <= bound."""
    return _profile(seq, coeff_bound, count, include_zero=False, diagonal="sum_zero")


def d2star_profile(
    seq: IntegerSequence,
    coeff_bound: int,
    count: int,
    diagonal: str = "sum_zero",
) -> dict[tuple[int, int], DioReport]:
    """As d2_profile but c = 0 included, minus the trivial diagonal solutions.

    ``diagonal="sum_zero"`` removes k = l pairs exactly when a + b = 0 (the
    coefficient pairs for which k = l solves the equation trivially);
    ``diagonal="literal"`` applies the proviso only at a = b, the literal
    reading, under which the a + b = 0 rows count all N diagonal pairs.
    """
    return _profile(seq, coeff_bound, count, include_zero=True, diagonal=diagonal)


def aibe_ratio(seq: IntegerSequence, a: int, b: int, count: int) -> list[tuple[int, float]]:
    """(sup over c != 0 of the solution count) / N at N/4, N/2, N.

    A vanishing ratio is the two-term o(N) criterion for the unpermuted CLT;
    a non-decaying ratio pins the obstruction.
    """
    if a == 0 or b == 0:
        raise ValueError("coefficients must be nonzero")
    if count > len(seq):
        raise ValueError(f"prefix {count} exceeds sequence length {len(seq)}")
    terms = seq.prefix(count)
    out = []
    for pfx in sorted({max(1, count // 4), max(1, count // 2), count}):
        hist = _pair_histogram(terms[:pfx], a, b, include_zero=False,
                               exclude_diagonal_at_zero=False)
        out.append((pfx, _argmax_c(hist)[0] / pfx))
    return out


# ----------------------------------------------------------------------
# Multi-term counting (meet in the middle)
# ----------------------------------------------------------------------

def _coeff_values(bound: int, signed_only: bool) -> list[int]:
    if signed_only:
        return [-1, 1]
    return [v for v in range(-bound, bound + 1) if v != 0]


def _estimate_entries(n: int, p: int, n_coeffs: int) -> int:
    h = (p + 1) // 2
    return comb(n, h) * n_coeffs**h + comb(n, p - h) * n_coeffs**(p - h)


def _half_sums(terms: list[int], size: int, coeffs: list[int]) -> Iterable[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(sum, indices, coeffs) over all increasing index tuples of given size."""
    n = len(terms)
    for idx in combinations(range(n), size):
        values = [terms[i] for i in idx]
        for cs in product(coeffs, repeat=size):
            yield sum(c * v for c, v in zip(values, cs)), idx, cs


def count_multi_term(
    seq: IntegerSequence,
    query: MultiTermQuery,
    witness_cap: int = 100,
) -> tuple[int, list[tuple[tuple[int, ...], tuple[int, ...]]]]:
    """Exact number of solutions of sum_i a_i n_{k_i} = 0, k_1 < ... < k_p <= N.

    Coefficients range over 0 < |a_i| <= coeff_bound (or {-1, +1} when
    signed_only).  The left half's partial sums are hashed keyed by sum and
    last index; the right half probes with its negated sums, respecting the
    k_h < k_{h+1} interleave.  Witnesses are (1-based indices, coefficients),
    at most ``witness_cap`` of them; the count itself is always exact.

    ``nondegenerate_only`` filters solutions with a vanishing proper subsum,
    which forces full enumeration instead of hashed counting (same budget).
    """
    n = query.count
    if n > len(seq):
        raise ValueError(f"prefix {n} exceeds sequence length {len(seq)}")
    if query.p > n:
        return 0, []
    coeffs = _coeff_values(query.coeff_bound, query.signed_only)
    if query.nondegenerate_only:
        return _count_multi_enumerated(seq, query, coeffs, witness_cap)
    estimated = _estimate_entries(n, query.p, len(coeffs))
    if estimated > query.budget:
        raise WorkBudgetExceeded(estimated, query.budget)

    terms = seq.prefix(n)
    h = (query.p + 1) // 2
    # sum -> last-index -> (count, sample witnesses)
    table: dict[int, dict[int, list]] = {}
    for s, idx, cs in _half_sums(terms, h, coeffs):
        slot = table.setdefault(s, {})
        entry = slot.get(idx[-1])
        if entry is None:
            slot[idx[-1]] = [1, [(idx, cs)]]
        else:
            entry[0] += 1
            if len(entry[1]) < witness_cap:
                entry[1].append((idx, cs))

    total = 0
    witnesses: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    rsize = query.p - h  # >= 1 since p >= 2
    for s, idx, cs in _half_sums(terms, rsize, coeffs):
        slot = table.get(-s)
        if not slot:
            continue
        first = idx[0]
        for last, (cnt, wits) in slot.items():
            if last < first:
                total += cnt
                if len(witnesses) < witness_cap:
                    for lidx, lcs in wits:
                        if len(witnesses) >= witness_cap:
                            break
                        witnesses.append(
                            (tuple(i + 1 for i in lidx + idx), lcs + cs)
                        )
    return total, witnesses


def _count_multi_enumerated(seq, query, coeffs, witness_cap):
    n = query.count
    estimated = comb(n, query.p) * len(coeffs) ** query.p
    if estimated > query.budget:
        raise WorkBudgetExceeded(estimated, query.budget)
    terms = seq.prefix(n)
    total = 0
    witnesses = []
    vectors = list(product(coeffs, repeat=query.p))
    for idx in combinations(range(n), query.p):
        vals = [terms[i] for i in idx]
        for cs in vectors:
            contributions = [c * v for c, v in zip(cs, vals)]
            if sum(contributions) != 0:
                continue
            if _proper_subsum_zero(contributions):
                continue
            total += 1
            if len(witnesses) < witness_cap:
                witnesses.append((tuple(i + 1 for i in idx), cs))
    return total, witnesses


def _proper_subsum_zero(values: list[int]) -> bool:
    """True if some proper nonempty subset of the signed terms sums to 0."""
    p = len(values)
    for mask in range(1, (1 << p) - 1):
        s = 0
        m, i = mask, 0
        while m:
            if m & 1:
                s += values[i]
            m >>= 1
            i += 1
        if s == 0:
            return True
    return False


def count_signed_nondegenerate(
    seq: IntegerSequence,
    p: int,
    count: int,
    budget: int = DEFAULT_BUDGET,
) -> tuple[int, list[tuple[tuple[int, ...], tuple[int, ...]]]]:
    """Nondegenerate solutions of +-n_{k_1} +- ... +- n_{k_p} = 0, k_1 < ... < k_p.

    A solution is degenerate when a proper nonempty subsum vanishes (checked
    over all 2^p subsets).  Sign patterns related by a global flip are
    counted once, via the canonical form s_1 = +1.
    """
    if count > len(seq):
        raise ValueError(f"prefix {count} exceeds sequence length {len(seq)}")
    if p < 2:
        raise ValueError("need at least 2 terms")
    if p > count:
        return 0, []
    estimated = comb(count, p) * 2 ** (p - 1)
    if estimated > budget:
        raise WorkBudgetExceeded(estimated, budget)
    terms = seq.prefix(count)
    solutions = []
    for idx in combinations(range(count), p):
        values = [terms[i] for i in idx]
        for signs in product((1, -1), repeat=p - 1):
            full = (1,) + signs
            contributions = [s * v for s, v in zip(full, values)]
            if sum(contributions) != 0:
                continue
            if _proper_subsum_zero(contributions):
                continue
            solutions.append((tuple(i + 1 for i in idx), full))
    return len(solutions), solutions


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------

def profile_to_json(reports: dict[tuple[int, int], DioReport]) -> str:
    payload = [reports[key].to_json_dict() for key in sorted(reports)]
    return json.dumps(payload, indent=2)


def write_profile_csv(reports: dict[tuple[int, int], DioReport], path) -> None:
    """Summary rows: a,b,max_count,argmax_c,count_N4,count_N2,count_N."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "max_count", "argmax_c",
                         "count_N4", "count_N2", "count_N"])
        for key in sorted(reports):
            writer.writerow(reports[key].csv_row())
