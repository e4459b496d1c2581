"""Generation and validation of the strictly increasing integer sequences.

All generators return an :class:`IntegerSequence` carrying provenance.  Terms
are arbitrary-precision; indexing in the mathematical sense is 1-based
(``seq.term(k)`` = n_k), storage is an ordinary 0-based Python sequence.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence, Union

from .errors import IntervalEmpty
from .rng import CounterRng

FILE_HEADER = "# lacunaria-seq v1"

# Endpoints of the random-construction intervals are transcendental; they are
# evaluated once at this fixed decimal precision so that generation is
# reproducible across platforms (no dependence on the host libm).
_ENDPOINT_PRECISION = 50


# ----------------------------------------------------------------------
# Provenance variants
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Geometric:
    q: Fraction
    n1: int

    def to_dict(self) -> dict:
        return {"kind": "geometric", "q": str(self.q), "n1": self.n1}


@dataclass(frozen=True)
class Power:
    base: int
    offset: int

    def to_dict(self) -> dict:
        return {"kind": "power", "base": self.base, "offset": self.offset}


@dataclass(frozen=True)
class Smooth:
    primes: tuple[int, ...]
    include_one: bool = True

    def to_dict(self) -> dict:
        return {
            "kind": "smooth",
            "primes": list(self.primes),
            "include_one": self.include_one,
        }


@dataclass(frozen=True)
class RandomRStar:
    alpha: float
    a: int
    seed: int
    interval_form: str = "trailing"

    def to_dict(self) -> dict:
        return {
            "kind": "random_rstar",
            "alpha": self.alpha,
            "a": self.a,
            "seed": self.seed,
            "interval_form": self.interval_form,
        }


@dataclass(frozen=True)
class External:
    path: str

    def to_dict(self) -> dict:
        return {"kind": "external", "path": self.path}


Provenance = Union[Geometric, Power, Smooth, RandomRStar, External]


def provenance_from_dict(data: dict) -> Provenance:
    kind = data.get("kind")
    if kind == "geometric":
        return Geometric(q=Fraction(data["q"]), n1=int(data["n1"]))
    if kind == "power":
        return Power(base=int(data["base"]), offset=int(data["offset"]))
    if kind == "smooth":
        return Smooth(
            primes=tuple(int(p) for p in data["primes"]),
            include_one=bool(data.get("include_one", True)),
        )
    if kind == "random_rstar":
        return RandomRStar(
            alpha=float(data["alpha"]),
            a=int(data["a"]),
            seed=int(data["seed"]),
            interval_form=data.get("interval_form", "trailing"),
        )
    if kind == "external":
        return External(path=data.get("path", ""))
    raise ValueError(f"unknown provenance kind {kind!r}")


# ----------------------------------------------------------------------
# Core types
# ----------------------------------------------------------------------

class _PowerTerms(Sequence):
    """Lazy view of base**k + offset, k = 1..n.

    Materializing 2**k up to k ~ 10**6 would need tens of gigabytes; terms
    are computed on demand instead.  Monotonicity holds analytically for
    base >= 2, so no elementwise validation is run.
    """

    __slots__ = ("_base", "_offset", "_n")

    def __init__(self, base: int, offset: int, n: int):
        self._base = base
        self._offset = offset
        self._n = n

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self._n))]
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError(i)
        return self._base ** (i + 1) + self._offset

    def __repr__(self) -> str:
        return f"_PowerTerms(base={self._base}, offset={self._offset}, n={self._n})"


@dataclass
class IntegerSequence:
    """Strictly increasing positive integers with provenance metadata."""

    terms: Sequence
    provenance: Provenance
    validate: bool = True

    def __post_init__(self):
        if not len(self.terms):
            raise ValueError("sequence must contain at least one term")
        if self.validate and not isinstance(self.terms, _PowerTerms):
            prev = 0
            for t in self.terms:
                if t < 1:
                    raise ValueError(f"term {t} < 1")
                if t <= prev:
                    raise ValueError(f"terms not strictly increasing at {t}")
                prev = t

    def __len__(self) -> int:
        return len(self.terms)

    def term(self, k: int) -> int:
        """n_k, 1-based."""
        if not 1 <= k <= len(self.terms):
            raise IndexError(f"index {k} outside 1..{len(self.terms)}")
        return self.terms[k - 1]

    @property
    def max_term(self) -> int:
        return self.terms[len(self.terms) - 1]

    def prefix(self, n: int) -> list:
        if not 1 <= n <= len(self.terms):
            raise ValueError(f"prefix length {n} outside 1..{len(self.terms)}")
        return list(self.terms[:n])

    def power_form(self) -> tuple[int, int] | None:
        """(base, offset) when terms are known to be base**k + offset."""
        if isinstance(self.provenance, Power):
            return (self.provenance.base, self.provenance.offset)
        return None

    def __repr__(self) -> str:
        return f"IntegerSequence(len={len(self)}, provenance={self.provenance})"


@dataclass
class GapProfile:
    min_ratio: Fraction
    per_k_ratios: list[Fraction]
    erdos_exponent_fit: float | None = None

    def __post_init__(self):
        if self.per_k_ratios and self.min_ratio != min(self.per_k_ratios):
            raise ValueError("min_ratio does not match per_k_ratios")


@dataclass(frozen=True)
class RStarParams:
    alpha: float
    a: int
    count: int
    seed: int
    interval_form: str = "trailing"

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.a < 2:
            raise ValueError("scale a must be at least 2")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.interval_form not in ("trailing", "current"):
            raise ValueError("interval_form must be 'trailing' or 'current'")


# ----------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------

def gen_geometric(q, n1: int, count: int) -> IntegerSequence:
    """Hadamard sequence n_{k+1} = ceil(q * n_k); every ratio is >= q exactly.

    ``q`` must be an exact rational > 1 (int, Fraction or a "p/q" string);
    floats are rejected to keep the ceiling recursion exact.
    """
    if isinstance(q, float):
        raise ValueError("q must be an exact rational, not a float")
    q = Fraction(q)
    if q <= 1:
        raise ValueError(f"gap ratio q must exceed 1, got {q}")
    if n1 < 1 or count < 1:
        raise ValueError("n1 and count must be positive")
    terms = [n1]
    num, den = q.numerator, q.denominator
    for _ in range(count - 1):
        terms.append(-((-num * terms[-1]) // den))  # ceil(q * n_k)
    return IntegerSequence(terms, Geometric(q=q, n1=n1))


def gen_power(base: int, offset: int, count: int) -> IntegerSequence:
    """terms[k] = base**k + offset for k = 1..count (lazy; never materialized)."""
    if base < 2:
        raise ValueError("base must be at least 2")
    if offset not in (0, -1):
        raise ValueError("offset must be 0 or -1")
    if base + offset < 1:
        raise ValueError("first term would be < 1")
    if count < 1:
        raise ValueError("count must be positive")
    return IntegerSequence(_PowerTerms(base, offset, count), Power(base, offset))


def gen_smooth(primes, count: int, include_one: bool = True) -> IntegerSequence:
    """The ``count`` smallest products p1**k1 * ... * pr**kr (all k_i >= 0).

    Generated by a min-heap merge; each product is pushed exactly once by
    only multiplying with generators of index >= the last one used.  The
    generators must be pairwise coprime (>= 2), which makes representations
    unique.  ``include_one=False`` drops the empty product.
    """
    ps = sorted(set(int(p) for p in primes))
    if not ps:
        raise ValueError("need at least one generator")
    for p in ps:
        if p < 2:
            raise ValueError(f"generator {p} < 2")
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if math.gcd(ps[i], ps[j]) != 1:
                raise ValueError(f"generators {ps[i]} and {ps[j]} are not coprime")
    if count < 1:
        raise ValueError("count must be positive")

    needed = count if include_one else count + 1
    heap: list[tuple[int, int]] = [(1, 0)]
    out: list[int] = []
    while len(out) < needed:
        value, first = heapq.heappop(heap)
        out.append(value)
        for j in range(first, len(ps)):
            heapq.heappush(heap, (value * ps[j], j))
    if not include_one:
        out = out[1:]
    return IntegerSequence(out, Smooth(primes=tuple(ps), include_one=include_one))


def _omega(k: int, alpha: Decimal) -> Decimal:
    """(ln k)**alpha; zero at k = 1."""
    lk = Decimal(k).ln()
    if lk <= 0:
        return Decimal(0)
    return (alpha * lk.ln()).exp()


def rstar_interval(k: int, params: RStarParams) -> tuple[int, int]:
    """Integers admissible for n_k: inclusive range [lo, hi].

    k = 1 is the boundary case [1, a].  For k >= 2 the real interval is
    half-open [L, R) with R = a * k**omega_k and L = a * (k-1)**omega_{k-1}
    ("trailing" form) or a * (k-1)**omega_k ("current" form); admissible
    integers are ceil(L) .. ceil(R) - 1.  Endpoints are evaluated at fixed
    decimal precision, so the classification is deterministic.
    """
    if k == 1:
        return (1, params.a)
    with localcontext() as ctx:
        ctx.prec = _ENDPOINT_PRECISION
        alpha = Decimal(repr(params.alpha))
        a = Decimal(params.a)
        w_right = _omega(k, alpha)
        right = a * (w_right * Decimal(k).ln()).exp()
        w_left = w_right if params.interval_form == "current" else _omega(k - 1, alpha)
        if k - 1 == 1:
            left = a
        else:
            left = a * (w_left * Decimal(k - 1).ln()).exp()
        lo = int(left.to_integral_value(rounding="ROUND_CEILING"))
        hi = int(right.to_integral_value(rounding="ROUND_CEILING")) - 1
    return (lo, hi)


def gen_random_rstar(params: RStarParams) -> IntegerSequence:
    """Random slowly-growing sequence: n_k uniform on the integers of I_k.

    Draws come from a counter-mode generator keyed by (seed, k), so the
    sequence is reproducible bit-for-bit regardless of evaluation order.
    Strict increase is enforced by n_k = max(n_{k-1} + 1, draw); if that
    leaves no room below the right endpoint, generation aborts with advice
    to enlarge the scale ``a``.
    """
    rng = CounterRng(params.seed, "rstar")
    terms: list[int] = []
    for k in range(1, params.count + 1):
        lo, hi = rstar_interval(k, params)
        if hi < lo:
            raise IntervalEmpty(
                f"I_{k} = [{lo}, {hi}] contains no integer; increase a (a={params.a})"
            )
        draw = rng.between(k, lo, hi)
        value = draw if not terms else max(terms[-1] + 1, draw)
        if value > hi:
            raise IntervalEmpty(
                f"I_{k} exhausted after enforcing strict increase; "
                f"increase a (a={params.a})"
            )
        terms.append(value)
    return IntegerSequence(
        terms,
        RandomRStar(
            alpha=params.alpha,
            a=params.a,
            seed=params.seed,
            interval_form=params.interval_form,
        ),
    )


def gap_profile(seq: IntegerSequence) -> GapProfile:
    """Exact ratio profile n_{k+1}/n_k, plus a rough fit of the gap exponent.

    The fit regresses log(ratio_k - 1) on log k; the returned exponent is
    the negated slope (ratios decaying like 1 + c * k**-alpha).  It is a
    diagnostic, not a certified bound.
    """
    n = len(seq)
    if n < 2:
        raise ValueError("gap profile needs at least 2 terms")
    ratios = [Fraction(seq.terms[i + 1], seq.terms[i]) for i in range(n - 1)]
    fit = None
    if len(ratios) >= 3:
        xs = [math.log(k) for k in range(1, len(ratios) + 1)]
        ys = [math.log(float(r - 1)) for r in ratios]
        mean_x = sum(xs) / len(xs)
        mean_y = sum(ys) / len(ys)
        sxx = sum((x - mean_x) ** 2 for x in xs)
        if sxx > 0:
            slope = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / sxx
            fit = -slope
    return GapProfile(min_ratio=min(ratios), per_k_ratios=ratios, erdos_exponent_fit=fit)


# ----------------------------------------------------------------------
# Sequence files
# ----------------------------------------------------------------------

def write_sequence(seq: IntegerSequence, path) -> None:
    """One decimal integer per line; header comments carry provenance."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FILE_HEADER + "\n")
        fh.write("# provenance: " + json.dumps(seq.provenance.to_dict()) + "\n")
        for t in seq.terms:
            fh.write(f"{t}\n")


def read_sequence(path) -> IntegerSequence:
    """Read a sequence file; the header is optional."""
    provenance: Provenance = External(path=str(path))
    terms: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("provenance:"):
                    provenance = provenance_from_dict(
                        json.loads(body[len("provenance:"):])
                    )
                continue
            terms.append(int(line))
    return IntegerSequence(terms, provenance)
