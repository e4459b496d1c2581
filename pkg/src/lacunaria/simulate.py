"""Fixed-point Monte Carlo for permuted partial sums and their distributions.

Points x are uniform on a dyadic grid of 2^B points with B at least
64 guard bits beyond the largest frequency involved, so every fractional
part {j * n_k * x} is computed exactly (no float mod-1).  Only the final
cos/sin evaluation leaves exact arithmetic; the per-term absolute error is
bounded by 2*pi*(2^-64 + 2^-53) * sum_j(|a_j| + |b_j|) (64-bit truncation of
the exact fractional part plus float64 rounding), i.e. ~4e-16 per term.

All sample values are pure functions of (seed, sample index); reductions use
fixed numpy pipelines, so replays reproduce results bit-for-bit on one
platform regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import MantissaWidthError
from .mod1 import FracTopEngine, frac_numerator, required_bits
from .permute import PermutationWindow
from .rng import CounterRng
from .seqgen import IntegerSequence
from .spectra import MixtureProfile, TrigPolynomial

_TWO_PI = 2.0 * math.pi
_INV64 = 2.0 ** -64


# ----------------------------------------------------------------------
# Grid points
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FixedPointSample:
    """x = mantissa / 2^bits in [0, 1)."""

    mantissa: int
    bits: int

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("need at least 64 bits")
        if not 0 <= self.mantissa < (1 << self.bits):
            raise ValueError("mantissa outside [0, 2^bits)")

    @property
    def value(self) -> float:
        return self.mantissa / (1 << self.bits)

    def top64(self) -> int:
        return self.mantissa >> (self.bits - 64)


def sample_points(bits: int, count: int, seed: int) -> list[FixedPointSample]:
    """count uniform B-bit mantissas; element i depends only on (seed, i)."""
    if bits < 64:
        raise ValueError("need at least 64 bits")
    if count < 1:
        raise ValueError("count must be positive")
    rng = CounterRng(seed, "x")
    return [FixedPointSample(rng.bits(i, bits), bits) for i in range(count)]


def frac_part(n: int, x: FixedPointSample) -> FixedPointSample:
    """{n * x} exactly on the grid."""
    return FixedPointSample(frac_numerator(n, x.mantissa, x.bits), x.bits)


# ----------------------------------------------------------------------
# Partial sums
# ----------------------------------------------------------------------

class PartialSumEvaluator:
    """S_N(x) = sum_{slots k <= N} f(n_sigma(k) x) on the exact grid."""

    def __init__(self, poly: TrigPolynomial, seq: IntegerSequence,
                 perm: PermutationWindow, count: int):
        if not 1 <= count <= len(perm):
            raise ValueError(f"window {count} outside 1..{len(perm)}")
        images = [perm.apply(s) for s in range(1, count + 1)]
        if max(images) > len(seq):
            raise ValueError("permutation window exceeds sequence length")
        self.poly = poly
        self.seq = seq
        self.count = count
        self.indices = sorted(set(images))
        rank = {k: i for i, k in enumerate(self.indices)}
        self._rows = np.asarray([rank[k] for k in images], dtype=np.int64)

        terms = poly.terms()
        self.freqs = [j for j, _, _ in terms]
        self._acos = np.asarray([float(a) for _, a, _ in terms])
        self._asin = np.asarray([float(b) for _, _, b in terms])
        self._has_cos = bool(poly.cos_coeffs)
        self._has_sin = bool(poly.sin_coeffs)
        max_used = seq.term(self.indices[-1])
        self.required = required_bits(max_used, max(self.freqs))
        self._engines: dict[int, FracTopEngine] = {}

    def _engine(self, bits: int) -> FracTopEngine:
        if bits < self.required:
            raise MantissaWidthError(have=bits, need=self.required)
        eng = self._engines.get(bits)
        if eng is None:
            eng = FracTopEngine(self.seq.terms, self.indices, self.freqs, bits,
                                power_form=self.seq.power_form())
            self._engines[bits] = eng
        return eng

    def slot_values(self, x: FixedPointSample) -> np.ndarray:
        """f(n_sigma(k) x) for slots k = 1..N, in slot order."""
        tops = self._engine(x.bits).tops(x.mantissa)
        angles = tops.astype(np.float64) * (_TWO_PI * _INV64)
        if self._has_cos:
            per_index = np.cos(angles) @ self._acos
            if self._has_sin:
                per_index += np.sin(angles) @ self._asin
        else:
            per_index = np.sin(angles) @ self._asin
        return per_index[self._rows]

    def sum(self, x: FixedPointSample) -> float:
        return float(self.slot_values(x).sum())

    def prefix_sums(self, x: FixedPointSample) -> np.ndarray:
        """S_1, ..., S_N in slot order."""
        return np.cumsum(self.slot_values(x))


def partial_sum(poly: TrigPolynomial, seq: IntegerSequence,
                perm: PermutationWindow, x: FixedPointSample, count: int) -> float:
    """One-shot S_N(x); raises MantissaWidthError when x is too narrow."""
    return PartialSumEvaluator(poly, seq, perm, count).sum(x)


# ----------------------------------------------------------------------
# Empirical distributions
# ----------------------------------------------------------------------

@dataclass
class SummaryStats:
    """Central-moment summary (population style: moments about the mean).

    Standard errors: se_mean = sqrt(m2/M); se_variance = sqrt((m4 - m2^2)/M);
    se_kurtosis by the delta method on k = m4/m2^2,

        Var(k) ~ [ (m8 - m4^2)/m2^4 - 4 m4 (m6 - m2 m4)/m2^5
                   + 4 m4^2 (m4 - m2^2)/m2^6 ] / M,

    which reduces to the familiar 24/M under a Gaussian null.
    """

    count: int
    mean: float
    variance: float
    fourth_moment: float
    kurtosis_ratio: float
    se_mean: float
    se_variance: float
    se_kurtosis: float

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "fourth_moment": self.fourth_moment,
            "kurtosis_ratio": self.kurtosis_ratio,
            "se_mean": self.se_mean,
            "se_variance": self.se_variance,
            "se_kurtosis": self.se_kurtosis,
        }


@dataclass
class EmpiricalDistribution:
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.samples)

    def sorted_samples(self) -> np.ndarray:
        return np.sort(self.samples)

    def summary(self) -> SummaryStats:
        x = self.samples
        m = len(x)
        mean = float(x.mean())
        d = x - mean
        m2 = float(np.mean(d**2))
        m4 = float(np.mean(d**4))
        m6 = float(np.mean(d**6))
        m8 = float(np.mean(d**8))
        kurt = m4 / (m2 * m2) if m2 > 0 else float("nan")
        var_k = (
            (m8 - m4**2) / m2**4
            - 4 * m4 * (m6 - m2 * m4) / m2**5
            + 4 * m4**2 * (m4 - m2**2) / m2**6
        ) / m if m2 > 0 else float("nan")
        return SummaryStats(
            count=m,
            mean=mean,
            variance=m2,
            fourth_moment=m4,
            kurtosis_ratio=kurt,
            se_mean=math.sqrt(m2 / m),
            se_variance=math.sqrt(max(m4 - m2 * m2, 0.0) / m),
            se_kurtosis=math.sqrt(max(var_k, 0.0)),
        )


def _clt_chunk(args) -> np.ndarray:
    poly, seq, perm, count, bits, seed, start, stop = args
    evaluator = PartialSumEvaluator(poly, seq, perm, count)
    rng = CounterRng(seed, "x")
    scale = 1.0 / math.sqrt(count)
    out = np.empty(stop - start)
    for i in range(start, stop):
        x = FixedPointSample(rng.bits(i, bits), bits)
        out[i - start] = evaluator.sum(x) * scale
    return out


def clt_experiment(
    poly: TrigPolynomial,
    seq: IntegerSequence,
    perm: PermutationWindow,
    count: int,
    samples: int,
    seed: int,
    workers: int = 1,
    mantissa_bits: int | None = None,
) -> EmpiricalDistribution:
    """samples draws of S_N(x) / sqrt(N) over fresh grid points.

    Sample i is a pure function of (seed, i); the worker split never changes
    values, only wall time.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    probe = PartialSumEvaluator(poly, seq, perm, count)
    bits = mantissa_bits if mantissa_bits is not None else probe.required
    if bits < probe.required:
        raise MantissaWidthError(have=bits, need=probe.required)

    if workers <= 1:
        values = _clt_chunk((poly, seq, perm, count, bits, seed, 0, samples))
    else:
        bounds = np.linspace(0, samples, workers + 1, dtype=int)
        jobs = [
            (poly, seq, perm, count, bits, seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:]) if b > a
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_clt_chunk, jobs))
        values = np.concatenate(chunks)
    meta = {
        "count": count,
        "samples": samples,
        "seed": seed,
        "mantissa_bits": bits,
        "normalization": "S_N / sqrt(N)",
    }
    return EmpiricalDistribution(values, meta)


# ----------------------------------------------------------------------
# Distribution targets and distances
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianTarget:
    variance: float

    def cdf(self, xs: np.ndarray) -> np.ndarray:
        if self.variance < 0:
            raise ValueError("variance must be nonnegative")
        if self.variance == 0:
            return (xs >= 0).astype(np.float64)
        return ndtr(xs / math.sqrt(self.variance))


@dataclass(frozen=True)
class MixtureTarget:
    """Variance mixture: Z * sqrt(v(U)), Z standard normal, U uniform.

    The CDF integrates Gaussian CDFs over a midpoint grid on U with a
    Richardson doubling check; ``cdf_tol`` reports |Q_grid - Q_2grid|.
    """

    profile: MixtureProfile
    grid: int = 1024

    def _cdf_on(self, xs: np.ndarray, grid: int) -> np.ndarray:
        ts = (np.arange(grid) + 0.5) / grid
        v = self.profile.values(ts)
        if v.min() < 0:
            raise ValueError("mixture profile dips below zero")
        sig = np.sqrt(v)
        out = np.zeros(len(xs))
        step = max(1, (1 << 22) // grid)
        for i in range(0, len(xs), step):
            blk = xs[i:i + step, None] / sig[None, :]
            out[i:i + step] = ndtr(blk).mean(axis=1)
        return out

    def cdf(self, xs: np.ndarray) -> np.ndarray:
        return self._cdf_on(xs, self.grid)

    def cdf_with_tolerance(self, xs: np.ndarray) -> tuple[np.ndarray, float]:
        coarse = self._cdf_on(xs, self.grid)
        fine = self._cdf_on(xs, 2 * self.grid)
        return fine, float(np.max(np.abs(fine - coarse)))


@dataclass(frozen=True)
class KsResult:
    distance: float
    cdf_tolerance: float

    def __float__(self) -> float:
        return self.distance


def ks_distance(emp: EmpiricalDistribution, target) -> KsResult:
    """Sup distance between the empirical CDF and the target CDF.

    A degenerate Gaussian target (variance 0) is an atom at 0; the one-sided
    refinement of the usual formula would overstate the distance there, so
    the atom is compared directly.
    """
    xs = emp.sorted_samples()
    m = len(xs)
    if isinstance(target, GaussianTarget) and target.variance == 0:
        below = float(np.mean(xs < 0))
        above = float(np.mean(xs > 0))
        return KsResult(distance=max(below, above), cdf_tolerance=0.0)
    if isinstance(target, MixtureTarget):
        cdf, tol = target.cdf_with_tolerance(xs)
    else:
        cdf, tol = target.cdf(xs), 0.0
    grid = np.arange(m, dtype=np.float64)
    d_plus = np.max((grid + 1) / m - cdf)
    d_minus = np.max(cdf - grid / m)
    return KsResult(distance=float(max(d_plus, d_minus)), cdf_tolerance=tol)


def kolmogorov_threshold(samples: int, level: float = 0.01) -> float:
    """Critical KS distance: K_alpha / sqrt(M) for the usual alpha levels."""
    table = {0.10: 1.224, 0.05: 1.358, 0.02: 1.517, 0.01: 1.628}
    if level not in table:
        raise ValueError(f"no tabulated threshold for level {level}")
    return table[level] / math.sqrt(samples)


@dataclass(frozen=True)
class CharfnPoint:
    s: float
    real_part: float
    se: float


def charfn_experiment(emp: EmpiricalDistribution, s_values) -> list[CharfnPoint]:
    """Real part of the empirical characteristic function on a grid of s."""
    out = []
    x = emp.samples
    m = len(x)
    for s in s_values:
        c = np.cos(s * x)
        out.append(CharfnPoint(s=float(s), real_part=float(c.mean()),
                               se=float(c.std() / math.sqrt(m))))
    return out


# ----------------------------------------------------------------------
# Law of the iterated logarithm trajectories
# ----------------------------------------------------------------------

@dataclass
class LilTrajectory:
    """Running max of |S_N'| / sqrt(2 * variance * N' * ln ln N') at checkpoints.

    The running max scans every N' from 16 up (natural log; ln ln N > 0
    there); checkpoints are the powers of two.
    """

    checkpoints: list[tuple[int, float]]
    variance: float
    meta: dict = field(default_factory=dict)

    def final_ratio(self) -> float:
        return self.checkpoints[-1][1]

    def ratios(self) -> list[float]:
        return [r for _, r in self.checkpoints]


def lil_trajectory(
    poly: TrigPolynomial,
    seq: IntegerSequence,
    perm: PermutationWindow,
    x: FixedPointSample,
    n_max: int,
    variance: float,
) -> LilTrajectory:
    if variance <= 0:
        raise ValueError("variance must be positive")
    if n_max < 16 or n_max & (n_max - 1):
        raise ValueError("n_max must be a power of two, at least 16")
    evaluator = PartialSumEvaluator(poly, seq, perm, n_max)
    prefix = evaluator.prefix_sums(x)
    ns = np.arange(16, n_max + 1, dtype=np.float64)
    denom = np.sqrt(2.0 * variance * ns * np.log(np.log(ns)))
    ratios = np.abs(prefix[15:]) / denom
    running = np.maximum.accumulate(ratios)
    checkpoints = []
    n = 16
    while n <= n_max:
        checkpoints.append((n, float(running[n - 16])))
        n *= 2
    return LilTrajectory(
        checkpoints=checkpoints,
        variance=variance,
        meta={
            "normalization": "|S_N| / sqrt(2 * variance * N * ln(ln(N)))",
            "log": "natural",
            "scan_start": 16,
            "mantissa_bits": x.bits,
        },
    )
