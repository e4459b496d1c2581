"""Exact L2 / variance computations via frequency-multiset expansion.

Frequencies are exact big integers, coefficients exact rationals; nothing
here touches floating point except :func:`mixture_charfn`, which integrates
the limiting characteristic function numerically (with a Bessel-series
closed form as cross-check).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError
from .permute import PairingCertificate, PermutationWindow, verify_certificate
from .seqgen import IntegerSequence


# ----------------------------------------------------------------------
# Trigonometric polynomials
# ----------------------------------------------------------------------

@dataclass
class TrigPolynomial:
    """Mean-zero f(x) = sum_j a_j cos(2 pi j x) + b_j sin(2 pi j x), exact coefficients.

    There is no constant term by construction, so the mean over a period
    vanishes.  ``cos_coeffs`` / ``sin_coeffs`` map j >= 1 to rationals.
    """

    cos_coeffs: dict[int, Fraction] = field(default_factory=dict)
    sin_coeffs: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.cos_coeffs = {int(j): Fraction(c) for j, c in self.cos_coeffs.items() if c}
        self.sin_coeffs = {int(j): Fraction(c) for j, c in self.sin_coeffs.items() if c}
        for j in list(self.cos_coeffs) + list(self.sin_coeffs):
            if j < 1:
                raise ValueError(f"frequency index {j} must be >= 1")
        if not self.cos_coeffs and not self.sin_coeffs:
            raise ValueError("polynomial needs at least one nonzero coefficient")

    @property
    def degree(self) -> int:
        return max(list(self.cos_coeffs) + list(self.sin_coeffs))

    def terms(self) -> list[tuple[int, Fraction, Fraction]]:
        """Sorted (j, cos coefficient, sin coefficient) with at least one nonzero."""
        js = sorted(set(self.cos_coeffs) | set(self.sin_coeffs))
        zero = Fraction(0)
        return [(j, self.cos_coeffs.get(j, zero), self.sin_coeffs.get(j, zero))
                for j in js]

    def evaluate(self, x: float) -> float:
        total = 0.0
        for j, a, b in self.terms():
            ang = 2.0 * math.pi * j * x
            total += float(a) * math.cos(ang) + float(b) * math.sin(ang)
        return total

    @classmethod
    def parse(cls, spec: str) -> "TrigPolynomial":
        """Mini-grammar: comma-separated ``cos:j[=p/q]`` / ``sin:j[=p/q]`` terms.

        ``cos:1`` means cos(2 pi x) with coefficient 1; ``sin:3=-2/5`` means
        -(2/5) sin(6 pi x).  Repeated terms accumulate.
        """
        cos: dict[int, Fraction] = {}
        sin: dict[int, Fraction] = {}
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            head, _, coeff = part.partition("=")
            kind, _, j_text = head.partition(":")
            kind = kind.strip().lower()
            if kind not in ("cos", "sin") or not j_text:
                raise ValueError(f"bad polynomial term {part!r}")
            j = int(j_text)
            value = Fraction(coeff.strip()) if coeff else Fraction(1)
            target = cos if kind == "cos" else sin
            target[j] = target.get(j, Fraction(0)) + value
        return cls(cos_coeffs=cos, sin_coeffs=sin)

    def format(self) -> str:
        parts = [f"cos:{j}={c}" for j, c in sorted(self.cos_coeffs.items())]
        parts += [f"sin:{j}={c}" for j, c in sorted(self.sin_coeffs.items())]
        return ",".join(parts)


# ----------------------------------------------------------------------
# Frequency multisets
# ----------------------------------------------------------------------

@dataclass
class FrequencyMultiset:
    """Merged map frequency -> (cos coefficient, sin coefficient), exact."""

    entries: dict[int, tuple[Fraction, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for f, (c, s) in self.entries.items():
            if f < 1:
                raise ValueError(f"frequency {f} must be positive")
            if c or s:
                clean[int(f)] = (Fraction(c), Fraction(s))
        self.entries = clean

    def __len__(self) -> int:
        return len(self.entries)

    def l2_mass(self) -> Fraction:
        """Integral of the square over one period: sum (c^2 + s^2) / 2."""
        total = Fraction(0)
        for c, s in self.entries.values():
            total += (c * c + s * s) / 2
        return total

    def to_json_dict(self) -> dict:
        return {
            str(f): {"cos": str(c), "sin": str(s)}
            for f, (c, s) in sorted(self.entries.items())
        }


def _merge_add(acc: dict[int, list[Fraction]], freq: int, c: Fraction, s: Fraction):
    entry = acc.get(freq)
    if entry is None:
        acc[freq] = [c, s]
    else:
        entry[0] += c
        entry[1] += s


def expand_frequencies(
    poly: TrigPolynomial,
    seq: IntegerSequence,
    perm: PermutationWindow,
    count: int,
) -> FrequencyMultiset:
    """Multiset of frequencies j * n_sigma(k), coefficients merged exactly."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count > len(perm):
        raise ValueError(f"window {count} exceeds permutation length {len(perm)}")
    acc: dict[int, list[Fraction]] = {}
    terms = poly.terms()
    for slot in range(1, count + 1):
        nu = seq.term(perm.apply(slot))
        for j, a, b in terms:
            _merge_add(acc, j * nu, a, b)
    return FrequencyMultiset({f: (c, s) for f, (c, s) in acc.items()})


def exact_variance(
    poly: TrigPolynomial,
    seq: IntegerSequence,
    perm: PermutationWindow,
    count: int,
) -> Fraction:
    """(1/N) * integral of (sum_{k<=N} f(n_sigma(k) x))^2 dx, exact rational.

    Orthogonality reduces the integral to the merged multiset's L2 mass.
    """
    if count < 1:
        raise ValueError("count must be positive")
    return expand_frequencies(poly, seq, perm, count).l2_mass() / count


def l2_norm_sq(poly: TrigPolynomial) -> Fraction:
    """||f||^2 = sum_j (a_j^2 + b_j^2) / 2."""
    total = Fraction(0)
    for _, a, b in poly.terms():
        total += (a * a + b * b) / 2
    return total


def kac_variance(poly: TrigPolynomial) -> Fraction:
    """||f||^2 + 2 sum_{t>=1} <f(x), f(2^t x)>; the doubling-sequence limit.

    The inner products match frequencies j = 2^t * j', so the sum is finite:
    terms vanish once 2^t exceeds the degree.
    """
    total = l2_norm_sq(poly)
    d = poly.degree
    cos = poly.cos_coeffs
    sin = poly.sin_coeffs
    t = 1
    while (1 << t) <= d:
        shift = 1 << t
        inner = Fraction(0)
        for j in range(1, d // shift + 1):
            jc = shift * j
            inner += (cos.get(jc, Fraction(0)) * cos.get(j, Fraction(0))
                      + sin.get(jc, Fraction(0)) * sin.get(j, Fraction(0))) / 2
        total += 2 * inner
        t += 1
    return total


# ----------------------------------------------------------------------
# Mixture profiles (the non-Gaussian limit's conditional variance)
# ----------------------------------------------------------------------

@dataclass
class MixtureProfile:
    """v(x) = constant + sum_f coef * cos(2 pi f x) (+ sine part, empty for even f).

    The constant is the variance's flat part; retained low frequencies are
    those at or below the cutoff (the pairing constants c_m survive there).
    ``residual_mass`` is the L2 mass pushed above the cutoff -- it carries no
    constant term, so it washes out of the limit.
    """

    constant: Fraction
    cosine_terms: dict[int, Fraction] = field(default_factory=dict)
    sine_terms: dict[int, Fraction] = field(default_factory=dict)
    residual_mass: Fraction = Fraction(0)
    residual_count: int = 0
    freq_cutoff: int | None = None

    def value(self, x: float) -> float:
        total = float(self.constant)
        for f, c in self.cosine_terms.items():
            total += float(c) * math.cos(2.0 * math.pi * f * x)
        for f, s in self.sine_terms.items():
            total += float(s) * math.sin(2.0 * math.pi * f * x)
        return total

    def values(self, xs: np.ndarray) -> np.ndarray:
        total = np.full_like(xs, float(self.constant), dtype=np.float64)
        for f, c in self.cosine_terms.items():
            total += float(c) * np.cos(2.0 * np.pi * f * xs)
        for f, s in self.sine_terms.items():
            total += float(s) * np.sin(2.0 * np.pi * f * xs)
        return total

    def min_value(self, grid: int = 1 << 16) -> float:
        """Numerical minimum over a period (nonnegativity diagnostic)."""
        xs = (np.arange(grid) + 0.5) / grid
        return float(self.values(xs).min())

    def mean(self) -> Fraction:
        return self.constant

    def to_json_dict(self) -> dict:
        return {
            "constant": str(self.constant),
            "cosine_terms": {str(f): str(c) for f, c in sorted(self.cosine_terms.items())},
            "sine_terms": {str(f): str(s) for f, s in sorted(self.sine_terms.items())},
            "residual_mass": str(self.residual_mass),
            "residual_count": self.residual_count,
            "freq_cutoff": self.freq_cutoff,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MixtureProfile":
        return cls(
            constant=Fraction(data["constant"]),
            cosine_terms={int(f): Fraction(c) for f, c in data["cosine_terms"].items()},
            sine_terms={int(f): Fraction(s) for f, s in data.get("sine_terms", {}).items()},
            residual_mass=Fraction(data.get("residual_mass", 0)),
            residual_count=int(data.get("residual_count", 0)),
            freq_cutoff=data.get("freq_cutoff"),
        )


def _square_expand(terms: list[tuple[int, Fraction, Fraction]],
                   constant: list[Fraction],
                   acc: dict[int, list[Fraction]]) -> None:
    """Accumulate the exact expansion of (sum_i c_i cos F_i + s_i sin F_i)^2.

    Product-to-sum identities; cos picks up the sign |F_i - F_j| freely,
    sin flips with it.  Zero frequencies fold into the constant.
    """
    n = len(terms)
    for i in range(n):
        fi, ci, si = terms[i]
        # squares: cos^2 = 1/2 + cos(2F)/2, sin^2 = 1/2 - cos(2F)/2,
        # 2 sin cos = sin(2F)
        constant[0] += (ci * ci + si * si) / 2
        _merge_add(acc, 2 * fi, (ci * ci - si * si) / 2, ci * si)
        for j in range(i + 1, n):
            fj, cj, sj = terms[j]
            fsum = fi + fj
            fdiff = fi - fj
            # 2 cos A cos B = cos(A-B) + cos(A+B)
            # 2 sin A sin B = cos(A-B) - cos(A+B)
            # 2 sin A cos B = sin(A+B) + sin(A-B)   (A = F_i, B = F_j)
            # 2 cos A sin B = sin(A+B) - sin(A-B)
            cc = ci * cj
            ss = si * sj
            sc = si * cj  # sin A cos B
            cs = ci * sj  # cos A sin B
            _merge_add(acc, fsum, cc - ss, sc + cs)
            diff_cos = cc + ss
            diff_sin = sc - cs
            if fdiff == 0:
                constant[0] += diff_cos
            elif fdiff > 0:
                _merge_add(acc, fdiff, diff_cos, diff_sin)
            else:
                _merge_add(acc, -fdiff, diff_cos, -diff_sin)


def mixture_profile(
    poly: TrigPolynomial,
    seq: IntegerSequence,
    perm: PermutationWindow,
    cert: PairingCertificate,
    freq_cutoff: int | None = None,
) -> MixtureProfile:
    """Exact expansion of (1/N) sum_pairs (f(n_u x) + f(n_v x))^2, N = certified slots.

    The constant term plus the merged terms at frequencies <= cutoff (default
    max |c_m|) form the limiting conditional variance; everything above the
    cutoff is reported as residual mass.
    """
    ok, problem = verify_certificate(perm, seq, cert)
    if not ok:
        raise ValueError(f"certificate invalid for (seq, perm): {problem}")
    pairs = cert.all_pairs
    if not pairs:
        raise ValueError("empty certificate")
    if freq_cutoff is None:
        freq_cutoff = max((abs(c) for c in cert.constants()), default=0)
    nonzero_cs = [abs(c) for c in cert.constants() if c]
    if nonzero_cs and freq_cutoff < min(nonzero_cs):
        warnings.warn(
            f"cutoff {freq_cutoff} below every pairing constant; "
            "the retained profile is constant",
            stacklevel=2,
        )

    constant = [Fraction(0)]
    acc: dict[int, list[Fraction]] = {}
    base_terms = poly.terms()
    for u, v in pairs:
        nu, nv = seq.term(u), seq.term(v)
        pair_terms = [(j * nu, a, b) for j, a, b in base_terms]
        pair_terms += [(j * nv, a, b) for j, a, b in base_terms]
        _square_expand(pair_terms, constant, acc)

    slots = 2 * len(pairs)
    low_cos: dict[int, Fraction] = {}
    low_sin: dict[int, Fraction] = {}
    residual = Fraction(0)
    residual_count = 0
    for f, (c, s) in acc.items():
        if not c and not s:
            continue
        if f <= freq_cutoff:
            if c:
                low_cos[f] = c / slots
            if s:
                low_sin[f] = s / slots
        else:
            residual += (c * c + s * s) / 2
            residual_count += 1
    return MixtureProfile(
        constant=constant[0] / slots,
        cosine_terms=low_cos,
        sine_terms=low_sin,
        residual_mass=residual / (slots * slots),
        residual_count=residual_count,
        freq_cutoff=freq_cutoff,
    )


# ----------------------------------------------------------------------
# Mixture characteristic function
# ----------------------------------------------------------------------

def bessel_i0(z: float) -> float:
    """Modified Bessel I0 by its power series; converges for all real z."""
    term = 1.0
    total = 1.0
    m = 0
    zz = z * z / 4.0
    while True:
        m += 1
        term *= zz / (m * m)
        total += term
        if term < 1e-18 * total:
            return total


def mixture_charfn_closed_form(profile: MixtureProfile, s: float) -> float:
    """e^{-s^2 gamma^2 / 2} * I0(beta s^2 / 2) for v = gamma^2 + beta cos(2 pi c x).

    Only valid when the profile has exactly one cosine term and no sine part.
    """
    if len(profile.cosine_terms) != 1 or profile.sine_terms:
        raise ValueError("closed form needs a single-cosine profile")
    beta = float(next(iter(profile.cosine_terms.values())))
    gamma_sq = float(profile.constant)
    return math.exp(-s * s * gamma_sq / 2.0) * bessel_i0(abs(beta) * s * s / 2.0)


def mixture_charfn(profile: MixtureProfile, s: float, quad_tol: float = 1e-10) -> float:
    """phi(s) = integral_0^1 exp(-s^2 v(t) / 2) dt by adaptive quadrature."""
    if quad_tol <= 0:
        raise ValueError("quad_tol must be positive")
    s2 = s * s

    def integrand(t: float) -> float:
        return math.exp(-s2 * profile.value(t) / 2.0)

    value, abserr = quad(integrand, 0.0, 1.0, epsabs=quad_tol, epsrel=0.0, limit=400)
    if abserr > quad_tol:
        raise QuadratureError(requested=quad_tol, achieved=abserr)
    return value


