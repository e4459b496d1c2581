"""Exact fixed-point mod-1 arithmetic on a dyadic grid.

x is represented by a B-bit mantissa (x = m / 2^B).  For sequence terms n_k
and polynomial frequencies j, the quantity {j * n_k * x} is exact on the
grid: its numerator is j * n_k * m mod 2^B.  Evaluation only ever consumes
the top 64 bits of that numerator, and the engine computes those top bits
exactly through one of three strategies:

* ``pow2-window`` -- terms 2^k + offset with offset in {0, -1} and power-of-
  two frequencies: the product m << k is a pure bit shift, so the top bits
  are 64-bit windows of the mantissa plus a fixed addend whose carry into
  the window is decided by one vectorized big-string comparison (exact; rare
  ties fall back to big-integer comparison).
* ``power-chain`` -- terms base^k + offset: z_k = base^k * m mod 2^B marches
  over the needed indices by small multiplications.
* ``generic`` -- a full modular multiplication per term (gmpy2 when
  available).

All three produce bit-identical uint64 arrays; tests cross-check them.
"""

from __future__ import annotations

import numpy as np

try:
    import gmpy2

    _mpz = gmpy2.mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpz = int

MASK64 = (1 << 64) - 1
_CHUNK = 1 << 17


def required_bits(max_term: int, max_freq: int) -> int:
    """Smallest admissible mantissa width: bits(max_freq * max_term) + 64,
    rounded up to a byte boundary for the windowed fast path."""
    raw = (max_freq * max_term).bit_length() + 64
    return (raw + 63) // 64 * 64


def frac_numerator(n: int, mantissa: int, bits: int) -> int:
    """Exact numerator of {n * x} on the grid: n * mantissa mod 2^bits."""
    return (n * mantissa) & ((1 << bits) - 1)


def _window64(buf: np.ndarray, bit_offsets: np.ndarray) -> np.ndarray:
    """64-bit big-endian windows of a byte buffer at arbitrary bit offsets."""
    out = np.empty(len(bit_offsets), dtype=np.uint64)
    for start in range(0, len(bit_offsets), _CHUNK):
        t = bit_offsets[start:start + _CHUNK]
        byte_off = (t >> 3).astype(np.int64)
        rem = (t & 7).astype(np.uint64)
        gather = byte_off[:, None] + np.arange(9, dtype=np.int64)[None, :]
        by = buf[gather]
        hi = by[:, :8].copy().view(">u8")[:, 0].astype(np.uint64)
        b9 = by[:, 8].astype(np.uint64)
        out[start:start + _CHUNK] = (hi << rem) | (b9 >> (np.uint64(8) - rem))
    return out


class FracTopEngine:
    """Top-64-bit fractional parts {j * n_k * x} for a fixed index/frequency set.

    ``indices`` are the 1-based sequence indices actually needed, sorted and
    unique; ``freqs`` the polynomial frequencies.  ``tops(mantissa)`` returns
    a (len(indices), len(freqs)) uint64 array.
    """

    def __init__(self, terms, indices: list[int], freqs: list[int], bits: int,
                 power_form: tuple[int, int] | None = None):
        if bits < 64:
            raise ValueError("need at least 64 bits")
        if sorted(set(indices)) != list(indices):
            raise ValueError("indices must be sorted and unique")
        if not freqs or any(j < 1 for j in freqs):
            raise ValueError("frequencies must be positive")
        self.terms = terms
        self.indices = list(indices)
        self.freqs = list(freqs)
        self.bits = bits
        self.power_form = power_form
        self._mask = (1 << bits) - 1

        if (
            power_form is not None
            and power_form[0] == 2
            and power_form[1] in (0, -1)
            and bits >= 192  # carry compare reads the window at B-192
            and bits % 8 == 0
            and all(j & (j - 1) == 0 and j < (1 << 63) for j in freqs)
        ):
            self.strategy = "pow2-window"
        elif power_form is not None:
            self.strategy = "power-chain"
        else:
            self.strategy = "generic"

        if self.strategy == "pow2-window":
            self._ks = np.asarray(self.indices, dtype=np.int64)
            self._shifts = [j.bit_length() - 1 for j in self.freqs]
        elif self.strategy == "power-chain":
            base = power_form[0]
            mod = 1 << bits
            steps = []
            prev = 0
            for k in self.indices:
                steps.append(pow(base, k - prev, mod))
                prev = k
            self._steps = steps

    # -- strategies ----------------------------------------------------

    def tops(self, mantissa: int) -> np.ndarray:
        if not 0 <= mantissa < (1 << self.bits):
            raise ValueError("mantissa outside [0, 2^bits)")
        if not self.indices:
            return np.empty((0, len(self.freqs)), dtype=np.uint64)
        if self.strategy == "pow2-window":
            return self._tops_window(mantissa)
        if self.strategy == "power-chain":
            return self._tops_chain(mantissa)
        return self._tops_generic(mantissa)

    def _tops_window(self, m: int) -> np.ndarray:
        B = self.bits
        buf = np.frombuffer(m.to_bytes(B // 8, "big") + b"\x00" * 32, dtype=np.uint8)
        ks = self._ks
        a_hi = _window64(buf, ks)
        a_lo = _window64(buf, ks + 64)

        offset = self.power_form[1]
        if offset == 0 or m == 0:
            s_hi, s_lo = a_hi, a_lo
        else:
            c = (-m) & self._mask  # addend for offset -1: (2^B - m) mod 2^B
            c_hi = np.uint64((c >> (B - 64)) & MASK64)
            c_lo = np.uint64((c >> (B - 128)) & MASK64)
            lowc = c & ((1 << (B - 128)) - 1)
            if lowc == 0:
                carry = np.zeros(len(ks), dtype=np.uint64)
            else:
                threshold = (1 << (B - 128)) - lowc
                t64 = np.uint64(threshold >> (B - 192))
                x64 = _window64(buf, ks + 128)
                carry = (x64 > t64).astype(np.uint64)
                ties = np.nonzero(x64 == t64)[0]
                if len(ties):
                    low_mask = (1 << (B - 128)) - 1
                    for i in ties:
                        x_exact = (m << int(ks[i])) & low_mask
                        carry[i] = np.uint64(1 if x_exact >= threshold else 0)
            t = a_lo + c_lo
            c1 = t < a_lo
            s_lo = t + carry
            c2 = s_lo < t
            s_hi = a_hi + c_hi + (c1 | c2).astype(np.uint64)

        out = np.empty((len(ks), len(self.freqs)), dtype=np.uint64)
        for col, sh in enumerate(self._shifts):
            if sh == 0:
                out[:, col] = s_hi
            else:
                out[:, col] = (s_hi << np.uint64(sh)) | (s_lo >> np.uint64(64 - sh))
        return out

    def _tops_chain(self, m: int) -> np.ndarray:
        B = self.bits
        mask = self._mask
        offset = self.power_form[1]
        addend = (offset * m) & mask
        shift_top = B - 64
        out = np.empty((len(self.indices), len(self.freqs)), dtype=np.uint64)
        z = m
        freqs = self.freqs
        pow2_shift = [j.bit_length() - 1 if j & (j - 1) == 0 else None for j in freqs]
        for row, step in enumerate(self._steps):
            z = (z * step) & mask
            y = (z + addend) & mask
            for col, j in enumerate(freqs):
                sh = pow2_shift[col]
                if sh is not None and sh <= shift_top:
                    out[row, col] = (y >> (shift_top - sh)) & MASK64
                else:
                    out[row, col] = ((j * y) & mask) >> shift_top
        return out

    def _tops_generic(self, m: int) -> np.ndarray:
        mask = _mpz(self._mask)
        mm = _mpz(m)
        shift_top = self.bits - 64
        out = np.empty((len(self.indices), len(self.freqs)), dtype=np.uint64)
        freqs = [_mpz(j) for j in self.freqs]
        for row, k in enumerate(self.indices):
            y = (_mpz(self.terms[k - 1]) * mm) & mask
            for col, j in enumerate(freqs):
                out[row, col] = int(((j * y) & mask) >> shift_top)
        return out
