"""Permutations of index windows, including the CLT-breaking pairing builder.

A :class:`PermutationWindow` is a bijection of {1..N}.  The pairing builder
rearranges a window so that slots (2k-1, 2k) carry sequence indices (u, v)
satisfying a*n_v - b*n_u = c_m, block by block; the resulting
:class:`PairingCertificate` is verifiable in exact arithmetic and is what the
variance-mixture computations in :mod:`lacunaria.spectra` consume.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientWitnesses, SpacingUnsatisfiable
from .rng import CounterRng
from .seqgen import IntegerSequence, gap_profile

PERM_FILE_HEADER = "# lacunaria-perm v1"


# ----------------------------------------------------------------------
# Permutation windows
# ----------------------------------------------------------------------

@dataclass
class PermutationWindow:
    """images[k-1] = sigma(k); a bijection of {1..N}, checked on construction."""

    images: list[int]

    def __post_init__(self):
        n = len(self.images)
        if n < 1:
            raise ValueError("empty permutation")
        if sum(self.images) != n * (n + 1) // 2 or set(self.images) != set(range(1, n + 1)):
            raise ValueError("images are not a bijection of {1..N}")

    def __len__(self) -> int:
        return len(self.images)

    def apply(self, k: int) -> int:
        """sigma(k), 1-based."""
        if not 1 <= k <= len(self.images):
            raise IndexError(f"slot {k} outside 1..{len(self.images)}")
        return self.images[k - 1]

    def cycle_count(self) -> int:
        seen = [False] * len(self.images)
        cycles = 0
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cycles += 1
            j = start
            while not seen[j]:
                seen[j] = True
                j = self.images[j] - 1
        return cycles


def identity(n: int) -> PermutationWindow:
    if n < 1:
        raise ValueError("window length must be positive")
    return PermutationWindow(list(range(1, n + 1)))


def random_perm(n: int, seed: int) -> PermutationWindow:
    """Uniform shuffle of {1..N}, deterministic given seed (Fisher-Yates)."""
    if n < 1:
        raise ValueError("window length must be positive")
    rng = CounterRng(seed, "perm")
    images = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = rng.below(i, i + 1)
        images[i], images[j] = images[j], images[i]
    return PermutationWindow(images)


def compose(outer: PermutationWindow, inner: PermutationWindow) -> PermutationWindow:
    """(outer o inner)(k) = outer(inner(k))."""
    if len(outer) != len(inner):
        raise ValueError("window lengths differ")
    return PermutationWindow([outer.apply(inner.apply(k)) for k in range(1, len(inner) + 1)])


def write_permutation(perm: PermutationWindow, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(PERM_FILE_HEADER + "\n")
        for img in perm.images:
            fh.write(f"{img}\n")


def read_permutation(path) -> PermutationWindow:
    images = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            images.append(int(line))
    return PermutationWindow(images)


# ----------------------------------------------------------------------
# Block schedules
# ----------------------------------------------------------------------

@dataclass
class BlockSchedule:
    """Block lengths |Delta_1| .. |Delta_M|; all even, final block dominant."""

    lengths: list[int]
    mode: str  # "paper" or "geometric"

    def __post_init__(self):
        if not self.lengths:
            raise ValueError("schedule needs at least one block")
        for L in self.lengths:
            if L < 2 or L % 2:
                raise ValueError(f"block length {L} must be even and >= 2")
        if self.mode == "geometric" and len(self.lengths) > 1:
            if self.lengths[-1] <= sum(self.lengths[:-1]):
                raise ValueError("final block must dominate the sum of the others")

    @property
    def total_slots(self) -> int:
        return sum(self.lengths)

    @property
    def total_pairs(self) -> int:
        return self.total_slots // 2

    @classmethod
    def paper_doubly_exponential(cls, num_blocks: int) -> "BlockSchedule":
        """Lengths 2^(2^m), m = 1..num_blocks; capped at 4 blocks (65536)."""
        if not 1 <= num_blocks <= 4:
            raise ValueError("doubly exponential blocks are capped at 4")
        return cls([2 ** (2**m) for m in range(1, num_blocks + 1)], "paper")

    @classmethod
    def geometric_dominant(cls, num_blocks: int, factor: int = 4,
                           base_len: int = 4) -> "BlockSchedule":
        """Even lengths base_len * factor^m; factor >= 4 keeps the last block
        longer than all previous combined, the property the construction needs."""
        if num_blocks < 1:
            raise ValueError("need at least one block")
        if factor < 4:
            raise ValueError("dominance requires factor >= 4")
        if base_len < 2 or base_len % 2:
            raise ValueError("base length must be even and >= 2")
        return cls([base_len * factor**m for m in range(num_blocks)], "geometric")


# ----------------------------------------------------------------------
# Pairing certificates
# ----------------------------------------------------------------------

@dataclass
class BlockPairing:
    c: int
    pairs: list[tuple[int, int]]  # (odd-slot source u, even-slot source v)


@dataclass
class PairingCertificate:
    a: int
    b: int
    gap_ratio: Fraction
    blocks: list[BlockPairing]

    @property
    def all_pairs(self) -> list[tuple[int, int]]:
        return [p for blk in self.blocks for p in blk.pairs]

    @property
    def certified_slots(self) -> int:
        return 2 * len(self.all_pairs)

    def constants(self) -> list[int]:
        return [blk.c for blk in self.blocks]

    def to_json_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "gap_ratio": str(self.gap_ratio),
            "blocks": [
                {"c": str(blk.c), "pairs": [[u, v] for u, v in blk.pairs]}
                for blk in self.blocks
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PairingCertificate":
        return cls(
            a=int(data["a"]),
            b=int(data["b"]),
            gap_ratio=Fraction(data["gap_ratio"]),
            blocks=[
                BlockPairing(
                    c=int(blk["c"]),
                    pairs=[(int(u), int(v)) for u, v in blk["pairs"]],
                )
                for blk in data["blocks"]
            ],
        )


def write_certificate(cert: PairingCertificate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cert.to_json_dict(), fh, indent=2)


def read_certificate(path) -> PairingCertificate:
    with open(path, "r", encoding="utf-8") as fh:
        return PairingCertificate.from_json_dict(json.load(fh))


# ----------------------------------------------------------------------
# Pairing construction
# ----------------------------------------------------------------------

def _witness_groups(seq: IntegerSequence, a: int, b: int, *,
                    allow_zero_c: bool, max_span: int | None,
                    head: int = 256) -> dict[int, list[tuple[int, int]]]:
    """Candidate pairs u < v with a*n_v - b*n_u = c, grouped by c.

    Families sharing one c have n_v/n_u -> b/a, so v - u is bounded by
    log_q(b/a) for lacunary sequences; the scan covers spans up to that bound
    (plus slack), and additionally all pairs among the first ``head`` indices
    to catch small exceptional witnesses.
    """
    n = len(seq)
    if max_span is None:
        power = seq.power_form()
        if power is not None:
            q = float(power[0])  # base^k + offset has every ratio >= base
        elif n >= 2:
            q = float(gap_profile(seq).min_ratio)
        else:
            q = 2.0
        if q <= 1.0:
            max_span = n - 1
        else:
            ratio = abs(b / a)
            max_span = max(1, math.ceil(math.log(max(ratio, 1.0)) / math.log(q))) + 2
    groups: dict[int, list[tuple[int, int]]] = {}
    seen: set[tuple[int, int]] = set()
    for u in range(1, n):
        nu = seq.term(u)
        hi = min(n, u + max_span) if u > head else min(n, max(u + max_span, head))
        for v in range(u + 1, hi + 1):
            c = a * seq.term(v) - b * nu
            if c == 0 and not allow_zero_c:
                continue
            if (u, v) in seen:
                continue
            seen.add((u, v))
            groups.setdefault(c, []).append((u, v))
    for pairs in groups.values():
        pairs.sort()
    return groups


def _greedy_pick(pairs: list[tuple[int, int]], want: int, seq: IntegerSequence,
                 gap_ratio: Fraction, used: set[int], last_value: int | None):
    """Left-to-right selection honoring disjointness and value-ratio spacing.

    Returns everything it could pick (possibly fewer than ``want``) and the
    largest placed value.
    """
    picked = []
    lv = last_value
    for u, v in pairs:
        if u in used or v in used:
            continue
        if lv is not None:
            # require n_u >= gap_ratio * (largest value already placed)
            if seq.term(u) * gap_ratio.denominator < gap_ratio.numerator * lv:
                continue
        picked.append((u, v))
        lv = seq.term(v)
        if len(picked) == want:
            break
    return picked, lv


def build_pairing_counterexample(
    seq: IntegerSequence,
    a: int,
    b: int,
    schedule: BlockSchedule,
    gap_ratio=None,
    *,
    allow_zero_c: bool = False,
    max_span: int | None = None,
) -> tuple[PermutationWindow, PairingCertificate]:
    """Fill the schedule with disjoint witness pairs of a*n_v - b*n_u = c_m.

    Block by block, the smallest-|c| constant whose remaining greedy supply
    fills the block is chosen; its pairs occupy consecutive slots (2k-1, 2k).
    Selected values must be separated across distinct pairs by a factor
    ``gap_ratio`` (default 2*max(|a|,|b|)); unused indices are appended after
    the certified slots in increasing order.
    """
    if a == 0 or b == 0:
        raise ValueError("coefficients must be nonzero")
    if a == b:
        warnings.warn("a = b pairing is experimental", stacklevel=2)
    if gap_ratio is None:
        gap_ratio = Fraction(2 * max(abs(a), abs(b)))
    gap_ratio = Fraction(gap_ratio)
    if gap_ratio < 2 * max(abs(a), abs(b)):
        raise ValueError(
            f"gap_ratio {gap_ratio} below the floor 2*max(|a|,|b|) = "
            f"{2 * max(abs(a), abs(b))}"
        )

    groups = _witness_groups(seq, a, b, allow_zero_c=allow_zero_c, max_span=max_span)
    if not groups:
        raise InsufficientWitnesses(
            f"no witness pairs for a={a}, b={b} "
            f"({'including' if allow_zero_c else 'excluding'} c = 0)"
        )

    used: set[int] = set()
    last_value: int | None = None
    blocks: list[BlockPairing] = []
    for bi, length in enumerate(schedule.lengths, start=1):
        want = length // 2
        best = None
        for c in sorted(groups, key=lambda c: (abs(c), c < 0)):
            picked, lv = _greedy_pick(groups[c], want, seq, gap_ratio, used, last_value)
            if len(picked) == want:
                best = (c, picked, lv)
                break
        if best is None:
            supplies = {
                c: len(_greedy_pick(groups[c], want, seq, gap_ratio, used, last_value)[0])
                for c in groups
            }
            top_c, top = max(supplies.items(), key=lambda kv: (kv[1], -abs(kv[0])))
            if top == 0 and all(s == 0 for s in supplies.values()):
                raise SpacingUnsatisfiable(
                    f"block {bi}: witnesses exist but none clears the spacing "
                    f"ratio {gap_ratio}"
                )
            raise InsufficientWitnesses(
                f"block {bi} needs {want} disjoint spaced pairs; best candidate "
                f"c={top_c} supplies only {top}"
            )
        c, picked, last_value = best
        for u, v in picked:
            used.add(u)
            used.add(v)
        blocks.append(BlockPairing(c=c, pairs=picked))

    flat: list[int] = []
    for blk in blocks:
        for u, v in blk.pairs:
            flat.extend((u, v))
    window = max(flat)
    unused = [i for i in range(1, window + 1) if i not in used]
    perm = PermutationWindow(flat + unused)
    cert = PairingCertificate(a=a, b=b, gap_ratio=gap_ratio, blocks=blocks)
    ok, problem = verify_certificate(perm, seq, cert)
    if not ok:
        raise AssertionError(f"internal: built certificate fails verification: {problem}")
    return perm, cert


def verify_certificate(
    perm: PermutationWindow,
    seq: IntegerSequence,
    cert: PairingCertificate,
) -> tuple[bool, str | None]:
    """Exact check of pair relations, slot placement, monotonicity, spacing.

    Returns (True, None) or (False, description of the first violation).
    """
    flat: list[tuple[int, int]] = []
    slot = 0
    for m, blk in enumerate(cert.blocks, start=1):
        for u, v in blk.pairs:
            slot += 2
            if slot > len(perm):
                return False, f"certificate exceeds window at slot {slot}"
            if perm.apply(slot - 1) != u or perm.apply(slot) != v:
                return False, f"slots ({slot - 1}, {slot}) do not carry pair ({u}, {v})"
            if not (1 <= u <= len(seq) and 1 <= v <= len(seq)):
                return False, f"pair ({u}, {v}) outside the sequence"
            if cert.a * seq.term(v) - cert.b * seq.term(u) != blk.c:
                return False, (
                    f"block {m}: a*n_{v} - b*n_{u} != {blk.c}"
                )
            flat.append((u, v))

    images = [i for uv in flat for i in uv]
    for i in range(1, len(images)):
        if images[i] <= images[i - 1]:
            return False, f"certified images not increasing at slot {i + 1}"

    seen: set[int] = set()
    for u, v in flat:
        if u in seen or v in seen or u == v:
            return False, f"index reuse in pair ({u}, {v})"
        seen.add(u)
        seen.add(v)

    g = cert.gap_ratio
    for i in range(1, len(flat)):
        prev_v = flat[i - 1][1]
        cur_u = flat[i][0]
        if seq.term(cur_u) * g.denominator < g.numerator * seq.term(prev_v):
            return False, (
                f"spacing violated between pairs {flat[i - 1]} and {flat[i]}"
            )
    return True, None
