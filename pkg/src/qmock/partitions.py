"""Brute-force enumerators for the Schur-type partition and overpartition families.

Six families are covered, all parametrised by ``d >= 3`` and ``1 <= r < d/2``:

``schur-b``  parts congruent to r, d-r, 0 (mod d) with gap ``>= d``, strict when
             the larger part is a multiple of d.
``schur-c``  the same with smallest part larger than d.
``schur-e``  distinct parts congruent to +-r (mod d).
``obar-b``   overpartitions into parts r, d-r, 0 (mod d), only multiples of d
             may be non-overlined, subject to the gap matrix conditions and a
             restriction on the smallest part modulo 2d.
``obar-c``   as ``obar-b`` with all parts > d and a shifted smallest-part rule.
``obar-e``   distinct parts +-r (mod d) together with unrestricted parts 0 (mod 2d).

The enumerators are depth-first walks over nondecreasing parts that only ever
step to admissible successors, so they are cheap enough to serve as exact
oracles for generating-function identities up to n of about 60.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterator

Part = tuple[int, bool]

FAMILIES = ("obar-b", "obar-c", "obar-e", "schur-b", "schur-c", "schur-e")


class IllegalPart(ValueError):
    """A part that cannot occur in any of the overpartition families."""


@dataclass(frozen=True)
class FamilyParams:
    d: int
    r: int

    def __post_init__(self) -> None:
        if self.d < 3:
            raise ValueError(f"d must be >= 3, got {self.d}")
        if not (1 <= self.r and 2 * self.r < self.d):
            raise ValueError(f"r must satisfy 1 <= r < d/2, got r={self.r} for d={self.d}")

    def __str__(self) -> str:
        return f"d={self.d},r={self.r}"


def valid_params(ds=(3, 4, 5, 7)) -> list[FamilyParams]:
    """Every admissible ``(d, r)`` with ``d`` drawn from ``ds``."""
    return [FamilyParams(d, r) for d in ds for r in range(1, (d + 1) // 2) if 2 * r < d]


class ClassLabel(enum.Enum):
    RBAR = "r-bar"
    DMINUSRBAR = "(d-r)-bar"
    DBAR = "d-bar"
    DPLAIN = "d"


LABELS = (ClassLabel.RBAR, ClassLabel.DMINUSRBAR, ClassLabel.DBAR, ClassLabel.DPLAIN)


@dataclass(frozen=True)
class OverPartition:
    """Nondecreasing parts ``(value, overlined)``.

    Within a run of equal values the non-overlined copies come first and at
    most one copy is overlined.
    """

    parts: tuple[Part, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple((int(v), bool(o)) for v, o in self.parts)
        object.__setattr__(self, "parts", parts)
        for i, (v, o) in enumerate(parts):
            if v < 1:
                raise ValueError(f"parts must be positive, got {v}")
            if i and v < parts[i - 1][0]:
                raise ValueError("parts must be nondecreasing")
            if i and v == parts[i - 1][0] and parts[i - 1][1]:
                raise ValueError(f"value {v}: the overlined copy must be the last occurrence")

    @classmethod
    def plain(cls, values) -> OverPartition:
        return cls(tuple((v, False) for v in values))

    @property
    def size(self) -> int:
        return sum(v for v, _ in self.parts)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(f"{v}o" if o else str(v) for v, o in self.parts) + ")"

    @classmethod
    def parse(cls, text: str) -> OverPartition:
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"expected parenthesised parts, got {text!r}")
        body = body[1:-1].strip()
        if not body:
            return cls(())
        parts = []
        for tok in body.split(","):
            tok = tok.strip()
            over = tok.endswith("o")
            parts.append((int(tok[:-1] if over else tok), over))
        return cls(tuple(parts))

    def to_json(self) -> list[dict]:
        return [{"value": v, "overlined": o} for v, o in self.parts]

    @classmethod
    def from_json(cls, obj) -> OverPartition:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple((p["value"], p["overlined"]) for p in obj))


@dataclass(frozen=True)
class GapMatrix:
    """Minimal allowable differences ``A[u, v]``; row u is the larger part."""

    labels: tuple
    entries: tuple[tuple[int, ...], ...]

    def __getitem__(self, key) -> int:
        u, v = key
        return self.entries[self.labels.index(u)][self.labels.index(v)]

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(row) for row in self.entries]


def classify(part: Part, p: FamilyParams) -> ClassLabel:
    value, overlined = part
    res = value % p.d
    if res == 0:
        return ClassLabel.DBAR if overlined else ClassLabel.DPLAIN
    if not overlined:
        raise IllegalPart(f"non-overlined part {value} is not a multiple of d={p.d}")
    if res == p.r:
        return ClassLabel.RBAR
    if res == p.d - p.r:
        return ClassLabel.DMINUSRBAR
    raise IllegalPart(f"part {value} is not congruent to 0, +-{p.r} mod {p.d}")


def gap_matrix_obar(p: FamilyParams) -> GapMatrix:
    d, r = p.d, p.r
    return GapMatrix(LABELS, (
        (d, 2 * r, d + r, r),
        (2 * d - 2 * r, d, 2 * d - r, d - r),
        (2 * d - r, d + r, 2 * d, d),
        (d - r, r, d, 0),
    ))


def gap_matrix_schur(p: FamilyParams) -> GapMatrix:
    """The 3x3 matrix for Schur's gap condition, indexed by residues r, d-r, 0."""
    d, r = p.d, p.r
    return GapMatrix(("r", "d-r", "d"), (
        (d, d + 2 * r, d + r),
        (2 * d - 2 * r, d, 2 * d - r),
        (2 * d - r, d + r, 2 * d),
    ))


# ---------------------------------------------------------------------------
# condition checkers

def _smallest_ok_B(part: Part, label: ClassLabel, p: FamilyParams) -> bool:
    v, m = part[0], 2 * p.d
    return {
        ClassLabel.RBAR: v % m == p.r,
        ClassLabel.DMINUSRBAR: v % m == p.d - p.r,
        ClassLabel.DBAR: v % m == p.d,
        ClassLabel.DPLAIN: v % m == 0,
    }[label]


def _smallest_ok_C(part: Part, label: ClassLabel, p: FamilyParams) -> bool:
    v, m = part[0], 2 * p.d
    if v <= p.d:
        return False
    return {
        ClassLabel.RBAR: v % m == p.d + p.r,
        ClassLabel.DMINUSRBAR: v % m == 2 * p.d - p.r,
        ClassLabel.DBAR: v % m == 0,
        ClassLabel.DPLAIN: v % m == p.d,
    }[label]


def _gap_violations(lam: OverPartition, labels: list[ClassLabel], p: FamilyParams) -> list[str]:
    A = gap_matrix_obar(p)
    out = []
    for i in range(len(lam) - 1):
        lo, hi = lam.parts[i], lam.parts[i + 1]
        need = A[labels[i + 1], labels[i]]
        diff = hi[0] - lo[0]
        tag = f"{OverPartition((hi,))}-{OverPartition((lo,))}"
        if diff < need:
            out.append(f"(ii) {tag}: difference {diff} < {need}")
        if (diff - need) % (2 * p.d):
            out.append(f"(iii) {tag}: difference {diff} is not {need} mod {2 * p.d}")
    return out


def _check(lam: OverPartition, p: FamilyParams, smallest_ok) -> tuple[bool, list[str]]:
    # parts are nondecreasing, so "all parts > d" reduces to the smallest part
    labels = [classify(part, p) for part in lam.parts]
    bad = []
    if lam.parts and not smallest_ok(lam.parts[0], labels[0], p):
        bad.append(f"(i) smallest part {OverPartition(lam.parts[:1])} not allowed")
    bad.extend(_gap_violations(lam, labels, p))
    return not bad, bad


def is_obar_B(lam: OverPartition, p: FamilyParams) -> tuple[bool, list[str]]:
    """Check the three defining conditions of the B-bar family."""
    return _check(lam, p, _smallest_ok_B)


def is_obar_C(lam: OverPartition, p: FamilyParams) -> tuple[bool, list[str]]:
    """Gap conditions plus: all parts > d, smallest part d, (d+r)o, (2d-r)o or (2d)o mod 2d."""
    return _check(lam, p, _smallest_ok_C)


# ---------------------------------------------------------------------------
# enumeration

def _walk(starts, successors, max_size: int) -> Iterator[tuple]:
    """Yield every sequence reachable from ``starts`` with total <= max_size.

    ``successors(last, budget)`` lists admissible next parts not exceeding budget.
    """
    yield ()
    stack = []
    for s in starts(max_size):
        stack.append(((s,), max_size - _val(s)))
    while stack:
        seq, budget = stack.pop()
        yield seq
        for nxt in successors(seq[-1], budget):
            stack.append((seq + (nxt,), budget - _val(nxt)))


def _val(part) -> int:
    return part[0] if isinstance(part, tuple) else part


def _obar_walk(p: FamilyParams, max_size: int, smallest_ok) -> Iterator[OverPartition]:
    A = gap_matrix_obar(p)
    d, m = p.d, 2 * p.d
    overl = {ClassLabel.RBAR: True, ClassLabel.DMINUSRBAR: True,
             ClassLabel.DBAR: True, ClassLabel.DPLAIN: False}
    residue = {ClassLabel.RBAR: p.r, ClassLabel.DMINUSRBAR: d - p.r,
               ClassLabel.DBAR: 0, ClassLabel.DPLAIN: 0}

    def starts(budget):
        for label in LABELS:
            for v in range(residue[label] or d, budget + 1, d):
                part = (v, overl[label])
                if smallest_ok(part, label, p):
                    yield (v, overl[label], label)

    def successors(last, budget):
        v, _, lab = last
        for label in LABELS:
            w = v + A[label, lab]
            while w <= budget:
                yield (w, overl[label], label)
                w += m

    for seq in _walk(starts, successors, max_size):
        yield OverPartition(tuple((v, o) for v, o, _ in seq))


def enumerate_obar_B(p: FamilyParams, max_size: int) -> Iterator[OverPartition]:
    """All B-bar overpartitions of size <= max_size (including the empty one)."""
    return _obar_walk(p, max_size, _smallest_ok_B)


def enumerate_obar_C(p: FamilyParams, max_size: int) -> Iterator[OverPartition]:
    return _obar_walk(p, max_size, _smallest_ok_C)


def enumerate_obar_E(p: FamilyParams, max_size: int) -> Iterator[OverPartition]:
    d, r = p.d, p.r

    def allowed(w, last):
        if w % (2 * d) == 0:
            return True
        return w % d in (r, d - r) and w != last

    def starts(budget):
        return (w for w in range(1, budget + 1) if allowed(w, None))

    def successors(last, budget):
        return (w for w in range(last, budget + 1) if allowed(w, last))

    for seq in _walk(starts, successors, max_size):
        yield OverPartition.plain(seq)


def _schur_allowed(w: int, p: FamilyParams) -> bool:
    return w % p.d in (0, p.r, p.d - p.r)


def enumerate_schur_B(p: FamilyParams, max_size: int, rule: str = "inequality",
                      min_part: int = 1) -> Iterator[OverPartition]:
    """Schur's B family.

    ``rule="inequality"`` uses ``difference >= d``, strict when d divides the
    larger part; ``rule="matrix"`` uses the 3x3 minimal-difference matrix.
    """
    d = p.d
    if rule == "inequality":
        def ok_next(last, w):
            gap = w - last
            return gap > d if w % d == 0 else gap >= d
    elif rule == "matrix":
        A = gap_matrix_schur(p)
        lab = {p.r: "r", d - p.r: "d-r", 0: "d"}

        def ok_next(last, w):
            return w - last >= A[lab[w % d], lab[last % d]]
    else:
        raise ValueError(f"unknown rule {rule!r}")

    def starts(budget):
        return (w for w in range(min_part, budget + 1) if _schur_allowed(w, p))

    def successors(last, budget):
        return (w for w in range(last + 1, budget + 1)
                if _schur_allowed(w, p) and ok_next(last, w))

    for seq in _walk(starts, successors, max_size):
        yield OverPartition.plain(seq)


def enumerate_schur_C(p: FamilyParams, max_size: int) -> Iterator[OverPartition]:
    return enumerate_schur_B(p, max_size, min_part=p.d + 1)


def enumerate_schur_E(p: FamilyParams, max_size: int) -> Iterator[OverPartition]:
    d, r = p.d, p.r

    def starts(budget):
        return (w for w in range(1, budget + 1) if w % d in (r, d - r))

    def successors(last, budget):
        return (w for w in range(last + 1, budget + 1) if w % d in (r, d - r))

    for seq in _walk(starts, successors, max_size):
        yield OverPartition.plain(seq)


_ENUMERATORS: dict[str, Callable[[FamilyParams, int], Iterator[OverPartition]]] = {
    "obar-b": enumerate_obar_B,
    "obar-c": enumerate_obar_C,
    "obar-e": enumerate_obar_E,
    "schur-b": enumerate_schur_B,
    "schur-c": enumerate_schur_C,
    "schur-e": enumerate_schur_E,
}


def enumerate_family(family: str, p: FamilyParams, max_size: int) -> Iterator[OverPartition]:
    try:
        return _ENUMERATORS[family](p, max_size)
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}") from None


def list_family(family: str, p: FamilyParams, n: int) -> list[OverPartition]:
    """All members of ``family`` of size exactly n, sorted lexicographically."""
    found = [lam for lam in enumerate_family(family, p, n) if lam.size == n]
    return sorted(found, key=lambda lam: lam.parts)


def family_counts(family: str, p: FamilyParams, max_n: int) -> list[int]:
    """Counts for n = 0..max_n from a single enumeration pass."""
    counts = [0] * (max_n + 1)
    for lam in enumerate_family(family, p, max_n):
        counts[lam.size] += 1
    return counts


def signed_family_counts(family: str, p: FamilyParams, max_n: int) -> list[int]:
    """``sum_m (-1)^m`` (number with m parts) for n = 0..max_n."""
    counts = [0] * (max_n + 1)
    for lam in enumerate_family(family, p, max_n):
        counts[lam.size] += -1 if len(lam) % 2 else 1
    return counts


def part_count_table(family: str, p: FamilyParams, n: int) -> Counter:
    """Number of members of size n keyed by their number of parts."""
    return Counter(len(lam) for lam in enumerate_family(family, p, n) if lam.size == n)


def _count(family: str, p: FamilyParams, n: int, m: int | None) -> int:
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(1 for lam in enumerate_family(family, p, n)
               if lam.size == n and (m is None or len(lam) == m))


def count_obar_B(p: FamilyParams, n: int, m: int | None = None) -> int:
    return _count("obar-b", p, n, m)


def count_obar_C(p: FamilyParams, n: int, m: int | None = None) -> int:
    return _count("obar-c", p, n, m)


def count_obar_E(p: FamilyParams, n: int) -> int:
    return _count("obar-e", p, n, None)


def count_schur_B(p: FamilyParams, n: int) -> int:
    return _count("schur-b", p, n, None)


def count_schur_C(p: FamilyParams, n: int) -> int:
    return _count("schur-c", p, n, None)


def count_schur_E(p: FamilyParams, n: int) -> int:
    return _count("schur-e", p, n, None)
