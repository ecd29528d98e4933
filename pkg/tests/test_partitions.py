import itertools

import pytest

from qmock.partitions import (
    FAMILIES,
    ClassLabel,
    FamilyParams,
    IllegalPart,
    OverPartition,
    classify,
    count_obar_B,
    count_obar_C,
    count_obar_E,
    count_schur_B,
    count_schur_C,
    count_schur_E,
    enumerate_family,
    enumerate_schur_B,
    family_counts,
    gap_matrix_obar,
    gap_matrix_schur,
    is_obar_B,
    is_obar_C,
    list_family,
    part_count_table,
    valid_params,
)

P31 = FamilyParams(3, 1)

OBAR_B_15 = [
    "(1o,3,3,3,5o)", "(1o,3,4o,7o)", "(1o,3,5o,6)", "(1o,3,11o)", "(1o,5o,9o)",
    "(2o,3,3,3,4o)", "(2o,3,4o,6)", "(2o,3,10o)", "(2o,4o,9o)", "(2o,5o,8o)",
    "(3o,6,6)", "(3o,12)", "(6,9o)", "(15o)",
]
OBAR_E_15 = [
    (1, 2, 4, 8), (1, 2, 5, 7), (1, 2, 6, 6), (1, 2, 12), (1, 4, 10), (1, 6, 8), (1, 14),
    (2, 5, 8), (2, 6, 7), (2, 13), (4, 5, 6), (4, 11), (5, 10), (7, 8),
]


def partitions_into(n, allowed, max_part=None):
    """All partitions of n into allowed values, as nondecreasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for v in range(min(n, max_part), 0, -1):
        if allowed(v):
            for rest in partitions_into(n - v, allowed, v):
                yield rest + (v,)


def all_overpartitions(n, p):
    """Exhaustive candidates: residues 0, +-r mod d; non-multiples of d overlined."""
    res = {0, p.r, p.d - p.r}
    for values in partitions_into(n, lambda v: v % p.d in res):
        distinct_ok = all(values.count(v) == 1 for v in set(values) if v % p.d)
        if not distinct_ok:
            continue
        multiples = sorted({v for v in values if v % p.d == 0})
        for flags in itertools.product((False, True), repeat=len(multiples)):
            over = dict(zip(multiples, flags))
            parts, seen = [], set()
            for i, v in enumerate(values):
                last = i == len(values) - 1 or values[i + 1] != v
                parts.append((v, (v % p.d != 0) or (over[v] and last)))
                seen.add(v)
            yield OverPartition(tuple(parts))


def brute(n, p, pred):
    return sorted(lam.parts for lam in all_overpartitions(n, p) if pred(lam, p)[0])


def walk(family, p, n):
    return sorted(lam.parts for lam in enumerate_family(family, p, n) if lam.size == n)


class TestParams:
    @pytest.mark.parametrize("d,r", [(2, 1), (3, 0), (4, 2), (5, 3)])
    def test_invalid(self, d, r):
        with pytest.raises(ValueError):
            FamilyParams(d, r)

    def test_grid(self):
        assert [(p.d, p.r) for p in valid_params()] == [
            (3, 1), (4, 1), (5, 1), (5, 2), (7, 1), (7, 2), (7, 3)]


class TestOverPartition:
    def test_text_round_trip(self):
        for s in OBAR_B_15 + ["()"]:
            assert str(OverPartition.parse(s)) == s

    def test_json_round_trip(self):
        lam = OverPartition.parse("(1o,3,3,3,5o)")
        assert OverPartition.from_json(lam.to_json()) == lam
        assert lam.to_json()[0] == {"value": 1, "overlined": True}

    def test_canonical_order(self):
        with pytest.raises(ValueError):
            OverPartition(((3, True), (3, False)))
        with pytest.raises(ValueError):
            OverPartition(((5, False), (3, False)))


class TestClassify:
    def test_examples(self):
        assert classify((5, True), P31) is ClassLabel.DMINUSRBAR
        assert classify((6, False), P31) is ClassLabel.DPLAIN
        assert classify((1, True), P31) is ClassLabel.RBAR
        assert classify((3, True), P31) is ClassLabel.DBAR

    def test_illegal(self):
        with pytest.raises(IllegalPart):
            classify((4, False), P31)
        with pytest.raises(IllegalPart):
            classify((7, True), FamilyParams(5, 1))


class TestMatrices:
    def test_obar_worked_example(self):
        assert gap_matrix_obar(P31).rows() == [(3, 2, 4, 1), (4, 3, 5, 2), (5, 4, 6, 3), (2, 1, 3, 0)]

    def test_obar_row_and_accessor(self):
        p = FamilyParams(5, 2)
        assert gap_matrix_obar(p).rows()[0] == (5, 4, 7, 2)
        for q in valid_params():
            assert gap_matrix_obar(q)[ClassLabel.DBAR, ClassLabel.DMINUSRBAR] == q.d + q.r

    def test_schur(self):
        assert gap_matrix_schur(P31).rows() == [(3, 5, 4), (4, 3, 5), (5, 4, 6)]
        assert gap_matrix_schur(FamilyParams(7, 3)).rows() == [(7, 13, 10), (8, 7, 11), (11, 10, 14)]

    def test_schur_is_obar_corner_with_one_entry_changed(self):
        for p in valid_params():
            corner = [row[:3] for row in gap_matrix_obar(p).rows()[:3]]
            schur = [list(row) for row in gap_matrix_schur(p).rows()]
            schur[0][1] = 2 * p.r
            assert [list(row) for row in corner] == schur


class TestCheckers:
    def test_listed_members(self):
        for s in OBAR_B_15:
            assert is_obar_B(OverPartition.parse(s), P31) == (True, [])

    def test_gap_too_small(self):
        ok, why = is_obar_B(OverPartition.parse("(1o,2o,12)"), P31)
        assert not ok and any(w.startswith("(ii)") for w in why)

    def test_congruence_failure(self):
        ok, why = is_obar_B(OverPartition.parse("(1o,6)"), P31)
        assert not ok and any(w.startswith("(iii)") for w in why)

    def test_smallest_part(self):
        ok, why = is_obar_B(OverPartition.parse("(4o,9o)"), P31)
        assert not ok and why[0].startswith("(i)")

    def test_c_family(self):
        assert not is_obar_C(OverPartition.parse("(6,9o)"), P31)[0]
        assert is_obar_C(OverPartition.parse("(4o,9o)"), P31)[0]
        assert not is_obar_C(OverPartition.parse("(3,9o)"), P31)[0]
        assert is_obar_C(OverPartition.parse("()"), P31)[0]


class TestWorkedExample:
    def test_counts(self):
        assert count_obar_B(P31, 15) == count_obar_E(P31, 15) == 14

    def test_lists(self):
        assert [str(lam) for lam in list_family("obar-b", P31, 15)] == OBAR_B_15
        assert [lam.values for lam in list_family("obar-e", P31, 15)] == OBAR_E_15

    def test_part_counts(self):
        table = part_count_table("obar-b", P31, 15)
        assert sum(table.values()) == 14
        expected = {}
        for text in OBAR_B_15:
            m = len(OverPartition.parse(text))
            expected[m] = expected.get(m, 0) + 1
        assert table == expected
        assert sum(count_obar_B(P31, 15, m) for m in range(6)) == 14


class TestTrivialSizes:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_zero(self, family):
        assert [str(x) for x in list_family(family, P31, 0)] == ["()"]

    def test_c_has_nothing_up_to_d(self):
        assert [count_obar_C(P31, n) for n in range(1, 4)] == [0, 0, 0]

    def test_counts_at_zero(self):
        assert count_schur_B(P31, 0) == count_schur_C(P31, 0) == count_schur_E(P31, 0) == 1


@pytest.mark.parametrize("p", valid_params((3, 4, 5)), ids=str)
@pytest.mark.parametrize("n", range(0, 19))
def test_walk_matches_exhaustive_filter(p, n):
    assert walk("obar-b", p, n) == brute(n, p, is_obar_B)
    assert walk("obar-c", p, n) == brute(n, p, is_obar_C)


@pytest.mark.parametrize("p", valid_params((3, 4, 5)), ids=str)
def test_obar_e_matches_exhaustive(p):
    for n in range(25):
        expected = sorted(
            tuple((v, False) for v in vals)
            for vals in partitions_into(n, lambda v: v % p.d in (p.r, p.d - p.r) or v % (2 * p.d) == 0)
            if all(vals.count(v) == 1 for v in vals if v % p.d))
        assert walk("obar-e", p, n) == expected


@pytest.mark.parametrize("p", valid_params((3, 4, 5)), ids=str)
def test_schur_families_match_exhaustive(p):
    res = {0, p.r, p.d - p.r}
    for n in range(25):
        cands = list(partitions_into(n, lambda v: v % p.d in res))

        def schur_gap(vals):
            return all(b - a >= p.d and (b % p.d or b - a > p.d) for a, b in zip(vals, vals[1:]))

        b = sorted(v for v in cands if schur_gap(v))
        e = sorted(v for v in partitions_into(n, lambda v: v % p.d in (p.r, p.d - p.r))
                   if len(set(v)) == len(v))
        assert sorted(lam.values for lam in enumerate_family("schur-b", p, n) if lam.size == n) == b
        assert sorted(lam.values for lam in enumerate_family("schur-e", p, n) if lam.size == n) == e


def test_schur_e_example():
    # (10), (2,8), (1,2,7), (1,4,5)
    assert count_schur_E(P31, 10) == 4


@pytest.mark.parametrize("p", valid_params(), ids=str)
def test_schur_matrix_rule_matches_inequality(p):
    a = sorted(lam.parts for lam in enumerate_schur_B(p, 30))
    b = sorted(lam.parts for lam in enumerate_schur_B(p, 30, rule="matrix"))
    assert a == b


@pytest.mark.parametrize("p", valid_params(), ids=str)
def test_b_and_c_disjoint(p):
    b = {lam for lam in enumerate_family("obar-b", p, 30) if lam.parts}
    c = {lam for lam in enumerate_family("obar-c", p, 30) if lam.parts}
    assert not b & c


@pytest.mark.parametrize("p", valid_params(), ids=str)
def test_overlines_recoverable_from_values(p):
    # a multiple of d is overlined or plain, never both, so values alone identify members
    members = list(enumerate_family("obar-b", p, 30))
    assert len({lam.values for lam in members}) == len(members)
    for lam in members:
        mults = [(v, o) for v, o in lam.parts if v % p.d == 0]
        for v in {v for v, _ in mults}:
            assert len({o for w, o in mults if w == v}) == 1


def test_family_counts_single_pass():
    assert family_counts("obar-b", P31, 15)[15] == 14


def test_unknown_family():
    with pytest.raises(ValueError):
        list(enumerate_family("nope", P31, 5))
