import importlib
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locprod.harness import enumerate_preorders
from locprod.product import (
    HYPOTHESES,
    InvalidFence,
    SubsetC,
    TheoremViolation,
    decompose,
    evaluate_mask,
    is_rectangle,
    local_product_certificate,
    mixed_pair_property,
    product,
    theorem_verdict,
)
from locprod.space import FiniteSpace, PointSet, closure, is_path_connected, minimal_open

import oracles

SPACES = {n: enumerate_preorders(n) for n in (1, 2, 3)}
PAIRS_LE2 = [
    (x, y) for nx in (1, 2) for ny in (1, 2) for x in SPACES[nx] for y in SPACES[ny]
]


def sub(x, y, *pairs):
    return SubsetC.of(product(x, y), pairs)


def all_subsets(ps):
    return [SubsetC.from_mask(ps, m) for m in range(1 << ps.space.n)]


# --- product -----------------------------------------------------------------


def test_sierpinski_square_bottom_sees_everything(s2):
    ps = product(s2, s2)
    assert set(minimal_open(ps.space, ps.index(0, 0))) == {0, 1, 2, 3}
    assert set(minimal_open(ps.space, ps.index(1, 1))) == {ps.index(1, 1)}


def test_discrete_square_is_discrete(disc2):
    ps = product(disc2, disc2)
    assert ps.space == FiniteSpace.discrete(4)


def test_point_factor_is_identity(s2):
    x = FiniteSpace.from_relation(3, [(0, 1), (2, 1)])
    ps = product(x, FiniteSpace.discrete(1))
    assert ps.space == x
    assert product(FiniteSpace.discrete(1), s2).space == s2


@pytest.mark.parametrize("x,y", PAIRS_LE2 + [(SPACES[3][7], SPACES[3][20])])
def test_product_order_and_box_form(x, y):
    ps = product(x, y)
    for a, b, a2, b2 in itertools.product(range(x.n), range(y.n), range(x.n), range(y.n)):
        assert ps.space.leq(ps.index(a, b), ps.index(a2, b2)) == (x.leq(a, a2) and y.leq(b, b2))
    for a in range(x.n):
        for b in range(y.n):
            box = {ps.index(u, v) for u in minimal_open(x, a) for v in minimal_open(y, b)}
            assert set(minimal_open(ps.space, ps.index(a, b))) == box


def test_subset_out_of_range(s2):
    with pytest.raises(ValueError):
        sub(s2, s2, (2, 0))


# --- rectangles and decomposition --------------------------------------------


def test_is_rectangle_examples(disc2):
    assert is_rectangle(sub(disc2, disc2, (0, 0), (0, 1), (1, 0), (1, 1)))
    assert not is_rectangle(sub(disc2, disc2, (0, 0), (1, 1)))
    assert is_rectangle(sub(disc2, disc2))


def test_decompose_examples(s2, disc2):
    d = decompose(sub(s2, s2, (0, 1), (1, 1)))
    assert (set(d.a), set(d.b), d.exact) == ({0, 1}, {1}, True)
    d = decompose(sub(disc2, disc2, (0, 0), (1, 1)))
    assert (set(d.a), set(d.b), d.exact) == ({0, 1}, {0, 1}, False)
    d = decompose(sub(disc2, disc2))
    assert (set(d.a), set(d.b), d.exact) == (set(), set(), True)


@pytest.mark.parametrize("nx,ny", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 3)])
def test_decompose_contains_and_exact_iff_rectangle(nx, ny):
    ps = product(FiniteSpace.discrete(nx), FiniteSpace.discrete(ny))
    for c in all_subsets(ps):
        d = decompose(c)
        assert all(a in d.a and b in d.b for a, b in c.pairs)
        assert d.exact == is_rectangle(c) == oracles.is_rect(c.pairs)
        assert d.exact == (len(c.pairs) == len(d.a) * len(d.b))


def test_rectangles_restrict_to_rectangles():
    # Every open box of every topology on <= 3 points is in particular a box
    # of arbitrary subsets, so ranging over all subsets covers them all.
    pts = range(3)
    boxes = [(u, v) for u in oracles.subsets(pts) for v in oracles.subsets(pts)]
    for a, b in boxes:
        rect = set(itertools.product(a, b))
        for u, v in boxes:
            cut = {(p, q) for p, q in rect if p in u and q in v}
            assert oracles.is_rect(cut)


# --- local product certificate -----------------------------------------------


def test_certificate_ok_on_column(s2):
    cert = local_product_certificate(sub(s2, s2, (0, 1), (1, 1)))
    assert cert.ok and cert.status == "ok" and cert.failing is None
    for w in cert.witnesses:
        assert w.rectangle
        assert set(w.i) <= set(w.u) and set(w.j) <= set(w.v)


def test_certificate_fails_at_bottom(s2):
    cert = local_product_certificate(sub(s2, s2, (0, 1), (1, 0), (1, 1)))
    assert cert.status == "fail"
    assert cert.failing == (0, 0)


def test_certificate_discrete_diagonal(disc2):
    assert local_product_certificate(sub(disc2, disc2, (0, 0), (1, 1))).ok


def test_certificate_checks_points_outside_c(s2, disc2):
    # Every point of the anti-diagonal passes; only the box around (0, 0),
    # which is not in C, sees both points at once.
    c = sub(s2, s2, (0, 1), (1, 0))
    cert = local_product_certificate(c)
    assert cert.failing == (0, 0)
    assert all(w.rectangle for w in cert.witnesses if w.point in c.pairs)


@pytest.mark.parametrize("x,y", PAIRS_LE2)
def test_minimal_box_matches_all_open_boxes(x, y):
    ps = product(x, y)
    ox = oracles.opens_from_leq(x.n, x.leq)
    oy = oracles.opens_from_leq(y.n, y.leq)
    for c in all_subsets(ps):
        expect = oracles.locally_product_by_all_boxes(x.n, y.n, ox, oy, c.pairs)
        assert local_product_certificate(c).ok == expect


# --- verdicts ----------------------------------------------------------------


def test_verdict_full_box(s2):
    ps = product(s2, s2)
    top = PointSet.of(4, [ps.index(1, 1)])
    c = SubsetC.from_mask(ps, closure(ps.space, top).bits)
    v = theorem_verdict(c)
    assert len(c.pairs) == 4
    assert v.hypotheses.holds() and v.conclusion_holds


def test_verdict_discrete_diagonal_needs_path_connectedness(disc2):
    v = theorem_verdict(sub(disc2, disc2, (0, 0), (1, 1)))
    h = v.hypotheses
    assert (h.closed, h.locally_product, h.path_connected) == (True, True, False)
    assert not v.conclusion_holds


def test_verdict_column_not_closed(s2):
    c = sub(s2, s2, (0, 1), (1, 1))
    v = theorem_verdict(c)
    h = v.hypotheses
    assert (h.closed, h.locally_product, h.path_connected) == (False, True, True)
    assert v.conclusion_holds
    assert set(c.owner.pairs_of(closure(c.owner.space, PointSet(4, c.mask)).bits)) == {
        (0, 0), (0, 1), (1, 0), (1, 1)
    }


def test_verdict_empty_set(s2):
    v = theorem_verdict(sub(s2, s2))
    assert v.hypotheses.holds() and v.conclusion_holds
    v = theorem_verdict(sub(s2, s2), empty_connected=False)
    assert not v.hypotheses.path_connected


def test_theorem_violation_signal(monkeypatch, disc2):
    mod = importlib.import_module("locprod.product")
    monkeypatch.setattr(mod, "is_connected_mask", lambda *a, **k: True)
    with pytest.raises(TheoremViolation) as exc:
        theorem_verdict(sub(disc2, disc2, (0, 0), (1, 1)))
    assert not exc.value.payload.conclusion_holds


@pytest.mark.parametrize("x,y", PAIRS_LE2)
def test_verdict_flags_match_oracles(x, y):
    ps = product(x, y)
    ox = oracles.opens_from_leq(x.n, x.leq)
    oy = oracles.opens_from_leq(y.n, y.leq)
    opens = oracles.opens_from_leq(ps.space.n, ps.space.leq)
    everything = frozenset(range(ps.space.n))
    for c in all_subsets(ps):
        v = theorem_verdict(c)
        flat = frozenset(ps.index(a, b) for a, b in c.pairs)
        assert v.hypotheses.closed == ((everything - flat) in opens)
        assert v.hypotheses.path_connected == oracles.fence_connected(flat, ps.space.comparable)
        assert v.hypotheses.locally_product == oracles.locally_product_by_all_boxes(
            x.n, y.n, ox, oy, c.pairs
        )
        assert v.conclusion_holds == oracles.is_rect(c.pairs)
        flags = evaluate_mask(ps, c.mask)
        assert flags == (
            v.hypotheses.closed,
            v.hypotheses.path_connected,
            v.hypotheses.locally_product,
            v.conclusion_holds,
        )


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SPACES[3]), st.sampled_from(SPACES[3]), st.integers(0, 511))
def test_theorem_on_random_three_point_pairs(x, y, mask):
    ps = product(x, y)
    v = theorem_verdict(SubsetC.from_mask(ps, mask))
    if v.hypotheses.holds(HYPOTHESES):
        assert v.conclusion_holds


# --- mixed pairs -------------------------------------------------------------


def test_mixed_pairs_single_point(disc2):
    assert mixed_pair_property(sub(disc2, disc2, (0, 1)), [(0, 1)])


def test_mixed_pairs_full_box(s2):
    c = sub(s2, s2, (0, 0), (0, 1), (1, 0), (1, 1))
    assert mixed_pair_property(c, [(0, 0), (0, 1), (1, 1), (1, 0), (0, 0)])


def test_mixed_pairs_detect_missing_corner(s2):
    # An L-shaped fence through (1, 1): its mixed pair (0, 0) is not in C.
    c = sub(s2, s2, (0, 1), (1, 1), (1, 0))
    assert not mixed_pair_property(c, [(0, 1), (1, 1), (1, 0)])


def test_mixed_pairs_reject_bad_fences(s2, disc2):
    with pytest.raises(InvalidFence):
        mixed_pair_property(sub(disc2, disc2, (0, 0), (1, 1)), [(0, 0), (1, 1)])
    with pytest.raises(InvalidFence):
        mixed_pair_property(sub(s2, s2, (0, 1)), [(0, 1), (1, 1)])


def test_mixed_pairs_on_good_subsets_n2():
    for x, y in PAIRS_LE2:
        ps = product(x, y)
        for c in all_subsets(ps):
            if not theorem_verdict(c).hypotheses.holds():
                continue
            pts = sorted(c.pairs)
            for length in range(1, 4):
                for path in itertools.product(pts, repeat=length):
                    flat = [ps.index(*p) for p in path]
                    if all(ps.space.comparable(p, q) for p, q in zip(flat, flat[1:])):
                        assert mixed_pair_property(c, list(path))

