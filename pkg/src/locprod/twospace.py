"""Finite models of 2-spaces: spaces with an atlas of charts onto products.

A chart sends an open set ``W_phi`` of the base homeomorphically onto
``U_phi x V_phi``.  Two charts are compatible at a point ``c`` of their
overlap when, on some open box ``M x N`` around ``phi1(c)``, the preimage
lies inside ``W_phi2`` and the transition ``phi2 . phi1^-1`` acts as
``(u, v) -> (f(u), g(v))``.  A 2-map is a continuous map whose chart
expressions split in the same way.

All existence checks use the minimal open box around the chart image of the
point.  Any witness box contains the minimal one, the containment condition
survives shrinking the box, and a split map stays split on a smaller box, so
the minimal box is a witness whenever any box is.

2-homotopy (a continuous family ``H(t, .)`` of 2-maps over ``t in [0, 1]``)
is a continuum notion and is not modelled.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

from .product import ProductSpace, SubsetC, local_product_certificate, product
from .space import FiniteSpace, InputError, PointSet, bits_of, is_continuous, is_up_closed, mask_of, subspace


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ChartRec:
    """A chart ``W_phi -> U_phi x V_phi``.

    ``forward`` maps base points of the domain to ``(u, v)`` coordinates and
    ``inverse`` is its two-sided inverse.  Both are kept explicitly so that a
    broken inverse is caught by :func:`check_chart`.
    """

    domain: PointSet
    u_space: FiniteSpace
    v_space: FiniteSpace
    forward: Mapping[int, tuple[int, int]]
    inverse: Mapping[tuple[int, int], int]

    @classmethod
    def from_forward(
        cls,
        domain: PointSet,
        u_space: FiniteSpace,
        v_space: FiniteSpace,
        forward: Mapping[int, tuple[int, int]],
    ) -> ChartRec:
        forward = dict(forward)
        inverse = {uv: w for w, uv in sorted(forward.items())}
        return cls(domain, u_space, v_space, forward, inverse)

    def image_space(self) -> ProductSpace:
        return product(self.u_space, self.v_space)


@dataclass(frozen=True)
class TwoSpaceModel:
    base: FiniteSpace
    charts: tuple[ChartRec, ...] = ()


@dataclass(frozen=True)
class TwoMapRec:
    source: TwoSpaceModel
    target: TwoSpaceModel
    h: tuple[int, ...]


@dataclass(frozen=True)
class ChartCheck:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Report:
    """Outcome of validating a 2-space or a 2-map.

    ``ok`` is the plain verdict.  ``strict_ok`` is only filled in strict mode
    and additionally asks for the component maps ``f`` and ``g`` to be
    continuous.  ``where`` locates the first failure.
    """

    ok: bool
    reason: str | None = None
    where: dict = field(default_factory=dict)
    strict_ok: bool | None = None
    strict_reason: str | None = None
    strict_where: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def check_chart(base: FiniteSpace, chart: ChartRec) -> ChartCheck:
    dom = chart.domain
    if dom.n != base.n:
        return ChartCheck(False, "not-open")
    if not is_up_closed(base, dom.bits):
        return ChartCheck(False, "not-open")
    nu, nv = chart.u_space.n, chart.v_space.n
    members = list(dom)
    if set(chart.forward) != set(members):
        return ChartCheck(False, "not-bijective")
    if any(not (0 <= u < nu and 0 <= v < nv) for u, v in chart.forward.values()):
        return ChartCheck(False, "not-bijective")
    if len(set(chart.forward.values())) != len(members) or len(members) != nu * nv:
        return ChartCheck(False, "not-bijective")
    if len(chart.inverse) != len(members) or any(
        chart.forward.get(w) != uv for uv, w in chart.inverse.items()
    ):
        return ChartCheck(False, "not-bijective")

    sub, pts = subspace(base, dom)
    image = chart.image_space()
    fwd = [image.index(*chart.forward[p]) for p in pts]
    if not is_continuous(fwd, sub, image.space):
        return ChartCheck(False, "not-continuous")
    local = {p: i for i, p in enumerate(pts)}
    inv = [local[chart.inverse[image.pair(k)]] for k in range(image.space.n)]
    if not is_continuous(inv, image.space, sub):
        return ChartCheck(False, "inverse-not-continuous")
    return ChartCheck(True)


def _split(
    mbox: Sequence[int], nbox: Sequence[int], tau: Callable[[int, int], tuple[int, int]]
) -> tuple[dict[int, int], dict[int, int]] | None:
    """Component maps ``(f, g)`` if ``tau`` splits on ``mbox x nbox``, else None."""
    f: dict[int, int] = {}
    g: dict[int, int] = {}
    for u in mbox:
        for v in nbox:
            fu, gv = tau(u, v)
            if f.setdefault(u, fu) != fu or g.setdefault(v, gv) != gv:
                return None
    return f, g


def _components_continuous(
    f: dict[int, int], g: dict[int, int], src: ChartRec, dst: ChartRec
) -> bool:
    for comp, s_space, d_space in ((f, src.u_space, dst.u_space), (g, src.v_space, dst.v_space)):
        dom = PointSet.of(s_space.n, comp)
        sub, pts = subspace(s_space, dom)
        if not is_continuous([comp[p] for p in pts], sub, d_space):
            return False
    return True


def _box_check(
    src: ChartRec,
    c: int,
    allowed: int,
    dst: ChartRec,
    through: Callable[[int], int],
    strict: bool,
) -> tuple[str | None, str | None]:
    """Minimal-box test shared by compatibility and 2-map checks.

    Returns ``(plain_failure, strict_failure)`` reason codes, None meaning
    success.  ``allowed`` is the mask of source base points that may be mapped
    into ``dst``'s domain, ``through`` the base map applied before ``dst``.
    """
    u0, v0 = src.forward[c]
    mbox = list(bits_of(src.u_space.up[u0]))
    nbox = list(bits_of(src.v_space.up[v0]))
    pre = mask_of(src.inverse[(u, v)] for u in mbox for v in nbox)
    if pre & ~allowed:
        return "box-not-contained", "box-not-contained"
    split = _split(mbox, nbox, lambda u, v: dst.forward[through(src.inverse[(u, v)])])
    if split is None:
        return "not-split", "not-split"
    if strict and not _components_continuous(*split, src, dst):
        return None, "components-not-continuous"
    return None, None


def _compatibility(w: TwoSpaceModel, i: int, j: int, c: int, strict: bool):
    p1, p2 = w.charts[i], w.charts[j]
    if c not in p1.domain or c not in p2.domain:
        raise PreconditionError(f"point {c} is not in the overlap of charts {i} and {j}")
    return _box_check(p1, c, p2.domain.bits, p2, lambda x: x, strict)


def check_compatibility(
    w: TwoSpaceModel, i: int, j: int, c: int, strict: bool = False
) -> bool:
    """Condition (3) for the ordered chart pair ``(i, j)`` at the point ``c``."""
    plain, strict_fail = _compatibility(w, i, j, c, strict)
    return (strict_fail if strict else plain) is None


def validate_two_space(w: TwoSpaceModel, strict: bool = False) -> Report:
    for k, chart in enumerate(w.charts):
        res = check_chart(w.base, chart)
        if not res:
            return _report((res.reason, {"chart": k}), (res.reason, {"chart": k}), strict)
    covered = 0
    for chart in w.charts:
        covered |= chart.domain.bits
    if covered != w.base.full:
        missing = {"point": next(bits_of(w.base.full & ~covered))}
        return _report(("not-covered", missing), ("not-covered", missing), strict)

    plain: tuple[str, dict] | None = None
    strict_bad: tuple[str, dict] | None = None
    for i, p1 in enumerate(w.charts):
        for j, p2 in enumerate(w.charts):
            for c in bits_of(p1.domain.bits & p2.domain.bits):
                fail, sfail = _compatibility(w, i, j, c, strict)
                where = {"chart_1": i, "chart_2": j, "point": c}
                if fail and plain is None:
                    plain = (fail, where)
                if sfail and strict_bad is None:
                    strict_bad = (sfail, where)
                if plain is not None and (not strict or strict_bad is not None):
                    return _report(plain, strict_bad, strict)
    return _report(plain, strict_bad, strict)


def _report(plain, strict_bad, strict: bool) -> Report:
    ok = plain is None
    reason, where = plain if plain else (None, {})
    if not strict:
        return Report(ok, reason, where)
    sreason, swhere = strict_bad if strict_bad else (None, {})
    return Report(ok, reason, where, strict_bad is None, sreason, swhere)


def check_two_map(m: TwoMapRec, strict: bool = False) -> Report:
    """Check that ``h`` is a 2-map; the report names the first failing ``(c, phi1, phi2)``."""
    src, dst, h = m.source, m.target, m.h
    if len(h) != src.base.n or any(not 0 <= x < dst.base.n for x in h):
        raise InputError("2-map does not send every source point into the target base")
    if not is_continuous(h, src.base, dst.base):
        return _report(("not-continuous", {}), ("not-continuous", {}), strict)

    plain: tuple[str, dict] | None = None
    strict_bad: tuple[str, dict] | None = None
    for c in range(src.base.n):
        for i, p1 in enumerate(src.charts):
            if c not in p1.domain:
                continue
            for j, p2 in enumerate(dst.charts):
                if h[c] not in p2.domain:
                    continue
                allowed = mask_of(x for x in range(src.base.n) if h[x] in p2.domain)
                fail, sfail = _box_check(p1, c, allowed, p2, h.__getitem__, strict)
                where = {"point": c, "source_chart": i, "target_chart": j}
                if fail and plain is None:
                    plain = (fail, where)
                if sfail and strict_bad is None:
                    strict_bad = (sfail, where)
                if plain is not None and (not strict or strict_bad is not None):
                    return _report(plain, strict_bad, strict)
    return _report(plain, strict_bad, strict)


# --- constructions -------------------------------------------------------


def single_chart_model(u: FiniteSpace, v: FiniteSpace) -> TwoSpaceModel:
    """``U x V`` with the identity chart."""
    ps = product(u, v)
    forward = {k: ps.pair(k) for k in range(ps.space.n)}
    chart = ChartRec.from_forward(PointSet(ps.space.n, ps.space.full), u, v, forward)
    return TwoSpaceModel(ps.space, (chart,))


def from_locally_product_subset(c: SubsetC) -> TwoSpaceModel:
    """The 2-space carried by a locally product subset ``C``.

    The base is ``C`` as a subspace, its points numbered in increasing flat
    order.  Each point ``(a, b)`` of ``C`` contributes the chart with domain
    ``C`` cut by the minimal box around ``(a, b)``, which is ``I x J``.
    """
    cert = local_product_certificate(c)
    if not cert.ok:
        raise PreconditionError(f"C is not locally a product (fails at {cert.failing})")
    ps, mask = c.owner, c.mask
    base, members = subspace(ps.space, PointSet(ps.space.n, mask))
    local = {p: k for k, p in enumerate(members)}
    charts = []
    for p in members:
        cut = mask & ps.space.up[p]
        g = ps.grid
        ix, jx = PointSet(ps.x.n, g.proj_x(cut)), PointSet(ps.y.n, g.proj_y(cut))
        u_space, u_pts = subspace(ps.x, ix)
        v_space, v_pts = subspace(ps.y, jx)
        u_at = {a: k for k, a in enumerate(u_pts)}
        v_at = {b: k for k, b in enumerate(v_pts)}
        forward = {}
        for q in bits_of(cut):
            a, b = ps.pair(q)
            forward[local[q]] = (u_at[a], v_at[b])
        domain = PointSet.of(base.n, forward)
        charts.append(ChartRec.from_forward(domain, u_space, v_space, forward))
    return TwoSpaceModel(base, tuple(charts))


def two_product(w1: TwoSpaceModel, w2: TwoSpaceModel) -> TwoSpaceModel:
    """The 2-product: base ``W1 x W2`` and charts ``(phi1, phi2)`` reshuffled
    to land in ``(U1 x U2) x (V1 x V2)``."""
    for k, w in enumerate((w1, w2), 1):
        rep = validate_two_space(w)
        if not rep:
            raise PreconditionError(f"factor {k} is not a valid 2-space: {rep.reason}")
    base = product(w1.base, w2.base)
    n2 = w2.base.n
    charts = []
    for p1 in w1.charts:
        for p2 in w2.charts:
            uu = product(p1.u_space, p2.u_space)
            vv = product(p1.v_space, p2.v_space)
            forward = {}
            for a in p1.domain:
                ua, va = p1.forward[a]
                for b in p2.domain:
                    ub, vb = p2.forward[b]
                    forward[a * n2 + b] = (uu.index(ua, ub), vv.index(va, vb))
            domain = PointSet.of(base.space.n, forward)
            charts.append(ChartRec.from_forward(domain, uu.space, vv.space, forward))
    return TwoSpaceModel(base.space, tuple(charts))


def compose(first: TwoMapRec, second: TwoMapRec) -> TwoMapRec:
    """``second . first``."""
    if first.target != second.source:
        raise InputError("maps are not composable")
    return TwoMapRec(first.source, second.target, tuple(second.h[x] for x in first.h))


def identity_map(w: TwoSpaceModel) -> TwoMapRec:
    return TwoMapRec(w, w, tuple(range(w.base.n)))


def pseudocircle() -> FiniteSpace:
    """Four points a, b, c, d = 0..3; a and b open, minimal opens {a,b,c} and {a,b,d}."""
    return FiniteSpace.from_relation(4, [(2, 0), (2, 1), (3, 0), (3, 1)])


def pseudocircle_swap() -> TwoMapRec:
    """The swap ``{pt} x P -> P x {pt}``, a homeomorphism that is not a 2-map."""
    pt, circle = FiniteSpace.discrete(1), pseudocircle()
    source = single_chart_model(pt, circle)
    target = single_chart_model(circle, pt)
    # Flat indices agree: (0, p) -> p and (p, 0) -> p.
    return TwoMapRec(source, target, tuple(range(circle.n)))
