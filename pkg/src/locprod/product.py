"""Subsets of a product of two finite spaces and the local-to-global test.

A subset ``C`` of ``X x Y`` is *locally a product* when every point
``(a, b)`` of ``X x Y`` (member of ``C`` or not) has an open box ``U x V``
around it on which ``C`` restricts to a rectangle ``I x J``.  It is enough
to look at the minimal box ``up(a) x up(b)``: every open box around the
point contains it, and a rectangle intersected with a box is again a
rectangle.

The claim checked here is that a closed, path-connected, locally product
subset is globally a rectangle, namely the product of its two projections.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .space import (
    FiniteSpace,
    InputError,
    PointSet,
    bits_of,
    is_closed_mask,
    is_connected_mask,
)

HYPOTHESES = ("closed", "path_connected", "locally_product")


class TheoremViolation(AssertionError):
    """A closed, path-connected, locally product subset that is not a rectangle."""

    def __init__(self, message: str, payload: object = None) -> None:
        super().__init__(message)
        self.payload = payload


class InvalidFence(ValueError):
    pass


class Grid:
    """Bit tricks for an ``nx`` by ``ny`` grid of flat indices ``a*ny + b``."""

    TABLE_LIMIT = 16

    def __init__(self, nx: int, ny: int) -> None:
        self.nx, self.ny = nx, ny
        self.size = nx * ny
        self.rows = tuple(((1 << ny) - 1) << (a * ny) for a in range(nx))
        self.cols = tuple(sum(1 << (a * ny + b) for a in range(nx)) for b in range(ny))
        self._rect: bytearray | None = None
        if self.size <= self.TABLE_LIMIT:
            n = 1 << self.size
            self._rect = bytearray(n)
            for m in range(n):
                self._rect[m] = self._is_rect_direct(m)

    def proj_x(self, mask: int) -> int:
        return sum(1 << a for a, row in enumerate(self.rows) if mask & row)

    def proj_y(self, mask: int) -> int:
        return sum(1 << b for b, col in enumerate(self.cols) if mask & col)

    def box(self, xmask: int, ymask: int) -> int:
        rows = 0
        for a in bits_of(xmask):
            rows |= self.rows[a]
        cols = 0
        for b in bits_of(ymask):
            cols |= self.cols[b]
        return rows & cols

    def _is_rect_direct(self, mask: int) -> bool:
        return self.box(self.proj_x(mask), self.proj_y(mask)) == mask

    def is_rect(self, mask: int) -> bool:
        if self._rect is not None:
            return bool(self._rect[mask])
        return self._is_rect_direct(mask)


@lru_cache(maxsize=None)
def grid(nx: int, ny: int) -> Grid:
    return Grid(nx, ny)


@dataclass(frozen=True)
class ProductSpace:
    """``X x Y`` with the componentwise preorder; ``(a, b)`` has index ``a*|Y| + b``."""

    x: FiniteSpace
    y: FiniteSpace
    space: FiniteSpace = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        g = grid(self.x.n, self.y.n)
        up = tuple(
            g.box(self.x.up[a], self.y.up[b]) for a in range(self.x.n) for b in range(self.y.n)
        )
        object.__setattr__(self, "space", FiniteSpace(g.size, up))

    @property
    def grid(self) -> Grid:
        return grid(self.x.n, self.y.n)

    def index(self, a: int, b: int) -> int:
        self.x.check_point(a)
        self.y.check_point(b)
        return a * self.y.n + b

    def pair(self, i: int) -> tuple[int, int]:
        self.space.check_point(i)
        return divmod(i, self.y.n)

    def pairs_of(self, mask: int) -> list[tuple[int, int]]:
        return [divmod(i, self.y.n) for i in bits_of(mask)]


def product(x: FiniteSpace, y: FiniteSpace) -> ProductSpace:
    return ProductSpace(x, y)


@dataclass(frozen=True)
class SubsetC:
    """A subset of a product space, given as a set of pairs."""

    owner: ProductSpace
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for a, b in self.pairs:
            self.owner.index(a, b)

    @classmethod
    def of(cls, owner: ProductSpace, pairs: Iterable[tuple[int, int]]) -> SubsetC:
        return cls(owner, frozenset((int(a), int(b)) for a, b in pairs))

    @classmethod
    def from_mask(cls, owner: ProductSpace, mask: int) -> SubsetC:
        return cls(owner, frozenset(owner.pairs_of(mask)))

    @property
    def mask(self) -> int:
        ny = self.owner.y.n
        m = 0
        for a, b in self.pairs:
            m |= 1 << (a * ny + b)
        return m

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)


@dataclass(frozen=True)
class Witness:
    point: tuple[int, int]
    u: PointSet
    v: PointSet
    i: PointSet
    j: PointSet
    rectangle: bool


@dataclass(frozen=True)
class LocalProductCertificate:
    """Outcome of the local product test on every point of ``X x Y``.

    ``failing`` is the first point (in ``(a, b)`` order) whose minimal box
    cuts ``C`` in a non-rectangle.  ``witnesses`` lists, for every point, the
    box ``U x V`` and the projections ``I``, ``J`` of ``C`` cut by it; it is
    built on first access.
    """

    owner: ProductSpace
    mask: int
    failing: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.failing is None

    @property
    def status(self) -> str:
        return "ok" if self.ok else "fail"

    @cached_property
    def witnesses(self) -> tuple[Witness, ...]:
        ps, g = self.owner, self.owner.grid
        out = []
        for p in range(g.size):
            a, b = divmod(p, ps.y.n)
            cut = self.mask & ps.space.up[p]
            out.append(
                Witness(
                    point=(a, b),
                    u=PointSet(ps.x.n, ps.x.up[a]),
                    v=PointSet(ps.y.n, ps.y.up[b]),
                    i=PointSet(ps.x.n, g.proj_x(cut)),
                    j=PointSet(ps.y.n, g.proj_y(cut)),
                    rectangle=g.is_rect(cut),
                )
            )
        return tuple(out)


@dataclass(frozen=True)
class Decomposition:
    a: PointSet
    b: PointSet
    exact: bool


@dataclass(frozen=True)
class Hypotheses:
    closed: bool
    path_connected: bool
    locally_product: bool

    def holds(self, required: Iterable[str] = HYPOTHESES) -> bool:
        return all(getattr(self, name) for name in required)


@dataclass(frozen=True)
class TheoremVerdict:
    hypotheses: Hypotheses
    conclusion_holds: bool
    decomposition: Decomposition
    certificate: LocalProductCertificate


# --- fast mask evaluation (shared with the sweep harness) -------------------


def first_nonlocal_point(ps: ProductSpace, mask: int) -> int | None:
    """Flat index of the first point whose minimal box cuts ``mask`` badly."""
    g, up = ps.grid, ps.space.up
    for p in range(g.size):
        if not g.is_rect(mask & up[p]):
            return p
    return None


def evaluate_mask(
    ps: ProductSpace, mask: int, empty_connected: bool = True
) -> tuple[bool, bool, bool, bool]:
    """``(closed, path_connected, locally_product, exact)`` for the subset ``mask``."""
    sp = ps.space
    return (
        is_closed_mask(sp, mask),
        is_connected_mask(sp, mask, empty_connected),
        first_nonlocal_point(ps, mask) is None,
        ps.grid.is_rect(mask),
    )


# --- public operations -----------------------------------------------------


def is_rectangle(c: SubsetC) -> bool:
    """Whether ``C`` equals the product of its projections (the empty set does)."""
    return c.owner.grid.is_rect(c.mask)


def local_product_certificate(c: SubsetC) -> LocalProductCertificate:
    """Test the minimal box around every point of ``X x Y``, members of ``C`` or not."""
    ps, mask = c.owner, c.mask
    bad = first_nonlocal_point(ps, mask)
    return LocalProductCertificate(ps, mask, None if bad is None else ps.pair(bad))


def decompose(c: SubsetC) -> Decomposition:
    ps, mask = c.owner, c.mask
    g = ps.grid
    a, b = g.proj_x(mask), g.proj_y(mask)
    return Decomposition(PointSet(ps.x.n, a), PointSet(ps.y.n, b), g.box(a, b) == mask)


def theorem_verdict(c: SubsetC, empty_connected: bool = True) -> TheoremVerdict:
    """Evaluate all three hypotheses and the conclusion for ``C``.

    Raises :class:`TheoremViolation` if the hypotheses hold but ``C`` is not
    the product of its projections.
    """
    sp, mask = c.owner.space, c.mask
    cert = local_product_certificate(c)
    hyp = Hypotheses(
        closed=is_closed_mask(sp, mask),
        path_connected=is_connected_mask(sp, mask, empty_connected),
        locally_product=cert.ok,
    )
    dec = decompose(c)
    verdict = TheoremVerdict(hyp, dec.exact, dec, cert)
    if hyp.holds() and not dec.exact:
        raise TheoremViolation(
            f"closed, path-connected, locally product subset {c.sorted_pairs()} "
            "is not a product of its projections",
            verdict,
        )
    return verdict


def check_fence(c: SubsetC, path: Sequence[tuple[int, int]]) -> None:
    """Raise :class:`InvalidFence` unless ``path`` is a comparability path in ``C``."""
    ps = c.owner
    for k, (a, b) in enumerate(path):
        if (a, b) not in c.pairs:
            raise InvalidFence(f"fence point {k} = {(a, b)} is not in C")
    for k in range(len(path) - 1):
        p, q = ps.index(*path[k]), ps.index(*path[k + 1])
        if not ps.space.comparable(p, q):
            raise InvalidFence(f"fence points {k} and {k + 1} are not comparable")


def mixed_pairs_ok(ps: ProductSpace, mask: int, xs: int, ys: int) -> bool:
    """Whether every pair (x in xs, y in ys) lies in ``mask``."""
    return not (ps.grid.box(xs, ys) & ~mask)


def mixed_pair_property(c: SubsetC, path: Sequence[tuple[int, int]]) -> bool:
    """Whether every mixed pair ``(x of path[i], y of path[j])`` lies in ``C``."""
    check_fence(c, path)
    xs = ys = 0
    for a, b in path:
        xs |= 1 << a
        ys |= 1 << b
    return mixed_pairs_ok(c.owner, c.mask, xs, ys)
