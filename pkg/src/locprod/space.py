"""Finite topological spaces encoded by their specialization preorder.

Convention used throughout the package: ``leq(x, y)`` means ``x`` lies in the
closure of ``{y}``.  Open sets are the up-closed sets, the minimal open
neighbourhood of ``x`` is its up-set, and the closure of ``{y}`` is its
down-set.

Point sets are stored as integer bitmasks (bit ``i`` set iff point ``i`` is a
member).  :class:`PointSet` wraps a mask together with the size of its ambient
space so that it can be compared, iterated and printed.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field


class InputError(ValueError):
    """Raised for malformed input: bad point indices, non-preorders, ..."""


def bits_of(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(points: Iterable[int]) -> int:
    mask = 0
    for p in points:
        mask |= 1 << p
    return mask


def lex_key(mask: int, n: int) -> tuple[int, ...]:
    """Sort key giving lexicographic order on membership vectors."""
    return tuple((mask >> i) & 1 for i in range(n))


@dataclass(frozen=True)
class PointSet:
    """A subset of the points ``0..n-1`` of some finite space."""

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.n:
            raise InputError(f"point set {self.bits:#x} does not fit in {self.n} points")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> PointSet:
        members = list(members)
        for p in members:
            if not 0 <= p < n:
                raise InputError(f"point {p} out of range for a space of {n} points")
        return cls(n, mask_of(members))

    @property
    def vector(self) -> tuple[bool, ...]:
        return tuple(bool((self.bits >> i) & 1) for i in range(self.n))

    def __contains__(self, p: object) -> bool:
        return isinstance(p, int) and 0 <= p < self.n and bool((self.bits >> p) & 1)

    def __iter__(self) -> Iterator[int]:
        return bits_of(self.bits)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __repr__(self) -> str:
        return f"PointSet({self.n}, {set(self) or '{}'})"


@dataclass(frozen=True)
class FiniteSpace:
    """A finite topological space given by its specialization preorder.

    ``up[x]`` is the bitmask of ``{y : leq(x, y)}``, i.e. the minimal open set
    around ``x``.  The constructor checks reflexivity and transitivity; use
    :meth:`from_relation` to build a space from generating pairs.
    """

    n: int
    up: tuple[int, ...]
    down: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.up) != self.n:
            raise InputError(f"expected {self.n} up-sets, got {len(self.up)}")
        full = (1 << self.n) - 1
        for x, ux in enumerate(self.up):
            if ux & ~full:
                raise InputError(f"up-set of point {x} mentions points outside 0..{self.n - 1}")
            if not (ux >> x) & 1:
                raise InputError(f"relation is not reflexive at point {x}")
            for y in bits_of(ux):
                if self.up[y] & ~ux:
                    raise InputError(f"relation is not transitive through {x} <= {y}")
        down = [0] * self.n
        for x, ux in enumerate(self.up):
            for y in bits_of(ux):
                down[y] |= 1 << x
        object.__setattr__(self, "down", tuple(down))

    @classmethod
    def from_relation(
        cls, n: int, pairs: Iterable[tuple[int, int]], strict: bool = False
    ) -> FiniteSpace:
        """Build the space whose preorder is generated by ``pairs``.

        With ``strict=True`` the pairs must already be reflexive-transitively
        closed (reflexive pairs may be omitted); otherwise the closure is taken.
        """
        if n < 0:
            raise InputError(f"negative point count {n}")
        up = [1 << x for x in range(n)]
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"relation pair ({i}, {j}) out of range for {n} points")
            up[i] |= 1 << j
        given = list(up)
        # Warshall on bitmask rows.
        for k in range(n):
            bit = 1 << k
            for i in range(n):
                if up[i] & bit:
                    up[i] |= up[k]
        if strict and up != given:
            bad = next(i for i in range(n) if up[i] != given[i])
            raise InputError(f"relation is not transitively closed at point {bad}")
        return cls(n, tuple(up))

    @classmethod
    def discrete(cls, n: int) -> FiniteSpace:
        return cls(n, tuple(1 << x for x in range(n)))

    @classmethod
    def indiscrete(cls, n: int) -> FiniteSpace:
        return cls(n, tuple([(1 << n) - 1] * n))

    @classmethod
    def sierpinski(cls) -> FiniteSpace:
        """Two points, ``{1}`` open, so ``0`` lies in the closure of ``1``."""
        return cls.from_relation(2, [(0, 1)])

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def leq(self, x: int, y: int) -> bool:
        return bool((self.up[x] >> y) & 1)

    def comparable(self, x: int, y: int) -> bool:
        return bool(((self.up[x] | self.down[x]) >> y) & 1)

    def relation(self) -> list[tuple[int, int]]:
        """Strict part of the normalized preorder, in canonical order."""
        return [(x, y) for x in range(self.n) for y in bits_of(self.up[x]) if x != y]

    def check_point(self, x: int) -> None:
        if not (isinstance(x, int) and 0 <= x < self.n):
            raise InputError(f"point {x!r} out of range for a space of {self.n} points")

    def check_set(self, s: PointSet) -> None:
        if s.n != self.n:
            raise InputError(f"point set over {s.n} points used with a space of {self.n} points")


# --- mask-level primitives -------------------------------------------------


def is_up_closed(space: FiniteSpace, mask: int) -> bool:
    return all(not (space.up[x] & ~mask) for x in bits_of(mask))


def closure_mask(space: FiniteSpace, mask: int) -> int:
    out = 0
    for y in bits_of(mask):
        out |= space.down[y]
    return out


def is_closed_mask(space: FiniteSpace, mask: int) -> bool:
    return all(not (space.down[y] & ~mask) for y in bits_of(mask))


def component_mask(space: FiniteSpace, mask: int, start: int) -> int:
    """Points of ``mask`` reachable from ``start`` along comparabilities."""
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        for p in bits_of(frontier):
            nxt |= space.up[p] | space.down[p]
        nxt &= mask & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def is_connected_mask(space: FiniteSpace, mask: int, empty: bool = True) -> bool:
    if not mask:
        return empty
    start = (mask & -mask).bit_length() - 1
    return component_mask(space, mask, start) == mask


def all_open_masks(space: FiniteSpace) -> list[int]:
    # Every up-set is a union of minimal opens.
    opens = {0}
    for x in range(space.n):
        opens |= {o | space.up[x] for o in opens}
    return sorted(opens, key=lambda m: lex_key(m, space.n))


# --- public operations -----------------------------------------------------


def minimal_open(space: FiniteSpace, x: int) -> PointSet:
    """Smallest open set containing ``x`` (its up-set)."""
    space.check_point(x)
    return PointSet(space.n, space.up[x])


def all_opens(space: FiniteSpace) -> list[PointSet]:
    """All open sets, ordered lexicographically by membership vector."""
    return [PointSet(space.n, m) for m in all_open_masks(space)]


def is_open(space: FiniteSpace, s: PointSet) -> bool:
    space.check_set(s)
    return is_up_closed(space, s.bits)


def closure(space: FiniteSpace, s: PointSet) -> PointSet:
    space.check_set(s)
    return PointSet(space.n, closure_mask(space, s.bits))


def is_closed(space: FiniteSpace, s: PointSet) -> bool:
    space.check_set(s)
    return is_closed_mask(space, s.bits)


def is_path_connected(space: FiniteSpace, s: PointSet, empty: bool = True) -> bool:
    """Whether ``s`` is path-connected as a subspace.

    In a finite space a comparability ``p <= q`` carries the continuous path
    ``t -> q if t > 0 else p``, so path components are the connected
    components of the comparability graph.  ``empty`` is the value returned
    for the empty set.
    """
    space.check_set(s)
    return is_connected_mask(space, s.bits, empty)


def is_continuous(f: Sequence[int], src: FiniteSpace, dst: FiniteSpace) -> bool:
    """Whether the point map ``f`` is continuous, i.e. monotone for ``leq``."""
    if len(f) != src.n:
        raise InputError(f"map has {len(f)} values for a domain of {src.n} points")
    for v in f:
        dst.check_point(v)
    return all(
        (dst.up[f[x]] >> f[y]) & 1 for x in range(src.n) for y in bits_of(src.up[x])
    )


def subspace(space: FiniteSpace, s: PointSet) -> tuple[FiniteSpace, list[int]]:
    """Subspace on ``s``; returns the space and the ambient index of each point."""
    space.check_set(s)
    members = list(s)
    index = {p: i for i, p in enumerate(members)}
    up = tuple(
        mask_of(index[q] for q in bits_of(space.up[p] & s.bits)) for p in members
    )
    return FiniteSpace(len(members), up), members


def components(space: FiniteSpace, s: PointSet) -> list[PointSet]:
    """Path components of ``s`` ordered by their smallest point."""
    space.check_set(s)
    rest, out = s.bits, []
    while rest:
        start = (rest & -rest).bit_length() - 1
        comp = component_mask(space, rest, start)
        out.append(PointSet(space.n, comp))
        rest &= ~comp
    return out
