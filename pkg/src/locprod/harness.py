"""Exhaustive and sampled sweeps over all small finite product spaces.

Every labeled topology on ``n <= 4`` points is enumerated as a preorder.  A
sweep walks every pair ``(X, Y)`` and every subset ``C`` of ``X x Y``,
evaluates the three hypotheses and checks the conclusion.  Subsets are
visited in lexicographic order of their membership vectors; that order is
their *rank*.  Work is cut into blocks of consecutive ranks (a fixed prefix
of the membership vector) within one ``(X, Y)`` pair, and blocks are merged
back in order, so reports do not depend on the number of workers.
"""

from __future__ import annotations

import itertools
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .product import (
    HYPOTHESES,
    ProductSpace,
    SubsetC,
    TheoremViolation,
    evaluate_mask,
    mixed_pair_property,
    mixed_pairs_ok,
)
from .space import FiniteSpace, InputError, bits_of

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_POINTS = 4
EXHAUSTIVE_LIMIT = 3
BLOCK_BITS = 9


@dataclass(frozen=True)
class SweepConfig:
    nx: int
    ny: int
    require: frozenset[str] = frozenset(HYPOTHESES)
    mode: str = "verify"
    workers: int = 1
    seed: int | None = None
    samples: int = 1000
    limit: int = 10
    empty_connected: bool = True
    max_fence: int = 4

    def __post_init__(self) -> None:
        for name in ("nx", "ny"):
            val = getattr(self, name)
            if not 1 <= val <= MAX_POINTS:
                raise InputError(f"{name} must be between 1 and {MAX_POINTS}, got {val}")
        unknown = set(self.require) - set(HYPOTHESES)
        if unknown:
            raise InputError(f"unknown hypotheses: {', '.join(sorted(unknown))}")
        if self.mode not in ("verify", "search"):
            raise InputError(f"mode must be 'verify' or 'search', got {self.mode!r}")
        if self.workers < 1:
            raise InputError("workers must be at least 1")
        if self.sampling and self.seed is None:
            raise InputError("spaces with 4 points are only swept by sampling; give a seed")
        if self.seed is not None and not self.sampling:
            raise InputError("a seed only applies to sampled sweeps (nx or ny = 4)")
        if self.samples < 1 or self.limit < 0 or self.max_fence < 1:
            raise InputError("samples and max_fence must be positive, limit non-negative")

    @property
    def sampling(self) -> bool:
        return max(self.nx, self.ny) > EXHAUSTIVE_LIMIT

    @property
    def required(self) -> tuple[str, ...]:
        return tuple(h for h in HYPOTHESES if h in self.require)


@dataclass
class SweepReport:
    kind: str
    config: SweepConfig
    space_pairs: int = 0
    subsets_examined: int = 0
    hypothesis_satisfying: int = 0
    conclusion_holding: int = 0
    offenders_total: int = 0
    offenders: list[dict] = field(default_factory=list)
    fences_examined: int = 0
    fence_classes: int = 0
    duration_s: float = 0.0

    @property
    def violations(self) -> list[dict]:
        return self.offenders if self.config.mode == "verify" else []

    @property
    def counterexamples(self) -> list[dict]:
        return self.offenders if self.config.mode == "search" else []

    @property
    def status(self) -> str:
        cfg = self.config
        if cfg.mode == "verify":
            return "violation" if self.offenders_total else "ok"
        if self.offenders_total:
            return f"found {self.offenders_total} counterexample(s)"
        if cfg.sampling:
            return "sampled, none found (not exhaustive)"
        return "exhausted, none found at this scale"

    def to_dict(self, include_timing: bool = False) -> dict:
        cfg = self.config
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "mode": cfg.mode,
            "nx": cfg.nx,
            "ny": cfg.ny,
            "required_hypotheses": list(cfg.required),
            "empty_is_path_connected": cfg.empty_connected,
            "exhaustive": not cfg.sampling,
            "seed": cfg.seed,
            "samples": cfg.samples if cfg.sampling else None,
            "space_pairs": self.space_pairs,
            "subsets_examined": self.subsets_examined,
            "hypothesis_satisfying": self.hypothesis_satisfying,
            "conclusion_holding": self.conclusion_holding,
        }
        if self.kind == "fences":
            out["max_fence_length"] = cfg.max_fence
            out["fences_examined"] = self.fences_examined
            out["fence_classes"] = self.fence_classes
        out["status"] = self.status
        out["offenders_total"] = self.offenders_total
        key = "violations" if cfg.mode == "verify" else "counterexamples"
        out[key] = self.offenders
        if include_timing:
            out["duration_s"] = round(self.duration_s, 3)
        return out


# --- enumeration ----------------------------------------------------------


@lru_cache(maxsize=None)
def _preorders(n: int) -> tuple[FiniteSpace, ...]:
    offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for r in range(1 << len(offdiag)):
        up = [1 << x for x in range(n)]
        for k, (i, j) in enumerate(offdiag):
            if (r >> k) & 1:
                up[i] |= 1 << j
        if all(not (up[y] & ~up[x]) for x in range(n) for y in bits_of(up[x])):
            out.append(FiniteSpace(n, tuple(up)))
    return tuple(out)


def enumerate_preorders(n: int) -> list[FiniteSpace]:
    """All labeled preorders (= topologies) on ``n`` points, ``1 <= n <= 4``."""
    if not 1 <= n <= MAX_POINTS:
        raise InputError(f"can only enumerate spaces with 1..{MAX_POINTS} points, got {n}")
    return list(_preorders(n))


def canonical_form(space: FiniteSpace) -> tuple[int, ...]:
    """Smallest relabeling of ``space.up`` over all point permutations."""
    best = None
    for perm in itertools.permutations(range(space.n)):
        up = [0] * space.n
        for x in range(space.n):
            up[perm[x]] = sum(1 << perm[y] for y in bits_of(space.up[x]))
        cand = tuple(up)
        if best is None or cand < best:
            best = cand
    return best


def up_to_homeomorphism(spaces: list[FiniteSpace]) -> list[FiniteSpace]:
    """First representative of each homeomorphism class, in input order."""
    seen, out = set(), []
    for sp in spaces:
        key = canonical_form(sp)
        if key not in seen:
            seen.add(key)
            out.append(sp)
    return out


# --- ranks and blocks -----------------------------------------------------


def rank_to_mask(rank: int, size: int) -> int:
    """Subset whose membership vector, read as a binary numeral, is ``rank``."""
    mask = 0
    for i in range(size):
        if (rank >> (size - 1 - i)) & 1:
            mask |= 1 << i
    return mask


def mask_to_rank(mask: int, size: int) -> int:
    return rank_to_mask(mask, size)


@dataclass(frozen=True)
class Block:
    nx: int
    ny: int
    ix: int
    iy: int
    ranks: range | tuple[int, ...]


def make_blocks(cfg: SweepConfig) -> list[Block]:
    xs, ys = _preorders(cfg.nx), _preorders(cfg.ny)
    size = cfg.nx * cfg.ny
    if not cfg.sampling:
        step = 1 << min(size, BLOCK_BITS)
        return [
            Block(cfg.nx, cfg.ny, ix, iy, range(lo, lo + step))
            for ix in range(len(xs))
            for iy in range(len(ys))
            for lo in range(0, 1 << size, step)
        ]
    rng = random.Random(cfg.seed)
    picks = sorted(
        {
            (rng.randrange(len(xs)), rng.randrange(len(ys)), rng.randrange(1 << size))
            for _ in range(cfg.samples)
        }
    )
    blocks = []
    for (ix, iy), group in itertools.groupby(picks, key=lambda t: t[:2]):
        blocks.append(Block(cfg.nx, cfg.ny, ix, iy, tuple(r for _, _, r in group)))
    return blocks


@lru_cache(maxsize=4096)
def _product(nx: int, ny: int, ix: int, iy: int) -> ProductSpace:
    return ProductSpace(_preorders(nx)[ix], _preorders(ny)[iy])


@dataclass
class BlockResult:
    examined: int = 0
    satisfying: int = 0
    holding: int = 0
    offenders_total: int = 0
    offenders: list = field(default_factory=list)
    fences: int = 0
    fence_classes: int = 0


def _satisfies(flags: tuple[bool, bool, bool, bool], required: tuple[int, ...]) -> bool:
    return all(flags[k] for k in required)


def _required_indices(cfg: SweepConfig) -> tuple[int, ...]:
    return tuple(HYPOTHESES.index(h) for h in cfg.required)


def _sweep_block(args: tuple[Block, SweepConfig]) -> BlockResult:
    block, cfg = args
    ps = _product(block.nx, block.ny, block.ix, block.iy)
    size = block.nx * block.ny
    required = _required_indices(cfg)
    res = BlockResult()
    for rank in block.ranks:
        mask = rank_to_mask(rank, size)
        flags = evaluate_mask(ps, mask, cfg.empty_connected)
        res.examined += 1
        if not _satisfies(flags, required):
            continue
        res.satisfying += 1
        if flags[3]:
            res.holding += 1
        else:
            res.offenders_total += 1
            if len(res.offenders) < cfg.limit:
                res.offenders.append((rank, flags))
    return res


def fence_classes(ps: ProductSpace, mask: int, max_len: int):
    """Enumerate every fence in ``mask`` with at most ``max_len`` points.

    Whether a fence has all its mixed pairs in ``C`` depends only on its sets
    of x and y coordinates, so fences are grouped by ``(last point, xs, ys)``
    and length.  Yields ``(length, xs, ys, count, representative)`` where
    ``count`` is the exact number of fences in the group and
    ``representative`` is one of them (the first reached).
    """
    sp, ny = ps.space, ps.y.n
    adj = {p: (sp.up[p] | sp.down[p]) & mask for p in bits_of(mask)}
    states: dict = {}
    for p in bits_of(mask):
        a, b = divmod(p, ny)
        states[(p, 1 << a, 1 << b)] = [1, (p,)]
    for length in range(1, max_len + 1):
        nxt: dict = {}
        for (p, xs, ys), (count, rep) in states.items():
            yield length, xs, ys, count, rep
            if length == max_len:
                continue
            for q in bits_of(adj[p]):
                a, b = divmod(q, ny)
                key = (q, xs | (1 << a), ys | (1 << b))
                slot = nxt.get(key)
                if slot is None:
                    nxt[key] = [count, rep + (q,)]
                else:
                    slot[0] += count
        states = nxt


def _fence_block(args: tuple[Block, SweepConfig]) -> BlockResult:
    block, cfg = args
    ps = _product(block.nx, block.ny, block.ix, block.iy)
    size = block.nx * block.ny
    required = _required_indices(cfg)
    res = BlockResult()
    for rank in block.ranks:
        mask = rank_to_mask(rank, size)
        flags = evaluate_mask(ps, mask, cfg.empty_connected)
        res.examined += 1
        if not _satisfies(flags, required):
            continue
        res.satisfying += 1
        res.holding += flags[3]
        for _, xs, ys, count, rep in fence_classes(ps, mask, cfg.max_fence):
            res.fences += count
            res.fence_classes += 1
            if not mixed_pairs_ok(ps, mask, xs, ys):
                res.offenders_total += count
                if len(res.offenders) < cfg.limit:
                    res.offenders.append((rank, flags, rep))
    return res


def _map_blocks(fn, blocks: list[Block], cfg: SweepConfig) -> list[BlockResult]:
    tasks = [(b, cfg) for b in blocks]
    if cfg.workers == 1 or len(blocks) < 2:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (cfg.workers * 8))
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _describe(block: Block, rank: int, flags, fence=None) -> dict:
    from .formats import format_space, format_subset

    ps = _product(block.nx, block.ny, block.ix, block.iy)
    mask = rank_to_mask(rank, block.nx * block.ny)
    pairs = ps.pairs_of(mask)
    out = {
        "x_index": block.ix,
        "y_index": block.iy,
        "subset_rank": rank,
        "x_relation": [list(p) for p in ps.x.relation()],
        "y_relation": [list(p) for p in ps.y.relation()],
        "subset": [list(p) for p in pairs],
        "hypotheses": dict(zip(HYPOTHESES, flags[:3])),
        "exact": flags[3],
        "file": format_space("X", ps.x) + format_space("Y", ps.y) + format_subset("C", pairs),
    }
    if fence is not None:
        out["fence"] = [list(ps.pair(p)) for p in fence]
    return out


def _merge(kind: str, cfg: SweepConfig, blocks, results, started: float) -> SweepReport:
    rep = SweepReport(kind, cfg)
    rep.space_pairs = len({(b.ix, b.iy) for b in blocks})
    for block, res in zip(blocks, results):
        rep.subsets_examined += res.examined
        rep.hypothesis_satisfying += res.satisfying
        rep.conclusion_holding += res.holding
        rep.offenders_total += res.offenders_total
        rep.fences_examined += res.fences
        rep.fence_classes += res.fence_classes
        for item in res.offenders:
            if len(rep.offenders) < cfg.limit:
                rep.offenders.append(_describe(block, *item))
    rep.duration_s = time.perf_counter() - started
    return rep


def expected_subsets(cfg: SweepConfig) -> int:
    """Number of subsets an exhaustive sweep must visit."""
    size = cfg.nx * cfg.ny
    return len(_preorders(cfg.nx)) * len(_preorders(cfg.ny)) * (1 << size)


def run_sweep(cfg: SweepConfig) -> SweepReport:
    """Sweep every (or, at 4 points, a seeded sample of) ``(X, Y, C)``.

    In verify mode any subset that meets the required hypotheses but is not
    the product of its projections raises :class:`TheoremViolation` carrying
    the report.  In search mode those subsets are the counterexamples.
    """
    started = time.perf_counter()
    blocks = make_blocks(cfg)
    log.info("sweeping %d blocks with %d worker(s)", len(blocks), cfg.workers)
    results = _map_blocks(_sweep_block, blocks, cfg)
    report = _merge("sweep", cfg, blocks, results, started)
    if not cfg.sampling and report.subsets_examined != expected_subsets(cfg):
        raise RuntimeError("block partition did not cover the sweep exactly once")
    if cfg.mode == "verify" and report.offenders_total:
        raise TheoremViolation(
            f"{report.offenders_total} subset(s) meet the hypotheses but are not products",
            report,
        )
    return report


def fence_sweep(cfg: SweepConfig) -> SweepReport:
    """Check the mixed-pair property on every short fence of every good ``C``."""
    if max(cfg.nx, cfg.ny) > EXHAUSTIVE_LIMIT:
        raise InputError(f"fence sweeps need nx, ny <= {EXHAUSTIVE_LIMIT}")
    started = time.perf_counter()
    blocks = make_blocks(cfg)
    results = _map_blocks(_fence_block, blocks, cfg)
    report = _merge("fences", cfg, blocks, results, started)
    # Confirm reported offenders through the public operation.
    for item in report.offenders:
        ps = _product(cfg.nx, cfg.ny, item["x_index"], item["y_index"])
        c = SubsetC.of(ps, map(tuple, item["subset"]))
        assert not mixed_pair_property(c, [tuple(p) for p in item["fence"]])
    if cfg.mode == "verify" and report.offenders_total:
        raise TheoremViolation(
            f"{report.offenders_total} fence(s) have a mixed pair outside C", report
        )
    return report
