"""Hierarchical partitions of the unit box [0,1]^d with exact rational geometry.

Endpoints and measures are `fractions.Fraction`, so tiling and nesting
identities hold bit-exactly and the validation layer never needs a float
tolerance. All objects are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import DepthMismatch, GapOrOverlap, NotNested, ParseError

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    """Coerce ints, floats, strings, Fractions or (num, den) pairs to Fraction.

    Floats convert via their exact binary expansion, so round-tripping is
    lossless; 0.3 is *not* 3/10.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float, str)):
        return Fraction(x)
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    raise TypeError(f"cannot interpret {x!r} as a rational number")


@dataclass(frozen=True)
class Interval:
    """Subinterval of [0,1] with rational endpoints and positive length."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not (ZERO <= self.lo < self.hi <= ONE):
            raise ValueError(f"need 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlap(self, other: "Interval") -> Fraction:
        return max(ZERO, min(self.hi, other.hi) - max(self.lo, other.lo))


@dataclass(frozen=True)
class Block:
    """Axis-aligned box inside [0,1]^d, one Interval per dimension."""

    id: int
    sides: tuple

    @property
    def dimension(self) -> int:
        return len(self.sides)

    @property
    def measure(self) -> Fraction:
        m = ONE
        for s in self.sides:
            m *= s.length
        return m

    def contains(self, other: "Block") -> bool:
        return all(a.contains(b) for a, b in zip(self.sides, other.sides))

    def intersection_measure(self, other: "Block") -> Fraction:
        m = ONE
        for a, b in zip(self.sides, other.sides):
            ov = a.overlap(b)
            if ov == 0:
                return ZERO
            m *= ov
        return m


class HierarchicalPartition:
    """Nested block partition of [0,1]^d.

    `levels[j]` lists the block ids of level j in construction order,
    `children[id]` the ordered child ids of a non-leaf block. Level 0 is the
    single root block; every block is tiled exactly by its children.
    Instances are immutable; builders and `from_json` are the only intended
    constructors.
    """

    def __init__(self, dimension, levels, blocks, children):
        self.dimension = int(dimension)
        self.levels = [tuple(level) for level in levels]
        self.blocks = dict(blocks)
        self.children = {b: tuple(children.get(b, ())) for b in self.blocks}
        self.parent = {}
        for p, kids in self.children.items():
            for c in kids:
                if c in self.parent:
                    raise ValueError(f"block {c} has two parents")
                self.parent[c] = p
        self.level_of = {}
        for j, level in enumerate(self.levels):
            for b in level:
                self.level_of[b] = j
        # leaves under each block, bottom up
        self._leaves_under = {}
        for level in reversed(self.levels):
            for b in level:
                kids = self.children[b]
                if not kids:
                    self._leaves_under[b] = (b,)
                else:
                    acc = []
                    for c in kids:
                        acc.extend(self._leaves_under[c])
                    self._leaves_under[b] = tuple(acc)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root(self) -> int:
        return self.levels[0][0]

    @property
    def leaf_ids(self) -> tuple:
        return self.levels[-1]

    @property
    def measure(self) -> Fraction:
        return self.blocks[self.root].measure

    def leaves_under(self, block_id) -> tuple:
        return self._leaves_under[block_id]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, HierarchicalPartition):
            return NotImplemented
        return (self.dimension == other.dimension
                and self.levels == other.levels
                and self.children == other.children
                and self.blocks.keys() == other.blocks.keys()
                and all(self.blocks[b].sides == other.blocks[b].sides
                        for b in self.blocks))

    __hash__ = None

    def __repr__(self):
        sizes = "/".join(str(len(level)) for level in self.levels)
        return f"HierarchicalPartition(d={self.dimension}, depth={self.depth}, levels={sizes})"

    def to_json(self) -> dict:
        blocks = []
        for b in sorted(self.blocks):
            sides = [[s.lo.numerator, s.lo.denominator, s.hi.numerator, s.hi.denominator]
                     for s in self.blocks[b].sides]
            blocks.append({"id": b, "sides": sides})
        children = {str(p): list(kids) for p, kids in self.children.items() if kids}
        return {"dimension": self.dimension, "depth": self.depth,
                "blocks": blocks, "children": children}

    @classmethod
    def from_json(cls, obj) -> "HierarchicalPartition":
        try:
            dim = int(obj["dimension"])
            depth = int(obj["depth"])
            blocks = {}
            for rec in obj["blocks"]:
                bid = int(rec["id"])
                sides = tuple(Interval(Fraction(a, b), Fraction(c, d))
                              for a, b, c, d in rec["sides"])
                blocks[bid] = Block(bid, sides)
            children = {int(p): [int(c) for c in kids]
                        for p, kids in obj.get("children", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed partition JSON: {exc}") from exc
        if 0 not in blocks:
            raise ParseError("partition JSON must contain a root block with id 0")
        # levels by distance from root; ids are assigned level-by-level at
        # construction time, so ascending id order restores level order
        levels = [[0]]
        seen = {0}
        while True:
            nxt = sorted(c for p in levels[-1] for c in children.get(p, ()))
            if not nxt:
                break
            for c in nxt:
                if c not in blocks or c in seen:
                    raise ParseError(f"child id {c} missing or repeated")
                seen.add(c)
            levels.append(nxt)
        if len(seen) != len(blocks):
            raise ParseError("partition JSON contains unreachable blocks")
        if len(levels) - 1 != depth:
            raise ParseError(f"declared depth {depth} but found {len(levels) - 1} levels")
        part = cls(dim, levels, blocks, children)
        report = validate_partition(part)
        if not report.ok:
            raise report.first_error()
        return part


@dataclass
class PartitionReport:
    """Outcome of validate_partition; empty lists and zero residuals mean valid."""

    level_residuals: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)
    not_nested: list = field(default_factory=list)
    bad_parents: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (all(r == 0 for r in self.level_residuals)
                and not self.overlaps and not self.not_nested and not self.bad_parents)

    def first_error(self):
        if self.not_nested:
            return NotNested(f"blocks outside their parent: {self.not_nested}")
        return GapOrOverlap(
            f"tiling residuals {self.level_residuals}, overlaps {self.overlaps}, "
            f"bad parents {self.bad_parents}")


def validate_partition(p: HierarchicalPartition) -> PartitionReport:
    """Check root tiling and nesting of every level; failures go in the report."""
    report = PartitionReport()
    for level in p.levels:
        total = sum((p.blocks[b].measure for b in level), ZERO)
        report.level_residuals.append(total - ONE)
        for a, b in combinations(level, 2):
            if p.blocks[a].intersection_measure(p.blocks[b]) > 0:
                report.overlaps.append((a, b))
    for child, par in p.parent.items():
        if not p.blocks[par].contains(p.blocks[child]):
            report.not_nested.append(child)
    for par, kids in p.children.items():
        if not kids:
            continue
        diff = sum((p.blocks[c].measure for c in kids), ZERO) - p.blocks[par].measure
        if diff != 0:
            report.bad_parents.append((par, diff))
    return report


def make_dyadic_partition(dimension: int, depth: int) -> HierarchicalPartition:
    """Dyadic partition of [0,1]^dimension: each block splits into 2^d halves.

    Level j holds 2^(j*d) congruent blocks. Blocks within a level, and
    children within a parent, are enumerated with the first coordinate
    varying fastest.
    """
    if dimension < 1 or depth < 0:
        raise ValueError("need dimension >= 1 and depth >= 0")
    levels, blocks, children = [], {}, {}
    index_of = []  # per level: multi-index tuple -> block id
    next_id = 0
    for j in range(depth + 1):
        n = 2 ** j
        side = Fraction(1, n)
        level_ids = []
        idx_map = {}
        for flat in range(n ** dimension):
            k, r = [], flat
            for _ in range(dimension):
                k.append(r % n)
                r //= n
            sides = tuple(Interval(side * ki, side * (ki + 1)) for ki in k)
            blocks[next_id] = Block(next_id, sides)
            idx_map[tuple(k)] = next_id
            level_ids.append(next_id)
            next_id += 1
        levels.append(level_ids)
        index_of.append(idx_map)
        if j > 0:
            for pidx, pid in index_of[j - 1].items():
                kids = []
                for flat in range(2 ** dimension):
                    delta, r = [], flat
                    for _ in range(dimension):
                        delta.append(r % 2)
                        r //= 2
                    cidx = tuple(2 * pk + dk for pk, dk in zip(pidx, delta))
                    kids.append(idx_map[cidx])
                children[pid] = kids
    return HierarchicalPartition(dimension, levels, blocks, children)


def refine_interval_level(levels) -> HierarchicalPartition:
    """Validated 1-D partition from explicit per-level interval endpoint lists.

    Each level must tile [0,1] exactly (GapOrOverlap otherwise) and each
    interval must sit inside a single interval of the previous level
    (NotNested otherwise). Endpoints may be ints, floats, strings,
    Fractions or (num, den) pairs.
    """
    if not levels:
        raise GapOrOverlap("need at least the root level")
    norm = []
    for j, level in enumerate(levels):
        ivs = sorted((as_fraction(lo), as_fraction(hi)) for lo, hi in level)
        for lo, hi in ivs:
            if not lo < hi:
                raise GapOrOverlap(f"level {j}: empty interval [{lo}, {hi}]")
        if ivs[0][0] != 0 or ivs[-1][1] != 1:
            raise GapOrOverlap(f"level {j} does not span [0, 1]")
        for (_, h1), (l2, _) in zip(ivs, ivs[1:]):
            if h1 != l2:
                raise GapOrOverlap(f"level {j}: break at {h1} vs {l2}")
        norm.append(ivs)
    if len(norm[0]) != 1:
        raise GapOrOverlap("level 0 must be the single interval [0, 1]")

    levels_ids, blocks, children = [], {}, {}
    next_id = 0
    ids_prev = []
    for j, ivs in enumerate(norm):
        ids = []
        for lo, hi in ivs:
            blocks[next_id] = Block(next_id, (Interval(lo, hi),))
            ids.append(next_id)
            next_id += 1
        if j > 0:
            pi = 0
            for cid in ids:
                child = blocks[cid].sides[0]
                while pi < len(ids_prev) and blocks[ids_prev[pi]].sides[0].hi <= child.lo:
                    pi += 1
                if pi == len(ids_prev) or not blocks[ids_prev[pi]].sides[0].contains(child):
                    raise NotNested(
                        f"level {j}: [{child.lo}, {child.hi}] straddles level {j - 1}")
                children.setdefault(ids_prev[pi], []).append(cid)
        levels_ids.append(ids)
        ids_prev = ids
    return HierarchicalPartition(1, levels_ids, blocks, children)


def tensor_partitions(px: HierarchicalPartition, py: HierarchicalPartition) -> HierarchicalPartition:
    """Tensor two 1-D partitions of equal depth into a 2-D block partition.

    Level j is the full grid of x-by-y products; children of a product
    block are the products of the factors' children, x varying fastest.
    """
    if px.dimension != 1 or py.dimension != 1:
        raise ValueError("tensor_partitions expects two 1-D partitions")
    if px.depth != py.depth:
        raise DepthMismatch(f"depths differ: {px.depth} vs {py.depth}")
    levels, blocks, children = [], {}, {}
    pair_id = []  # per level: (x id, y id) -> product id
    next_id = 0
    for j in range(px.depth + 1):
        xs, ys = px.levels[j], py.levels[j]
        ids, idx = [], {}
        for yb in ys:
            for xb in xs:
                sides = (px.blocks[xb].sides[0], py.blocks[yb].sides[0])
                blocks[next_id] = Block(next_id, sides)
                idx[(xb, yb)] = next_id
                ids.append(next_id)
                next_id += 1
        levels.append(ids)
        pair_id.append(idx)
        if j > 0:
            for (xb, yb), pid in pair_id[j - 1].items():
                kids = []
                for cy in py.children[yb]:
                    for cx in px.children[xb]:
                        kids.append(idx[(cx, cy)])
                children[pid] = kids
    return HierarchicalPartition(2, levels, blocks, children)
