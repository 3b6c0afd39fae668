"""Digraph-to-unit-square embeddings and system restriction/pruning.

A coarse-grained chain turns into a hierarchical partition of [0,1]: each
node's interval is split among its children proportionally to their
degrees, children ordered by smallest original vertex. Two chains tensor
into a 2-D partition, each vertex lands on one finest-level block, and the
framelet system can then be restricted to the atoms that actually see a
vertex block and further thinned at the finest level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DepthMismatch, ParseError, UnknownVertex, ZeroDegreeCluster
from .framelets import FrameletSystem, PwcFunction, leaf_measures
from .graphs import Chain, Graph
from .hierarchy import HierarchicalPartition, refine_interval_level, tensor_partitions

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class IntervalEmbedding:
    """1-D partition of a chain plus, per level, the node -> block id map.

    node_blocks[j][k] is the interval block at partition level j carrying
    node k of the chain's graph at coarsening level j (level 0 = root).
    """

    partition: HierarchicalPartition
    node_blocks: tuple

    def leaf_block(self, vertex) -> int:
        return self.node_blocks[-1][vertex]


def chain_to_intervals(chain: Chain) -> IntervalEmbedding:
    """Degree-proportional interval embedding of a coarse-grained chain.

    Endpoints are exact rationals (float degrees convert via their binary
    expansion, integer degrees stay integers). A cluster whose children
    have zero total degree raises ZeroDegreeCluster.
    """
    J = chain.depth
    if chain.graphs[-1].n != 1:
        raise ValueError("chain must end in a single-node graph")
    node_iv = [[(Fraction(0), Fraction(1))]]
    for j in range(1, J + 1):
        fine = chain.graphs[J - j]
        coarse = chain.graphs[J - j + 1]
        pmap = chain.parents[J - j]
        members = chain.members(J - j)
        degs = [Fraction(float(d)) for d in fine.degrees()]
        intervals = [None] * fine.n
        for k in range(coarse.n):
            kids = sorted((u for u in range(fine.n) if pmap[u] == k),
                          key=lambda u: min(members[u]))
            total = sum((degs[u] for u in kids), Fraction(0))
            if total == 0:
                raise ZeroDegreeCluster(
                    f"children of node {k} at level {j - 1} have zero total degree")
            a, b = node_iv[j - 1][k]
            cur = a
            for u in kids:
                width = (b - a) * degs[u] / total
                intervals[u] = (cur, cur + width)
                cur += width
        node_iv.append(intervals)
    partition = refine_interval_level([sorted(level) for level in node_iv])
    node_blocks = []
    for j, level in enumerate(node_iv):
        lookup = {(blk.sides[0].lo, blk.sides[0].hi): bid
                  for bid in partition.levels[j]
                  for blk in [partition.blocks[bid]]}
        node_blocks.append(tuple(lookup[iv] for iv in level))
    return IntervalEmbedding(partition, tuple(node_blocks))


@dataclass(frozen=True, eq=False)
class VertexBlockMap:
    """Vertex -> finest-level block of the 2-D tensor partition."""

    partition: HierarchicalPartition
    labels: tuple
    blocks: tuple

    def block_of(self, label) -> int:
        try:
            return self.blocks[self.labels.index(label)]
        except ValueError:
            raise UnknownVertex(f"no vertex labelled {label!r}") from None

    def to_json(self) -> dict:
        return {"labels": list(self.labels),
                "blocks": {lab: b for lab, b in zip(self.labels, self.blocks)}}

    @classmethod
    def from_json(cls, partition, obj) -> "VertexBlockMap":
        try:
            labels = tuple(str(x) for x in obj["labels"])
            blocks = tuple(int(obj["blocks"][lab]) for lab in labels)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed vertex block map JSON: {exc}") from exc
        return cls(partition, labels, blocks)


def digraph_embedding(g: Graph, chain_x: Chain, chain_y: Chain) -> tuple:
    """Tensor the two chain embeddings and locate every vertex block.

    The chains must already be padded to a common depth and share the
    digraph's vertex set.
    """
    if chain_x.depth != chain_y.depth:
        raise DepthMismatch(
            f"chain depths differ: {chain_x.depth} vs {chain_y.depth}; pad first")
    if (chain_x.finest.labels != tuple(g.labels)
            or chain_y.finest.labels != tuple(g.labels)):
        raise ValueError("chains do not cover the digraph's vertex set")
    ex = chain_to_intervals(chain_x)
    ey = chain_to_intervals(chain_y)
    tensor = tensor_partitions(ex.partition, ey.partition)
    J = tensor.depth
    nx = len(ex.partition.levels[J])
    xpos = {bid: i for i, bid in enumerate(ex.partition.levels[J])}
    ypos = {bid: i for i, bid in enumerate(ey.partition.levels[J])}
    leaf_level = tensor.levels[J]
    blocks = []
    for v in range(g.n):
        kx = xpos[ex.leaf_block(v)]
        ky = ypos[ey.leaf_block(v)]
        blocks.append(leaf_level[ky * nx + kx])
    return tensor, VertexBlockMap(tensor, tuple(g.labels), tuple(blocks))


def signal_to_function(signal, vbm: VertexBlockMap) -> PwcFunction:
    """Embed vertex values as a piecewise-constant function on the square.

    `signal` is a mapping label -> value or a sequence in vertex order; it
    must cover every vertex and name no unknown ones.
    """
    if isinstance(signal, dict):
        unknown = set(signal) - set(vbm.labels)
        if unknown:
            raise UnknownVertex(f"unknown vertex labels: {sorted(unknown)}")
        missing = set(vbm.labels) - set(signal)
        if missing:
            raise UnknownVertex(f"signal misses vertices: {sorted(missing)}")
        values = [float(signal[lab]) for lab in vbm.labels]
    else:
        values = [float(x) for x in signal]
        if len(values) != len(vbm.labels):
            raise UnknownVertex(
                f"signal has {len(values)} entries for {len(vbm.labels)} vertices")
    return PwcFunction(vbm.partition, dict(zip(vbm.blocks, values)))


def function_to_signal(f: PwcFunction, vbm: VertexBlockMap) -> dict:
    """Read a function back at the vertex blocks, label -> value."""
    return {lab: f.values.get(b, 0.0) for lab, b in zip(vbm.labels, vbm.blocks)}


def _touches_vertices(partition, block_id, vertex_blocks) -> bool:
    blk = partition.blocks[block_id]
    return any(blk.intersection_measure(vb) > 0 for vb in vertex_blocks)


def restrict_system(system: FrameletSystem, vbm: VertexBlockMap) -> FrameletSystem:
    """Keep the scaling function and each atom whose support meets a vertex block.

    Support intersections are exact rational measures, no tolerance. The
    result is still a tight frame for the span of the vertex indicators,
    since every dropped atom is orthogonal to it.
    """
    part = system.partition
    vblocks = [part.blocks[b] for b in vbm.blocks]
    kept = [a for a in system.atoms
            if _touches_vertices(part, a.block1, vblocks)
            or _touches_vertices(part, a.block2, vblocks)]
    return system.subset(kept)


def prune_redundant(system: FrameletSystem, vbm: VertexBlockMap) -> tuple:
    """Thin a restricted system at its finest generator level.

    For each parent of finest-level atoms, keep the atoms whose two
    children both meet a vertex block, plus the pairings with the
    lowest-indexed ineffective child (one witness sibling), so a parent
    with a single effective child keeps exactly one atom. Coarser levels
    are left untouched. Returns the thinned system and a report with its
    frame bounds and rank on the span of the vertex indicators.
    """
    part = system.partition
    vblocks = [part.blocks[b] for b in vbm.blocks]
    finest = system.depth - 1
    kept = []
    effective_cache = {}

    def effective(block_id):
        if block_id not in effective_cache:
            effective_cache[block_id] = _touches_vertices(part, block_id, vblocks)
        return effective_cache[block_id]

    by_parent = {}
    for a in system.atoms:
        by_parent.setdefault((a.level, a.parent), []).append(a)
    for (level, parent), atoms in sorted(by_parent.items()):
        if level != finest:
            kept.extend(atoms)
            continue
        kids = part.children[parent]
        allowed = {pos for pos, cid in enumerate(kids, start=1) if effective(cid)}
        witness = next((pos for pos, cid in enumerate(kids, start=1)
                        if pos not in allowed), None)
        if witness is not None:
            allowed.add(witness)
        kept.extend(a for a in atoms if a.l1 in allowed and a.l2 in allowed)
    pruned = system.subset(kept)
    lo, hi, rank = vertex_span_bounds(pruned, vbm)
    report = {"frame_bounds": [lo, hi], "rank": rank,
              "counts": {"input": len(system), "pruned": len(pruned)}}
    return pruned, report


def vertex_span_bounds(system: FrameletSystem, vbm: VertexBlockMap) -> tuple:
    """Frame bounds and rank of a system on the span of the vertex indicators.

    The normalized vertex indicators are orthonormal (vertex blocks are
    disjoint), so the frame operator compresses to M^T M with
    M[h, v] = <h, indicator_v>/sqrt(measure_v).
    """
    part = system.partition
    mu = leaf_measures(part)
    leaf_pos = {b: i for i, b in enumerate(part.leaf_ids)}
    cols = [leaf_pos[b] for b in vbm.blocks]
    F = system.function_matrix()
    scale = np.sqrt(mu[cols])
    M = F[:, cols] * scale  # value at the block times sqrt(measure)
    ev = np.linalg.eigvalsh(M.T @ M)
    rank = int((ev > RANK_TOL * max(ev[-1], 1e-300)).sum())
    return float(ev[0]), float(ev[-1]), rank
